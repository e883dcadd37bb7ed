"""Tests for normalization, pre-tokenization and word counting."""

import random
import unicodedata
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from matvoc import corpus
from matvoc.corpus import Document, WordTable, count_words, normalize, pretokenize
from matvoc.errors import DecodeError, MatvocError


class TestNormalize:
    def test_lowercases(self):
        assert normalize("Germanium") == "germanium"

    def test_formula_lowercased(self):
        assert normalize("PbI2") == "pbi2"

    def test_empty(self):
        assert normalize("") == ""

    def test_control_chars_become_spaces(self):
        assert normalize("a\x00b\x07c") == "a b c"
        assert normalize("tab\tsep") == "tab sep"  # tab is a control char

    def test_nfc_applied(self):
        decomposed = "café"
        assert normalize(decomposed) == unicodedata.normalize("NFC", decomposed)

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(once) == once


class TestPretokenize:
    def test_bracketed_formula(self):
        assert pretokenize("poly ( dimethylsiloxane )") == [
            "poly", "(", "dimethylsiloxane", ")",
        ]

    def test_simple_split(self):
        assert pretokenize("a b") == ["a", "b"]

    def test_punctuation_isolated(self):
        # Hand application of the isolation rule: '-' is its own word.
        assert pretokenize("x-ray") == ["x", "-", "ray"]

    def test_attached_brackets_split(self):
        assert pretokenize("(pbi2)") == ["(", "pbi2", ")"]

    @given(st.text(max_size=200))
    def test_no_empty_or_spacey_words(self, text):
        words = pretokenize(normalize(text))
        assert all(words)
        assert all(not any(ch.isspace() for ch in w) for w in words)

    @given(st.text(max_size=200))
    def test_punctuation_words_are_single_chars(self, text):
        for w in pretokenize(normalize(text)):
            if any(unicodedata.category(ch)[0] in ("P", "S") for ch in w):
                assert len(w) == 1


class TestCountWords:
    def test_two_docs(self):
        table = count_words([Document("1", "a a b"), Document("2", "b")])
        assert dict(table.entries) == {"a": 2.0, "b": 2.0}
        assert table.total_words == 4.0

    def test_empty_corpus(self):
        table = count_words([])
        assert len(table) == 0
        assert table.total_words == 0.0

    def test_three_docs_brute_recount(self):
        docs = [Document(str(i), f"germanium filler{i}") for i in range(3)]
        table = count_words(docs)
        # Independent recount: simple split over the lowercase text.
        brute = Counter()
        for d in docs:
            brute.update(d.text.lower().split())
        assert table["germanium"] == brute["germanium"] == 3

    @given(
        st.lists(
            st.text(alphabet="abc ().7", max_size=20), max_size=12
        ),
        st.randoms(use_true_random=False),
    )
    def test_order_invariant(self, texts, rng):
        docs = [Document(str(i), t) for i, t in enumerate(texts)]
        shuffled = docs[:]
        rng.shuffle(shuffled)
        assert count_words(docs) == count_words(shuffled)

    @given(st.lists(st.text(max_size=40), max_size=8))
    def test_total_equals_pretokenized_word_count(self, texts):
        docs = [Document(str(i), t) for i, t in enumerate(texts)]
        table = count_words(docs)
        expected = sum(len(pretokenize(normalize(t))) for t in texts)
        assert table.total_words == expected

    def test_parallel_matches_sequential(self):
        rng = random.Random(3)
        docs = [
            Document(str(i), " ".join(rng.choice("ab cd ef gh (x)").split()))
            for i in range(200)
        ]
        assert count_words(docs, workers=4) == count_words(iter(docs))


class TestWordTable:
    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(MatvocError):
            WordTable(entries={"a": 0.0}, total_words=0.0)

    def test_rejects_whitespace_keys(self):
        with pytest.raises(MatvocError):
            WordTable(entries={"a b": 1.0}, total_words=1.0)

    def test_rejects_inconsistent_total(self):
        with pytest.raises(MatvocError):
            WordTable(entries={"a": 1.0}, total_words=2.0)

    def test_from_counts_drops_zeros(self):
        table = WordTable.from_counts({"a": 2, "b": 0})
        assert "b" not in table
        assert table["a"] == 2.0


class TestCorpusFiles:
    def test_iter_documents(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("first doc\nsecond doc\n", encoding="utf-8")
        docs = list(corpus.iter_documents(path))
        assert [d.text for d in docs] == ["first doc", "second doc"]
        assert docs[0].id == "c.txt:1"

    def test_decode_error_names_doc_and_offset(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"fine line\nbad \xff\xfe line\n")
        with pytest.raises(DecodeError) as err:
            list(corpus.iter_documents(path))
        assert err.value.doc_id == "bad.txt:2"
        assert err.value.byte_offset == 4
        assert "bad.txt:2" in str(err.value)

    def test_count_corpus_files_merges(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("x y\n", encoding="utf-8")
        b.write_text("y z\n", encoding="utf-8")
        table = corpus.count_corpus_files([a, b])
        assert dict(table.entries) == {"x": 1.0, "y": 2.0, "z": 1.0}
