"""Acceptance suite: one test per release criterion.

Each test prints a PASS line on success (visible with -s); pytest -v shows
one PASSED/FAILED line per criterion either way.
"""

import random
import time

import pytest

from matvoc import cli, evalkit, trainer
from matvoc.corpus import WordTable
from matvoc.detector import MATERIAL_NAME, ConceptScore, LexiconEntry, LexiconScorer, TableScorer
from matvoc.tokenizer import decode, encode_word
from matvoc.trainer import TrainConfig, UNK_TOKEN, Vocabulary

from conftest import (
    FRAG_BUDGET,
    FRAG_MIN_FREQUENCY,
    build_fragmentation_fixture,
    zipf_words,
)
from wordpiece_oracle import train_wordpiece


def _passed(name):
    print(f"\nACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------
# 1. WordPiece oracle equivalence at lambda = 0

def _oracle_corpora():
    text = (
        "the melt was cooled and the sample was annealed "
        "the oxide film grew while the melt cooled slowly "
        "film and sample and oxide were measured the same way "
        "slow cooling of the melt gave a smooth oxide film"
    )
    literal = {}
    for word in text.split():
        literal[word] = literal.get(word, 0) + 1

    rng = random.Random(101)
    formulas = {}
    while len(formulas) < 300:
        n = rng.randint(2, 7)
        w = "".join(rng.choice("abco123") for _ in range(n))
        if w not in formulas:
            formulas[w] = float(rng.randint(1, 400))

    repeats = {}
    rng2 = random.Random(7)
    while len(repeats) < 80:
        n = rng2.randint(2, 10)
        w = "".join(rng2.choice("ab") for _ in range(n))
        if w not in repeats:
            repeats[w] = float(rng2.randint(1, 50))

    rng3 = random.Random(55)
    unicode_words = {}
    while len(unicode_words) < 150:
        n = rng3.randint(2, 8)
        w = "".join(rng3.choice("αβγδεéü") for _ in range(n))
        if w not in unicode_words:
            unicode_words[w] = float(rng3.randint(1, 200))

    return [
        ({w: float(f) for w, f in literal.items()}, 40),
        (zipf_words(random.Random(1), 600, "abcdef"), 200),
        (formulas, 150),
        (repeats, 50),
        (unicode_words, 80),
    ]


def test_wordpiece_oracle_equivalence(zero_scorer):
    started = time.time()
    for i, (words, extra) in enumerate(_oracle_corpora()):
        assert len(words) <= 1000
        table = WordTable.from_counts(words)
        budget = len(trainer.initial_tokens(table, TrainConfig())) + extra
        oracle_vocab, oracle_merges, oracle_segs = train_wordpiece(words, vocab_size=budget)
        vocab = trainer.train(table, zero_scorer, TrainConfig(vocab_size=budget, lam=0.0))
        assert vocab.tokens == oracle_vocab, f"corpus {i}: vocabulary mismatch"
        assert [(e.left, e.right, e.new_token) for e in vocab.merge_log] == oracle_merges, (
            f"corpus {i}: merge order mismatch"
        )
        assert vocab.segmentations == {w: tuple(p) for w, p in oracle_segs.items()}
    elapsed = time.time() - started
    assert elapsed < 10.0, f"oracle equivalence took {elapsed:.1f}s"
    _passed("wordpiece oracle equivalence (5 corpora, lambda=0)")


# ---------------------------------------------------------------------------
# 2. Odds-adjustment unit suite

def test_frequency_adjustment_unit_suite():
    def scorer_for(y):
        label = MATERIAL_NAME if y > 0 else None
        return TableScorer({"w": ConceptScore("w", y, label, source="table")})

    def adjusted(freq, y, lam):
        table = WordTable.from_counts({"w": freq})
        return trainer.adjust_frequencies(table, scorer_for(y), lam)["w"]

    assert abs(adjusted(5, 0.8, 1.0) - 9.0) < 1e-12
    assert abs(adjusted(2, 0.99, 1.0) - 101.0) < 1e-12
    for k in (1, 3, 17, 250):
        for lam in (0.0, 0.5, 1.0, 4.0):
            assert abs(adjusted(k, 0.0, lam) - k) < 1e-12
        for y in (0.1, 0.5, 0.9, 0.99):
            assert abs(adjusted(k, y, 0.0) - k) < 1e-12
    _passed("frequency adjustment unit suite (1e-12)")


# ---------------------------------------------------------------------------
# 3. Fragmentation rescue / 4. token quality, on the shared fixture

def _whole_term_ratio(vocab, terms):
    return sum(1 for t in terms if encode_word(t, vocab) == (t,)) / len(terms)


@pytest.fixture(scope="module")
def frag_run():
    table, terms = build_fragmentation_fixture()
    lexicon = [LexiconEntry(t, MATERIAL_NAME, 0.9) for t in terms]
    scorer = LexiconScorer(lexicon)
    vocabs = {
        lam: trainer.train(
            table,
            scorer,
            TrainConfig(vocab_size=FRAG_BUDGET, lam=lam, min_frequency=FRAG_MIN_FREQUENCY),
        )
        for lam in (0.0, 0.1, 1.0)
    }
    return table, terms, scorer, vocabs


def test_fragmentation_rescue(frag_run):
    started = time.time()
    _table, terms, _scorer, vocabs = frag_run
    assert len(terms) == 20
    baseline = _whole_term_ratio(vocabs[0.0], terms)
    boosted = _whole_term_ratio(vocabs[1.0], terms)
    assert baseline <= 0.20, f"baseline preserves {baseline:.0%}"
    assert boosted >= 0.90, f"boosted preserves only {boosted:.0%}"
    # the sweep locates the threshold: the boost must clear the frequency
    # floor, which lambda=0.1 (odds 0.9) does not
    assert _whole_term_ratio(vocabs[0.1], terms) <= 0.20
    assert time.time() - started < 30.0
    _passed(
        f"fragmentation rescue (baseline {baseline:.0%} <= 20%, boosted {boosted:.0%} >= 90%)"
    )


def test_token_quality_direction(frag_run):
    started = time.time()
    _table, _terms, scorer, vocabs = frag_run
    stats0 = evalkit.vocab_stats(vocabs[0.0], scorer)
    stats1 = evalkit.vocab_stats(vocabs[1.0], scorer)
    assert stats1.material_token_ratio > stats0.material_token_ratio
    assert stats1.mean_token_length >= stats0.mean_token_length
    assert time.time() - started < 30.0
    _passed(
        f"token quality direction (ratio {stats1.material_token_ratio:.4f} > "
        f"{stats0.material_token_ratio:.4f}, length {stats1.mean_token_length:.3f} >= "
        f"{stats0.mean_token_length:.3f})"
    )


# ---------------------------------------------------------------------------
# 5. Segmentation-F1 metric correctness on a hand-tallied gold set

def test_segmentation_f1_hand_computed(tmp_path):
    tokens = [UNK_TOKEN]
    tokens.extend("abcdefghijkl")
    tokens.extend("##" + c for c in "abcdefghijkl")
    tokens.extend(["abc", "ab", "gh", "de", "jkl", "##def", "##ijk", "##ef",
                   "##kl", "##cd", "##fg"])
    vocab = Vocabulary(tokens=tokens)

    gold_rows = [
        ("abcdef", "abc|def"),   # pred {3}    gold {3}    tp 1 pred 1 gold 1
        ("ghijkl", "gh|ij|kl"),  # pred {2,5}  gold {2,4}  tp 1 pred 2 gold 2
        ("abkl", "ab|kl"),       # pred {2}    gold {2}    tp 1 pred 1 gold 1
        ("deef", "de|ef"),       # pred {2}    gold {2}    tp 1 pred 1 gold 1
        ("jkl", "jkl"),          # pred {}     gold {}     tp 0 pred 0 gold 0
        ("abcd", "ab|cd"),       # pred {3}    gold {2}    tp 0 pred 1 gold 1
        ("ghcd", "gh|cd"),       # pred {2}    gold {2}    tp 1 pred 1 gold 1
        ("lfg", "lfg"),          # pred {1}    gold {}     tp 0 pred 1 gold 0
        ("dekl", "de|kl"),       # pred {2}    gold {2}    tp 1 pred 1 gold 1
        ("abab", "ab|ab"),       # pred {2,3}  gold {2}    tp 1 pred 2 gold 1
    ]
    gold_path = tmp_path / "gold.tsv"
    gold_path.write_text(
        "".join(f"{w}\t{seg}\n" for w, seg in gold_rows), encoding="utf-8"
    )
    gold = evalkit.load_gold(gold_path)
    assert len(gold) == 10

    # hand totals: tp 7, predicted 11, gold 9
    prf = evalkit.segmentation_f1(gold, vocab)
    assert abs(prf.precision - 7 / 11) < 1e-9
    assert abs(prf.recall - 7 / 9) < 1e-9
    assert abs(prf.f1 - 0.7) < 1e-9
    _passed("segmentation F1 on hand-tallied gold set (P 7/11, R 7/9, F1 0.7)")


# ---------------------------------------------------------------------------
# 6. Tokenizer round trip over a 10,000-word random corpus

def test_round_trip_10k_words():
    started = time.time()
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789"
    tokens = [UNK_TOKEN]
    tokens.extend(alphabet)
    tokens.extend("##" + c for c in alphabet)
    tokens.extend(["the", "ab", "##ing", "##er", "li", "##fe", "##po4"])
    vocab = Vocabulary(tokens=tokens)
    rng = random.Random(99)
    failures = 0
    for _ in range(10_000):
        word = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 14)))
        if decode(list(encode_word(word, vocab)), vocab) != word:
            failures += 1
    elapsed = time.time() - started
    assert failures == 0
    assert elapsed < 5.0, f"round trip took {elapsed:.1f}s"
    _passed("tokenizer round trip (10,000 words, zero failures)")


# ---------------------------------------------------------------------------
# 7. Merge-log replay reproduces final segmentations

def test_merge_log_replay(tmp_path, zero_scorer):
    fixtures = []
    for words, extra in _oracle_corpora()[:3]:
        table = WordTable.from_counts(words)
        budget = len(trainer.initial_tokens(table, TrainConfig())) + extra
        fixtures.append((table, zero_scorer, TrainConfig(vocab_size=budget, lam=0.0)))
    frag_table, frag_terms = build_fragmentation_fixture()
    frag_scorer = LexiconScorer(
        [LexiconEntry(t, MATERIAL_NAME, 0.9) for t in frag_terms]
    )
    fixtures.append(
        (
            frag_table,
            frag_scorer,
            TrainConfig(vocab_size=FRAG_BUDGET, lam=1.0, min_frequency=FRAG_MIN_FREQUENCY),
        )
    )
    for i, (table, scorer, cfg) in enumerate(fixtures):
        vocab = trainer.train(table, scorer, cfg)
        log_path = tmp_path / f"merges{i}.jsonl"
        trainer.save_merge_log(vocab.merge_log, log_path)
        reloaded = trainer.load_merge_log(log_path)
        replayed = trainer.replay_merges(
            trainer.initial_segmentations(table, cfg), reloaded
        )
        assert replayed == vocab.segmentations, f"fixture {i}: replay diverged"
    _passed("merge-log replay (all fixtures byte-identical)")


# ---------------------------------------------------------------------------
# 8. Byte-identical training runs, independent of --threads

def test_training_determinism(tmp_path):
    table, terms = build_fragmentation_fixture()
    corpus_path = tmp_path / "corpus.txt"
    rng = random.Random(0)
    tokens = []
    for word, freq in table.items():
        tokens.extend([word] * int(freq))
    rng.shuffle(tokens)
    corpus_path.write_text(
        "\n".join(" ".join(tokens[i : i + 20]) for i in range(0, len(tokens), 20)) + "\n",
        encoding="utf-8",
    )
    lexicon_path = tmp_path / "lexicon.tsv"
    lexicon_path.write_text(
        "".join(f"{t}\tmaterial_name\t0.9\n" for t in terms), encoding="utf-8"
    )
    outputs = []
    for run, threads in (("a", 1), ("b", 4), ("c", 1)):
        vocab_path = tmp_path / f"vocab_{run}.txt"
        log_path = tmp_path / f"merges_{run}.jsonl"
        code = cli.main(
            [
                "train",
                "--corpus", str(corpus_path),
                "--lexicon", str(lexicon_path),
                "--lambda", "1",
                "--vocab-size", str(FRAG_BUDGET),
                "--min-frequency", str(FRAG_MIN_FREQUENCY),
                "--threads", str(threads),
                "--out", str(vocab_path),
                "--merge-log", str(log_path),
            ]
        )
        assert code == 0
        outputs.append((vocab_path.read_bytes(), log_path.read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]
    _passed("training determinism (byte-identical across runs and --threads)")


# ---------------------------------------------------------------------------
# 9. Boosted frequency is pointwise non-decreasing in lambda

def test_lambda_monotonicity_100_instances():
    rng = random.Random(2024)
    grid = [0.0, 0.5, 1.0, 2.0, 3.0]
    for _ in range(100):
        words = {}
        for _ in range(rng.randint(1, 30)):
            w = "".join(rng.choice("abcdefgh") for _ in range(rng.randint(1, 8)))
            words[w] = float(rng.randint(1, 500))
        table = WordTable.from_counts(words)
        scores = {}
        for w in words:
            if rng.random() < 0.5:
                y = round(rng.uniform(0.01, 0.99), 6)
                scores[w] = ConceptScore(w, y, MATERIAL_NAME, source="table")
        scorer = TableScorer(scores)
        adjusted = [trainer.adjust_frequencies(table, scorer, lam) for lam in grid]
        for w in words:
            series = [a[w] for a in adjusted]
            assert all(x1 <= x2 for x1, x2 in zip(series, series[1:]))
            assert series[0] == words[w]
    _passed("lambda monotonicity (100 random instances over the sweep grid)")
