"""Corpus ingestion: normalization, pre-tokenization and word counting."""

from __future__ import annotations

import unicodedata
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import DecodeError, MatvocError

_REL_TOL = 1e-9


@dataclass(frozen=True)
class Document:
    """One unit of raw text with an opaque identifier."""

    id: str
    text: str


@dataclass(frozen=True)
class WordTable:
    """Word -> frequency map over a normalized corpus.

    Frequencies are positive reals (integer counts before any adjustment);
    ``total_words`` is their sum. Instances are treated as immutable and are
    safe to share across threads.
    """

    entries: Mapping[str, float] = field(default_factory=dict)
    total_words: float = 0.0

    def __post_init__(self) -> None:
        total = 0.0
        for word, freq in self.entries.items():
            if not word or any(ch.isspace() for ch in word):
                raise MatvocError(f"word table key contains whitespace or is empty: {word!r}")
            if freq <= 0:
                raise MatvocError(f"non-positive frequency for {word!r}: {freq}")
            total += freq
        if abs(total - self.total_words) > _REL_TOL * max(1.0, abs(total)):
            raise MatvocError(
                f"total_words {self.total_words} does not match entry sum {total}"
            )

    @classmethod
    def from_counts(cls, counts: Mapping[str, float]) -> "WordTable":
        entries = {w: float(f) for w, f in counts.items() if f > 0}
        return cls(entries=entries, total_words=float(sum(entries.values())))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __getitem__(self, word: str) -> float:
        return self.entries[word]

    def get(self, word: str, default: float = 0.0) -> float:
        return self.entries.get(word, default)

    def items(self):
        return self.entries.items()


def normalize(text: str) -> str:
    """Normalize raw text: NFC, lowercase, control characters become spaces.

    Idempotent: normalizing an already-normalized string is a no-op.
    """
    out = unicodedata.normalize("NFC", text)
    out = out.lower()
    out = unicodedata.normalize("NFC", out)
    return "".join(" " if unicodedata.category(ch) == "Cc" else ch for ch in out)


def pretokenize(text: str) -> list[str]:
    """Split normalized text into words.

    Unicode whitespace separates words and every punctuation or symbol
    character (categories P* and S*) is emitted as a standalone word, so
    formula brackets never glue onto their contents.
    """
    words: list[str] = []
    buf: list[str] = []
    for ch in text:
        if ch.isspace():
            if buf:
                words.append("".join(buf))
                buf.clear()
        elif unicodedata.category(ch)[0] in ("P", "S"):
            if buf:
                words.append("".join(buf))
                buf.clear()
            words.append(ch)
        else:
            buf.append(ch)
    if buf:
        words.append("".join(buf))
    return words


def _count_one(doc: Document) -> Counter:
    return Counter(pretokenize(normalize(doc.text)))


def count_words(docs: Iterable[Document], workers: int = 0) -> WordTable:
    """Count exact word occurrences across documents.

    The reduction is a plain sum of per-document counters, so the result is
    identical for any document order and any worker count.
    """
    total: Counter = Counter()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for partial in pool.map(_count_one, docs):
                total.update(partial)
    else:
        for doc in docs:
            total.update(_count_one(doc))
    return WordTable.from_counts(total)


def iter_documents(path: str | Path) -> Iterator[Document]:
    """Yield one document per line of a UTF-8 text file.

    Document ids are ``<basename>:<lineno>``. Invalid UTF-8 raises a
    DecodeError naming the offending document and byte offset.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip(b"\r\n")
            doc_id = f"{path.name}:{lineno}"
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DecodeError(
                    f"invalid UTF-8 in document {doc_id} at byte offset {exc.start}",
                    byte_offset=exc.start,
                    doc_id=doc_id,
                ) from exc
            yield Document(id=doc_id, text=text)


def count_corpus_files(paths: Iterable[str | Path], workers: int = 0) -> WordTable:
    """Count words over several one-document-per-line corpus files."""

    def docs() -> Iterator[Document]:
        for p in paths:
            yield from iter_documents(p)

    return count_words(docs(), workers=workers)
