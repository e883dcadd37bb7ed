"""Runtime encoder/decoder: greedy longest-match segmentation over a vocabulary."""

from __future__ import annotations

from dataclasses import dataclass

from . import corpus
from .errors import ContractError, MatvocError
from .trainer import DEFAULT_MAX_WORD_LENGTH, UNK_TOKEN, Vocabulary


@dataclass(frozen=True)
class Encoding:
    """Token sequence for a text plus per-word spans and the unknown count."""

    tokens: tuple[str, ...]
    word_spans: tuple[tuple[int, int], ...]
    unk_count: int


def encode_word(
    word: str, vocab: Vocabulary, max_word_length: int = DEFAULT_MAX_WORD_LENGTH
) -> tuple[str, ...]:
    """Segment one normalized word by repeatedly taking the longest vocabulary
    prefix (continuation-marked after the first piece).

    Words with no match at any position, and words over the length bound, map
    to the single unknown token.
    """
    if not word:
        raise ContractError("encode_word requires a non-empty word")
    if len(word) > max_word_length:
        return (UNK_TOKEN,)
    marker = vocab.marker
    pieces: list[str] = []
    start = 0
    n = len(word)
    while start < n:
        end = n
        found = None
        while start < end:
            piece = word[start:end]
            if start > 0:
                piece = marker + piece
            if piece in vocab:
                found = piece
                break
            end -= 1
        if found is None:
            return (UNK_TOKEN,)
        pieces.append(found)
        start = end
    return tuple(pieces)


def encode(
    text: str, vocab: Vocabulary, max_word_length: int = DEFAULT_MAX_WORD_LENGTH
) -> Encoding:
    """Normalize, pre-tokenize and encode a raw string."""
    words = corpus.pretokenize(corpus.normalize(text))
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    unk = 0
    for word in words:
        pieces = encode_word(word, vocab, max_word_length)
        spans.append((len(tokens), len(tokens) + len(pieces)))
        tokens.extend(pieces)
        unk += sum(1 for p in pieces if p == UNK_TOKEN)
    return Encoding(tokens=tuple(tokens), word_spans=tuple(spans), unk_count=unk)


def decode(
    tokens: tuple[str, ...] | list[str],
    vocab: Vocabulary,
    word_spans: tuple[tuple[int, int], ...] | None = None,
) -> str:
    """Join tokens back into space-separated words.

    With spans, each span becomes one word; without, a token starts a new word
    unless it carries the continuation marker.
    """
    for token in tokens:
        if token != UNK_TOKEN and token not in vocab:
            raise MatvocError(f"token not in vocabulary: {token!r}")
    if word_spans is not None:
        words = ["".join(vocab.strip(t) for t in tokens[s:e]) for s, e in word_spans]
        return " ".join(w for w in words if w)
    words = []
    for token in tokens:
        if vocab.marker and token.startswith(vocab.marker) and words:
            words[-1] += vocab.strip(token)
        else:
            words.append(vocab.strip(token))
    return " ".join(words)
