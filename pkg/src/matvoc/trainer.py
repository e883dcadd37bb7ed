"""Vocabulary training: odds-weighted frequency adjustment and the merge loop.

Training starts from the character inventory, boosts word frequencies by
lambda * odds(relevance), then repeatedly merges the adjacent token pair with
the highest likelihood score pair/(left*right) until the vocabulary budget is
reached. With lambda = 0 this is plain WordPiece training.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import WordTable
from .detector import Scorer
from .errors import ConfigError, ContractError, FormatError, MatvocError
from .fileio import atomic_write_text

UNK_TOKEN = "[UNK]"
DEFAULT_MARKER = "##"
DEFAULT_VOCAB_SIZE = 31_090
DEFAULT_LAMBDA = 1.0
DEFAULT_MIN_FREQUENCY = 2.0
DEFAULT_MAX_WORD_LENGTH = 100

_REL_TOL = 1e-9
_ZERO_TOL = 1e-9


def odds(p: float) -> float:
    """Odds p/(1-p); finite and monotone on [0, 1)."""
    if not 0.0 <= p < 1.0:
        raise ContractError(f"odds requires a probability in [0, 1): {p}")
    return p / (1.0 - p)


@dataclass(frozen=True)
class TrainConfig:
    vocab_size: int = DEFAULT_VOCAB_SIZE
    lam: float = DEFAULT_LAMBDA
    min_frequency: float = DEFAULT_MIN_FREQUENCY
    continuation_marker: str = DEFAULT_MARKER
    max_word_length: int = DEFAULT_MAX_WORD_LENGTH

    def __post_init__(self) -> None:
        if self.vocab_size < 1:
            raise ConfigError(f"vocab_size must be positive: {self.vocab_size}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be non-negative: {self.lam}")
        if self.min_frequency < 0:
            raise ConfigError(f"min_frequency must be non-negative: {self.min_frequency}")
        if self.max_word_length < 1:
            raise ConfigError(f"max_word_length must be positive: {self.max_word_length}")


@dataclass(frozen=True)
class MergeEvent:
    """One merge-loop iteration: the chosen pair, its score and the new token."""

    left: str
    right: str
    score: float
    new_token: str
    iteration: int


class Vocabulary:
    """Ordered token list with the merge history that produced it.

    ``tokens`` starts with the unknown token and the character inventory,
    followed by merged tokens in merge order. ``segmentations`` holds the
    final training-state segmentation of every merged corpus word, which is
    what merge-log replay must reproduce.
    """

    def __init__(
        self,
        tokens: Sequence[str],
        merge_log: Sequence[MergeEvent] = (),
        marker: str = DEFAULT_MARKER,
        segmentations: Mapping[str, tuple[str, ...]] | None = None,
    ):
        self.tokens: list[str] = list(tokens)
        self.token_index: dict[str, int] = {}
        for i, tok in enumerate(self.tokens):
            if tok in self.token_index:
                raise MatvocError(f"duplicate token in vocabulary: {tok!r}")
            self.token_index[tok] = i
        self.merge_log: list[MergeEvent] = list(merge_log)
        self.marker = marker
        self.segmentations: dict[str, tuple[str, ...]] = dict(segmentations or {})

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.token_index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def strip(self, token: str) -> str:
        if self.marker and token.startswith(self.marker):
            return token[len(self.marker):]
        return token


def adjust_frequencies(table: WordTable, scorer: Scorer, lam: float) -> WordTable:
    """Boost each word's frequency by lam * odds(y_hat).

    Words the scorer rejects (y_hat 0) keep their original frequency, as does
    everything when lam is 0.
    """
    if lam < 0:
        raise ConfigError(f"lambda must be non-negative: {lam}")
    entries: dict[str, float] = {}
    for word, freq in table.items():
        y_hat = scorer.score(word).y_hat
        if y_hat >= 1.0:
            raise ContractError(f"scorer returned y_hat >= 1 for {word!r}: {y_hat}")
        entries[word] = freq + lam * odds(y_hat)
    return WordTable.from_counts(entries)


def char_pieces(word: str, marker: str = DEFAULT_MARKER) -> tuple[str, ...]:
    """Initial segmentation: first character bare, the rest continuation-marked."""
    return tuple(ch if i == 0 else marker + ch for i, ch in enumerate(word))


def initial_tokens(table: WordTable, config: TrainConfig) -> list[str]:
    """Unknown token, then the sorted character inventory and its marked variants."""
    chars = sorted({ch for word in table.entries for ch in word})
    out = [UNK_TOKEN]
    out.extend(chars)
    out.extend(config.continuation_marker + ch for ch in chars)
    return list(dict.fromkeys(out))


def initial_segmentations(table: WordTable, config: TrainConfig) -> dict[str, tuple[str, ...]]:
    """Character segmentation of every word short enough to take part in merging."""
    marker = config.continuation_marker
    return {
        word: char_pieces(word, marker)
        for word in table.entries
        if len(word) <= config.max_word_length
    }


def _validate_segmentation(word: str, pieces: Sequence[str], marker: str) -> None:
    if not pieces:
        raise ContractError(f"empty segmentation for {word!r}")
    joined = pieces[0] + "".join(
        p[len(marker):] if marker and p.startswith(marker) else p for p in pieces[1:]
    )
    if joined != word:
        raise ContractError(f"segmentation {pieces!r} does not concatenate to {word!r}")


def pair_scores(
    word_table: WordTable,
    segmentations: Mapping[str, Sequence[str]],
    min_frequency: float = 0.0,
    marker: str = DEFAULT_MARKER,
) -> dict[tuple[str, str], float]:
    """Likelihood score pair_count/(count(left)*count(right)) for each adjacent pair.

    Counts are weighted by the (adjusted) word frequencies; pairs whose
    weighted count falls below min_frequency are excluded.
    """
    pair_count: dict[tuple[str, str], float] = {}
    token_count: dict[str, float] = {}
    for word, pieces in segmentations.items():
        _validate_segmentation(word, pieces, marker)
        freq = word_table[word]
        for piece in pieces:
            token_count[piece] = token_count.get(piece, 0.0) + freq
        for left, right in zip(pieces, pieces[1:]):
            pair_count[(left, right)] = pair_count.get((left, right), 0.0) + freq
    return {
        pair: count / (token_count[pair[0]] * token_count[pair[1]])
        for pair, count in pair_count.items()
        if count >= min_frequency * (1.0 - _REL_TOL)
    }


def merge_pieces(
    pieces: Sequence[str], pair: tuple[str, str], new_token: str
) -> tuple[str, ...]:
    """Replace every non-overlapping left-to-right occurrence of pair."""
    out: list[str] = []
    i = 0
    n = len(pieces)
    while i < n:
        if i + 1 < n and pieces[i] == pair[0] and pieces[i + 1] == pair[1]:
            out.append(new_token)
            i += 2
        else:
            out.append(pieces[i])
            i += 1
    return tuple(out)


class _MergeState:
    """Incremental pair/token statistics over the evolving segmentations."""

    def __init__(self, freq: Mapping[str, float], segs: dict[str, tuple[str, ...]]):
        self.freq = dict(freq)
        self.segs = segs
        self.pair_count: dict[tuple[str, str], float] = {}
        self.token_count: dict[str, float] = {}
        self.pair_words: dict[tuple[str, str], set[str]] = {}
        for word, pieces in segs.items():
            self._add_word(word, pieces)

    def _add_word(self, word: str, pieces: tuple[str, ...]) -> None:
        f = self.freq[word]
        for piece in pieces:
            self.token_count[piece] = self.token_count.get(piece, 0.0) + f
        for pair in zip(pieces, pieces[1:]):
            self.pair_count[pair] = self.pair_count.get(pair, 0.0) + f
            self.pair_words.setdefault(pair, set()).add(word)

    def _remove_word(self, word: str, pieces: tuple[str, ...]) -> None:
        f = self.freq[word]
        for piece in pieces:
            remaining = self.token_count.get(piece, 0.0) - f
            if remaining < _ZERO_TOL:
                self.token_count.pop(piece, None)
            else:
                self.token_count[piece] = remaining
        pairs = list(zip(pieces, pieces[1:]))
        for pair in pairs:
            remaining = self.pair_count.get(pair, 0.0) - f
            if remaining < _ZERO_TOL:
                self.pair_count.pop(pair, None)
            else:
                self.pair_count[pair] = remaining
        # One membership update per distinct pair, not per occurrence.
        for pair in set(pairs):
            words = self.pair_words.get(pair)
            if words is not None:
                words.discard(word)
                if not words:
                    del self.pair_words[pair]
                    self.pair_count.pop(pair, None)

    def apply_merge(self, pair: tuple[str, str], new_token: str) -> None:
        affected = list(self.pair_words.get(pair, ()))
        for word in affected:
            old = self.segs[word]
            self._remove_word(word, old)
            new = merge_pieces(old, pair, new_token)
            self.segs[word] = new
            self._add_word(word, new)


def _best_pair(
    state: _MergeState,
    token_index: Mapping[str, int],
    min_frequency: float,
    marker: str,
) -> tuple[tuple[str, str], float] | None:
    """Argmax pair by score, ties broken by higher count then lexicographic pair.

    Pairs whose merged form already exists in the vocabulary are not
    candidates; each iteration must add exactly one new token.
    """
    threshold = min_frequency * (1.0 - _REL_TOL)
    best: tuple[str, str] | None = None
    best_score = 0.0
    best_count = 0.0
    for pair in state.pair_words:
        count = state.pair_count.get(pair, 0.0)
        if count < threshold:
            continue
        left, right = pair
        merged = left + (right[len(marker):] if marker and right.startswith(marker) else right)
        if merged in token_index:
            continue
        score = count / (state.token_count[left] * state.token_count[right])
        if best is None:
            better = True
        elif score != best_score:
            better = score > best_score
        elif count != best_count:
            better = count > best_count
        else:
            better = (left, right) < best
        if better:
            best = pair
            best_score = score
            best_count = count
    if best is None:
        return None
    return best, best_score


def train(corpus_table: WordTable, scorer: Scorer, config: TrainConfig) -> Vocabulary:
    """Run the full merge loop over odds-adjusted frequencies.

    Deterministic for fixed inputs: the argmax over pair scores has a total
    tie-breaking order, so the merge sequence does not depend on iteration
    order or thread count.
    """
    if len(corpus_table) == 0:
        raise MatvocError("cannot train on an empty word table")
    marker = config.continuation_marker
    adjusted = adjust_frequencies(corpus_table, scorer, config.lam)
    tokens = initial_tokens(corpus_table, config)
    if config.vocab_size < len(tokens):
        raise ConfigError(
            f"vocab_size {config.vocab_size} is smaller than the character "
            f"inventory of {len(tokens)} tokens"
        )
    token_index = {tok: i for i, tok in enumerate(tokens)}
    segs = initial_segmentations(corpus_table, config)
    state = _MergeState({w: adjusted[w] for w in segs}, segs)

    merge_log: list[MergeEvent] = []
    while len(tokens) < config.vocab_size:
        found = _best_pair(state, token_index, config.min_frequency, marker)
        if found is None:
            break
        (left, right), score = found
        new_token = left + (right[len(marker):] if marker and right.startswith(marker) else right)
        merge_log.append(
            MergeEvent(
                left=left,
                right=right,
                score=score,
                new_token=new_token,
                iteration=len(merge_log) + 1,
            )
        )
        token_index[new_token] = len(tokens)
        tokens.append(new_token)
        state.apply_merge((left, right), new_token)

    return Vocabulary(
        tokens=tokens, merge_log=merge_log, marker=marker, segmentations=state.segs
    )


def lambda_sweep(
    corpus_table: WordTable,
    scorer: Scorer,
    lams: Iterable[float],
    config: TrainConfig | None = None,
) -> list[tuple[float, Vocabulary]]:
    """Train one vocabulary per lambda value, reusing the same word table."""
    base = config or TrainConfig()
    out = []
    for lam in lams:
        if lam < 0:
            raise ConfigError(f"lambda must be non-negative: {lam}")
        cfg = TrainConfig(
            vocab_size=base.vocab_size,
            lam=lam,
            min_frequency=base.min_frequency,
            continuation_marker=base.continuation_marker,
            max_word_length=base.max_word_length,
        )
        out.append((lam, train(corpus_table, scorer, cfg)))
    return out


def replay_merges(
    segmentations: Mapping[str, Sequence[str]], merge_log: Sequence[MergeEvent]
) -> dict[str, tuple[str, ...]]:
    """Apply a merge log to initial segmentations, reproducing the final state."""
    segs = {w: tuple(p) for w, p in segmentations.items()}
    for event in merge_log:
        pair = (event.left, event.right)
        for word, pieces in segs.items():
            for left, right in zip(pieces, pieces[1:]):
                if (left, right) == pair:
                    segs[word] = merge_pieces(pieces, pair, event.new_token)
                    break
    return segs


def save_vocab(vocab: Vocabulary, path: str | Path) -> None:
    """Write the vocabulary, one token per line, in vocabulary order."""
    atomic_write_text(path, "".join(tok + "\n" for tok in vocab.tokens))


def load_vocab(path: str | Path, marker: str = DEFAULT_MARKER) -> Vocabulary:
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tokens.append(line.rstrip("\n"))
    if tokens and tokens[-1] == "":
        tokens.pop()
    if not tokens:
        raise FormatError(f"vocabulary file {path} is empty")
    return Vocabulary(tokens=tokens, marker=marker)


def save_merge_log(merge_log: Sequence[MergeEvent], path: str | Path) -> None:
    """Write the merge history as JSON lines."""
    lines = []
    for event in merge_log:
        lines.append(
            json.dumps(
                {
                    "iteration": event.iteration,
                    "left": event.left,
                    "right": event.right,
                    "new_token": event.new_token,
                    "score": event.score,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def load_merge_log(path: str | Path) -> list[MergeEvent]:
    events: list[MergeEvent] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                events.append(
                    MergeEvent(
                        left=obj["left"],
                        right=obj["right"],
                        score=float(obj["score"]),
                        new_token=obj["new_token"],
                        iteration=int(obj["iteration"]),
                    )
                )
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise FormatError(
                    f"{path}:{lineno}: bad merge-log line: {exc}", line_number=lineno
                ) from None
    return events
