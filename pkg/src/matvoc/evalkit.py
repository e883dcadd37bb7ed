"""Evaluation metrics: boundary F1, vocabulary quality stats, histograms, diffs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import corpus as corpus_mod
from .detector import Scorer
from .errors import FormatError, MatvocError
from .tokenizer import encode_word
from .trainer import UNK_TOKEN, Vocabulary


@dataclass(frozen=True)
class SegmentationGold:
    """A word with its gold internal morph-boundary offsets."""

    word: str
    boundaries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.word:
            raise MatvocError("gold word must be non-empty")
        prev = 0
        for pos in self.boundaries:
            if not 0 < pos < len(self.word):
                raise MatvocError(
                    f"boundary {pos} outside word {self.word!r} of length {len(self.word)}"
                )
            if pos <= prev:
                raise MatvocError(f"boundaries must be strictly increasing: {self.boundaries}")
            prev = pos


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class VocabStats:
    word_initial_ratio: float
    material_token_ratio: float
    mean_token_length: float
    material_token_count: int


@dataclass(frozen=True)
class FrequencyHistogram:
    """Per-bin word counts, split into material and general words.

    ``bins`` holds the strictly increasing thresholds; bucket i covers
    [bins[i-1], bins[i]) with open ends below bins[0] and at/above bins[-1].
    """

    bins: tuple[float, ...]
    material: tuple[int, ...]
    general: tuple[int, ...]

    def rows(self) -> list[tuple[float, float, int, int]]:
        edges = (0.0,) + self.bins + (float("inf"),)
        return [
            (edges[i], edges[i + 1], self.material[i], self.general[i])
            for i in range(len(self.bins) + 1)
        ]


@dataclass(frozen=True)
class VocabDiff:
    only_in_a: tuple[str, ...]
    only_in_b: tuple[str, ...]
    shared: tuple[str, ...]
    material_only_in_a: int
    material_only_in_b: int
    material_shared: int


def load_gold(path: str | Path) -> list[SegmentationGold]:
    """Read gold segmentations from TSV rows ``word<TAB>seg|men|ted``."""
    gold: list[SegmentationGold] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(
                    f"{path}:{lineno}: expected 2 tab-separated fields, got {len(parts)}",
                    line_number=lineno,
                )
            word = corpus_mod.normalize(parts[0]).strip()
            pieces = [corpus_mod.normalize(p) for p in parts[1].split("|")]
            if "".join(pieces) != word:
                raise FormatError(
                    f"{path}:{lineno}: pieces {parts[1]!r} do not join to {word!r}",
                    line_number=lineno,
                )
            boundaries = []
            offset = 0
            for piece in pieces[:-1]:
                offset += len(piece)
                boundaries.append(offset)
            gold.append(SegmentationGold(word=word, boundaries=tuple(boundaries)))
    return gold


def predicted_boundaries(word: str, vocab: Vocabulary) -> set[int]:
    """Internal split positions implied by greedy encoding; empty for unknowns."""
    pieces = encode_word(word, vocab)
    if pieces == (UNK_TOKEN,):
        return set()
    out: set[int] = set()
    offset = 0
    for piece in pieces[:-1]:
        offset += len(vocab.strip(piece))
        out.add(offset)
    return out


def segmentation_f1(gold: Sequence[SegmentationGold], vocab: Vocabulary) -> PRF:
    """Micro-averaged boundary precision/recall/F1 over all gold words."""
    if not gold:
        raise MatvocError("segmentation_f1 requires a non-empty gold set")
    tp = 0
    pred_total = 0
    gold_total = 0
    for item in gold:
        predicted = predicted_boundaries(item.word, vocab)
        gold_set = set(item.boundaries)
        tp += len(predicted & gold_set)
        pred_total += len(predicted)
        gold_total += len(gold_set)
    if pred_total:
        precision = tp / pred_total
    else:
        precision = 1.0 if gold_total == 0 else 0.0
    if gold_total:
        recall = tp / gold_total
    else:
        recall = 1.0 if pred_total == 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PRF(precision=precision, recall=recall, f1=f1)


def vocab_stats(vocab: Vocabulary, scorer: Scorer) -> VocabStats:
    """Word-initial ratio, material token ratio and mean marker-stripped length.

    The reserved unknown token is excluded from every ratio.
    """
    tokens = [t for t in vocab.tokens if t != UNK_TOKEN]
    if not tokens:
        raise MatvocError("vocabulary has no countable tokens")
    marker = vocab.marker
    initial = sum(1 for t in tokens if not (marker and t.startswith(marker)))
    stripped = [vocab.strip(t) for t in tokens]
    material = sum(1 for s in stripped if scorer.score(s).y_hat > 0.0)
    return VocabStats(
        word_initial_ratio=initial / len(tokens),
        material_token_ratio=material / len(tokens),
        mean_token_length=sum(len(s) for s in stripped) / len(tokens),
        material_token_count=material,
    )


def frequency_histogram(
    table: corpus_mod.WordTable, scorer: Scorer, bins: Sequence[float]
) -> FrequencyHistogram:
    """Bin word frequencies separately for material and general words."""
    if not bins:
        raise MatvocError("frequency_histogram requires at least one bin threshold")
    thresholds = tuple(float(b) for b in bins)
    if any(b2 <= b1 for b1, b2 in zip(thresholds, thresholds[1:])):
        raise MatvocError(f"bins must be strictly increasing: {thresholds}")
    material = [0] * (len(thresholds) + 1)
    general = [0] * (len(thresholds) + 1)
    for word, freq in table.items():
        idx = len(thresholds)
        for i, bound in enumerate(thresholds):
            if freq < bound:
                idx = i
                break
        if scorer.score(word).y_hat > 0.0:
            material[idx] += 1
        else:
            general[idx] += 1
    return FrequencyHistogram(
        bins=thresholds, material=tuple(material), general=tuple(general)
    )


def vocab_diff(a: Vocabulary, b: Vocabulary, scorer: Scorer) -> VocabDiff:
    """Partition two vocabularies into exclusive and shared token sets."""
    set_a = set(a.tokens)
    set_b = set(b.tokens)
    only_a = tuple(sorted(set_a - set_b))
    only_b = tuple(sorted(set_b - set_a))
    shared = tuple(sorted(set_a & set_b))

    def count_material(tokens: Iterable[str], vocab: Vocabulary) -> int:
        return sum(1 for t in tokens if t != UNK_TOKEN and scorer.score(vocab.strip(t)).y_hat > 0.0)

    return VocabDiff(
        only_in_a=only_a,
        only_in_b=only_b,
        shared=shared,
        material_only_in_a=count_material(only_a, a),
        material_only_in_b=count_material(only_b, b),
        material_shared=count_material(shared, a),
    )
