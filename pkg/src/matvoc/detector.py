"""Material-concept relevance scoring.

A scorer maps a normalized word to a relevance probability in [0, 0.99]
together with the label that produced it. The reference implementation is
lexicon-driven; precomputed score tables and a fixed-weight mode cover the
cases where relevance comes from an external tool.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from . import corpus
from .errors import ContractError, FormatError, MatvocError

logger = logging.getLogger(__name__)

MATERIAL_NAME = "material_name"
MATERIAL_FORMULA = "material_formula"
OTHER = "other"
MATERIAL_LABELS = (MATERIAL_NAME, MATERIAL_FORMULA)
ALL_LABELS = (MATERIAL_NAME, MATERIAL_FORMULA, OTHER)

# Relevance probabilities are capped below 1 so the odds transform stays finite.
Y_HAT_CEILING = 0.99

DEFAULT_AUGMENT_CAP = 4

_MARKER = "##"

# Lowercased periodic-table symbols, two-letter symbols first so greedy
# segmentation prefers "cl" over "c" + "l".
_ELEMENT_SYMBOLS = sorted(
    {
        "h", "he", "li", "be", "b", "c", "n", "o", "f", "ne", "na", "mg", "al", "si",
        "p", "s", "cl", "ar", "k", "ca", "sc", "ti", "v", "cr", "mn", "fe", "co",
        "ni", "cu", "zn", "ga", "ge", "as", "se", "br", "kr", "rb", "sr", "y", "zr",
        "nb", "mo", "tc", "ru", "rh", "pd", "ag", "cd", "in", "sn", "sb", "te", "i",
        "xe", "cs", "ba", "la", "ce", "pr", "nd", "pm", "sm", "eu", "gd", "tb", "dy",
        "ho", "er", "tm", "yb", "lu", "hf", "ta", "w", "re", "os", "ir", "pt", "au",
        "hg", "tl", "pb", "bi", "po", "at", "rn", "fr", "ra", "ac", "th", "pa", "u",
        "np", "pu", "am", "cm", "bk", "cf", "es", "fm", "md", "no", "lr",
    },
    key=len,
    reverse=True,
)

_SPECIAL_SYMBOLS = "*&%$#"


@dataclass(frozen=True)
class LexiconEntry:
    """One gazetteer surface with its label and relevance weight."""

    surface: str
    label: str
    weight: float

    def __post_init__(self) -> None:
        if not self.surface:
            raise MatvocError("lexicon surface must be non-empty")
        if self.label not in MATERIAL_LABELS:
            raise MatvocError(f"unknown lexicon label: {self.label!r}")
        if not 0.0 < self.weight < 1.0:
            raise MatvocError(f"lexicon weight must be in (0, 1): {self.weight}")


@dataclass(frozen=True)
class ConceptScore:
    """Relevance verdict for one word.

    ``y_hat`` is 0 with no label when the word is not a material concept;
    otherwise it carries the winning material label and a probability capped
    at Y_HAT_CEILING.
    """

    word: str
    y_hat: float
    label: str | None = None
    source: str = "lexicon"

    def __post_init__(self) -> None:
        if not 0.0 <= self.y_hat <= Y_HAT_CEILING:
            raise MatvocError(f"y_hat out of range [0, {Y_HAT_CEILING}]: {self.y_hat}")
        if (self.label is not None) != (self.y_hat > 0.0):
            raise MatvocError("label must be present exactly when y_hat > 0")
        if self.label is not None and self.label not in MATERIAL_LABELS:
            raise MatvocError(f"unknown score label: {self.label!r}")


@dataclass(frozen=True)
class LabelDistribution:
    """Per-token label probabilities over (material_name, material_formula, other)."""

    tokens: tuple[str, ...]
    probs: tuple[Mapping[str, float], ...]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.probs):
            raise MatvocError("tokens and probability rows must align")
        for row in self.probs:
            total = sum(row.get(label, 0.0) for label in ALL_LABELS)
            if abs(total - 1.0) > 1e-9:
                raise MatvocError(f"token distribution does not sum to 1: {dict(row)}")

    def mean(self) -> dict[str, float]:
        """Arithmetic mean of each label's probability over the tokens."""
        n = len(self.probs)
        return {
            label: sum(row.get(label, 0.0) for row in self.probs) / n
            for label in ALL_LABELS
        }


class Scorer(Protocol):
    def score(self, word: str) -> ConceptScore: ...


def load_lexicon(path: str | Path) -> set[LexiconEntry]:
    """Load a TSV lexicon (surface, label, weight) and normalize its surfaces.

    Duplicate surfaces keep the entry with the highest weight. Lines starting
    with ``#`` are comments.
    """
    best: dict[str, LexiconEntry] = {}
    loaded = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}",
                    line_number=lineno,
                )
            surface_raw, label, weight_raw = parts
            try:
                weight = float(weight_raw)
            except ValueError:
                raise FormatError(
                    f"{path}:{lineno}: weight is not a number: {weight_raw!r}",
                    line_number=lineno,
                ) from None
            surface = corpus.normalize(surface_raw).strip()
            try:
                entry = LexiconEntry(surface=surface, label=label, weight=weight)
            except MatvocError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}", line_number=lineno) from None
            loaded += 1
            kept = best.get(surface)
            if kept is None or entry.weight > kept.weight:
                best[surface] = entry
    logger.info("lexicon %s: %d rows loaded, %d surfaces after merging", path, loaded, len(best))
    return set(best.values())


def _name_variants(surface: str, rng: random.Random) -> list[str]:
    """Noise variants for material names: case errors (normalized away),
    digit misplacement/duplication, element reordering, symbol insertion."""
    variants: list[str] = []

    # Case error at a random alphabetic position; normalization folds it back.
    alpha_positions = [i for i, ch in enumerate(surface) if ch.isalpha()]
    if alpha_positions:
        i = rng.choice(alpha_positions)
        noisy = surface[:i] + surface[i].swapcase() + surface[i + 1 :]
        variants.append(corpus.normalize(noisy))

    digit_positions = [i for i, ch in enumerate(surface) if ch.isdigit()]
    if digit_positions:
        i = rng.choice(digit_positions)
        variants.append(surface[:i] + surface[i] + surface[i:])  # duplicated digit
        j = rng.randrange(len(surface) + 1)
        moved = surface[:i] + surface[i + 1 :]
        k = min(j, len(moved))
        variants.append(moved[:k] + surface[i] + moved[k:])  # misplaced digit

    segments = _element_segments(surface)
    if len(segments) >= 2:
        i = rng.randrange(len(segments) - 1)
        swapped = segments[:i] + [segments[i + 1], segments[i]] + segments[i + 2 :]
        variants.append("".join(swapped))

    i = rng.randrange(len(surface) + 1)
    symbol = rng.choice(_SPECIAL_SYMBOLS)
    variants.append(surface[:i] + symbol + surface[i:])

    return variants


def _element_segments(surface: str) -> list[str]:
    """Split a surface into element-like alpha segments plus digit/other runs."""
    segments: list[str] = []
    i = 0
    while i < len(surface):
        ch = surface[i]
        if ch.isalpha():
            for sym in _ELEMENT_SYMBOLS:
                if surface.startswith(sym, i):
                    segments.append(sym)
                    i += len(sym)
                    break
            else:
                segments.append(ch)
                i += 1
        else:
            j = i
            while j < len(surface) and not surface[j].isalpha():
                j += 1
            segments.append(surface[i:j])
            i = j
    return segments


def _formula_variants(surface: str) -> list[str]:
    """Noise variants for formulas: spaced brackets, digit placeholders, combos."""
    variants: list[str] = []

    spaced_digits = re.sub(r"(\d+)", r" \1", surface).strip()
    variants.append(spaced_digits)
    variants.append(f"( {surface} )")
    bracket_spaced = re.sub(r"([()\[\]])", r" \1 ", surface)
    variants.append(" ".join(bracket_spaced.split()))
    placeholder = re.sub(r"\d", "x", surface)
    variants.append(placeholder)
    variants.append(re.sub(r"\d", "x", spaced_digits))  # combined pattern

    return variants


def augment_term(
    entry: LexiconEntry, seed: int, cap: int = DEFAULT_AUGMENT_CAP
) -> set[LexiconEntry]:
    """Expand one lexicon entry with noise-shaped variants.

    Deterministic for a fixed seed. The original entry is always included and
    the result holds at most ``cap`` entries.
    """
    if cap < 1:
        raise MatvocError(f"augmentation cap must be >= 1: {cap}")
    rng = random.Random(seed)
    surfaces = [entry.surface]
    if entry.label == MATERIAL_NAME:
        raw = _name_variants(entry.surface, rng)
    else:
        raw = _formula_variants(entry.surface)
    for variant in raw:
        variant = variant.strip()
        if variant and variant not in surfaces:
            surfaces.append(variant)
        if len(surfaces) >= cap:
            break
    return {
        LexiconEntry(surface=s, label=entry.label, weight=entry.weight)
        for s in surfaces[:cap]
    }


def augment_lexicon(
    entries: Iterable[LexiconEntry], seed: int, cap: int = DEFAULT_AUGMENT_CAP
) -> set[LexiconEntry]:
    """Apply augment_term over a whole lexicon and re-merge duplicates."""
    best: dict[str, LexiconEntry] = {}
    for entry in sorted(entries, key=lambda e: e.surface):
        for variant in augment_term(entry, seed, cap):
            kept = best.get(variant.surface)
            if kept is None or variant.weight > kept.weight:
                best[variant.surface] = variant
    return set(best.values())


class _LexiconIndex:
    """Exact-match index for all entries plus edge-containment lookup for formulas."""

    def __init__(self, entries: Iterable[LexiconEntry]):
        self.exact: dict[str, LexiconEntry] = {}
        self.formula: dict[str, LexiconEntry] = {}
        for entry in entries:
            kept = self.exact.get(entry.surface)
            if kept is None or entry.weight > kept.weight:
                self.exact[entry.surface] = entry
            if entry.label == MATERIAL_FORMULA:
                kept = self.formula.get(entry.surface)
                if kept is None or entry.weight > kept.weight:
                    self.formula[entry.surface] = entry

    def match(self, word: str) -> LexiconEntry | None:
        """Best entry matching a word: exact for any label, or a formula
        surface sitting at the word's start or end."""
        candidates: list[LexiconEntry] = []
        exact = self.exact.get(word)
        if exact is not None:
            candidates.append(exact)
        if self.formula:
            for k in range(1, len(word)):
                for piece in (word[:k], word[-k:]):
                    hit = self.formula.get(piece)
                    if hit is not None:
                        candidates.append(hit)
        if not candidates:
            return None
        return max(candidates, key=lambda e: (e.weight, e.label))


def strip_marker(token: str, marker: str = _MARKER) -> str:
    return token[len(marker):] if token.startswith(marker) else token


def score_tokens(
    word: str,
    tokens: Sequence[str],
    lexicon: Iterable[LexiconEntry] | _LexiconIndex,
) -> LabelDistribution:
    """Label distribution for a word's subword tokens.

    A token inherits the weight of the best lexicon entry matching either the
    token itself (continuation markers stripped) or the whole word; the
    remaining mass goes to "other". Unmatched tokens are all "other".
    """
    if not tokens:
        raise ContractError("score_tokens requires a non-empty token sequence")
    index = lexicon if isinstance(lexicon, _LexiconIndex) else _LexiconIndex(lexicon)
    word_hit = index.match(word)
    rows = []
    for token in tokens:
        hit = index.match(strip_marker(token))
        if word_hit is not None and (hit is None or word_hit.weight > hit.weight):
            hit = word_hit
        if hit is None:
            rows.append({MATERIAL_NAME: 0.0, MATERIAL_FORMULA: 0.0, OTHER: 1.0})
        else:
            row = {MATERIAL_NAME: 0.0, MATERIAL_FORMULA: 0.0, OTHER: 1.0 - hit.weight}
            row[hit.label] = hit.weight
            rows.append(row)
    return LabelDistribution(tokens=tuple(tokens), probs=tuple(rows))


def classify(word: str, dist: LabelDistribution) -> ConceptScore:
    """Argmax of mean token probabilities, gated to material labels.

    Non-material argmax yields y_hat 0 with no label; material probabilities
    are capped at Y_HAT_CEILING. Ties resolve in fixed label order with
    material labels first.
    """
    means = dist.mean()
    best_label = ALL_LABELS[0]
    best_prob = means[best_label]
    for label in ALL_LABELS[1:]:
        if means[label] > best_prob:
            best_label = label
            best_prob = means[label]
    if best_label in MATERIAL_LABELS and best_prob > 0.0:
        return ConceptScore(word=word, y_hat=min(best_prob, Y_HAT_CEILING), label=best_label)
    return ConceptScore(word=word, y_hat=0.0, label=None)


def load_score_table(path: str | Path) -> dict[str, ConceptScore]:
    """Load precomputed word scores from a TSV of (word, y_hat, label) rows."""
    table: dict[str, ConceptScore] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}",
                    line_number=lineno,
                )
            word_raw, y_raw, label = parts
            try:
                y_hat = float(y_raw)
            except ValueError:
                raise FormatError(
                    f"{path}:{lineno}: y_hat is not a number: {y_raw!r}", line_number=lineno
                ) from None
            if y_hat < 0.0 or y_hat >= 1.0:
                raise FormatError(
                    f"{path}:{lineno}: y_hat must be in [0, 1): {y_hat}", line_number=lineno
                )
            word = corpus.normalize(word_raw).strip()
            if not word:
                raise FormatError(f"{path}:{lineno}: empty word", line_number=lineno)
            if y_hat == 0.0:
                score = ConceptScore(word=word, y_hat=0.0, label=None, source="table")
            else:
                if label not in MATERIAL_LABELS:
                    raise FormatError(
                        f"{path}:{lineno}: unknown label {label!r}", line_number=lineno
                    )
                score = ConceptScore(
                    word=word, y_hat=min(y_hat, Y_HAT_CEILING), label=label, source="table"
                )
            table[word] = score
    return table


class LexiconScorer:
    """Gazetteer-backed scorer; immutable and safe for concurrent use."""

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        self._index = _LexiconIndex(entries)

    def score(self, word: str, tokens: Sequence[str] | None = None) -> ConceptScore:
        dist = score_tokens(word, tokens or (word,), self._index)
        return classify(word, dist)


class TableScorer:
    """Scorer backed by a precomputed word -> ConceptScore map."""

    def __init__(self, table: Mapping[str, ConceptScore]):
        self._table = dict(table)

    def score(self, word: str) -> ConceptScore:
        found = self._table.get(word)
        if found is not None:
            return found
        return ConceptScore(word=word, y_hat=0.0, label=None, source="table")


class FixedWeightScorer:
    """Every lexicon surface gets one fixed weight; everything else gets 0."""

    def __init__(self, entries: Iterable[LexiconEntry], weight: float):
        if not 0.0 < weight <= Y_HAT_CEILING:
            raise MatvocError(f"fixed weight must be in (0, {Y_HAT_CEILING}]: {weight}")
        self._labels = {e.surface: e.label for e in sorted(entries, key=lambda e: (e.surface, e.weight))}
        self._weight = weight

    def score(self, word: str) -> ConceptScore:
        label = self._labels.get(word)
        if label is None:
            return ConceptScore(word=word, y_hat=0.0, label=None, source="fixed")
        return ConceptScore(word=word, y_hat=self._weight, label=label, source="fixed")


def fixed_weight_scorer(lexicon: Iterable[LexiconEntry], weight: float) -> FixedWeightScorer:
    """Ablation-style scorer assigning one fixed weight to all lexicon hits."""
    return FixedWeightScorer(lexicon, weight)
