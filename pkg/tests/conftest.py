"""Shared fixtures: synthetic corpora and the fragmentation-rescue setup."""

from __future__ import annotations

import random

import pytest

from matvoc import detector
from matvoc.corpus import WordTable

# Frozen fragmentation-rescue fixture parameters. The budget was found by
# sweeping: at this floor the unboosted term pairs (count 3) stay ineligible
# while the boosted ones (3 + 9 = 12) clear it and merge to whole tokens.
FRAG_SEED = 11
FRAG_BUDGET = 1000
FRAG_MIN_FREQUENCY = 5.0
FRAG_TERM_FREQ = 3.0
FRAG_TERM_WEIGHT = 0.9

_ALPHA = "abcdefgh"


def zipf_words(rng: random.Random, n_words: int, alphabet: str, lengths=(3, 9)) -> dict[str, float]:
    """Random distinct words with a heavy-tailed frequency profile."""
    words: dict[str, float] = {}
    while len(words) < n_words:
        n = rng.randint(*lengths)
        w = "".join(rng.choice(alphabet) for _ in range(n))
        if w not in words:
            rank = len(words) + 1
            words[w] = float(max(1, int(2000 / rank)) + rng.randint(0, 3))
    return words


def build_fragmentation_fixture(seed: int = FRAG_SEED):
    """Corpus of frequent distractors plus 20 rare compound material terms.

    Terms are stem+suffix compounds: the stem also occurs as a standalone
    frequent word and the suffix occurs word-internally in frequent carrier
    words, so term pieces assemble on the distractor schedule while the final
    whole-term merge is gated by the term's own (boostable) frequency.
    """
    rng = random.Random(seed)
    words: dict[str, float] = {}

    def add(word: str, freq: float) -> bool:
        if word in words:
            return False
        words[word] = float(freq)
        return True

    n = 0
    while n < 150:
        w = "".join(rng.choice(_ALPHA) for _ in range(rng.randint(5, 8)))
        if add(w, rng.randint(100, 1200)):
            n += 1
    stems = []
    while len(stems) < 20:
        w = "".join(rng.choice(_ALPHA) for _ in range(4))
        if add(w, 500):
            stems.append(w)
    suffixes: list[str] = []
    while len(suffixes) < 10:
        s = "".join(rng.choice(_ALPHA) for _ in range(4))
        if s in suffixes:
            continue
        grown = 0
        tries = 0
        while grown < 3 and tries < 20:
            tries += 1
            head = "".join(rng.choice(_ALPHA) for _ in range(rng.randint(2, 3)))
            if add(head + s, 250):
                grown += 1
        if grown == 3:
            suffixes.append(s)
    terms = []
    for i, stem in enumerate(stems):
        term = stem + suffixes[i % len(suffixes)]
        if add(term, FRAG_TERM_FREQ):
            terms.append(term)
    return WordTable.from_counts(words), terms


@pytest.fixture(scope="session")
def frag_fixture():
    table, terms = build_fragmentation_fixture()
    lexicon = [
        detector.LexiconEntry(t, detector.MATERIAL_NAME, FRAG_TERM_WEIGHT) for t in terms
    ]
    return table, terms, detector.LexiconScorer(lexicon)


@pytest.fixture
def zero_scorer():
    return detector.LexiconScorer(())
