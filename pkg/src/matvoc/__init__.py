"""Materials-aware subword vocabulary trainer, tokenizer and evaluation toolkit."""

from .corpus import Document, WordTable, count_words, normalize, pretokenize
from .detector import (
    ConceptScore,
    FixedWeightScorer,
    LexiconEntry,
    LexiconScorer,
    TableScorer,
    augment_term,
    classify,
    fixed_weight_scorer,
    load_lexicon,
    load_score_table,
    score_tokens,
)
from .errors import ConfigError, ContractError, DecodeError, FormatError, MatvocError
from .evalkit import (
    SegmentationGold,
    VocabStats,
    frequency_histogram,
    segmentation_f1,
    vocab_diff,
    vocab_stats,
)
from .tokenizer import Encoding, decode, encode, encode_word
from .trainer import (
    MergeEvent,
    TrainConfig,
    Vocabulary,
    adjust_frequencies,
    lambda_sweep,
    pair_scores,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ConceptScore",
    "ConfigError",
    "ContractError",
    "DecodeError",
    "Document",
    "Encoding",
    "FixedWeightScorer",
    "FormatError",
    "LexiconEntry",
    "LexiconScorer",
    "MatvocError",
    "MergeEvent",
    "SegmentationGold",
    "TableScorer",
    "TrainConfig",
    "VocabStats",
    "Vocabulary",
    "WordTable",
    "adjust_frequencies",
    "augment_term",
    "classify",
    "count_words",
    "decode",
    "encode",
    "encode_word",
    "fixed_weight_scorer",
    "frequency_histogram",
    "lambda_sweep",
    "load_lexicon",
    "load_score_table",
    "normalize",
    "pair_scores",
    "pretokenize",
    "score_tokens",
    "segmentation_f1",
    "train",
    "vocab_diff",
    "vocab_stats",
]
