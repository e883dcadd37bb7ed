"""Command-line entry point.

Subcommands: train, encode, eval-seg, vocab-stats, hist, vocab-diff, sweep.
Options may come from a flat key=value config file; explicit flags win. All
file outputs are written atomically.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import corpus, detector, evalkit, tokenizer, trainer
from .errors import ConfigError, FormatError, MatvocError
from .fileio import atomic_write_text

DEFAULT_SEED = 0


# ---------------------------------------------------------------------------
# Config file handling

def parse_config(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` config file; ``#`` starts a comment."""
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(
                    f"{path}:{lineno}: expected 'key = value'", line_number=lineno
                )
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise FormatError(f"{path}:{lineno}: empty key", line_number=lineno)
            cfg[key] = value.strip()
    return cfg


def serialize_config(cfg: dict[str, str]) -> str:
    return "".join(f"{key} = {cfg[key]}\n" for key in sorted(cfg))


def _to_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {raw!r}")


def _convert(raw: str, typ: type) -> Any:
    if typ is bool:
        return _to_bool(raw)
    if typ is list:
        return [part.strip() for part in raw.split(",") if part.strip()]
    return typ(raw)


class Params:
    """Merged view over CLI args (which win) and a config file."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = parse_config(args.config) if getattr(args, "config", None) else {}

    def get(self, dest: str, typ: type = str, default: Any = None, key: str | None = None) -> Any:
        value = getattr(self.args, dest, None)
        if value is None:
            raw = self.cfg.get(key or dest)
            if raw is not None:
                value = _convert(raw, typ)
        elif typ is list and isinstance(value, str):
            value = _convert(value, list)
        return default if value is None else value

    def require(self, dest: str, flag: str, typ: type = str, key: str | None = None) -> Any:
        value = self.get(dest, typ, key=key)
        if value is None or (typ is list and not value):
            raise ConfigError(f"missing required option {flag}")
        return value


# ---------------------------------------------------------------------------
# Shared pieces

def _check_inputs(params: Params, *paths: Any) -> None:
    """Fail fast on missing input files, before any counting or training."""
    candidates = [params.get("lexicon"), params.get("score_table")]
    candidates.extend(paths)
    corpus_paths = params.get("corpus", list)
    if corpus_paths:
        candidates.extend(corpus_paths)
    for path in candidates:
        if path and not Path(path).is_file():
            raise MatvocError(f"input file not found: {path}")


def _build_scorer(params: Params, seed: int) -> detector.Scorer:
    lexicon_path = params.get("lexicon")
    table_path = params.get("score_table")
    fixed_weight = params.get("fixed_weight", float)
    if table_path and lexicon_path:
        raise ConfigError("use either --lexicon or --score-table, not both")
    if table_path:
        if fixed_weight is not None:
            raise ConfigError("--fixed-weight requires --lexicon")
        return detector.TableScorer(detector.load_score_table(table_path))
    if lexicon_path:
        entries = detector.load_lexicon(lexicon_path)
        if params.get("augment_lexicon", bool, default=False):
            cap = params.get("augment_cap", int, default=detector.DEFAULT_AUGMENT_CAP)
            entries = detector.augment_lexicon(entries, seed=seed, cap=cap)
        if fixed_weight is not None:
            return detector.fixed_weight_scorer(entries, fixed_weight)
        return detector.LexiconScorer(entries)
    if fixed_weight is not None:
        raise ConfigError("--fixed-weight requires --lexicon")
    return detector.LexiconScorer(())


def _count_corpus(params: Params) -> corpus.WordTable:
    paths = params.require("corpus", "--corpus", list)
    threads = params.get("threads", int, default=0)
    if threads < 0:
        raise ConfigError(f"--threads must be >= 0: {threads}")
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    return corpus.count_corpus_files(paths, workers=workers)


def _train_config(params: Params) -> trainer.TrainConfig:
    return trainer.TrainConfig(
        vocab_size=params.get("vocab_size", int, default=trainer.DEFAULT_VOCAB_SIZE),
        lam=params.get("lam", float, default=trainer.DEFAULT_LAMBDA, key="lambda"),
        min_frequency=params.get(
            "min_frequency", float, default=trainer.DEFAULT_MIN_FREQUENCY
        ),
        continuation_marker=params.get("marker", str, default=trainer.DEFAULT_MARKER),
        max_word_length=params.get(
            "max_word_length", int, default=trainer.DEFAULT_MAX_WORD_LENGTH
        ),
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _json(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommands

def cmd_train(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params)
    seed = params.get("seed", int, default=DEFAULT_SEED)
    table = _count_corpus(params)
    scorer = _build_scorer(params, seed)
    config = _train_config(params)
    out = params.require("out", "--out")
    vocab = trainer.train(table, scorer, config)
    trainer.save_vocab(vocab, out)
    merge_log_path = params.get("merge_log")
    if merge_log_path:
        trainer.save_merge_log(vocab.merge_log, merge_log_path)
    print(f"trained vocabulary of {len(vocab)} tokens ({len(vocab.merge_log)} merges) -> {out}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    params = Params(args)
    input_path = params.require("input", "--input")
    _check_inputs(params, params.get("vocab"), input_path)
    vocab = trainer.load_vocab(params.require("vocab", "--vocab"))
    max_len = params.get("max_word_length", int, default=trainer.DEFAULT_MAX_WORD_LENGTH)
    lines = []
    for doc in corpus.iter_documents(input_path):
        enc = tokenizer.encode(doc.text, vocab, max_word_length=max_len)
        lines.append(
            json.dumps(
                {"doc_id": doc.id, "tokens": list(enc.tokens), "unk_count": enc.unk_count},
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    _emit("".join(line + "\n" for line in lines), params.get("output"))
    return 0


def cmd_eval_seg(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params, params.get("vocab"), params.get("gold"))
    vocab = trainer.load_vocab(params.require("vocab", "--vocab"))
    gold = evalkit.load_gold(params.require("gold", "--gold"))
    prf = evalkit.segmentation_f1(gold, vocab)
    _emit(_json(dataclasses.asdict(prf)), params.get("output"))
    return 0


def cmd_vocab_stats(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params, params.get("vocab"))
    seed = params.get("seed", int, default=DEFAULT_SEED)
    vocab = trainer.load_vocab(params.require("vocab", "--vocab"))
    scorer = _build_scorer(params, seed)
    stats = evalkit.vocab_stats(vocab, scorer)
    _emit(_json(dataclasses.asdict(stats)), params.get("output"))
    return 0


def _hist_csv(hist: evalkit.FrequencyHistogram) -> str:
    lines = ["bin_low,bin_high,material_count,general_count"]
    for low, high, mat, gen in hist.rows():
        lines.append(f"{low:g},{high:g},{mat},{gen}")
    return "".join(line + "\n" for line in lines)


def cmd_hist(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params)
    seed = params.get("seed", int, default=DEFAULT_SEED)
    table = _count_corpus(params)
    scorer = _build_scorer(params, seed)
    bins = [float(b) for b in params.require("bins", "--bins", list)]
    out = params.require("out", "--out")
    hist = evalkit.frequency_histogram(table, scorer, bins)
    atomic_write_text(out, _hist_csv(hist))
    if not params.get("no_figure", bool, default=False):
        from . import plots

        figure_path = Path(out).with_suffix(".png")
        plots.save_histogram_figure(hist, figure_path)
        print(f"wrote {out} and {figure_path}")
    else:
        print(f"wrote {out}")
    return 0


def cmd_vocab_diff(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params, params.get("vocab_a"), params.get("vocab_b"))
    seed = params.get("seed", int, default=DEFAULT_SEED)
    vocab_a = trainer.load_vocab(params.require("vocab_a", "vocab_a"))
    vocab_b = trainer.load_vocab(params.require("vocab_b", "vocab_b"))
    scorer = _build_scorer(params, seed)
    diff = evalkit.vocab_diff(vocab_a, vocab_b, scorer)
    report = dataclasses.asdict(diff)
    report["only_in_a"] = list(report["only_in_a"])
    report["only_in_b"] = list(report["only_in_b"])
    report["shared"] = list(report["shared"])
    _emit(_json(report), params.get("output"))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    params = Params(args)
    _check_inputs(params)
    seed = params.get("seed", int, default=DEFAULT_SEED)
    table = _count_corpus(params)
    scorer = _build_scorer(params, seed)
    config = _train_config(params)
    out = Path(params.require("out", "--out"))
    lams = [float(v) for v in params.require("lambdas", "--lambdas", list)]
    results = trainer.lambda_sweep(table, scorer, lams, config)
    stats = []
    for lam, vocab in results:
        path = out.with_name(f"{out.stem}-lambda{lam:g}{out.suffix}")
        trainer.save_vocab(vocab, path)
        stats.append(evalkit.vocab_stats(vocab, scorer))
        print(f"lambda={lam:g}: {len(vocab)} tokens -> {path}")
    report = out.with_name(f"{out.stem}-sweep.csv")
    lines = ["lambda,vocab_size,word_initial_ratio,material_token_ratio,mean_token_length,material_token_count"]
    for (lam, vocab), st in zip(results, stats):
        lines.append(
            f"{lam:g},{len(vocab)},{st.word_initial_ratio:.6f},"
            f"{st.material_token_ratio:.6f},{st.mean_token_length:.6f},{st.material_token_count}"
        )
    atomic_write_text(report, "".join(line + "\n" for line in lines))
    if not params.get("no_figure", bool, default=False):
        from . import plots

        figure_path = report.with_suffix(".png")
        plots.save_sweep_figure([lam for lam, _ in results], stats, figure_path)
        print(f"wrote {report} and {figure_path}")
    else:
        print(f"wrote {report}")
    return 0


# ---------------------------------------------------------------------------
# Parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--threads", type=int, help="worker threads for counting; 0 = auto")


def _add_scorer_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lexicon", help="TSV lexicon: surface<TAB>label<TAB>weight")
    p.add_argument("--score-table", dest="score_table", help="TSV of word<TAB>y_hat<TAB>label")
    p.add_argument(
        "--fixed-weight",
        dest="fixed_weight",
        type=float,
        help="score every lexicon hit with this single weight",
    )
    p.add_argument(
        "--augment-lexicon",
        dest="augment_lexicon",
        action="store_const",
        const=True,
        help="expand lexicon entries with noise-shaped variants",
    )
    p.add_argument(
        "--augment-cap",
        dest="augment_cap",
        type=int,
        help=f"max variants per entry incl. the original (default {detector.DEFAULT_AUGMENT_CAP})",
    )


def _add_train_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", action="append", help="corpus file, one document per line (repeatable)")
    _add_scorer_opts(p)
    p.add_argument("--lambda", dest="lam", type=float, help="material importance factor (default 1.0)")
    p.add_argument("--vocab-size", dest="vocab_size", type=int, help="vocabulary budget (default 31090)")
    p.add_argument("--min-frequency", dest="min_frequency", type=float, help="minimum pair count (default 2)")
    p.add_argument("--max-word-length", dest="max_word_length", type=int, help="words longer are skipped from merging")
    p.add_argument("--marker", help='continuation marker (default "##")')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matvoc",
        description="Materials-aware subword vocabulary trainer, tokenizer and evaluation toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a vocabulary")
    _add_train_opts(p)
    p.add_argument("--out", help="vocabulary output file, one token per line")
    p.add_argument("--merge-log", dest="merge_log", help="merge history output (JSON lines)")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("encode", help="encode a corpus file to token JSONL")
    p.add_argument("--vocab", help="vocabulary file")
    p.add_argument("--input", help="input corpus file, one document per line")
    p.add_argument("--output", help="output JSONL (default stdout)")
    p.add_argument("--max-word-length", dest="max_word_length", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("eval-seg", help="boundary precision/recall/F1 against gold segmentations")
    p.add_argument("--vocab", help="vocabulary file")
    p.add_argument("--gold", help="TSV gold file: word<TAB>seg|men|ted")
    p.add_argument("--output", help="output JSON (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_eval_seg)

    p = sub.add_parser("vocab-stats", help="token quality statistics of a vocabulary")
    p.add_argument("--vocab", help="vocabulary file")
    _add_scorer_opts(p)
    p.add_argument("--output", help="output JSON (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_vocab_stats)

    p = sub.add_parser("hist", help="frequency histograms of material vs general words")
    p.add_argument("--corpus", action="append", help="corpus file (repeatable)")
    _add_scorer_opts(p)
    p.add_argument("--bins", help="comma-separated ascending thresholds, e.g. 1,10,100")
    p.add_argument("--out", help="output CSV; a PNG figure lands next to it")
    p.add_argument("--no-figure", dest="no_figure", action="store_const", const=True)
    _add_common(p)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("vocab-diff", help="compare two vocabularies")
    p.add_argument("vocab_a", nargs="?", help="first vocabulary file")
    p.add_argument("vocab_b", nargs="?", help="second vocabulary file")
    _add_scorer_opts(p)
    p.add_argument("--output", help="output JSON (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_vocab_diff)

    p = sub.add_parser("sweep", help="train one vocabulary per lambda value")
    _add_train_opts(p)
    p.add_argument("--lambdas", help="comma-separated lambda values, e.g. 0,0.5,1")
    p.add_argument("--out", help="vocabulary path template; files get a -lambda<v> suffix")
    p.add_argument("--no-figure", dest="no_figure", action="store_const", const=True)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except MatvocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
