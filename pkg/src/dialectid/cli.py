"""Command-line entry point: prepare, demo, experiment, train, evaluate, predict."""

from __future__ import annotations

import argparse
import ast
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .arff import ArffError, load_arff, save_arff
from .classifiers import ALGORITHMS, ClassifierSpec, TrainingError
from .corpus import CorpusError, PrepConfig, build_dataset, corpus_stats, read_lines
from .demo import DEFAULT_LABELS, demo_dataset, demo_raw_lines
from .evaluation import cross_validate, evaluate_holdout, evaluate_resubstitution, percentage_split
from .features import TokenizerSpec, VectorizerOptions
from .pipeline import fit_pipeline, load_model, save_model

PROTOCOLS = ("train", "cv", "split")


class CliError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("DIALECTID_SEED", "1")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"DIALECTID_SEED must be an integer, got {raw!r}") from None


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    low = raw.strip().lower()
    if low in ("true", "false"):
        return key, low == "true"
    try:
        return key, ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        raise argparse.ArgumentTypeError(f"cannot parse value of {key}: {raw!r}") from None


def parse_feature(text: str) -> TokenizerSpec:
    """``word``, ``word-ngram:MIN:MAX`` or ``char:MIN:MAX``."""
    kind, *bounds = text.split(":")
    try:
        if kind == "word" and not bounds:
            return TokenizerSpec.word()
        lo, hi = (int(b) for b in bounds)
        if kind == "word-ngram":
            return TokenizerSpec.word_ngram(lo, hi)
        if kind == "char":
            return TokenizerSpec.char_ngram(lo, hi)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad feature {text!r}: {e}") from None
    raise argparse.ArgumentTypeError(f"bad feature {text!r}; use word, word-ngram:MIN:MAX or char:MIN:MAX")


def tokenizer_from_args(args) -> TokenizerSpec:
    try:
        if args.tokenizer == "word":
            return TokenizerSpec.word()
        if args.tokenizer == "word-ngram":
            return TokenizerSpec.word_ngram(args.min, args.max)
        return TokenizerSpec.char_ngram(args.min, args.max)
    except ValueError as e:
        raise CliError(str(e)) from None


def options_from_args(args) -> VectorizerOptions:
    return VectorizerOptions(tf_transform=args.tf, idf_transform=args.idf, lowercase=not args.keep_case)


def add_feature_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("features")
    g.add_argument("--tokenizer", choices=("word", "word-ngram", "char"), default="char")
    g.add_argument("--min", type=int, default=3, help="smallest n-gram size (default 3)")
    g.add_argument("--max", type=int, default=3, help="largest n-gram size (default 3)")
    g.add_argument("--tf", type=parse_bool, default=False, metavar="BOOL", help="log(1+f) term weights")
    g.add_argument("--idf", type=parse_bool, default=False, metavar="BOOL", help="multiply by log(N/df)")
    g.add_argument("--keep-case", action="store_true", help="do not lowercase before tokenizing")


def _load(path) -> object:
    if not Path(path).is_file():
        raise CliError(f"no such file: {path}")
    return load_arff(path)


# commands


def cmd_prepare(args) -> int:
    sources = {}
    for label, path in args.label:
        if not Path(path).is_file():
            raise CliError(f"no such file: {path}")
        sources.setdefault(label, []).extend(read_lines(path))
    cfg = PrepConfig(min_tokens=args.min_tokens)
    data = build_dataset(sources, cfg, labels=list(sources), relation=args.relation)
    save_arff(data, args.output)
    print(f"wrote {len(data)} sentences to {args.output}")
    print(corpus_stats(data).format())
    return 0


def cmd_demo(args) -> int:
    data = demo_dataset(args.per_label, args.seed)
    save_arff(data, args.output)
    print(f"wrote {len(data)} demo sentences to {args.output}")
    if args.raw_dir:
        out = Path(args.raw_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, label in enumerate(DEFAULT_LABELS):
            path = out / f"{label}.txt"
            path.write_text("\n".join(demo_raw_lines(label, args.per_label, args.seed + i)) + "\n", encoding="utf-8")
            print(f"wrote raw export {path}")
    return 0


def _run_protocol(protocol, spec, tok, opts, data, args):
    if protocol == "train":
        return evaluate_resubstitution(spec, tok, opts, data)
    if protocol == "cv":
        return cross_validate(spec, tok, opts, data, args.folds, args.seed, args.leaky_vectorize)
    return percentage_split(spec, tok, opts, data, args.split, args.seed, args.leaky_vectorize)


def cmd_experiment(args) -> int:
    if args.demo:
        data = demo_dataset(seed=args.seed)
    elif args.data:
        data = _load(args.data)
    else:
        raise CliError("give a data file or --demo")
    classifiers = args.classifier or list(ALGORITHMS)
    features = args.feature or [tokenizer_from_args(args)]
    protocols = args.protocol or ["cv"]
    opts = options_from_args(args)
    cells = [(c, f, p) for c in classifiers for f in features for p in protocols]

    def run(cell):
        c, f, p = cell
        return _run_protocol(p, ClassifierSpec(c, seed=args.seed), f, opts, data, args)

    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            reports = list(pool.map(run, cells))
    else:
        reports = [run(cell) for cell in cells]

    if args.format == "json":
        out = [
            {"classifier": c, "feature": f.describe(), "protocol": p, "accuracy": r.accuracy, "report": r.to_dict()}
            for (c, f, p), r in zip(cells, reports)
        ]
        print(json.dumps(out, indent=2, ensure_ascii=False))
        return 0

    cols = [(f, p) for f in features for p in protocols]
    heads = [f"{f.describe()} / {p}" for f, p in cols]
    acc = {(c, f.describe(), p): r.accuracy for (c, f, p), r in zip(cells, reports)}
    w0 = max(len("classifier"), *(len(c) for c in classifiers))
    widths = [max(len(h), 8) for h in heads]
    print(f"{'classifier':<{w0}}  " + "  ".join(f"{h:>{w}}" for h, w in zip(heads, widths)))
    for c in classifiers:
        vals = [f"{100 * acc[(c, f.describe(), p)]:.2f}%" for f, p in cols]
        print(f"{c:<{w0}}  " + "  ".join(f"{v:>{w}}" for v, w in zip(vals, widths)))
    return 0


def cmd_train(args) -> int:
    data = _load(args.data)
    spec = ClassifierSpec(args.classifier, dict(args.param or []), args.seed)
    fit = fit_pipeline(spec, tokenizer_from_args(args), options_from_args(args), data)
    save_model(fit, args.output)
    print(f"trained {spec.algorithm} on {len(data)} instances, {len(fit.vocabulary)} features "
          f"({fit.vocabulary.tokenizer.describe()}), seed {spec.seed}")
    print(f"classes: {', '.join(fit.class_labels)}")
    print(f"model written to {args.output}")
    return 0


def _load_model(path):
    if not Path(path).is_file():
        raise CliError(f"no such file: {path}")
    return load_model(path)


def cmd_evaluate(args) -> int:
    fit = _load_model(args.model)
    report = evaluate_holdout(fit, _load(args.test))
    print(report.to_json() if args.format == "json" else report.format())
    return 0


def cmd_predict(args) -> int:
    fit = _load_model(args.model)
    if args.input == "-":
        text = sys.stdin.read()
    else:
        if not Path(args.input).is_file():
            raise CliError(f"no such file: {args.input}")
        text = Path(args.input).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln.rstrip("\r") for ln in lines]
    if not lines:
        return 0
    P = fit.predict_proba(lines)
    labels = fit.class_labels
    for line, p in zip(lines, P):
        k = int(p.argmax())
        if args.format == "json":
            print(json.dumps({"text": line, "label": labels[k], "distribution": dict(zip(labels, p.tolist()))},
                             ensure_ascii=False))
        else:
            dist = " ".join(f"{lab}={v:.4f}" for lab, v in zip(labels, p))
            print(f"{labels[k]}\t{dist}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dialectid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    seed_help = "random seed (default: $DIALECTID_SEED or 1)"

    p = sub.add_parser("prepare", help="clean raw text exports into a labelled ARFF file")
    p.add_argument("--label", nargs=2, action="append", required=True, metavar=("LABEL", "FILE"),
                   help="raw export for one label; repeat per file")
    p.add_argument("--min-tokens", type=int, default=3)
    p.add_argument("--relation", default="french_dialects")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("demo", help="write the synthetic five-dialect corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--per-label", type=int, default=400)
    p.add_argument("--raw-dir", help="also write raw <p>-tagged exports, one file per label")
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("experiment", help="accuracy table over classifiers, features and protocols")
    p.add_argument("data", nargs="?")
    p.add_argument("--demo", action="store_true", help="use the bundled synthetic corpus")
    p.add_argument("--classifier", action="append", choices=ALGORITHMS)
    p.add_argument("--feature", action="append", type=parse_feature,
                   help="word | word-ngram:MIN:MAX | char:MIN:MAX; repeatable, overrides --tokenizer")
    add_feature_flags(p)
    p.add_argument("--protocol", action="append", choices=PROTOCOLS)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--split", type=float, default=60.0, help="training percentage for the split protocol")
    p.add_argument("--leaky-vectorize", action="store_true",
                   help="fit the vocabulary on all data before splitting")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("train", help="fit vocabulary and classifier, save a model file")
    p.add_argument("data")
    p.add_argument("--classifier", choices=ALGORITHMS, default="smo")
    p.add_argument("-P", "--param", action="append", type=parse_param, metavar="KEY=VALUE")
    add_feature_flags(p)
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a labelled test file")
    p.add_argument("model")
    p.add_argument("test")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label each line of a text file")
    p.add_argument("model")
    p.add_argument("input", nargs="?", default="-", help="text file, or - for stdin")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.func(args)
    except (CliError, ArffError, CorpusError, TrainingError, ValueError, OSError) as e:
        print(f"dialectid: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
