"""Batch command-line interface.

Every subcommand shares one set of run options.  Values come from, in
increasing priority, built-in defaults, a ``key = value`` config file given
with ``--config``, and command-line flags.

Exit codes: 0 success, 1 usage error, 2 partial failure (some input files
could not be read; the rest were processed).
"""

import argparse
import configparser
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .corpus import dedup, pitch_signature
from .experiments import (
    DEFAULT_ALPHAS,
    compare_models,
    run_experiment1,
    run_experiment2,
)
from .features import FEATURE_NAMES, dump_distributions, resolve_features
from .forest import ForestConfig
from .midi import CANONICAL_PPQ, load_notes
from .pipeline import extract_files, score
from .similarity import ScoreReport
from .stats import read_counts_csv

__all__ = ["main", "RunConfig", "UsageError"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2

MIDI_SUFFIXES = (".mid", ".midi", ".smf")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    features: list = field(default_factory=lambda: list(FEATURE_NAMES))
    seed: int = 0
    trees: int = 500
    max_depth: int = 5
    workers: int = 1
    format: str = "json"
    alphas: list = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    resolution: int = CANONICAL_PPQ
    exclude_drums: bool = False
    threshold: float = None

    def forest(self):
        return ForestConfig(tree_count=self.trees, max_depth=self.max_depth, seed=self.seed)

    def load_kwargs(self):
        return {"resolution": self.resolution, "exclude_drums": self.exclude_drums}


def _split_list(text):
    return [t.strip() for t in str(text).replace(";", ",").split(",") if t.strip()]


def _parse_bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


# key -> (RunConfig attribute, converter)
_KEYS = {
    "features": ("features", _split_list),
    "seed": ("seed", int),
    "trees": ("trees", int),
    "max_depth": ("max_depth", int),
    "workers": ("workers", int),
    "format": ("format", str),
    "alpha": ("alphas", lambda v: [float(a) for a in _split_list(v)]),
    "resolution": ("resolution", int),
    "exclude_drums": ("exclude_drums", _parse_bool),
    "threshold": ("threshold", float),
}


def read_config_file(path):
    """``{key: raw string}`` from a ``key = value`` file (section header optional)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[stylerank]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from None
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section, raw=True):
            key = key.replace("-", "_")
            if key not in _KEYS:
                raise UsageError(f"unknown config key {key!r} in {path}")
            out[key] = value
    return out


def build_config(args):
    """Merge defaults, config file and flags; validate the result."""
    cfg = RunConfig()
    raw = read_config_file(args.config) if args.config else {}
    for key, value in raw.items():
        attr, conv = _KEYS[key]
        try:
            setattr(cfg, attr, conv(value))
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    flags = {
        "features": None if args.features is None else _split_list(args.features),
        "seed": args.seed,
        "trees": args.trees,
        "max_depth": args.max_depth,
        "workers": args.workers,
        "format": args.format,
        "alphas": args.alpha,
        "resolution": args.resolution,
        "exclude_drums": True if args.exclude_drums else None,
        "threshold": args.threshold,
    }
    for attr, value in flags.items():
        if value is not None:
            setattr(cfg, attr, value)
    if not cfg.features:
        raise UsageError("feature set is empty")
    try:
        resolve_features(cfg.features)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg.features = list(dict.fromkeys(cfg.features))
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, not {cfg.format!r}")
    if any(a <= 0 for a in cfg.alphas) or not cfg.alphas:
        raise UsageError("alpha levels must be positive")
    if cfg.trees < 1 or cfg.max_depth < 0 or cfg.workers < 1 or cfg.resolution < 1:
        raise UsageError("trees, workers and resolution must be positive; max depth non-negative")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return cfg


# ---------------------------------------------------------------------------
# File helpers


def midi_files(path):
    """Sorted MIDI files under a directory, or the path itself if it is a file."""
    if os.path.isfile(path):
        return [path]
    if not os.path.isdir(path):
        raise UsageError(f"no such file or directory: {path}")
    out = []
    for root, dirs, files in os.walk(path):
        dirs.sort()
        for name in sorted(files):
            if name.lower().endswith(MIDI_SUFFIXES):
                out.append(os.path.join(root, name))
    return sorted(out)


def _file_id(path, base):
    if os.path.isdir(base):
        return os.path.relpath(path, base).replace(os.sep, "/")
    return os.path.basename(path)


def _sample_id(file_id):
    return os.path.splitext(file_id)[0]


def _report_errors(errors, stream):
    for path, msg in sorted(errors.items()):
        print(f"error: {path}: {msg}", file=stream)


def _extract_dir(path, cfg, stream, require=True):
    """Extract every file under ``path``; returns ``(ids, dists, errors)``."""
    files = midi_files(path)
    results, errors = extract_files(files, cfg.features, cfg.workers, **cfg.load_kwargs())
    _report_errors(errors, stream)
    ids = [_file_id(p, path) for p in files if p in results]
    dists = [results[p] for p in files if p in results]
    if require and not dists:
        raise UsageError(f"{path}: no readable MIDI files")
    return ids, dists, errors


def _emit(text, out, stdout):
    if out is None:
        stdout.write(text)
        if not text.endswith("\n"):
            stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _dumps(obj):
    return json.dumps(obj, indent=1)


def _csv(rows):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Subcommands


def cmd_extract(args, cfg, stdout, stderr):
    files = []
    for p in args.paths:
        files += [(f, p) for f in midi_files(p)]
    if not files:
        raise UsageError("no MIDI files given")
    paths = [f for f, _ in files]
    results, errors = extract_files(paths, cfg.features, cfg.workers, **cfg.load_kwargs())
    _report_errors(errors, stderr)
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        for f, base in files:
            if f in results:
                name = _sample_id(_file_id(f, base)).replace("/", "__") + ".json"
                with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                    fh.write(dump_distributions(results[f]) + "\n")
    elif cfg.format == "csv":
        rows = [["file", "feature", "category", "weight"]]
        for f, base in files:
            if f in results:
                for name, dist in results[f].items():
                    for c, w in sorted(dist.items()):
                        rows.append([_file_id(f, base), name, c, w])
        _emit(_csv(rows), None, stdout)
    else:
        doc = {
            _file_id(f, base): json.loads(dump_distributions(results[f]))
            for f, base in files if f in results
        }
        _emit(_dumps(doc), None, stdout)
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_rank(args, cfg, stdout, stderr):
    _, corpus, e1 = _extract_dir(args.corpus, cfg, stderr)
    ids, cands, e2 = _extract_dir(args.candidates, cfg, stderr)
    report = score(cands, corpus, cfg.features, cfg.forest(), ids, cfg.workers)
    report.metadata.update({"seed": cfg.seed, "trees": cfg.trees, "maxDepth": cfg.max_depth,
                            "corpusSize": len(corpus)})
    text = report.to_csv() if cfg.format == "csv" else report.to_json()
    _emit(text, args.out, stdout)
    return EXIT_PARTIAL if e1 or e2 else EXIT_OK


def load_report(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read report {path}: {exc.strerror}") from None
    try:
        if text.lstrip().startswith("{"):
            return ScoreReport.from_json(text)
        return ScoreReport.from_csv(text)
    except (ValueError, KeyError, IndexError) as exc:
        raise UsageError(f"malformed report {path}: {exc}") from None


def filter_report(report, threshold):
    """Split candidate ids (in ranking order) by ``globalScore >= threshold``."""
    scores = report.per_candidate
    kept = [c for c in report.ranking if scores[c] >= threshold]
    discarded = [c for c in report.ranking if scores[c] < threshold]
    return kept, discarded


def cmd_filter(args, cfg, stdout, stderr):
    if cfg.threshold is None:
        raise UsageError("filter needs --threshold")
    kept, discarded = filter_report(load_report(args.report), cfg.threshold)
    if cfg.format == "csv":
        rows = [["candidateId", "kept"]] + [[c, 1] for c in kept] + [[c, 0] for c in discarded]
        text = _csv(rows)
    else:
        text = _dumps({"threshold": cfg.threshold, "kept": kept, "discarded": discarded})
    _emit(text, args.out, stdout)
    return EXIT_OK


def cmd_compare_models(args, cfg, stdout, stderr):
    if len(args.models) < 2:
        raise UsageError("compare-models needs at least two model directories")
    _, corpus, errs = _extract_dir(args.corpus, cfg, stderr)
    partial = bool(errs)
    models = {}
    for path in args.models:
        name = os.path.basename(os.path.normpath(path)) or path
        base, k = name, 2
        while name in models:
            name = f"{base}#{k}"
            k += 1
        _, dists, errs = _extract_dir(path, cfg, stderr)
        partial |= bool(errs)
        models[name] = dists
    scores, rows = compare_models(corpus, models, cfg.features, cfg.forest(), cfg.workers)
    if cfg.format == "csv":
        text = _csv([["modelA", "modelB", "meanA", "meanB", "p"]]
                    + [[a, b, repr(ma), repr(mb), repr(p)] for a, b, ma, mb, p in rows])
    else:
        text = _dumps({
            "models": {m: {"n": len(s), "mean": float(np.mean(s))} for m, s in scores.items()},
            "comparisons": [
                {"modelA": a, "modelB": b, "meanA": ma, "meanB": mb, "p": p}
                for a, b, ma, mb, p in rows
            ],
        })
    _emit(text, args.out, stdout)
    return EXIT_PARTIAL if partial else EXIT_OK


def cmd_experiment1(args, cfg, stdout, stderr):
    try:
        sizes = [int(s) for s in _split_list(args.sizes)]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or min(sizes) < 1 or args.trials < 1:
        raise UsageError("sizes and trials must be positive")
    _, style_a, e1 = _extract_dir(args.style_a, cfg, stderr)
    _, style_b, e2 = _extract_dir(args.style_b, cfg, stderr)
    need = max(sizes)
    if len(style_a) < 2 * need or len(style_b) < need:
        raise UsageError(
            f"size {need} needs {2 * need} readable files of style A and {need} of style B; "
            f"have {len(style_a)} and {len(style_b)}"
        )
    alpha = args.sig_alpha
    result = run_experiment1(style_a, style_b, sizes, args.trials, cfg.features, cfg.forest(),
                             cfg.seed, alpha=alpha, workers=cfg.workers)
    if cfg.format == "csv":
        text = result.trials_csv() if args.all_trials else result.summary_csv()
    else:
        doc = result.to_dict()
        if not args.all_trials:
            doc.pop("trials")
        text = _dumps(doc)
    _emit(text, args.out, stdout)
    return EXIT_PARTIAL if e1 or e2 else EXIT_OK


def cmd_experiment2(args, cfg, stdout, stderr):
    try:
        with open(args.counts, encoding="utf-8") as fh:
            counts = read_counts_csv(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read counts {args.counts}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _, corpus, e1 = _extract_dir(args.corpus, cfg, stderr)
    ids, gen, e2 = _extract_dir(args.generated, cfg, stderr)
    sample_ids = [_sample_id(i) for i in ids]
    unmatched = sorted(set(sample_ids) ^ set(counts))
    if unmatched:
        raise UsageError("ids not matched between counts and generated files: "
                         + ", ".join(unmatched))
    runs = []
    for r in range(args.runs):
        forest = ForestConfig(tree_count=cfg.trees, max_depth=cfg.max_depth, seed=cfg.seed + r)
        report = score(gen, corpus, cfg.features, forest, sample_ids, cfg.workers)
        runs.append(report.per_candidate)
    result = run_experiment2(runs, counts, cfg.alphas, args.random_trials, cfg.seed)
    text = result.to_csv() if cfg.format == "csv" else _dumps(result.to_dict())
    _emit(text, args.out, stdout)
    return EXIT_PARTIAL if e1 or e2 else EXIT_OK


def cmd_dedup(args, cfg, stdout, stderr):
    threshold = 0.75 if cfg.threshold is None else cfg.threshold
    if not 0 <= threshold <= 1:
        raise UsageError("dedup threshold must lie in [0, 1]")
    files = midi_files(args.dir)
    names, sigs, errors = [], [], {}
    for f in files:
        try:
            sigs.append(pitch_signature(load_notes(f, **cfg.load_kwargs())))
            names.append(_file_id(f, args.dir))
        except Exception as exc:  # per-file isolation
            errors[f] = f"{type(exc).__name__}: {exc}"
    _report_errors(errors, stderr)
    result = dedup(sigs, threshold)
    if cfg.format == "csv":
        text = result.report_csv(names)
    else:
        text = _dumps({
            "threshold": threshold,
            "kept": [names[i] for i in result.kept],
            "removed": [names[i] for i in result.removed],
            "pairs": [
                {"fileA": names[i], "fileB": names[j], "headDist": hd, "tailDist": td}
                for i, j, hd, td in result.pairs
            ],
        })
    _emit(text, args.out, stdout)
    return EXIT_PARTIAL if errors else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--features", help="comma-separated feature names (default: all)")
    g.add_argument("--seed", type=int)
    g.add_argument("--trees", type=int, help="trees per forest (default 500)")
    g.add_argument("--max-depth", type=int, help="tree depth limit (default 5)")
    g.add_argument("--workers", type=int, help="worker processes (default 1)")
    g.add_argument("--out", help="output file (directory for extract)")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--config", metavar="PATH", help="key = value settings file")
    g.add_argument("--threshold", type=float)
    g.add_argument("--alpha", type=float, action="append",
                   help="significance level; repeat for several")
    g.add_argument("--resolution", type=int, help="ticks per quarter note (default 480)")
    g.add_argument("--exclude-drums", action="store_true", help="drop MIDI channel 10")

    parser = _Parser(prog="stylerank", description="Rank MIDI files by style similarity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[common], help="feature distributions per file")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank", parents=[common], help="score candidates against a corpus")
    p.add_argument("corpus")
    p.add_argument("candidates")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("filter", parents=[common], help="split a rank report by threshold")
    p.add_argument("report")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("compare-models", parents=[common],
                       help="pairwise comparison of generative models")
    p.add_argument("corpus")
    p.add_argument("models", nargs="+")
    p.set_defaults(func=cmd_compare_models)

    p = sub.add_parser("experiment1", parents=[common], help="style separation trials")
    p.add_argument("style_a")
    p.add_argument("style_b")
    p.add_argument("--sizes", default="10", help="comma-separated corpus sizes")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--sig-alpha", type=float, default=0.05)
    p.add_argument("--all-trials", action="store_true", help="include per-trial rows")
    p.set_defaults(func=cmd_experiment1)

    p = sub.add_parser("experiment2", parents=[common],
                       help="agreement with human judgment counts")
    p.add_argument("corpus")
    p.add_argument("generated")
    p.add_argument("counts", help="CSV with header sampleId,nMiss,nCorr")
    p.add_argument("--runs", type=int, default=1, help="forest seeds to average over")
    p.add_argument("--random-trials", type=int, default=10)
    p.set_defaults(func=cmd_experiment2)

    p = sub.add_parser("dedup", parents=[common], help="near-duplicate report")
    p.add_argument("dir")
    p.set_defaults(func=cmd_dedup)
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = build_config(args)
        return args.func(args, cfg, stdout, stderr)
    except UsageError as exc:
        print(f"stylerank: error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"stylerank: error: {exc}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
