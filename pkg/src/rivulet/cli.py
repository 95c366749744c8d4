"""Command-line driver: ``rivulet {generate,track,verify,bench,oracle}``.

Exit codes: 0 ok, 2 bad configuration, 3 bad input data, 4 verdict failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time
from contextlib import contextmanager
from typing import Sequence

from . import __version__
from .bench import run_bench, timing_percentiles
from .errors import (
    FractionMismatch,
    InvalidConfig,
    NegativeResultingWeight,
    ParseError,
    ProbabilityOverflow,
    SelfWeightInIC,
    TooLargeToEnumerate,
    UnknownNode,
)
from .graph import Model
from .oracle import InfluenceTable, exact_influence, mc_influence_table, static_poll_estimate
from .report import jaccard, read_reports
from .stream import (
    WorkloadSpec,
    generate_workload,
    parse_edges,
    parse_graph,
    parse_stream,
    write_graph,
    write_stream,
)
from .threshold import ThresholdConfig, ThresholdTracker
from .topk import TopKConfig, TopKTracker

log = logging.getLogger("rivulet")

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_VERDICT = 4

CONFIG_ERRORS = (InvalidConfig, FractionMismatch, TooLargeToEnumerate)
DATA_ERRORS = (ParseError, NegativeResultingWeight, ProbabilityOverflow, SelfWeightInIC,
               UnknownNode, OSError)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Collects what one run did; written once as JSON at the end."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.data: dict = {
            "command": command,
            "version": __version__,
            "config": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
            "seed": getattr(args, "seed", None),
            "inputs": {},
            "phases": {},
            "deviations": [],
        }

    def add_input(self, label: str, path: str) -> None:
        self.data["inputs"][label] = {"path": path, "sha256": sha256_file(path)}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.data["phases"][name] = time.perf_counter() - t0

    def write(self, path: str | None) -> None:
        if not path:
            return
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=False, default=str)
            fh.write("\n")


def _resolve_seed(args: argparse.Namespace) -> None:
    env = os.environ.get("RIVULET_SEED")
    if env is not None:
        try:
            args.seed = int(env)
        except ValueError:
            raise CliError(EXIT_CONFIG, f"RIVULET_SEED={env!r} is not an integer") from None


def _threads(args: argparse.Namespace, manifest: Manifest) -> None:
    if getattr(args, "threads", 1) > 1:
        log.warning("--threads %d requested; maintenance runs serially", args.threads)
        manifest.data["deviations"].append(f"threads={args.threads} ignored, ran serially")


# ---- generate ------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    spec = WorkloadSpec(Model(args.model), args.seed, args.base_frac, args.churn_frac,
                        args.arrival_frac, args.instances)
    try:
        spec.validate()
    except FractionMismatch as exc:
        raise CliError(EXIT_CONFIG, f"--base-frac/--churn-frac/--arrival-frac/--instances: {exc}") from None
    manifest = Manifest("generate", args)
    manifest.add_input("graph", args.graph)
    with manifest.phase("parse"):
        n, edges = parse_edges(args.graph)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = {}
    with manifest.phase("generate"):
        for i in range(spec.instances):
            seed = args.seed + i
            d = args.out_dir if spec.instances == 1 else os.path.join(args.out_dir, f"instance{i}")
            os.makedirs(d, exist_ok=True)
            wl = generate_workload(n, edges, spec, random.Random(seed))
            with open(os.path.join(d, "base.tsv"), "w", encoding="utf-8") as fh:
                write_graph(fh, wl.base)
            with open(os.path.join(d, "stream.tsv"), "w", encoding="utf-8") as fh:
                write_stream(fh, wl.stream)
            with open(os.path.join(d, "final.tsv"), "w", encoding="utf-8") as fh:
                write_graph(fh, wl.final)
            outputs[d] = {
                "seed": seed,
                "updates": len(wl.stream),
                **{f"{k}_edges": len(v) for k, v in wl.partition.items()},
                "sha256": {f: sha256_file(os.path.join(d, f)) for f in ("base.tsv", "stream.tsv", "final.tsv")},
            }
    manifest.data["outputs"] = outputs
    manifest.write(os.path.join(args.out_dir, "manifest.json"))
    return 0


# ---- track -----------------------------------------------------------------------


def _threshold_config(args: argparse.Namespace, n: int) -> ThresholdConfig:
    if (args.T_frac is None) == (args.T_abs is None):
        raise CliError(EXIT_CONFIG, "threshold mode needs exactly one of --T-frac or --T-abs")
    T = args.T_abs if args.T_abs is not None else args.T_frac * n
    cfg = ThresholdConfig(T, args.epsilon, args.delta)
    cfg.validate(n)
    return cfg


def _build_tracker(args: argparse.Namespace, g):
    if args.mode == "threshold":
        return ThresholdTracker(g, _threshold_config(args, g.n), seed=args.seed)
    if args.k is None:
        raise CliError(EXIT_CONFIG, "topk mode needs --k")
    return TopKTracker(g, TopKConfig(args.k, args.epsilon, args.delta), seed=args.seed,
                       resize_every=args.resize_every)


def _memory(tracker) -> int:
    if isinstance(tracker, TopKTracker):
        return tracker.R.total_size + tracker.R1.total_size + tracker.n
    return tracker.collection.total_size + tracker.n


def cmd_track(args: argparse.Namespace) -> int:
    if args.mode == "topk" and args.k is None:
        raise CliError(EXIT_CONFIG, "topk mode needs --k")
    manifest = Manifest("track", args)
    _threads(args, manifest)
    if args.mode == "topk" and args.resize_every > 1:
        manifest.data["deviations"].append(f"resize_every={args.resize_every}: sample resized in batches")
    manifest.add_input("graph", args.graph)
    if args.stream:
        manifest.add_input("stream", args.stream)
    with manifest.phase("load"):
        g = parse_graph(args.graph, args.model)
    with manifest.phase("build"):
        tracker = _build_tracker(args, g)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    per: list[float] = []
    peak = _memory(tracker)
    reports = 0
    try:
        with manifest.phase("stream"):
            clock = time.perf_counter
            for upd in parse_stream(args.stream) if args.stream else ():
                a = clock()
                tracker.process_update(upd)
                per.append(clock() - a)
                peak = max(peak, _memory(tracker))
                if args.report_every and tracker.updates % args.report_every == 0:
                    out.write(tracker.report().to_json() + "\n")
                    reports += 1
        with manifest.phase("final_report"):
            out.write(tracker.report().to_json() + "\n")
            reports += 1
    finally:
        if out is not sys.stdout:
            out.close()
    manifest.data.update({
        "n": g.n,
        "M": tracker.M,
        "updates": tracker.updates,
        "reports": reports,
        "update_seconds": timing_percentiles(per),
        "peak_rr_memory_estimate": peak,
    })
    manifest.write(args.manifest)
    return 0


# ---- verify -------------------------------------------------------------------------


def verdict(report, table: InfluenceTable, n: int | None = None) -> dict:
    """Recall against the oracle-true set and the worst false-positive shortfall."""
    n = n if n is not None else len(table)
    if report.mode == "threshold":
        target = report.T
    else:
        target = table.kth(report.k)
    truth = table.at_least(target)
    got = report.ids
    recall = len(truth & got) / len(truth) if truth else 1.0
    fp = [target - table[u] for u in got if table[u] < target]
    max_err = max(fp, default=0.0)
    bound = report.epsilon * n
    return {
        "mode": report.mode,
        "target": target,
        "true_count": len(truth),
        "reported": len(got),
        "recall": recall,
        "max_false_positive_error": max_err,
        "error_bound": bound,
        "pass": recall == 1.0 and max_err <= bound,
    }


def _last_report(path: str):
    with open(path, encoding="utf-8") as fh:
        reports = read_reports(fh)
    if not reports:
        raise CliError(EXIT_DATA, f"{path}: no reports")
    return reports[-1]


def cmd_verify(args: argparse.Namespace) -> int:
    if not args.oracle and not args.other:
        raise CliError(EXIT_CONFIG, "verify needs --oracle and/or --other")
    try:
        report = _last_report(args.report)
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_DATA, f"{args.report}: {exc}") from None
    result: dict = {}
    ok = True
    if args.oracle:
        with open(args.oracle, encoding="utf-8") as fh:
            table = InfluenceTable.read_tsv(fh, args.oracle)
        result.update(verdict(report, table))
        ok = ok and result["pass"]
    if args.other:
        other = _last_report(args.other)
        result["jaccard"] = jaccard(report.ids, other.ids)
        if args.min_jaccard is not None:
            ok = ok and result["jaccard"] >= args.min_jaccard
    result["pass"] = ok
    print(json.dumps(result))
    return 0 if ok else EXIT_VERDICT


# ---- bench ----------------------------------------------------------------------------


def cmd_bench(args: argparse.Namespace) -> int:
    manifest = Manifest("bench", args)
    manifest.add_input("graph", args.graph)
    manifest.add_input("stream", args.stream)
    g = parse_graph(args.graph, args.model)
    stream = list(parse_stream(args.stream))
    if args.mode == "threshold":
        config = _threshold_config(args, g.n)
    else:
        if args.k is None:
            raise CliError(EXIT_CONFIG, "topk mode needs --k")
        config = TopKConfig(args.k, args.epsilon, args.delta)
    res = run_bench(g, stream, config, seed=args.seed, resize_every=args.resize_every)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        res.write_summary_csv(out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.per_update:
        with open(args.per_update, "w", encoding="utf-8") as fh:
            res.write_updates_csv(fh)
    manifest.data["phases"] = {"build": res.build_seconds, "stream": res.stream_seconds,
                               "rebuild": res.rebuild_seconds}
    manifest.data["summary"] = res.summary()
    manifest.write(args.manifest)
    return 0


# ---- oracle ---------------------------------------------------------------------------


def cmd_oracle(args: argparse.Namespace) -> int:
    g = parse_graph(args.graph, args.model)
    rng = random.Random(args.seed)
    if args.method == "exact":
        table = exact_influence(g)
    elif args.method == "mc":
        table = mc_influence_table(g, args.trials, rng)
    else:
        table = static_poll_estimate(g, args.M, rng)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            table.write_tsv(fh)
    else:
        table.write_tsv(sys.stdout)
    return 0


# ---- parser --------------------------------------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _tracking_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("threshold", "topk"), required=True)
    p.add_argument("--model", choices=("lt", "ic"), required=True)
    p.add_argument("--T-frac", dest="T_frac", type=float, help="threshold as a fraction of n")
    p.add_argument("--T-abs", dest="T_abs", type=float, help="absolute threshold")
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resize-every", type=_positive_int, default=1,
                   help="top-k: run grow/shrink every N updates (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rivulet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="split a static graph into base graph and update stream")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", choices=("lt", "ic"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--base-frac", type=float, default=0.85)
    p.add_argument("--churn-frac", type=float, default=0.05)
    p.add_argument("--arrival-frac", type=float, default=0.10)
    p.add_argument("--instances", type=int, default=1)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("track", help="replay a stream and emit JSONL reports")
    p.add_argument("--graph", required=True, help="base graph TSV")
    p.add_argument("--stream", help="update stream TSV")
    _tracking_flags(p)
    p.add_argument("--report-every", type=int, default=0, help="0 = final report only")
    p.add_argument("--out", help="report JSONL (default stdout)")
    p.add_argument("--manifest", help="where to write manifest.json")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("verify", help="check a report against an oracle table or another report")
    p.add_argument("--report", required=True)
    p.add_argument("--oracle", help="InfluenceTable TSV")
    p.add_argument("--other", help="second report for Jaccard similarity")
    p.add_argument("--min-jaccard", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time incremental replay against rebuilding")
    p.add_argument("--graph", required=True)
    p.add_argument("--stream", required=True)
    _tracking_flags(p)
    p.add_argument("--out", help="summary CSV (default stdout)")
    p.add_argument("--per-update", help="per-update CSV")
    p.add_argument("--manifest")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="compute an influence table")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", choices=("lt", "ic"), required=True)
    p.add_argument("--method", choices=("exact", "mc", "poll"), default="exact")
    p.add_argument("--trials", type=_positive_int, default=100000)
    p.add_argument("--M", type=_positive_int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _resolve_seed(args)
        return args.func(args)
    except CliError as exc:
        print(f"rivulet: error: {exc}", file=sys.stderr)
        return exc.code
    except CONFIG_ERRORS as exc:
        print(f"rivulet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DATA_ERRORS as exc:
        print(f"rivulet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
