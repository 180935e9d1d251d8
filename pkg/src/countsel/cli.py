"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .counts_model import DegenerateError, ModelClass, suff_stats
from .mdl_criteria import CriterionId
from .selection import UndefinedCriterionError, evaluate, regret_curve
from . import simulate as sim

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "COUNTSEL_SEED"

CRITERION_NAMES = ("bic", "ranml10", "ranml100", "ranml1000", "ranml", "anml2", "obj-bayes",
                   "approx-bayes", "mml-conj", "mml-calib", "mml-hc-sd", "mml-hc-mean",
                   "known-mu")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_criterion(name: str, mu_star: Optional[float] = None, mu: Optional[float] = None,
                    A: float = 5.0) -> CriterionId:
    m = re.fullmatch(r"ranml(\d+(?:\.\d+)?)?", name)
    if m:
        star = float(m.group(1)) if m.group(1) else mu_star
        if star is None:
            raise UsageError("ranml needs --mu-star (or use ranml10/ranml100/ranml1000)")
        return CriterionId.ranml(star)
    table = {
        "bic": CriterionId.bic,
        "anml2": CriterionId.anml2,
        "obj-bayes": CriterionId.obj_bayes,
        "approx-bayes": CriterionId.approx_bayes,
        "mml-conj": lambda: CriterionId.mml_conjugate(A),
        "mml-calib": lambda: CriterionId.mml_calibrated(A),
        "mml-hc-sd": CriterionId.mml_half_cauchy_sd,
        "mml-hc-mean": CriterionId.mml_half_cauchy_mean,
    }
    if name == "known-mu":
        if mu is None:
            raise UsageError("known-mu needs --mu")
        return CriterionId.known_mu(mu)
    if name not in table:
        raise UsageError(f"unknown criterion {name!r}; choose from {', '.join(CRITERION_NAMES)}")
    try:
        return table[name]()
    except ValueError as e:
        raise UsageError(str(e)) from None


def parse_samples(stream: TextIO) -> list[tuple[int, list[int]]]:
    """One sample per line, counts separated by spaces and/or commas."""
    out = []
    for k, line in enumerate(stream, start=1):
        tokens = [t for t in re.split(r"[\s,]+", line.strip()) if t]
        if not tokens:
            raise DataError(f"empty sample at line {k}")
        try:
            vals = [int(t) for t in tokens]
        except ValueError:
            raise DataError(f"invalid count at line {k}: {line.strip()!r}") from None
        if any(v < 0 for v in vals):
            raise DataError(f"invalid count at line {k}: negative value")
        out.append((k, vals))
    if not out:
        raise DataError("no samples in input")
    return out


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: Optional[int]
    version: str = __version__
    runtime_seconds: float = 0.0
    degenerate_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "seed": self.seed,
                "version": self.version, "runtime_seconds": self.runtime_seconds,
                "degenerate_counts": self.degenerate_counts}


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# select

def cmd_select(args, out: TextIO) -> int:
    crits = [build_criterion(c, args.mu_star, args.mu, args.A) for c in args.criterion or ["bic"]]
    if args.input == "-":
        samples = parse_samples(sys.stdin)
    else:
        with open(args.input) as fh:
            samples = parse_samples(fh)
    results = []
    for line, vals in samples:
        data = suff_stats(vals)
        for c in crits:
            try:
                res = evaluate(c, data)
            except UndefinedCriterionError as e:
                results.append({"line": line, "criterion": c.slug, "error": str(e)})
                continue
            d = res.to_dict()
            d["line"] = line
            results.append(d)
    if args.json:
        json.dump(results, out, indent=2)
        out.write("\n")
    else:
        for r in results:
            if "error" in r:
                out.write(f"line {r['line']}  {r['criterion']:<13} {r['error']}\n")
                continue
            out.write(f"line {r['line']}  {r['criterion']:<13} chosen={r['chosen']:<9} "
                      f"poisson={_fmt(r['codelength_poisson'])} "
                      f"geometric={_fmt(r['codelength_geometric'])} "
                      f"margin={_fmt(r['margin'])}"
                      + (f" flags={','.join(r['flags'])}" if r["flags"] else "") + "\n")
    return EXIT_OK


# simulate / sweep

def _parse_means(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"invalid --means {text!r}") from None
    if not vals:
        raise UsageError("--means is empty")
    return vals


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return sim.ExperimentConfig.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer") from None


def _make_config(args, means) -> sim.ExperimentConfig:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    try:
        return sim.ExperimentConfig(means=means, sample_size=args.n, replications=args.reps,
                                    seed=_resolve_seed(args.seed), shards=args.shards,
                                    workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit_report(report: sim.ExperimentReport, manifest: RunManifest, out_path: Optional[str],
                 out: TextIO):
    text = report.to_csv()
    if out_path is None:
        out.write(text)
        return
    base = Path(out_path)
    csv_path = base if base.suffix == ".csv" else base.with_suffix(".csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(text)
    payload = {"manifest": manifest.to_dict(), "report": report.to_dict()}
    csv_path.with_suffix(".json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    out.write(f"wrote {csv_path} and {csv_path.with_suffix('.json')}\n")


def cmd_simulate(args, out: TextIO) -> int:
    config = _make_config(args, _parse_means(args.means))
    t0 = time.perf_counter()
    runner = sim.run_detection_experiment if args.table == 1 else sim.run_bias_experiment
    report = runner(config)
    manifest = RunManifest(f"simulate --table {args.table}", config.to_dict(), config.seed,
                           runtime_seconds=time.perf_counter() - t0,
                           degenerate_counts=report.degenerate_counts())
    _emit_report(report, manifest, args.out, out)
    return EXIT_OK


def cmd_sweep(args, out: TextIO) -> int:
    config = _make_config(args, _parse_means(args.means))
    t0 = time.perf_counter()
    report = sim.mean_sweep(config)
    manifest = RunManifest("sweep", config.to_dict(), config.seed,
                           runtime_seconds=time.perf_counter() - t0,
                           degenerate_counts=report.degenerate_counts())
    _emit_report(report, manifest, args.out, out)
    return EXIT_OK


# regret

def cmd_regret(args, out: TextIO) -> int:
    crit = build_criterion(args.criterion, args.mu_star, args.mu, args.A)
    if crit.order_sensitive:
        raise UsageError("regret not a function of (n,s) for this criterion")
    if args.n < 1 or args.s_max < 1:
        raise UsageError("--n and --s-max must be positive")
    model = ModelClass.parse(args.model)
    s, r = regret_curve(crit, model, args.n, np.arange(1, args.s_max + 1))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "regret_nits"])
    for si, ri in zip(s, r):
        w.writerow([int(si), _fmt(float(ri))])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def _add_criterion_opts(p, multiple: bool):
    if multiple:
        p.add_argument("--criterion", action="append", metavar="NAME",
                       help=f"criterion name, repeatable (default bic): {', '.join(CRITERION_NAMES)}")
    else:
        p.add_argument("--criterion", required=True, metavar="NAME",
                       help=f"one of {', '.join(CRITERION_NAMES)}")
    p.add_argument("--mu-star", type=float, help="upper mean bound for 'ranml'")
    p.add_argument("--mu", type=float, help="true mean for 'known-mu'")
    p.add_argument("--A", type=float, default=5.0, help="prior mean hyperparameter for MML conjugate priors")


def _add_sim_opts(p, default_means: str):
    p.add_argument("--means", default=default_means, help="comma-separated generating means")
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--n", type=int, default=5, help="sample size")
    p.add_argument("--seed", type=int, help=f"master seed (default from ${SEED_ENV})")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output path; writes <out>.csv and <out>.json")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="countsel", description="Poisson vs geometric model selection")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("select", help="classify samples read from a file or stdin")
    s.add_argument("input", nargs="?", default="-", help="input file ('-' for stdin)")
    _add_criterion_opts(s, multiple=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_select)

    m = sub.add_parser("simulate", help="reproduce the detection (1) or bias (2) table")
    m.add_argument("--table", type=int, choices=(1, 2), default=1)
    _add_sim_opts(m, "2,4,8,80")
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="detection rates over a range of means")
    _add_sim_opts(w, ",".join(f"{x:g}" for x in sim.SWEEP_MEANS))
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("regret", help="coding regret for s = 1..s-max")
    _add_criterion_opts(r, multiple=False)
    r.add_argument("--model", required=True, choices=("poisson", "geometric"))
    r.add_argument("--n", type=int, default=5)
    r.add_argument("--s-max", type=int, default=1000)
    r.add_argument("--out")
    r.set_defaults(func=cmd_regret)
    return p


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"countsel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as e:
        print(f"countsel: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as e:
        print(f"countsel: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (DegenerateError, ArithmeticError, FloatingPointError) as e:
        print(f"countsel: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
