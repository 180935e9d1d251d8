"""Monte-Carlo experiments: detection rates, selection bias under a 50/50 mixture,
and a sweep over generating means.

Random streams. Every (experiment, mean, generating model, shard) cell owns
one ``numpy`` generator seeded from ``SeedSequence(seed, spawn_key=...)``, so
cells are independent and a run is reproducible for fixed ``(seed, shards)``
regardless of ``workers``. In the bias experiment each shard first draws all
of its fair coins, then one block of Poisson samples (one row per Poisson
coin), then one block of geometric samples.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .counts_model import ModelClass, sample_matrix
from .mdl_criteria import CriterionId, CriterionKind, SampleStats
from .selection import codelength_batch, decide

DETECTION = "detection"
BIAS = "bias"
_EXPERIMENT_CODE = {DETECTION: 1, BIAS: 2}
_MODEL_CODE = {ModelClass.POISSON: 0, ModelClass.GEOMETRIC: 1}
DEFAULT_MEANS = (2.0, 4.0, 8.0, 80.0)
SWEEP_MEANS = tuple(float(m) for m in range(2, 17, 2))


def default_roster() -> tuple[CriterionId, ...]:
    """The twelve benchmark criteria in report order, with the reference settings.

    RANML is evaluated without the infinite-codelength rule, and the Beta-prior
    MML criteria score the geometric model at the shifted closed-form estimate
    (offset -3/2). Both settings match the reference detection rates; the
    library defaults (strict RANML, argmin estimate) do not.
    """
    return (
        CriterionId.bic(),
        CriterionId.ranml(10, strict=False),
        CriterionId.ranml(100, strict=False),
        CriterionId.ranml(1000, strict=False),
        CriterionId.anml2(),
        CriterionId.obj_bayes(),
        CriterionId.approx_bayes(),
        CriterionId.mml_conjugate(5.0, 1.0, 1.0, beta_plugin=True),
        CriterionId.mml_calibrated(5.0, beta_plugin=True),
        CriterionId.mml_half_cauchy_sd(),
        CriterionId.mml_half_cauchy_mean(beta_plugin=True),
        CriterionId.known_mu(),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    means: tuple[float, ...] = DEFAULT_MEANS
    sample_size: int = 5
    replications: int = 100_000
    criteria: tuple[CriterionId, ...] = field(default_factory=default_roster)
    seed: int = 20170
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        if not self.means or any(not (m > 0 and math.isfinite(m)) for m in self.means):
            raise ValueError("means must be a non-empty list of positive numbers")
        if self.sample_size < 1:
            raise ValueError("sample_size must be positive")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not self.criteria:
            raise ValueError("criteria must be non-empty")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.shards < 1 or self.workers < 1:
            raise ValueError("shards and workers must be positive")
        if self.sample_size < 2 and any(c.order_sensitive for c in self.criteria):
            raise ValueError("objective Bayes criteria need sample_size >= 2")
        slugs = [c.slug for c in self.criteria]
        if len(set(slugs)) != len(slugs):
            raise ValueError("duplicate criteria in roster")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["criteria"] = [c.to_dict() for c in self.criteria]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["criteria"] = tuple(CriterionId.from_dict(c) for c in d["criteria"])
        d["means"] = tuple(d["means"])
        return cls(**d)


def shard_sizes(replications: int, shards: int) -> list[int]:
    q, r = divmod(replications, shards)
    return [q + (1 if i < r else 0) for i in range(shards)]


def _rng(seed: int, experiment: str, mean_index: int, model_code: int, shard: int):
    ss = np.random.SeedSequence(seed, spawn_key=(_EXPERIMENT_CODE[experiment], mean_index,
                                                 model_code, shard))
    return np.random.default_rng(ss)


# Tallies are Counters keyed by (criterion slug, event); merging is addition.
# Events: "geometric" (geometric chosen), "undefined", "limit", "infinite".

def _score(criteria, model: ModelClass, X: np.ndarray, mean: float, tally: Counter):
    if X.shape[0] == 0:
        return
    st = SampleStats.from_matrix(X)
    for crit in criteria:
        if crit.kind is CriterionKind.KNOWN_MU:
            crit = crit.with_mu(mean)
        cp = codelength_batch(crit, ModelClass.POISSON, st)
        cg = codelength_batch(crit, ModelClass.GEOMETRIC, st)
        dec = decide(cp, cg, crit)
        key = crit.slug
        tally[key, "geometric"] += int(dec.geometric.sum())
        tally[key, "undefined"] += int(dec.undefined.sum())
        tally[key, "limit"] += int(dec.limit.sum())
        tally[key, "infinite"] += int((np.isinf(cp) | np.isinf(cg)).sum())


def _detection_task(args) -> Counter:
    config, mean_index, model, shard, reps = args
    mean = config.means[mean_index]
    rng = _rng(config.seed, DETECTION, mean_index, _MODEL_CODE[model], shard)
    X = sample_matrix(model, mean, (reps, config.sample_size), rng)
    tally = Counter()
    _score(config.criteria, model, X, mean, tally)
    return tally


def _bias_task(args) -> Counter:
    config, mean_index, _, shard, reps = args
    mean = config.means[mean_index]
    rng = _rng(config.seed, BIAS, mean_index, 0, shard)
    coins = rng.random(reps) < 0.5  # True -> Poisson
    n_pois = int(coins.sum())
    Xp = sample_matrix(ModelClass.POISSON, mean, (n_pois, config.sample_size), rng)
    Xg = sample_matrix(ModelClass.GEOMETRIC, mean, (reps - n_pois, config.sample_size), rng)
    tally = Counter({("_generated", "poisson"): n_pois})
    _score(config.criteria, ModelClass.POISSON, Xp, mean, tally)
    _score(config.criteria, ModelClass.GEOMETRIC, Xg, mean, tally)
    return tally


def _run_tasks(fn, tasks: list, workers: int) -> list[Counter]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def merge_tallies(tallies: Iterable[Counter]) -> Counter:
    total = Counter()
    for t in tallies:
        total.update(t)
    return total


@dataclass(frozen=True)
class ReportRow:
    mean: float
    criterion: str
    label: str
    pct_geometric: float
    pct_poisson: float
    score: float  # average (detection) or bias
    rank: float
    undefined: int
    limit_decisions: int
    infinite_codelength: int


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated results. ``kind`` is "detection" or "bias".

    Detection rows hold the percentage of correct identifications for each
    generating model and their average. Bias rows hold the percentage of
    samples assigned to each model and bias = 2 |pct_geometric - 50|.
    Ranks are computed per mean on values rounded to two decimals, with
    ties averaged; rank 1 is the highest average or the lowest bias.
    """

    kind: str
    config: ExperimentConfig
    rows: tuple[ReportRow, ...]

    @property
    def score_name(self) -> str:
        return "average" if self.kind == DETECTION else "bias"

    def row(self, mean: float, criterion: str) -> ReportRow:
        for r in self.rows:
            if r.mean == float(mean) and r.criterion == criterion:
                return r
        raise KeyError((mean, criterion))

    def degenerate_counts(self) -> dict:
        out = {}
        for r in self.rows:
            if r.undefined or r.limit_decisions or r.infinite_codelength:
                out[f"{r.criterion}@{r.mean:g}"] = {
                    "undefined": r.undefined,
                    "limit_decisions": r.limit_decisions,
                    "infinite_codelength": r.infinite_codelength,
                }
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "config": self.config.to_dict(),
                "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(kind=d["kind"], config=ExperimentConfig.from_dict(d["config"]),
                   rows=tuple(ReportRow(**r) for r in d["rows"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mean", "criterion", "pct_geometric", "pct_poisson", self.score_name, "rank",
                    "undefined", "limit_decisions", "infinite_codelength"])
        for r in self.rows:
            w.writerow([f"{r.mean:.12g}", r.criterion, f"{r.pct_geometric:.12g}",
                        f"{r.pct_poisson:.12g}", f"{r.score:.12g}", f"{r.rank:g}",
                        r.undefined, r.limit_decisions, r.infinite_codelength])
        return buf.getvalue()


def _ranks(scores: Sequence[float], descending: bool) -> np.ndarray:
    v = np.round(np.asarray(scores, dtype=float), 2)
    return rankdata(-v if descending else v, method="average")


def _tasks(config: ExperimentConfig, models) -> list:
    sizes = shard_sizes(config.replications, config.shards)
    return [(config, i, m, k, reps)
            for i in range(len(config.means)) for m in models
            for k, reps in enumerate(sizes) if reps > 0]


def run_detection_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Correct-identification rates for each generating model at each mean.

    Undefined decisions count as incorrect and are reported per row.
    """
    models = (ModelClass.POISSON, ModelClass.GEOMETRIC)
    tasks = _tasks(config, models)
    results = _run_tasks(_detection_task, tasks, config.workers)
    per = {}
    for (cfg, i, m, _, _), t in zip(tasks, results):
        per.setdefault((i, m), Counter()).update(t)
    reps = config.replications
    rows = []
    for i, mean in enumerate(config.means):
        tp, tg = per[i, ModelClass.POISSON], per[i, ModelClass.GEOMETRIC]
        block = []
        for c in config.criteria:
            k = c.slug
            pct_g = 100.0 * tg[k, "geometric"] / reps
            pct_p = 100.0 * (reps - tp[k, "geometric"] - tp[k, "undefined"]) / reps
            block.append((c, pct_g, pct_p, 0.5 * (pct_g + pct_p),
                          [tp[k, e] + tg[k, e] for e in ("undefined", "limit", "infinite")]))
        ranks = _ranks([b[3] for b in block], descending=True)
        rows += [ReportRow(mean, c.slug, c.label, g, p, a, float(r), *deg)
                 for (c, g, p, a, deg), r in zip(block, ranks)]
    return ExperimentReport(DETECTION, config, tuple(rows))


def run_bias_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Selection frequencies when each sample comes from either model with probability 1/2."""
    tasks = _tasks(config, (None,))
    results = _run_tasks(_bias_task, tasks, config.workers)
    per = {}
    for (cfg, i, _, _, _), t in zip(tasks, results):
        per.setdefault(i, Counter()).update(t)
    reps = config.replications
    rows = []
    for i, mean in enumerate(config.means):
        t = per[i]
        block = []
        for c in config.criteria:
            k = c.slug
            pct_g = 100.0 * t[k, "geometric"] / reps
            pct_p = 100.0 * (reps - t[k, "geometric"] - t[k, "undefined"]) / reps
            block.append((c, pct_g, pct_p, 2.0 * abs(pct_g - 50.0),
                          [t[k, e] for e in ("undefined", "limit", "infinite")]))
        ranks = _ranks([b[3] for b in block], descending=False)
        rows += [ReportRow(mean, c.slug, c.label, g, p, b, float(r), *deg)
                 for (c, g, p, b, deg), r in zip(block, ranks)]
    return ExperimentReport(BIAS, config, tuple(rows))


def mean_sweep(config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    """Detection experiment over the means 2, 4, ..., 16 (or ``config.means``)."""
    if config is None:
        config = ExperimentConfig(means=SWEEP_MEANS)
    return run_detection_experiment(config)


def sweep_table(report: ExperimentReport) -> dict[str, list[tuple[float, float, float]]]:
    """Plot-ready series: criterion slug -> [(mean, pct_geometric, pct_poisson), ...]."""
    out: dict[str, list] = {}
    for r in report.rows:
        out.setdefault(r.criterion, []).append((r.mean, r.pct_geometric, r.pct_poisson))
    return out
