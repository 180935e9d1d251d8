"""Criterion dispatch, the Poisson-vs-geometric decision, and coding regret."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mdl_criteria as mdl
from .counts_model import CountData, ModelClass
from .mdl_criteria import CriterionId, CriterionKind, SampleStats
from .mml_core import PriorSpec, mml_codelength_core, mml_codelength_core_plugin


class UndefinedCriterionError(ArithmeticError):
    pass


def mml_prior(criterion: CriterionId, model: ModelClass) -> PriorSpec:
    k = criterion.kind
    model = ModelClass(model)
    if k is CriterionKind.MML_CONJ:
        if model is ModelClass.POISSON:
            return PriorSpec.conjugate_exp(criterion.A)
        return PriorSpec.conjugate_beta(criterion.alpha, criterion.beta)
    if k is CriterionKind.MML_CALIB:
        return PriorSpec.calibrated(criterion.A, model)
    if k is CriterionKind.MML_HC_SD:
        return PriorSpec.half_cauchy_sd(model)
    if k is CriterionKind.MML_HC_MEAN:
        return PriorSpec.half_cauchy_mean(model)
    raise ValueError(f"{criterion.label} is not an MML criterion")


def _mml_batch(criterion: CriterionId, model: ModelClass, st: SampleStats) -> np.ndarray:
    prior = mml_prior(criterion, model)
    key = prior.resolve()
    uniq, inv = np.unique(st.s, return_inverse=True)
    if criterion.beta_plugin and key[0] == "beta":
        core = np.array([mml_codelength_core_plugin(st.n, int(s), key[1], key[2]) for s in uniq])
    else:
        core = np.array([mml_codelength_core(model, prior, st.n, int(s)) for s in uniq])
    out = core[inv]
    if model is ModelClass.POISSON:
        out = out + st.lg
    return out


def codelength_batch(criterion: CriterionId, model: ModelClass, st: SampleStats) -> np.ndarray:
    """Codelengths (nits) of every sample in ``st`` under one model."""
    model = ModelClass(model)
    k = criterion.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if k is CriterionKind.BIC:
            out = mdl.bic_batch(model, st)
        elif k is CriterionKind.RANML:
            out = mdl.ranml_batch(model, st, criterion.mu_star, criterion.strict)
        elif k is CriterionKind.ANML2:
            out = mdl.anml2_batch(model, st)
        elif k is CriterionKind.OBJ_BAYES:
            out = mdl.obj_bayes_batch(model, st)
        elif k is CriterionKind.APPROX_BAYES:
            out = mdl.approx_bayes_batch(model, st)
        elif k is CriterionKind.KNOWN_MU:
            if criterion.mu is None:
                raise ValueError("known-mean criterion needs a mean")
            out = mdl.known_mu_batch(model, st, criterion.mu)
        else:
            out = _mml_batch(criterion, model, st)
    return np.asarray(out, dtype=float)


def codelength(criterion: CriterionId, model: ModelClass, data: CountData) -> float:
    return float(codelength_batch(criterion, model, SampleStats.from_data(data))[0])


@dataclass(frozen=True)
class SelectionResult:
    criterion: CriterionId
    codelength_poisson: float
    codelength_geometric: float
    chosen: ModelClass
    margin: float
    flags: frozenset = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.slug,
            "codelength_poisson": self.codelength_poisson,
            "codelength_geometric": self.codelength_geometric,
            "chosen": self.chosen.value,
            "margin": self.margin,
            "flags": sorted(self.flags),
        }


@dataclass(frozen=True)
class Decision:
    """Vectorized outcome of comparing two codelength arrays."""

    geometric: np.ndarray  # geometric chosen
    undefined: np.ndarray  # neither chosen
    tie: np.ndarray
    limit: np.ndarray  # decided by a limiting argument (both codelengths infinite)

    @property
    def poisson(self) -> np.ndarray:
        return ~self.geometric & ~self.undefined


def decide(cl_poisson, cl_geometric, criterion: CriterionId | None = None) -> Decision:
    """Pick the shorter codelength; equal codelengths go to the geometric model.

    When both codelengths are infinite the sample is undefined, except for
    the approximate objective Bayes code: there both diverge because the mean
    of x_2..x_n is 0, and as that mean tends to 0 the Poisson codelength
    exceeds the geometric one by an unbounded amount (-1/2 ln mean), so the
    geometric model is chosen.
    """
    cp = np.asarray(cl_poisson, dtype=float)
    cg = np.asarray(cl_geometric, dtype=float)
    both_inf = (np.isinf(cp) & np.isinf(cg)) | np.isnan(cp) | np.isnan(cg)
    limit = np.zeros_like(both_inf)
    if criterion is not None and criterion.kind is CriterionKind.APPROX_BAYES:
        limit = both_inf
    undefined = both_inf & ~limit
    tie = (cp == cg) & ~both_inf
    geometric = ((cg <= cp) & ~both_inf) | limit
    return Decision(geometric, undefined, tie, limit)


def evaluate(criterion: CriterionId, data: CountData) -> SelectionResult:
    """Score both models and pick the one with the shorter codelength."""
    st = SampleStats.from_data(data)
    cp = float(codelength_batch(criterion, ModelClass.POISSON, st)[0])
    cg = float(codelength_batch(criterion, ModelClass.GEOMETRIC, st)[0])
    dec = decide([cp], [cg], criterion)
    if dec.undefined[0]:
        raise UndefinedCriterionError("criterion undefined on sample")
    geometric = bool(dec.geometric[0])
    flags = set()
    if dec.tie[0]:
        flags.add("tie")
    if dec.limit[0]:
        flags.add("limit-decision")
    if data.s == 0:
        flags.add("boundary-mle")
    if math.isinf(cp) or math.isinf(cg):
        flags.add("infinite-codelength")
    margin = abs(cp - cg) if math.isfinite(cp) and math.isfinite(cg) else math.inf
    chosen = ModelClass.GEOMETRIC if geometric else ModelClass.POISSON
    return SelectionResult(criterion, cp, cg, chosen, margin, frozenset(flags))


def _check_regret_support(criterion: CriterionId):
    if criterion.order_sensitive:
        raise ValueError("regret not a function of (n,s) for this criterion")


def regret_batch(criterion: CriterionId, model: ModelClass, n: int, s) -> np.ndarray:
    _check_regret_support(criterion)
    st = SampleStats.from_ns(n, s)
    return codelength_batch(criterion, model, st) - mdl.nll_at_mle_batch(model, st)


def regret(criterion: CriterionId, model: ModelClass, n: int, s: int) -> float:
    """Codelength minus the negative log-likelihood at the MLE, as a function of (n, s)."""
    if n < 1 or s < 0:
        raise ValueError("need n >= 1 and s >= 0")
    return float(regret_batch(criterion, model, n, s)[0])


def regret_curve(criterion: CriterionId, model: ModelClass, n: int, s_values) -> tuple[np.ndarray, np.ndarray]:
    """Regret at each ``s`` in ``s_values`` (ascending); returns (s, regret)."""
    s = np.asarray(s_values, dtype=np.int64)
    if s.size and (np.any(np.diff(s) < 0) or s[0] < 0):
        raise ValueError("s_values must be ascending and non-negative")
    return s, regret_batch(criterion, model, n, s)
