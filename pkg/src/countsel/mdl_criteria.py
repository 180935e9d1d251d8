"""Non-MML codelength criteria: BIC, restricted and two-part ANML, objective
Bayes codes and the known-mean oracle.

Every criterion has a vectorized kernel taking :class:`SampleStats`, so the
simulation can score a whole block of samples at once; the public scalar
functions wrap those kernels for a single :class:`CountData`. The geometric
model is always evaluated in its mean parameterization here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import gammaln, xlogy

from .counts_model import CountData, ModelClass, geometric_nll_mu, poisson_nll

LOG2_STAR_CONST = 2.865604
HALF_LN_2PI = 0.5 * math.log(2 * math.pi)


class CriterionKind(str, enum.Enum):
    BIC = "bic"
    RANML = "ranml"
    ANML2 = "anml2"
    OBJ_BAYES = "obj-bayes"
    APPROX_BAYES = "approx-bayes"
    KNOWN_MU = "known-mu"
    MML_CONJ = "mml-conj"
    MML_CALIB = "mml-calib"
    MML_HC_SD = "mml-hc-sd"
    MML_HC_MEAN = "mml-hc-mean"


_LABELS = {
    CriterionKind.BIC: "BIC",
    CriterionKind.ANML2: "ANML two-part",
    CriterionKind.OBJ_BAYES: "Objective Bayes",
    CriterionKind.APPROX_BAYES: "Approx Bayes",
    CriterionKind.KNOWN_MU: "Known mu",
    CriterionKind.MML_CONJ: "MML conjugate priors",
    CriterionKind.MML_CALIB: "MML calibrated conjugate",
    CriterionKind.MML_HC_SD: "MML half-Cauchy (s.d.)",
    CriterionKind.MML_HC_MEAN: "MML half-Cauchy (mean)",
}

MML_KINDS = frozenset({CriterionKind.MML_CONJ, CriterionKind.MML_CALIB,
                       CriterionKind.MML_HC_SD, CriterionKind.MML_HC_MEAN})
ORDER_SENSITIVE = frozenset({CriterionKind.OBJ_BAYES, CriterionKind.APPROX_BAYES})


@dataclass(frozen=True)
class CriterionId:
    """A selection criterion together with its hyperparameters.

    ``strict`` only matters for RANML: when True a sample whose mean estimate
    falls outside (0, mu_star] gets an infinite codelength; when False the
    codelength formula is evaluated as written (its integral term does not
    depend on the data).
    ``mu=None`` for the known-mean criterion means "bind the generating mean
    later" (see :meth:`with_mu`).
    ``beta_plugin`` applies to MML criteria whose geometric prior is a Beta
    density: the geometric codelength is evaluated at the shifted closed
    form estimate (n+a)/(n+a+b+s-3/2) instead of at the numeric minimizer.
    """

    kind: CriterionKind
    mu_star: Optional[float] = None
    mu: Optional[float] = None
    A: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    strict: bool = True
    beta_plugin: bool = False

    def __post_init__(self):
        k = self.kind
        if k is CriterionKind.RANML and not (self.mu_star and self.mu_star > 0):
            raise ValueError("RANML needs mu_star > 0")
        if k is CriterionKind.KNOWN_MU and self.mu is not None and not self.mu > 0:
            raise ValueError("known mean must be positive")
        if k is CriterionKind.MML_CONJ and not (
            self.A and self.A > 0 and self.alpha and self.alpha > 0 and self.beta and self.beta > 0
        ):
            raise ValueError("conjugate MML needs A, alpha, beta > 0")
        if k is CriterionKind.MML_CALIB and not (self.A and self.A > 1):
            raise ValueError("calibration undefined: need A > 1")
        if self.beta_plugin and k not in (CriterionKind.MML_CONJ, CriterionKind.MML_CALIB,
                                             CriterionKind.MML_HC_MEAN):
            raise ValueError("beta_plugin only applies to Beta-prior MML criteria")

    @classmethod
    def bic(cls):
        return cls(CriterionKind.BIC)

    @classmethod
    def ranml(cls, mu_star: float, strict: bool = True):
        return cls(CriterionKind.RANML, mu_star=float(mu_star), strict=strict)

    @classmethod
    def anml2(cls):
        return cls(CriterionKind.ANML2)

    @classmethod
    def obj_bayes(cls):
        return cls(CriterionKind.OBJ_BAYES)

    @classmethod
    def approx_bayes(cls):
        return cls(CriterionKind.APPROX_BAYES)

    @classmethod
    def known_mu(cls, mu: Optional[float] = None):
        return cls(CriterionKind.KNOWN_MU, mu=None if mu is None else float(mu))

    @classmethod
    def mml_conjugate(cls, A: float = 5.0, alpha: float = 1.0, beta: float = 1.0,
                      beta_plugin: bool = False):
        return cls(CriterionKind.MML_CONJ, A=float(A), alpha=float(alpha), beta=float(beta),
                   beta_plugin=beta_plugin)

    @classmethod
    def mml_calibrated(cls, A: float = 5.0, beta_plugin: bool = False):
        return cls(CriterionKind.MML_CALIB, A=float(A), beta_plugin=beta_plugin)

    @classmethod
    def mml_half_cauchy_sd(cls):
        return cls(CriterionKind.MML_HC_SD)

    @classmethod
    def mml_half_cauchy_mean(cls, beta_plugin: bool = False):
        return cls(CriterionKind.MML_HC_MEAN, beta_plugin=beta_plugin)

    def with_mu(self, mu: float) -> "CriterionId":
        if self.kind is CriterionKind.KNOWN_MU and self.mu is None:
            return replace(self, mu=float(mu))
        return self

    @property
    def label(self) -> str:
        if self.kind is CriterionKind.RANML:
            return f"RANML {self.mu_star:g}"
        return _LABELS[self.kind]

    @property
    def slug(self) -> str:
        if self.kind is CriterionKind.RANML:
            return f"ranml{self.mu_star:g}"
        return self.kind.value

    @property
    def order_sensitive(self) -> bool:
        return self.kind in ORDER_SENSITIVE

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        for name in ("mu_star", "mu", "A", "alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                d[name] = v
        if self.kind is CriterionKind.RANML:
            d["strict"] = self.strict
        if self.beta_plugin:
            d["beta_plugin"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionId":
        d = dict(d)
        return cls(kind=CriterionKind(d.pop("kind")), **d)


@dataclass(frozen=True)
class SampleStats:
    """Per-sample statistics for a block of samples of equal size ``n``.

    ``s``, ``lg`` (sum of ln Gamma(x+1)) and ``x1`` (first observation) are
    arrays of equal length.
    """

    n: int
    s: np.ndarray
    lg: np.ndarray
    x1: np.ndarray

    @classmethod
    def from_matrix(cls, X: np.ndarray) -> "SampleStats":
        X = np.asarray(X)
        return cls(
            n=X.shape[1],
            s=X.sum(axis=1),
            lg=gammaln(X + 1.0).sum(axis=1),
            x1=X[:, 0].copy(),
        )

    @classmethod
    def from_data(cls, data: CountData) -> "SampleStats":
        return cls(
            n=data.n,
            s=np.array([data.s]),
            lg=np.array([data.log_gamma_sum]),
            x1=np.array([data.values[0]]),
        )

    @classmethod
    def from_ns(cls, n: int, s) -> "SampleStats":
        """Statistics with the ln Gamma term dropped (it cancels in regret)."""
        s = np.atleast_1d(np.asarray(s, dtype=np.int64))
        z = np.zeros(s.shape)
        return cls(n=int(n), s=s, lg=z, x1=np.zeros(s.shape, dtype=np.int64))


def _scalar(v) -> float:
    return float(np.asarray(v).reshape(-1)[0])


def nll_at_mle_batch(model: ModelClass, st: SampleStats):
    mu_hat = st.s / st.n
    if ModelClass(model) is ModelClass.POISSON:
        return poisson_nll(mu_hat, st.n, st.s, st.lg)
    return geometric_nll_mu(mu_hat, st.n, st.s)


# BIC

def bic_batch(model: ModelClass, st: SampleStats):
    return nll_at_mle_batch(model, st) + 0.5 * math.log(st.n)


def bic(model: ModelClass, data: CountData) -> float:
    """Negative log-likelihood at the MLE plus 1/2 ln n."""
    return _scalar(bic_batch(model, SampleStats.from_data(data)))


# Restricted ANML

def fisher_integral(model: ModelClass, lo, hi):
    """Integral of sqrt(F_1(u)) over (lo, hi] for a single observation."""
    if ModelClass(model) is ModelClass.POISSON:
        return 2.0 * (np.sqrt(hi) - np.sqrt(lo))
    # antiderivative 2 ln(sqrt(u) + sqrt(u + 1)) = 2 asinh(sqrt(u))
    return 2.0 * (np.arcsinh(np.sqrt(hi)) - np.arcsinh(np.sqrt(lo)))


def ranml_batch(model: ModelClass, st: SampleStats, mu_star: float, strict: bool = True):
    out = (nll_at_mle_batch(model, st) + 0.5 * math.log(st.n) - HALF_LN_2PI
           + math.log(fisher_integral(model, 0.0, mu_star)))
    if strict:
        out = np.where(st.s > st.n * mu_star, np.inf, out)
    return out


def ranml(model: ModelClass, data: CountData, mu_star: float, strict: bool = True) -> float:
    """Restricted ANML codelength over the mean range (0, mu_star].

    With ``strict`` a mean estimate above ``mu_star`` yields ``inf``.
    """
    if not mu_star > 0:
        raise ValueError("mu_star must be positive")
    return _scalar(ranml_batch(model, SampleStats.from_data(data), mu_star, strict))


# Two-part ANML

def log2_star(b: int) -> float:
    """Iterated log2 sum keeping only the strictly positive terms (0 for b = 1)."""
    total = 0.0
    x = float(b)
    while True:
        x = math.log2(x)
        if x <= 0:
            return total
        total += x


def log_star_codelength(b: int) -> float:
    """Universal integer codelength l*(b) in nits."""
    if b < 1 or int(b) != b:
        raise ValueError("log-star undefined for b < 1")
    return (log2_star(int(b)) + math.log2(LOG2_STAR_CONST)) * math.log(2.0)


def region_index(n: int, s):
    """b = ceil(log2(s / n)) computed exactly in integers; b may be zero or negative.

    For s = 0 the mean estimate is merged into the lowest reachable region,
    b0 = ceil(log2(1 / n)), whose lower end is extended down to 0.
    """
    s = np.asarray(s, dtype=np.int64)
    target = np.where(s > 0, s, 1)
    b = np.ceil(np.log2(target / n)).astype(np.int64)
    # repair float rounding so that n 2^(b-1) < s <= n 2^b
    b = np.where(n * np.exp2(b - 1.0) >= target, b - 1, b)
    b = np.where(n * np.exp2(b.astype(float)) < target, b + 1, b)
    return b


def region_bounds(n: int, s):
    b = region_index(n, s)
    hi = np.exp2(b.astype(float))
    lo = np.where(np.asarray(s) > 0, hi / 2.0, 0.0)
    return b, lo, hi


def index_codelength(b):
    """Codelength of the region index: l*(b) for b >= 1, l*(1 - b) for b <= 0."""
    b = np.asarray(b, dtype=np.int64)
    return _LSTAR_TABLE[np.where(b >= 1, b, 1 - b)]


_LSTAR_TABLE = np.array([0.0] + [log_star_codelength(b) for b in range(1, 1100)])


def anml2_batch(model: ModelClass, st: SampleStats):
    b, lo, hi = region_bounds(st.n, st.s)
    region = fisher_integral(model, lo, hi)
    return (nll_at_mle_batch(model, st) + 0.5 * math.log(st.n) - HALF_LN_2PI
            + np.log(region) + index_codelength(b))


def anml_two_part(model: ModelClass, data: CountData) -> float:
    """Two-part ANML: index code for b plus restricted ANML on (2^(b-1), 2^b].

    ``b = ceil(log2(mean))`` with no lower clamp, so small means get their
    own dyadic regions. The index code only depends on ``b``, which both
    models share, so it never changes which model is selected.
    """
    return _scalar(anml2_batch(model, SampleStats.from_data(data)))


# Objective Bayes (Jeffreys posterior from the first observation)

def obj_bayes_batch(model: ModelClass, st: SampleStats):
    if st.n < 2:
        raise ValueError("objective Bayes requires at least two observations")
    s, x1, n = st.s, st.x1, st.n
    if ModelClass(model) is ModelClass.POISSON:
        rest_lg = st.lg - gammaln(x1 + 1.0)
        return gammaln(x1 + 0.5) - gammaln(s + 0.5) + (s + 0.5) * math.log(n) + rest_lg
    return -np.log(x1 + 0.5) - gammaln(s + 0.5) - gammaln(n) + gammaln(n + s + 0.5)


def objective_bayes(model: ModelClass, data: CountData) -> float:
    """Exact objective Bayes codelength of x_2..x_n given x_1 (sample order matters)."""
    return _scalar(obj_bayes_batch(model, SampleStats.from_data(data)))


def approx_bayes_batch(model: ModelClass, st: SampleStats):
    if st.n < 2:
        raise ValueError("objective Bayes requires at least two observations")
    n, x1 = st.n, st.x1
    s2 = st.s - x1
    m = n - 1
    mu2 = s2 / m
    degenerate = s2 == 0
    mu2 = np.where(degenerate, 1.0, mu2)  # placeholder, masked below
    common = 0.5 * math.log(n) - HALF_LN_2PI
    if ModelClass(model) is ModelClass.POISSON:
        rest_lg = st.lg - gammaln(x1 + 1.0)
        out = (poisson_nll(mu2, m, s2, rest_lg) + common + mu2 - x1 * np.log(mu2)
               + gammaln(x1 + 0.5))
    else:
        out = (geometric_nll_mu(mu2, m, s2) + common + x1 * np.log1p(1.0 / mu2)
               + 0.5 * np.log(mu2) - np.log(x1 + 0.5))
    return np.where(degenerate, np.inf, out)


def approx_objective_bayes(model: ModelClass, data: CountData) -> float:
    """Asymptotic objective Bayes codelength; ``inf`` when x_2..x_n are all zero."""
    return _scalar(approx_bayes_batch(model, SampleStats.from_data(data)))


# Known mean

def known_mu_batch(model: ModelClass, st: SampleStats, mu: float):
    if ModelClass(model) is ModelClass.POISSON:
        return poisson_nll(mu, st.n, st.s, st.lg)
    return geometric_nll_mu(mu, st.n, st.s)


def known_mu(model: ModelClass, data: CountData, mu: float) -> float:
    """Negative log-likelihood at the true generating mean."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    return _scalar(known_mu_batch(model, SampleStats.from_data(data), mu))
