"""MML87 message lengths and estimators for the Poisson and geometric models.

The one-parameter Wallace-Freeman message length is

    I(x, theta) = -ln pi(theta) + 1/2 ln F(theta) - 1/2 ln 12      (assertion)
                  + 1/2 - ln f(x | theta)                            (detail)

with ``theta = lambda`` for the Poisson model and ``theta = p`` for the
geometric model. The estimate is defined as the numeric minimizer of this
expression; closed forms are exposed separately as cross-checks.

For priors whose density is singular at the boundary the prior and Fisher
terms are combined analytically (the +-1/2 ln(1-p) and +-1/2 ln(lambda)
pieces cancel), so message lengths stay finite at the boundary whenever the
limit exists.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import betaln, digamma, expit, logit, xlogy

from .counts_model import CountData, DegenerateError, ModelClass, geometric_nll_p, poisson_nll
from .optimize import minimize_line
from .roots import polyval, real_roots

HALF_LN12 = 0.5 * math.log(12.0)
KAPPA_1 = 1.0 / 12.0


class PriorFamily(str, enum.Enum):
    CONJUGATE_EXP = "conjugate-exp"
    CONJUGATE_BETA = "conjugate-beta"
    CALIBRATED = "calibrated"
    HALF_CAUCHY_SD = "half-cauchy-sd"
    HALF_CAUCHY_MEAN = "half-cauchy-mean"


@dataclass(frozen=True)
class PriorSpec:
    family: PriorFamily
    applies_to: ModelClass
    A: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        fam, model = self.family, self.applies_to
        if fam is PriorFamily.CONJUGATE_EXP:
            if model is not ModelClass.POISSON:
                raise ValueError("exponential prior applies to the Poisson model only")
            if not (self.A is not None and self.A > 0):
                raise ValueError("exponential prior needs A > 0")
        elif fam is PriorFamily.CONJUGATE_BETA:
            if model is not ModelClass.GEOMETRIC:
                raise ValueError("beta prior applies to the geometric model only")
            if not (self.alpha and self.alpha > 0 and self.beta and self.beta > 0):
                raise ValueError("beta prior needs alpha, beta > 0")
        elif fam is PriorFamily.CALIBRATED:
            if not (self.A is not None and self.A > 1):
                raise ValueError("calibration undefined: need A > 1")

    @classmethod
    def conjugate_exp(cls, A: float) -> "PriorSpec":
        return cls(PriorFamily.CONJUGATE_EXP, ModelClass.POISSON, A=float(A))

    @classmethod
    def conjugate_beta(cls, alpha: float, beta: float) -> "PriorSpec":
        return cls(PriorFamily.CONJUGATE_BETA, ModelClass.GEOMETRIC, alpha=float(alpha), beta=float(beta))

    @classmethod
    def calibrated(cls, A: float, model: ModelClass) -> "PriorSpec":
        return cls(PriorFamily.CALIBRATED, ModelClass(model), A=float(A))

    @classmethod
    def half_cauchy_sd(cls, model: ModelClass) -> "PriorSpec":
        return cls(PriorFamily.HALF_CAUCHY_SD, ModelClass(model))

    @classmethod
    def half_cauchy_mean(cls, model: ModelClass) -> "PriorSpec":
        return cls(PriorFamily.HALF_CAUCHY_MEAN, ModelClass(model))

    def resolve(self) -> tuple:
        """Concrete density: ("exp", A), ("beta", a, b), ("hc-poisson",) or ("hc-geometric",)."""
        fam, model = self.family, self.applies_to
        if fam is PriorFamily.CONJUGATE_EXP:
            return ("exp", self.A)
        if fam is PriorFamily.CONJUGATE_BETA:
            return ("beta", self.alpha, self.beta)
        if fam is PriorFamily.CALIBRATED:
            if model is ModelClass.POISSON:
                return ("exp", self.A)
            a, b = calibrate_beta(self.A)
            return ("beta", a, b)
        if model is ModelClass.POISSON:
            # sqrt(lambda) is both the s.d. and the root mean
            return ("hc-poisson",)
        if fam is PriorFamily.HALF_CAUCHY_SD:
            return ("hc-geometric",)
        return ("beta", 0.5, 0.5)


def calibrate_beta(A: float) -> tuple[float, float]:
    """Beta hyperparameters whose prior mean of (1-p)/p equals ``A``."""
    if not A > 1:
        raise ValueError("calibration undefined: need A > 1")
    a = A / (A - 1.0)
    return a, a


def _density(key: tuple, theta):
    kind = key[0]
    if kind == "exp":
        A = key[1]
        return np.exp(-theta / A) / A
    if kind == "beta":
        a, b = key[1], key[2]
        return np.exp(xlogy(a - 1, theta) + xlogy(b - 1, 1 - theta) - betaln(a, b))
    if kind == "hc-poisson":
        return 1.0 / (np.pi * np.sqrt(theta) * (1.0 + theta))
    p = theta
    return (2.0 - p) / (np.pi * np.sqrt(1.0 - p) * (p * p - p + 1.0))


def prior_density(prior: PriorSpec, param: float) -> float:
    """Prior density at ``param`` (lambda for Poisson, p for geometric)."""
    if prior.applies_to is ModelClass.POISSON:
        if not 0 < param < math.inf:
            raise ValueError("parameter outside prior support (0, inf)")
    elif not 0 < param < 1:
        raise ValueError("parameter outside prior support (0, 1)")
    return float(_density(prior.resolve(), param))


# -ln pi(theta) + 1/2 ln F(theta), with singular pieces cancelled analytically.

def _prior_fisher(key: tuple, theta, n: int):
    kind = key[0]
    half_ln_n = 0.5 * math.log(n)
    if kind == "exp":
        A = key[1]
        return math.log(A) + theta / A + half_ln_n - 0.5 * np.log(theta)
    if kind == "hc-poisson":
        return math.log(math.pi) + np.log1p(theta) + half_ln_n
    p = theta
    if kind == "beta":
        a, b = key[1], key[2]
        return betaln(a, b) + half_ln_n - a * np.log(p) - xlogy(b - 0.5, 1.0 - p)
    return math.log(math.pi) + half_ln_n - np.log(2.0 - p) + np.log(p * p - p + 1.0) - np.log(p)


def _prior_fisher_grad(key: tuple, theta):
    kind = key[0]
    if kind == "exp":
        return 1.0 / key[1] - 0.5 / theta
    if kind == "hc-poisson":
        return 1.0 / (1.0 + theta)
    p = theta
    if kind == "beta":
        a, b = key[1], key[2]
        return -a / p + (b - 0.5) / (1.0 - p)
    return 1.0 / (2.0 - p) + (2.0 * p - 1.0) / (p * p - p + 1.0) - 1.0 / p


def _nll_core(model: ModelClass, theta, n: int, s: int):
    """Negative log-likelihood without the data-only ln Gamma term."""
    if model is ModelClass.POISSON:
        return poisson_nll(theta, n, s, 0.0)
    return geometric_nll_p(theta, n, s)


def _nll_grad(model: ModelClass, theta, n: int, s: int):
    if model is ModelClass.POISSON:
        return n - s / theta
    return s / (1.0 - theta) - n / theta


@dataclass(frozen=True)
class MmlFit:
    """An MML87 estimate and its two-part message length (nits).

    ``uncertainty_width`` is ``(F(theta) / 12) ** -0.5``; it is 0 for a
    boundary estimate, where the Fisher information diverges.
    """

    estimate: float
    message_length: float
    assertion_length: float
    detail_length: float
    uncertainty_width: float
    boundary: bool = False


def _width(model: ModelClass, theta: float, n: int) -> float:
    if model is ModelClass.POISSON:
        F = n / theta if theta > 0 else math.inf
    else:
        F = n / (theta * theta * (1.0 - theta)) if theta < 1 else math.inf
    return 0.0 if math.isinf(F) else (F * KAPPA_1) ** -0.5


def _components(model: ModelClass, key: tuple, theta: float, n: int, s: int) -> tuple[float, float]:
    with np.errstate(divide="ignore", invalid="ignore"):
        assertion = float(_prior_fisher(key, theta, n)) - HALF_LN12
        detail = 0.5 + float(_nll_core(model, theta, n, s))
    return assertion, detail


def _check_applies(model: ModelClass, prior: PriorSpec):
    if prior.applies_to is not model:
        raise ValueError(f"prior for {prior.applies_to.value} used with {model.value} model")


def mml87_message_length(model: ModelClass, prior: PriorSpec, param: float, data: CountData) -> MmlFit:
    """Message length components at a given parameter (lambda or p).

    Boundary parameters (lambda = 0, p = 1) are allowed when the combined
    prior-Fisher term and the likelihood have a finite limit there.
    """
    model = ModelClass(model)
    _check_applies(model, prior)
    theta = float(param)
    if model is ModelClass.POISSON:
        if not 0 <= theta < math.inf:
            raise ValueError("parameter out of range")
    elif not 0 < theta <= 1:
        raise ValueError("parameter out of range")
    assertion, detail = _components(model, prior.resolve(), theta, data.n, data.s)
    if model is ModelClass.POISSON:
        detail += data.log_gamma_sum
    total = assertion + detail
    if not math.isfinite(total):
        raise DegenerateError("infinite codelength")
    at_boundary = theta == (0.0 if model is ModelClass.POISSON else 1.0)
    return MmlFit(theta, total, assertion, detail, _width(model, theta, data.n), at_boundary)


def _to_theta(model: ModelClass, t):
    return np.exp(t) if model is ModelClass.POISSON else expit(t)


def _boundary_candidate(model: ModelClass, key: tuple, n: int, s: int) -> Optional[float]:
    """Limit of the (ln Gamma free) message length at the boundary, or None if +inf."""
    if s > 0:
        return None
    if key[0] == "exp":
        return None
    if key[0] == "beta" and key[2] > 0.5:
        return None
    if key[0] == "beta" and key[2] < 0.5:
        raise DegenerateError("infinite codelength: message length unbounded below at p = 1")
    theta = 0.0 if model is ModelClass.POISSON else 1.0
    a, d = _components(model, key, theta, n, s)
    return a + d


@lru_cache(maxsize=200_000)
def _fit_core(model: ModelClass, key: tuple, n: int, s: int) -> tuple[float, float, float, bool]:
    """(theta_hat, assertion, detail_without_lngamma, boundary) for the given (n, s)."""

    def f(t):
        theta = _to_theta(model, t)
        return _prior_fisher(key, theta, n) + _nll_core(model, theta, n, s)

    def dfdt(t):
        # sign of dI/dt equals sign of dI/dtheta; the chain factor keeps the
        # root well scaled in t
        theta = _to_theta(model, t)
        jac = theta if model is ModelClass.POISSON else theta * (1.0 - theta)
        return (_prior_fisher_grad(key, theta) + _nll_grad(model, theta, n, s)) * jac

    if model is ModelClass.POISSON:
        center = math.log((s + 0.5) / n)
        boundary_edge = "low"
    else:
        center = float(logit((n + 0.5) / (n + s + 1.0)))
        boundary_edge = "high"

    bval = _boundary_candidate(model, key, n, s)
    res = minimize_line(f, center, dfdt=dfdt)
    if res.at_edge is not None and res.at_edge != boundary_edge:
        raise ArithmeticError("MML minimizer did not converge")
    if bval is not None and (res.at_edge is not None or bval <= res.value):
        theta = 0.0 if model is ModelClass.POISSON else 1.0
        a, d = _components(model, key, theta, n, s)
        return theta, a, d, True
    if res.at_edge is not None:
        raise ArithmeticError("MML minimizer ran to the boundary with no finite limit")
    theta = float(_to_theta(model, res.t))
    a, d = _components(model, key, theta, n, s)
    return theta, a, d, False


def mml_estimate(model: ModelClass, prior: PriorSpec, data: CountData) -> MmlFit:
    """MML87 estimate by numeric minimization of the message length.

    The estimate is lambda for the Poisson model and p for the geometric
    model. When the infimum is at the boundary (s = 0 under the half-Cauchy
    and Beta(., 1/2) priors) the limit message length is returned and
    ``boundary`` is set.
    """
    model = ModelClass(model)
    _check_applies(model, prior)
    theta, a, d, boundary = _fit_core(model, prior.resolve(), data.n, data.s)
    if model is ModelClass.POISSON:
        d += data.log_gamma_sum
    return MmlFit(theta, a + d, a, d, _width(model, theta, data.n), boundary)


def mml_codelength_core(model: ModelClass, prior: PriorSpec, n: int, s: int) -> float:
    """Minimum message length as a function of (n, s), without sum ln Gamma(x+1)."""
    _, a, d, _ = _fit_core(ModelClass(model), prior.resolve(), int(n), int(s))
    return a + d


def mml_codelength_core_plugin(n: int, s: int, alpha: float, beta: float) -> float:
    """Geometric Beta-prior message length at the shifted closed-form estimate.

    Falls back to the numeric minimum when that estimate leaves (0, 1),
    which happens for s = 0 and small s with beta < 3/2.
    """
    p = geometric_beta_estimate_shifted(n, s, alpha, beta)
    key = ("beta", float(alpha), float(beta))
    if 0.0 < p < 1.0:
        a, d = _components(ModelClass.GEOMETRIC, key, p, n, s)
        return a + d
    _, a, d, _ = _fit_core(ModelClass.GEOMETRIC, key, int(n), int(s))
    return a + d


# Closed forms (cross-checks for the numeric minimizer).

def poisson_exp_estimate(n: int, s: int, A: float) -> float:
    return (s + 0.5) / (n + 1.0 / A)


def poisson_half_cauchy_estimate(n: int, s: int) -> float:
    return (math.sqrt(s * s + 2 * s * (n - 1) + (n + 1) ** 2) + s - n - 1) / (2 * n)


def geometric_beta_estimate_shifted(n: int, s: int, alpha: float, beta: float) -> float:
    """Beta-prior closed form with a -3/2 denominator offset (one less than the stationary point)."""
    return (n + alpha) / (n + alpha + beta + s - 1.5)


def geometric_beta_estimate(n: int, s: int, alpha: float, beta: float) -> float:
    """Stationary point of the Beta-prior message length (offset -1/2)."""
    return (n + alpha) / (n + alpha + beta + s - 0.5)


def geometric_half_cauchy_quartic(n: int, s: int) -> list[int]:
    """Coefficients (highest first) of the half-Cauchy stationarity quartic in p."""
    return [-(s + n), 3 * s + 4 * n - 1, -(3 * s + 6 * n + 1), 2 * s + 5 * n + 4, -2 * n - 2]


def quartic_geometric_roots(n: int, s: int) -> list[float]:
    """Real roots of the half-Cauchy quartic in (0, 1], ascending."""
    if n < 1:
        raise ValueError("n must be positive")
    return real_roots(geometric_half_cauchy_quartic(n, s), 0, 1)


def geometric_half_cauchy_estimate_quartic(n: int, s: int) -> float:
    """Admissible quartic root with the smallest message length (ties -> larger p)."""
    key = ("hc-geometric",)
    best = None
    for r in quartic_geometric_roots(n, s):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = float(_prior_fisher(key, r, n) + _nll_core(ModelClass.GEOMETRIC, r, n, s))
        if math.isnan(v):
            continue
        if best is None or v < best[1] or (v == best[1] and r > best[0]):
            best = (r, v)
    if best is None:
        raise ArithmeticError("no admissible quartic root")
    return best[0]


def geometric_half_cauchy_estimate_asymptotic(n: int, s: int) -> float:
    return (n + 1) / (2.5 * n + s + 2)


def quartic_value(n: int, s: int, p: float) -> float:
    return float(polyval(geometric_half_cauchy_quartic(n, s), p))


# Bernoulli fixture with a uniform prior.

@dataclass(frozen=True)
class BernoulliFit:
    estimate: float
    message_length: float
    uncertainty_width: float


def bernoulli_message_length(n: int, n1: int, p):
    return (-xlogy(n1, p) - xlogy(n - n1, 1 - p) + 0.5 * np.log(n / (p * (1 - p)))
            - HALF_LN12 + 0.5)


def bernoulli_width(n: int, p):
    return np.sqrt(12.0 * p * (1.0 - p) / n)


def bernoulli_mml(n: int, n1: int) -> BernoulliFit:
    if not 0 <= n1 <= n or n < 1:
        raise ValueError("need 0 <= n1 <= n and n >= 1")
    p = (n1 + 0.5) / (n + 1.0)
    return BernoulliFit(p, float(bernoulli_message_length(n, n1, p)), float(bernoulli_width(n, p)))


def log_kappa_approx(k: int) -> float:
    """ln kappa_k from (k/2)(ln kappa_k + 1) ~ -(k/2) ln 2pi + 1/2 ln(k pi) + psi(1)."""
    rhs = -0.5 * k * math.log(2 * math.pi) + 0.5 * math.log(k * math.pi) + float(digamma(1.0))
    return 2.0 * rhs / k - 1.0


def bernoulli_jeffreys_message_length(n: int, n1: int, p, log_kappa: Optional[float] = None):
    """MML87 length of Bernoulli data under the Jeffreys prior Beta(1/2, 1/2).

    Uses the lattice-constant approximation by default, under which this
    equals ``-ln f + ln pi + 1/2 ln(n / 2 pi) + 1/2 ln pi + psi(1)``.
    """
    if log_kappa is None:
        log_kappa = log_kappa_approx(1)
    neg_log_prior = math.log(math.pi) + 0.5 * np.log(p * (1 - p))
    fisher = n / (p * (1 - p))
    return (neg_log_prior + 0.5 * np.log(fisher) + 0.5 * log_kappa + 0.5
            - xlogy(n1, p) - xlogy(n - n1, 1 - p))
