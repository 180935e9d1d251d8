"""Poisson and geometric count models.

Likelihoods, maximum likelihood estimates, Fisher information and exact
samplers. All codelengths are in nits. The geometric model is available in
its success-probability form ``p`` and in its mean form ``mu = (1 - p) / p``.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln, xlogy


class ModelClass(str, enum.Enum):
    POISSON = "poisson"
    GEOMETRIC = "geometric"

    @classmethod
    def parse(cls, name: str) -> "ModelClass":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown model {name!r}; expected 'poisson' or 'geometric'") from None


class DegenerateError(ArithmeticError):
    """A codelength or parameter is infinite or undefined for the given data."""


@dataclass(frozen=True)
class CountData:
    """An immutable sample of non-negative integer counts.

    Build it with :func:`suff_stats`, which validates the input and fills the
    cached statistics.
    """

    values: tuple[int, ...]
    n: int
    s: int
    log_gamma_sum: float = field(repr=False)

    @property
    def mean(self) -> float:
        return self.s / self.n

    def __len__(self) -> int:
        return self.n


def _as_count(x) -> int:
    if isinstance(x, bool):
        raise ValueError(f"invalid count {x!r}")
    if isinstance(x, numbers.Integral):
        v = int(x)
    elif isinstance(x, numbers.Real) and math.isfinite(x) and float(x).is_integer():
        v = int(x)
    else:
        raise ValueError(f"invalid count {x!r}")
    if v < 0:
        raise ValueError(f"invalid count {x!r}")
    return v


def suff_stats(values: Sequence[int]) -> CountData:
    """Validate ``values`` and return them with n, s and sum of ln Gamma(x+1)."""
    vals = tuple(_as_count(x) for x in values)
    if not vals:
        raise ValueError("empty sample")
    lg = math.fsum(math.lgamma(v + 1) for v in vals)
    return CountData(values=vals, n=len(vals), s=sum(vals), log_gamma_sum=lg)


@dataclass(frozen=True)
class GeomParam:
    """Geometric parameter, stored in the form it was given."""

    parameterization: str  # "p" or "mu"
    value: float

    @classmethod
    def from_p(cls, p: float) -> "GeomParam":
        if not 0.0 < p <= 1.0:
            raise ValueError("parameter out of range: need 0 < p <= 1")
        return cls("p", float(p))

    @classmethod
    def from_mean(cls, mu: float) -> "GeomParam":
        if not mu >= 0.0 or math.isinf(mu):
            raise ValueError("parameter out of range: need mu >= 0")
        return cls("mu", float(mu))

    @property
    def p(self) -> float:
        return self.value if self.parameterization == "p" else 1.0 / (1.0 + self.value)

    @property
    def mu(self) -> float:
        return self.value if self.parameterization == "mu" else (1.0 - self.value) / self.value


def _geom_param(param) -> GeomParam:
    if isinstance(param, GeomParam):
        return param
    return GeomParam.from_p(param)


# Vectorized kernels. ``s`` and ``lg`` may be arrays; these are shared by the
# scalar API below and by the batch criteria used in simulation.

def poisson_nll(lam, n, s, lg):
    """-s ln(lam) + n lam + sum ln Gamma(x+1), with 0 ln 0 = 0."""
    return -xlogy(s, lam) + n * lam + lg


def geometric_nll_p(p, n, s):
    return -xlogy(s, 1.0 - p) - n * np.log(p)


def geometric_nll_mu(mu, n, s):
    return -xlogy(s, mu) + xlogy(s + n, 1.0 + mu)


def negloglik(model: ModelClass, param, data: CountData) -> float:
    """Negative log-likelihood of ``data`` in nits.

    For the geometric model ``param`` is a :class:`GeomParam` or a bare
    success probability ``p``.
    """
    model = ModelClass(model)
    if model is ModelClass.POISSON:
        lam = float(param)
        if not lam >= 0.0 or math.isinf(lam):
            raise ValueError("parameter out of range: need lambda > 0")
        if lam == 0.0 and data.s > 0:
            raise DegenerateError("degenerate parameter: lambda = 0 with s > 0")
        return float(poisson_nll(lam, data.n, data.s, data.log_gamma_sum))
    g = _geom_param(param)
    if g.parameterization == "mu":
        if g.value == 0.0 and data.s > 0:
            raise DegenerateError("degenerate parameter: mu = 0 with s > 0")
        return float(geometric_nll_mu(g.value, data.n, data.s))
    if g.value == 1.0 and data.s > 0:
        raise DegenerateError("degenerate parameter: p = 1 with s > 0")
    return float(geometric_nll_p(g.value, data.n, data.s))


def mle(model: ModelClass, data: CountData, parameterization: str = "p") -> float:
    """Maximum likelihood estimate.

    Poisson returns ``s/n``. Geometric returns ``n/(n+s)`` or, with
    ``parameterization="mu"``, the mean estimate ``s/n``. For ``s = 0`` the
    values sit on the boundary (0 or 1).
    """
    if ModelClass(model) is ModelClass.POISSON or parameterization == "mu":
        return data.s / data.n
    return data.n / (data.n + data.s)


def fisher(model: ModelClass, param, n: int) -> float:
    """Fisher information of ``n`` observations.

    Poisson: n/lam. Geometric: n/(p^2 (1-p)) in the p form and
    n/(mu (1+mu)) in the mean form.
    """
    if ModelClass(model) is ModelClass.POISSON:
        lam = float(param)
        if not lam > 0.0 or math.isinf(lam):
            raise ValueError("Fisher information undefined at boundary")
        return n / lam
    g = _geom_param(param)
    if g.parameterization == "mu":
        mu = g.value
        if not mu > 0.0:
            raise ValueError("Fisher information undefined at boundary")
        return n / (mu * (1.0 + mu))
    p = g.value
    if not 0.0 < p < 1.0:
        raise ValueError("Fisher information undefined at boundary")
    return n / (p * p * (1.0 - p))


def log_pmf(model: ModelClass, x, mean: float):
    """Log probability mass at ``x`` (vectorized) for the model with the given mean."""
    x = np.asarray(x)
    if ModelClass(model) is ModelClass.POISSON:
        return xlogy(x, mean) - mean - gammaln(x + 1)
    return xlogy(x, mean) - (x + 1) * np.log1p(mean)


def sample_matrix(model: ModelClass, mean: float, size, rng: np.random.Generator) -> np.ndarray:
    """Draw an integer array of iid counts with the given mean.

    Geometric draws use ``floor(ln U / ln(1 - p))`` with ``U`` uniform on
    (0, 1] and ``p = 1/(1 + mean)``. Poisson draws use numpy's exact sampler.
    """
    if not mean > 0.0 or math.isinf(mean):
        raise ValueError("mean must be positive and finite")
    if ModelClass(model) is ModelClass.POISSON:
        return rng.poisson(mean, size=size).astype(np.int64)
    u = 1.0 - rng.random(size)  # (0, 1]
    log_q = -np.log1p(1.0 / mean)  # ln(1 - p)
    return np.floor(np.log(u) / log_q).astype(np.int64)


def sample(model: ModelClass, mean: float, n: int, rng: np.random.Generator) -> CountData:
    if n < 1:
        raise ValueError("sample size must be positive")
    draws = sample_matrix(model, mean, n, rng)
    return suff_stats(draws.tolist())
