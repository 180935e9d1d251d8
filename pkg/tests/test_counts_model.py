import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from countsel.counts_model import (CountData, DegenerateError, GeomParam, ModelClass, fisher,
                                   log_pmf, mle, negloglik, sample, sample_matrix, suff_stats)

P, G = ModelClass.POISSON, ModelClass.GEOMETRIC
X = suff_stats([1, 2, 3, 4, 5])
counts = st.lists(st.integers(0, 60), min_size=1, max_size=30)


def test_suff_stats_examples():
    assert (X.n, X.s) == (5, 15)
    assert X.log_gamma_sum == pytest.approx(10.4504522229, abs=1e-9)
    z = suff_stats([0, 0, 0])
    assert (z.n, z.s, z.log_gamma_sum) == (3, 0, 0.0)
    assert suff_stats([7]).log_gamma_sum == pytest.approx(math.log(5040), abs=1e-12)


@pytest.mark.parametrize("bad", [[-1], [1.5], ["a"], [True], [float("nan")]])
def test_suff_stats_invalid(bad):
    with pytest.raises(ValueError, match="invalid count"):
        suff_stats(bad)


def test_suff_stats_empty():
    with pytest.raises(ValueError, match="empty sample"):
        suff_stats([])


def test_negloglik_examples():
    assert negloglik(P, 3.0, X) == pytest.approx(8.971267892896, abs=1e-9)
    assert negloglik(G, 0.25, X) == pytest.approx(11.246702892376, abs=1e-9)
    assert negloglik(G, GeomParam.from_mean(3.0), X) == pytest.approx(11.246702892376, abs=1e-9)
    assert negloglik(G, 1.0, suff_stats([0, 0, 0])) == 0.0
    assert negloglik(G, GeomParam.from_mean(0.0), suff_stats([0, 0])) == 0.0


def test_negloglik_errors():
    with pytest.raises(ValueError, match="parameter out of range"):
        negloglik(P, -1.0, X)
    with pytest.raises(ValueError, match="parameter out of range"):
        negloglik(G, 1.5, X)
    with pytest.raises(DegenerateError, match="degenerate parameter"):
        negloglik(G, 1.0, X)
    with pytest.raises(DegenerateError, match="degenerate parameter"):
        negloglik(P, 0.0, X)


def test_mle_examples():
    assert mle(P, X) == 3.0
    assert mle(G, X) == 0.25
    assert mle(G, X, parameterization="mu") == 3.0
    assert mle(G, suff_stats([0, 0])) == 1.0


def test_fisher_examples():
    assert fisher(P, 3.0, 5) == pytest.approx(5 / 3, rel=1e-14)
    assert fisher(G, 0.25, 5) == pytest.approx(106.666666667, rel=1e-10)
    assert fisher(G, GeomParam.from_mean(3.0), 5) == pytest.approx(5 / 12, rel=1e-14)
    for bad in [(P, 0.0), (G, 1.0), (G, GeomParam.from_mean(0.0))]:
        with pytest.raises(ValueError, match="Fisher information undefined at boundary"):
            fisher(*bad, 5)


@given(st.floats(1e-6, 1 - 1e-6))
def test_geom_param_round_trip(p):
    g = GeomParam.from_p(p)
    back = GeomParam.from_mean(g.mu).p
    assert abs(back - p) <= 1e-12 * p


@given(counts, st.floats(1e-4, 1 - 1e-4))
def test_parameterization_consistency(vals, p):
    d = suff_stats(vals)
    a = negloglik(G, p, d)
    b = negloglik(G, GeomParam.from_mean((1 - p) / p), d)
    assert abs(a - b) < 1e-10 * max(1.0, abs(a))


@given(counts, st.integers(0, 2**32 - 1))
def test_mle_is_optimal(vals, seed):
    d = suff_stats(vals)
    rng = np.random.default_rng(seed)
    lam_hat, p_hat = mle(P, d), mle(G, d)
    best_p = negloglik(P, lam_hat, d) if d.s else d.log_gamma_sum
    best_g = negloglik(G, p_hat, d)
    for lam in rng.uniform(1e-3, 80, 100):
        assert best_p <= negloglik(P, lam, d) + 1e-9
    for p in rng.uniform(1e-3, 1 - 1e-3, 100):
        assert best_g <= negloglik(G, p, d) + 1e-9


@given(st.floats(1e-3, 1 - 1e-3), st.integers(1, 100))
def test_fisher_reparameterization(p, n):
    mu = (1 - p) / p
    dp_dmu = -1.0 / (1 + mu) ** 2
    assert fisher(G, GeomParam.from_mean(mu), n) == pytest.approx(fisher(G, p, n) * dp_dmu ** 2, rel=1e-10)


def test_sampler_moments():
    rng = np.random.default_rng(123)
    xp = sample_matrix(P, 2.0, 10**6, rng)
    assert abs(xp.mean() - 2.0) < 0.006
    xg = sample_matrix(G, 80.0, 10**6, rng)
    assert abs(xg.mean() - 80.0) < 0.33


def test_sampler_deterministic():
    a = sample(P, 3.0, 50, np.random.default_rng(9))
    b = sample(P, 3.0, 50, np.random.default_rng(9))
    assert a == b
    with pytest.raises(ValueError):
        sample(P, 0.0, 5, np.random.default_rng(0))


@pytest.mark.parametrize("model", [P, G])
@pytest.mark.parametrize("mean", [2.0, 8.0, 80.0])
def test_sampler_chi_square(model, mean):
    rng = np.random.default_rng(2024 + int(mean))
    draws = sample_matrix(model, mean, 10**5, rng)
    # bins with expected count >= 20, tail pooled
    probs = np.exp(log_pmf(model, np.arange(0, 4000), mean))
    edges = []
    acc = 0.0
    for k, pk in enumerate(probs):
        acc += pk
        if acc * 1e5 >= 20:
            edges.append(k)
            acc = 0.0
    edges = edges[:-1]
    bins = np.searchsorted(edges, draws, side="left")
    observed = np.bincount(bins, minlength=len(edges) + 1)
    cum = np.concatenate([[0.0], np.cumsum(probs)])
    upper = np.array(edges)
    p_bins = np.diff(np.concatenate([[0.0], cum[upper + 1], [1.0]]))
    expected = p_bins * draws.size
    assert stats.chisquare(observed, expected).pvalue > 1e-4
