import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, optimize

from countsel.counts_model import DegenerateError, ModelClass, suff_stats
from countsel.mml_core import (PriorSpec, bernoulli_jeffreys_message_length, bernoulli_message_length,
                               bernoulli_mml, bernoulli_width, calibrate_beta, geometric_beta_estimate,
                               geometric_beta_estimate_shifted,
                               geometric_half_cauchy_estimate_asymptotic,
                               geometric_half_cauchy_estimate_quartic, log_kappa_approx,
                               mml87_message_length, mml_codelength_core_plugin, mml_estimate,
                               poisson_exp_estimate, poisson_half_cauchy_estimate, prior_density,
                               quartic_geometric_roots, quartic_value)

P, G = ModelClass.POISSON, ModelClass.GEOMETRIC
X = suff_stats([1, 2, 3, 4, 5])
ZEROS = suff_stats([0] * 5)


def test_prior_density_examples():
    assert prior_density(PriorSpec.half_cauchy_sd(P), 1.0) == pytest.approx(0.159154943092, rel=1e-11)
    assert prior_density(PriorSpec.half_cauchy_sd(G), 0.5) == pytest.approx(0.900316316157, rel=1e-11)
    assert prior_density(PriorSpec.conjugate_exp(5), 5.0) == pytest.approx(0.073575888234, rel=1e-11)
    with pytest.raises(ValueError):
        prior_density(PriorSpec.half_cauchy_sd(G), 1.0)
    with pytest.raises(ValueError):
        prior_density(PriorSpec.conjugate_exp(5), -1.0)


@pytest.mark.parametrize("prior", [
    PriorSpec.conjugate_exp(5), PriorSpec.conjugate_exp(0.7), PriorSpec.half_cauchy_sd(P),
    PriorSpec.conjugate_beta(1, 1), PriorSpec.conjugate_beta(2.5, 0.7), PriorSpec.calibrated(5, G),
    PriorSpec.half_cauchy_sd(G), PriorSpec.half_cauchy_mean(G),
], ids=str)
def test_prior_normalization(prior):
    f = lambda t: prior_density(prior, t)
    if prior.applies_to is P:
        total = integrate.quad(f, 0, 1)[0] + integrate.quad(f, 1, np.inf)[0]
    else:
        total = integrate.quad(f, 0, 0.5)[0] + integrate.quad(f, 0.5, 1)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_calibrate_beta():
    assert calibrate_beta(5) == (1.25, 1.25)
    assert calibrate_beta(2) == (2.0, 2.0)
    assert calibrate_beta(1e9)[0] == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError, match="calibration undefined"):
        calibrate_beta(1.0)
    with pytest.raises(ValueError, match="calibration undefined"):
        PriorSpec.calibrated(0.5, G)
    a, b = calibrate_beta(5)
    prior = PriorSpec.conjugate_beta(a, b)
    mean = integrate.quad(lambda p: (1 - p) / p * prior_density(prior, p), 0, 1, limit=200)[0]
    assert mean == pytest.approx(5.0, rel=1e-6)


def test_half_cauchy_mean_is_jeffreys_beta():
    grid = np.linspace(1e-4, 1 - 1e-4, 1000)
    hc = PriorSpec.half_cauchy_mean(G)
    jb = PriorSpec.conjugate_beta(0.5, 0.5)
    diff = [abs(prior_density(hc, p) - prior_density(jb, p)) for p in grid]
    assert max(diff) < 1e-10


def test_message_length_components():
    fit = mml87_message_length(P, PriorSpec.conjugate_exp(5), 2.980769230769, X)
    assert fit.message_length == pytest.approx(10.69334409244, abs=1e-9)
    assert fit.message_length == pytest.approx(fit.assertion_length + fit.detail_length, abs=1e-10)
    assert fit.uncertainty_width == pytest.approx((5 / 2.980769230769 / 12) ** -0.5)
    grid = np.linspace(2.5, 3.5, 2001)
    vals = [mml87_message_length(P, PriorSpec.conjugate_exp(5), g, X).message_length for g in grid]
    assert fit.message_length <= min(vals) + 1e-12


def test_message_length_geometric_boundary_limit():
    fit = mml87_message_length(G, PriorSpec.half_cauchy_sd(G), 1.0, ZEROS)
    expected = math.log(math.pi) + 0.5 * math.log(5) - 0.5 * math.log(12) + 0.5
    assert fit.message_length == pytest.approx(expected, abs=1e-12)
    assert fit.message_length == pytest.approx(1.206995517, abs=1e-9)
    assert fit.boundary
    near = mml87_message_length(G, PriorSpec.half_cauchy_sd(G), 1 - 1e-9, ZEROS)
    assert near.message_length == pytest.approx(fit.message_length, abs=1e-6)
    with pytest.raises(DegenerateError, match="infinite codelength"):
        mml87_message_length(G, PriorSpec.half_cauchy_sd(G), 1.0, X)


def test_estimate_examples():
    fit = mml_estimate(P, PriorSpec.conjugate_exp(5), X)
    assert fit.estimate == pytest.approx(15.5 / 5.2, rel=1e-9)
    assert fit.message_length == pytest.approx(10.69334409244, abs=1e-9)
    hc = mml_estimate(P, PriorSpec.half_cauchy_sd(P), X)
    assert hc.estimate == pytest.approx((math.sqrt(381) + 9) / 10, rel=1e-9)
    assert hc.message_length == pytest.approx(11.54573269036, abs=1e-9)
    g = mml_estimate(G, PriorSpec.half_cauchy_sd(G), X)
    assert g.estimate == pytest.approx(0.285289179487, rel=1e-9)
    assert g.message_length == pytest.approx(13.00339218436, abs=1e-9)


def test_estimate_boundary_flag():
    for prior, model in [(PriorSpec.half_cauchy_sd(G), G), (PriorSpec.half_cauchy_sd(P), P),
                         (PriorSpec.half_cauchy_mean(G), G)]:
        fit = mml_estimate(model, prior, ZEROS)
        assert fit.boundary and fit.uncertainty_width == 0.0
    # conjugate priors keep an interior minimum at s = 0
    assert not mml_estimate(P, PriorSpec.conjugate_exp(5), ZEROS).boundary
    assert not mml_estimate(G, PriorSpec.conjugate_beta(1, 1), ZEROS).boundary


@given(st.integers(1, 50), st.integers(0, 500), st.floats(1.5, 50))
def test_exp_prior_closed_form(n, s, A):
    fit = mml_estimate(P, PriorSpec.conjugate_exp(A), suff_stats([s] + [0] * (n - 1)))
    assert fit.estimate == pytest.approx(poisson_exp_estimate(n, s, A), rel=1e-8)


@given(st.integers(1, 50), st.integers(1, 500))
def test_half_cauchy_poisson_closed_form(n, s):
    fit = mml_estimate(P, PriorSpec.half_cauchy_sd(P), suff_stats([s] + [0] * (n - 1)))
    assert fit.estimate == pytest.approx(poisson_half_cauchy_estimate(n, s), rel=1e-8)


@given(st.integers(1, 50), st.integers(0, 500), st.floats(0.6, 20), st.floats(0.6, 20))
def test_beta_prior_argmin_offset(n, s, a, b):
    """The minimizer supports the -1/2 denominator offset, not the shifted -3/2 closed form."""
    data = suff_stats([s] + [0] * (n - 1))
    p = mml_estimate(G, PriorSpec.conjugate_beta(a, b), data).estimate
    assert p == pytest.approx(geometric_beta_estimate(n, s, a, b), rel=1e-8)
    measured_offset = (n + a) / p - (n + a + b + s)
    assert measured_offset == pytest.approx(-0.5, abs=1e-6)


def test_beta_shifted_offset():
    n, s = 5, 15
    argmin = geometric_beta_estimate(n, s, 1, 1)
    shifted = geometric_beta_estimate_shifted(n, s, 1, 1)
    assert argmin == pytest.approx(6 / 21.5)
    assert shifted == pytest.approx(6 / 20.5)
    assert (n + 1) / shifted - (n + 1) / argmin == pytest.approx(-1.0)
    # relative bias limit (n + alpha)/n at s -> inf under either offset
    s_big = 10**9
    mle = n / (n + s_big)
    assert geometric_beta_estimate_shifted(n, s_big, 2, 1) / mle == pytest.approx(7 / 5, rel=1e-6)


def test_plugin_codelength():
    # interior: evaluated at the shifted estimate, so never below the minimum
    prior = PriorSpec.conjugate_beta(1, 1)
    at_pub = mml_codelength_core_plugin(5, 15, 1, 1)
    ref = mml87_message_length(G, prior, 6 / 20.5, X).message_length
    assert at_pub == pytest.approx(ref, abs=1e-12)
    assert at_pub == pytest.approx(12.80153980195, abs=1e-9)
    assert at_pub > mml_estimate(G, prior, X).message_length
    # shifted estimate >= 1 at s = 0 falls back to the minimum
    assert mml_codelength_core_plugin(5, 0, 1, 1) == pytest.approx(
        mml_estimate(G, prior, ZEROS).message_length, abs=1e-12)


def test_quartic_examples():
    assert quartic_geometric_roots(5, 15) == [pytest.approx(0.285289179487, abs=1e-12)]
    assert quartic_geometric_roots(1, 0) == [1.0]
    assert geometric_half_cauchy_estimate_quartic(1, 0) == 1.0


@given(st.integers(1, 60), st.integers(1, 5000))
def test_quartic_root_is_minimizer(n, s):
    roots = quartic_geometric_roots(n, s)
    scale = max(abs(c) for c in (s + n, 3 * s + 4 * n - 1, 3 * s + 6 * n + 1, 2 * s + 5 * n + 4))
    for r in roots:
        assert abs(quartic_value(n, s, r)) / scale < 1e-9
        assert 0 < r <= 1
    assert roots == sorted(roots)
    fit = mml_estimate(G, PriorSpec.half_cauchy_sd(G), suff_stats([s] + [0] * (n - 1)))
    assert geometric_half_cauchy_estimate_quartic(n, s) == pytest.approx(fit.estimate, rel=1e-8)


def test_quartic_asymptote():
    n, s = 5, 10**6
    r = geometric_half_cauchy_estimate_quartic(n, s)
    assert abs(r / geometric_half_cauchy_estimate_asymptotic(n, s) - 1) < 0.01


def test_poisson_half_cauchy_relative_bias():
    n, s = 5, 10**7
    assert poisson_half_cauchy_estimate(n, s) / (s / n) > 0.999


def _mu_form_minimum(prior, n, s):
    """Independent oracle: MML87 in the mean parameterization with a Jacobian prior."""

    def I(u):
        mu = math.exp(u)
        p = 1 / (1 + mu)
        pi_mu = prior_density(prior, p) / (1 + mu) ** 2
        F = n / (mu * (1 + mu))
        nll = -s * math.log(mu) + (s + n) * math.log1p(mu)
        return -math.log(pi_mu) + 0.5 * math.log(F) - 0.5 * math.log(12) + 0.5 + nll

    u0 = math.log(s / n)
    grid = np.linspace(u0 - 8, u0 + 8, 801)
    k = int(np.argmin([I(u) for u in grid]))
    res = optimize.minimize_scalar(I, bounds=(grid[max(k - 1, 0)], grid[min(k + 1, 800)]),
                                   method="bounded", options={"xatol": 1e-12})
    return res.fun, math.exp(res.x)


@pytest.mark.parametrize("prior", [PriorSpec.half_cauchy_sd(G), PriorSpec.conjugate_beta(1, 1),
                                   PriorSpec.conjugate_beta(2, 3), PriorSpec.calibrated(5, G)], ids=str)
def test_reparameterization_invariance(prior):
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 30))
        s = int(rng.integers(1, 300))
        fit = mml_estimate(G, prior, suff_stats([s] + [0] * (n - 1)))
        length, mu_hat = _mu_form_minimum(prior, n, s)
        assert fit.message_length == pytest.approx(length, abs=1e-8)
        assert (1 - fit.estimate) / fit.estimate == pytest.approx(mu_hat, rel=1e-4)


def test_bernoulli_examples():
    assert bernoulli_mml(100, 50).estimate == 0.5
    assert bernoulli_mml(100, 90).estimate == pytest.approx(90.5 / 101, abs=1e-15)
    assert bernoulli_mml(1, 0).estimate == 0.25
    fit = bernoulli_mml(100, 90)
    grid = np.linspace(0.8, 0.97, 20001)
    assert fit.message_length <= bernoulli_message_length(100, 90, grid).min() + 1e-12
    assert fit.uncertainty_width == pytest.approx(math.sqrt(12 * fit.estimate * (1 - fit.estimate) / 100))


def test_bernoulli_width_shrinks_toward_boundary():
    p = np.linspace(0.5, 0.999, 200)
    w = bernoulli_width(100, p)
    assert np.all(np.diff(w) < 0)
    assert bernoulli_width(100, 0.5) > 2 * bernoulli_width(100, 0.95)


@given(st.integers(1, 500), st.data())
def test_bernoulli_shrinkage(n, data):
    n1 = data.draw(st.integers(0, n))
    est = bernoulli_mml(n, n1).estimate
    if 2 * n1 == n:
        assert est == 0.5
    else:
        assert abs(n1 / n - 0.5) > abs(est - 0.5)


def test_jeffreys_correspondence():
    # ln kappa_1 approximation, then the closed form with the integral of sqrt(F_1) = pi
    # the asymptotic lattice constant is crude at k = 1 (exact value 1/12)
    assert math.exp(log_kappa_approx(1)) == pytest.approx(0.0579845600, rel=1e-8)
    assert 1 / 1.5 < math.exp(log_kappa_approx(1)) * 12 < 1
    n, n1 = 40, 13
    for p in (0.1, 0.325, 0.7):
        nll = -(n1 * math.log(p) + (n - n1) * math.log(1 - p))
        expected = (nll + math.log(math.pi) + 0.5 * math.log(n / (2 * math.pi))
                    + 0.5 * math.log(math.pi) + float(-np.euler_gamma))
        assert bernoulli_jeffreys_message_length(n, n1, p) == pytest.approx(expected, abs=1e-12)
    # the estimate is the MLE under the Jeffreys prior
    grid = np.linspace(0.05, 0.95, 90001)
    best = grid[np.argmin(bernoulli_jeffreys_message_length(n, n1, grid))]
    assert best == pytest.approx(n1 / n, abs=1e-4)
