import math

import numpy as np
import pytest
from scipy import stats

from ewps import (Chen, DivergenceError, DomainError, EwpsModel, Exponential, Geometric, Logarithmic,
                  NonexistentMomentError, Pareto, Poisson, Weibull)
from ewps import moments
from ewps._quad import integrate
from conftest import PAIRS, make_model

EG = EwpsModel(Geometric(), Exponential(), 0.5, 1.0)


def quad_moment(model, r):
    """Oracle: int x^r f(x) dx by direct quadrature of the closed-form density.

    Heavy Pareto tails are integrated as ``int_0^1 Q(u)^r du`` instead.
    """
    if isinstance(model.ew, Pareto):
        return integrate(lambda u: float(model.quantile(u)) ** r, 0.0, 1.0,
                         points=[0.5, 0.9, 0.99, 0.999], epsabs=1e-13, epsrel=1e-11)
    return integrate(lambda t: t**r * float(model.pdf(t)), model.support_low,
                     points=model.breakpoints(), epsabs=1e-13, epsrel=1e-11)


def test_raw_moment_eg_closed_form():
    theta, alpha = 0.5, 1.0
    exact = -(1 - theta) * math.log(1 - theta) / (theta * alpha)
    assert moments.raw_moment(EG, 1) == pytest.approx(exact, rel=1e-12)
    assert exact == pytest.approx(math.log(2), rel=1e-15)
    assert quad_moment(EG, 1) == pytest.approx(exact, rel=1e-9)


def test_raw_moment_small_theta_limit():
    model = EwpsModel(Geometric(), Exponential(), 1e-10, 2.0)
    assert moments.raw_moment(model, 1) == pytest.approx(0.5, rel=1e-9)


def test_raw_moment_pareto_poisson_series():
    theta, alpha, k = 1.0, 3.0, 1.0
    n = np.arange(1, 60)
    series = alpha * k / math.expm1(theta) * np.sum(
        np.exp(n * math.log(theta) - np.array([math.lgamma(v) for v in n])) / (n * alpha - 1))
    model = EwpsModel(Poisson(), Pareto(k), theta, alpha)
    # the terms 1/2 + 1/5 + 1/16 + 1/66 + ... give 1.3639, not the 1.3564 quoted alongside
    assert series == pytest.approx(1.363915426742, rel=1e-11)
    assert moments.raw_moment(model, 1) == pytest.approx(series, rel=1e-12)
    assert quad_moment(model, 1) == pytest.approx(series, rel=1e-8)


@pytest.mark.parametrize("mixer,generator", PAIRS[::3])
def test_raw_moments_match_quadrature(mixer, generator):
    # a lighter Pareto tail keeps the quadrature oracle accurate
    model = make_model(mixer, generator, alpha=3.5 if generator == "pareto" else 1.3)
    for r in (1, 2):
        assert moments.raw_moment(model, r) == pytest.approx(quad_moment(model, r), rel=1e-7)


def test_pareto_moment_nonexistence():
    model = EwpsModel(Geometric(), Pareto(1.0), 0.5, 1.5)
    with pytest.raises(NonexistentMomentError):
        moments.raw_moment(model, 2)
    assert moments.raw_moment(model, 1) > 0
    assert moments.raw_moment(model, 0) == 1.0


def test_incomplete_moment():
    assert moments.incomplete_moment(EG, 1, np.inf) == pytest.approx(moments.raw_moment(EG, 1), rel=1e-12)
    big = float(EG.quantile(1 - 1e-14))
    assert moments.incomplete_moment(EG, 1, big) == pytest.approx(moments.raw_moment(EG, 1), rel=1e-8)
    y = 0.8
    oracle = integrate(lambda t: t * float(EG.pdf(t)), 0.0, y, epsabs=1e-14)
    assert moments.incomplete_moment(EG, 1, y) == pytest.approx(oracle, rel=1e-9)
    with pytest.raises(DomainError):
        moments.incomplete_moment(EwpsModel(Geometric(), Pareto(1.0), 0.5, 3.0), 1, 0.5)


def test_mgf():
    assert moments.mgf(EG, 0.0) == 1.0
    t, theta = 0.5, 0.5
    n = np.arange(1, 200)
    series = np.sum((1 - theta) * theta ** (n - 1) * n / (n - t))
    oracle = integrate(lambda x: math.exp(t * x + float(EG.logpdf(x))), 0.0, points=EG.breakpoints())
    assert series == pytest.approx(oracle, rel=1e-8)
    assert moments.mgf(EG, t) == pytest.approx(series, rel=1e-8)
    assert moments.mgf(EG, -1.0) == pytest.approx(np.sum((1 - theta) * theta ** (n - 1) * n / (n + 1)), rel=1e-8)


def test_mgf_divergence():
    with pytest.raises(DivergenceError):
        moments.mgf(EwpsModel(Geometric(), Pareto(1.0), 0.5, 3.0), 0.1)
    with pytest.raises(DivergenceError):
        moments.mgf(EwpsModel(Geometric(), Weibull(0.8), 0.5, 1.0), 0.1)
    with pytest.raises(DivergenceError):
        moments.mgf(EG, 2.0)


def test_order_stat_reductions():
    x = np.linspace(0.05, 3, 13)
    np.testing.assert_allclose(moments.order_stat_pdf(EG, 1, 1, x), EG.pdf(x), rtol=1e-14)
    np.testing.assert_allclose(moments.order_stat_cdf(EG, 1, 1, x), EG.cdf(x), rtol=1e-14)
    np.testing.assert_allclose(moments.order_stat_pdf(EG, 1, 3, x), 3 * EG.pdf(x) * EG.survival(x) ** 2,
                               rtol=1e-13)
    np.testing.assert_allclose(moments.order_stat_cdf(EG, 3, 3, x), EG.cdf(x) ** 3, rtol=1e-13)
    with pytest.raises(DomainError):
        moments.order_stat_pdf(EG, 4, 3, 0.5)


@pytest.mark.parametrize("mixer,generator", [("geometric", "exponential"), ("logarithmic", "chen"),
                                             ("poisson", "weibull")])
def test_order_stat_pdf_normalizes_and_matches_cdf(mixer, generator):
    model = make_model(mixer, generator)
    total = integrate(lambda t: float(moments.order_stat_pdf(model, 2, 5, t)), model.support_low,
                      points=model.breakpoints(), epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-7)
    for x in model.quantile(np.array([0.2, 0.5, 0.8])):
        h = 1e-6 * x
        fd = (moments.order_stat_cdf(model, 2, 5, x + h) - moments.order_stat_cdf(model, 2, 5, x - h)) / (2 * h)
        assert moments.order_stat_pdf(model, 2, 5, x) == pytest.approx(fd, rel=1e-6)


def test_minimum_of_three_matches_monte_carlo():
    rng = np.random.default_rng(3)
    draws = EG.quantile(rng.random((100_000, 3))).min(axis=1)
    edges = np.concatenate([[0.0], np.quantile(draws, np.linspace(0.05, 0.95, 19)), [np.inf]])
    observed, _ = np.histogram(draws, edges)
    probs = np.diff([float(moments.order_stat_cdf(EG, 1, 3, e)) if np.isfinite(e) else 1.0 for e in edges])
    chi2 = stats.chisquare(observed, probs * draws.size)
    assert chi2.pvalue > 0.01


def test_order_stat_moments():
    assert moments.order_stat_moment(EG, 1, 1, 2) == pytest.approx(moments.raw_moment(EG, 2), rel=1e-8)
    total = moments.order_stat_moment(EG, 1, 2, 1) + moments.order_stat_moment(EG, 2, 2, 1)
    assert total == pytest.approx(2 * moments.raw_moment(EG, 1), rel=1e-8)
    rng = np.random.default_rng(5)
    mins = EG.quantile(rng.random((1_000_000, 2))).min(axis=1)
    se = mins.std(ddof=1) / math.sqrt(mins.size)
    assert abs(moments.order_stat_moment(EG, 1, 2, 1) - mins.mean()) < 3 * se


@pytest.mark.parametrize("model", [
    EwpsModel(Geometric(), Exponential(), 0.9, 2.0),
    EwpsModel(Logarithmic(), Chen(1.5), 0.5, 1.0),
    EwpsModel(Poisson(), Pareto(1.0), 2.0, 1.5),
    EwpsModel(Geometric(), Weibull(3.0), 0.3, 4.0),
], ids=["EG", "CL", "PP", "WG"])
def test_reliability_is_one_half(model):
    assert moments.reliability_same(model) == pytest.approx(0.5, abs=1e-8)


def test_average_lifetime():
    assert moments.average_lifetime(EG) == pytest.approx(moments.raw_moment(EG, 1), abs=1e-8)
    pp = EwpsModel(Poisson(), Pareto(1.0), 1.0, 3.0)
    assert moments.average_lifetime(pp) == pytest.approx(moments.raw_moment(pp, 1), abs=1e-8)


def test_mean_residual_life():
    assert moments.mean_residual_life(EG, 1e-9) == pytest.approx(moments.raw_moment(EG, 1), abs=1e-6)
    expo = EwpsModel(Geometric(), Exponential(), 1e-10, 2.0)
    for x0 in (0.1, 1.0, 5.0):
        assert moments.mean_residual_life(expo, x0) == pytest.approx(0.5, abs=1e-6)
    # oracle: int_{x0}^inf S(t) dt / S(x0)
    x0 = 0.7
    oracle = integrate(lambda t: float(EG.survival(t)), x0) / float(EG.survival(x0))
    assert moments.mean_residual_life(EG, x0) == pytest.approx(oracle, rel=1e-8)
    with pytest.raises(DomainError):
        moments.mean_residual_life(EwpsModel(Geometric(), Pareto(1.0), 0.5, 3.0), 0.5)
