"""Moments, order statistics, reliability and residual life.

Every quantity is computed through the mixture representation: a sum over
the latent count ``n`` of expectations under the extended-Weibull law with
rate ``n * alpha``, truncated where the power-series tail drops below
``MixtureTruncation.eps_tail``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import comb, gammaln

from ._quad import integrate
from .errors import DivergenceError, DomainError, NonexistentMomentError
from .generators import Exponential, Pareto, Rayleigh, Weibull
from .model import EwpsModel, MixtureTruncation

__all__ = [
    "baseline_expectation",
    "raw_moment",
    "incomplete_moment",
    "mgf",
    "order_stat_pdf",
    "order_stat_cdf",
    "order_stat_moment",
    "reliability_same",
    "average_lifetime",
    "mean_residual_life",
]


def baseline_expectation(model: EwpsModel, rate: float, func, upper: float = np.inf) -> float:
    """``E[func(Z); Z <= upper]`` for ``Z ~ EW(rate, xi)`` by adaptive quadrature."""
    low = model.support_low
    pts = list(model.ew.ew_quantile(rate, np.array([1e-6, 1e-3, 0.05, 0.5, 0.95, 0.999,
                                                     1 - 1e-6, 1 - 1e-10])))
    pts += model.breakpoints()

    def integrand(x):
        g = model.baseline_pdf(rate, x)
        return 0.0 if g == 0 else func(x) * g

    return integrate(integrand, low, upper, points=pts)


def _check_moment_exists(model: EwpsModel, r: float) -> None:
    if isinstance(model.ew, Pareto) and not model.alpha > r:
        raise NonexistentMomentError(
            f"E(X^{r}) is infinite for a Pareto generator with alpha={model.alpha} <= r")


def _baseline_raw_moment(model: EwpsModel, rate: float, r: float) -> float:
    ew = model.ew
    if isinstance(ew, Exponential):
        return math.exp(gammaln(1.0 + r) - r * math.log(rate))
    if isinstance(ew, Rayleigh):
        return math.exp(gammaln(1.0 + r / 2.0) - (r / 2.0) * math.log(rate))
    if isinstance(ew, Weibull):
        g = ew.gamma
        return math.exp(gammaln(1.0 + r / g) - (r / g) * math.log(rate))
    if isinstance(ew, Pareto):
        return rate * ew.k**r / (rate - r)
    return baseline_expectation(model, rate, lambda x: x**r)


def raw_moment(model: EwpsModel, r: int, trunc: MixtureTruncation | None = None) -> float:
    """``E(X^r) = sum_n p_n E(Z_n^r)`` with ``Z_n ~ EW(n alpha, xi)``.

    Inner moments use closed forms for the exponential, Rayleigh, Weibull and
    Pareto generators and quadrature otherwise.
    """
    if r < 0:
        raise DomainError("moment order must be non-negative")
    if r == 0:
        return 1.0
    _check_moment_exists(model, r)
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    inner = np.array([_baseline_raw_moment(model, n * model.alpha, r)
                      for n in range(1, p.size + 1)])
    return float(p @ inner)


def incomplete_moment(model: EwpsModel, r: int, y: float,
                      trunc: MixtureTruncation | None = None) -> float:
    """``int_{low}^{y} x^r f(x) dx`` through the mixture series."""
    if y < model.support_low:
        raise DomainError("upper limit lies below the support")
    if np.isinf(y):
        return raw_moment(model, r, trunc)
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    inner = np.array([baseline_expectation(model, n * model.alpha, lambda x: x**r, upper=y)
                      for n in range(1, p.size + 1)])
    return float(p @ inner)


def _mgf_diverges(model: EwpsModel, rate: float, t: float) -> bool:
    """Check that ``t x + log g(x)`` heads to ``-inf`` along the far tail."""
    start = float(model.ew.ew_quantile(rate, 1 - 1e-10))
    xs = start * np.logspace(0, 6, 25)
    with np.errstate(all="ignore"):
        H = model.ew._H(xs)
        vals = t * xs + math.log(rate) + model.ew._log_h(xs) - rate * H
    vals = vals[np.isfinite(vals) | np.isneginf(vals)]
    if vals.size < 2:
        return True
    return not (np.all(np.diff(vals) < 0) and vals[-1] < -50)


def mgf(model: EwpsModel, t: float, trunc: MixtureTruncation | None = None) -> float:
    """Moment generating function ``sum_n p_n E(exp(t Z_n))``.

    Raises :class:`DivergenceError` when the expectation is infinite.
    """
    if t == 0:
        return 1.0
    if t > 0:
        if isinstance(model.ew, Pareto):
            raise DivergenceError("the mgf of a Pareto-generated law is infinite for t > 0")
        if _mgf_diverges(model, model.alpha, t):
            raise DivergenceError(f"mgf diverges at t={t}")
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    inner = np.array([baseline_expectation(model, n * model.alpha, lambda x: math.exp(t * x))
                      for n in range(1, p.size + 1)])
    return float(p @ inner)


# ----------------------------------------------------------------------
# order statistics
# ----------------------------------------------------------------------
def _check_index(i: int, m: int) -> None:
    if not (int(i) == i and int(m) == m and 1 <= i <= m):
        raise DomainError("order statistic indices need 1 <= i <= m")


def _os_factor(i: int, m: int) -> float:
    return math.exp(gammaln(m + 1) - gammaln(i) - gammaln(m - i + 1))


def order_stat_pdf(model: EwpsModel, i: int, m: int, x):
    """Density of the ``i``-th smallest of ``m`` iid draws (binomial expansion form)."""
    _check_index(i, m)
    f = np.asarray(model.pdf(x))
    S = np.asarray(model.survival(x))
    total = np.zeros(np.broadcast(f, S).shape)
    for j in range(i):
        total = total + (-1) ** j * comb(i - 1, j, exact=True) * S ** (m + j - i)
    return (_os_factor(i, m) * f * total)[()]


def order_stat_cdf(model: EwpsModel, i: int, m: int, x):
    """``P(X_{i:m} <= x) = sum_{k=i}^{m} C(m, k) F^k S^{m-k}``."""
    _check_index(i, m)
    F = np.asarray(model.cdf(x))
    S = np.asarray(model.survival(x))
    total = np.zeros(F.shape)
    for k in range(i, m + 1):
        total = total + comb(m, k, exact=True) * F**k * S ** (m - k)
    return total[()]


def order_stat_moment(model: EwpsModel, i: int, m: int, s: int,
                      trunc: MixtureTruncation | None = None) -> float:
    """``E(X_{i:m}^s)`` from the double sum over ``n`` and the binomial index ``j``."""
    _check_index(i, m)
    _check_moment_exists(model, s)
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    total = 0.0
    for n, pn in enumerate(p, start=1):
        rate = n * model.alpha
        for j in range(i):
            w = (-1) ** j * comb(i - 1, j, exact=True)
            e = baseline_expectation(
                model, rate, lambda x, j=j: x**s * float(model.survival(x)) ** (m + j - i))
            total += w * pn * e
    return _os_factor(i, m) * total


# ----------------------------------------------------------------------
# reliability and lifetime
# ----------------------------------------------------------------------
def reliability_same(model: EwpsModel, trunc: MixtureTruncation | None = None) -> float:
    """``P(X > Y)`` for iid ``X, Y`` as ``1 - sum_n p_n E[S(Z_n)]``."""
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    inner = np.array([baseline_expectation(model, n * model.alpha,
                                           lambda x: float(model.survival(x)))
                      for n in range(1, p.size + 1)])
    return 1.0 - float(p @ inner)


def average_lifetime(model: EwpsModel, trunc: MixtureTruncation | None = None) -> float:
    """``low + sum_n p_n int_{low}^inf exp(-n alpha H(x)) dx``."""
    _check_moment_exists(model, 1)
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    low = model.support_low
    pts = model.breakpoints(model.alpha)
    inner = []
    for n in range(1, p.size + 1):
        rate = n * model.alpha
        inner.append(integrate(lambda x: math.exp(-rate * float(model.ew._H(x))), low,
                               points=pts + list(model.ew.ew_quantile(rate, np.array([0.5, 0.999])))))
    return low + float(p @ np.array(inner))


def mean_residual_life(model: EwpsModel, x0: float, trunc: MixtureTruncation | None = None) -> float:
    """``E(X - x0 | X > x0)`` as ``S(x0)^{-1} sum_n p_n int_0^inf y g(x0 + y; n alpha) dy``."""
    if x0 < model.support_low:
        raise DomainError("x0 lies below the support")
    _check_moment_exists(model, 1)
    S0 = float(model.survival(x0))
    if S0 == 0:
        raise DivergenceError("survival is zero at x0")
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, model.theta)
    H0 = float(model.ew._H(x0))
    probs = np.array([1e-3, 0.05, 0.5, 0.95, 0.999, 1 - 1e-6, 1 - 1e-10])
    inner = []
    for n in range(1, p.size + 1):
        rate = n * model.alpha
        # residual quantiles of Z_n given Z_n > x0
        pts = np.atleast_1d(model.ew._H_inv(H0 - np.log1p(-probs) / rate)) - x0
        inner.append(integrate(lambda y: y * float(model.baseline_pdf(rate, x0 + y)) / S0, 0.0,
                               points=pts))
    return float(p @ np.array(inner))
