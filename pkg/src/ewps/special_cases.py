"""Closed-form results for particular mixer/generator pairs.

These serve as cross-checks of the general numerical machinery:

* the series for raw moments of the modified-Weibull geometric law, built
  from the Lagrange-inversion expansion of ``H^{-1}`` for the modified
  Weibull generator;
* the printed closed form of the Pareto-Poisson entropy, which needs the
  hyperbolic sine and cosine integrals.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from ._quad import integrate
from .entropy import shannon_entropy_numeric
from .errors import DivergenceError, DomainError
from .generators import ModifiedWeibull, Pareto
from .model import EwpsModel, MixtureTruncation
from .power_series import Geometric, Poisson

__all__ = ["shi", "chi", "mwg_moment_series", "pp_entropy_closed_form", "PPEntropy"]

EULER_GAMMA = 0.57721566490153286061


def _sinhc(t: float) -> float:
    return 1.0 if t == 0 else math.sinh(t) / t


def _coshm1_over_t(t: float) -> float:
    if abs(t) < 1e-4:
        return t / 2.0 + t**3 / 24.0
    return math.expm1(t) / (2 * t) + math.expm1(-t) / (2 * t)


def shi(z: float) -> float:
    """Hyperbolic sine integral ``int_0^z sinh(t)/t dt`` by quadrature."""
    if z == 0:
        return 0.0
    sign = 1.0 if z > 0 else -1.0
    return sign * integrate(_sinhc, 0.0, abs(z), epsabs=1e-14, epsrel=1e-12)


def chi(z: float) -> float:
    """Hyperbolic cosine integral ``gamma + log z + int_0^z (cosh t - 1)/t dt``."""
    if not z > 0:
        raise DomainError("Chi is defined here for z > 0")
    return EULER_GAMMA + math.log(z) + integrate(_coshm1_over_t, 0.0, z, epsabs=1e-14,
                                                  epsrel=1e-12)


def _lambert_coefficients(gamma: float, lam: float, depth: int) -> np.ndarray:
    """``a_i`` of ``H^{-1}(y) = sum_i a_i y^{i/gamma}`` for ``i = 1..depth``."""
    i = np.arange(1, depth + 1, dtype=float)
    ratio = lam / gamma
    a = np.zeros(depth)
    a[0] = 1.0
    if ratio != 0:
        log_mag = (i - 2) * np.log(i) - gammaln(i) + (i - 1) * math.log(abs(ratio))
        sign = (-1.0) ** (i + 1) * np.sign(ratio) ** (i - 1)
        a = sign * np.exp(log_mag)
    return a


def _mw_series_moment(coef: np.ndarray, gamma: float, rate: float, r: int) -> np.ndarray:
    """Partial sums over total index ``s`` of the ``r``-fold series for one ``rate``."""
    conv = coef.copy()
    for _ in range(r - 1):
        conv = np.convolve(conv, coef)
    s = np.arange(r, r + conv.size, dtype=float)  # smallest total index is r
    with np.errstate(over="ignore"):
        terms = conv * np.exp(gammaln(s / gamma + 1.0) - (s / gamma) * math.log(rate))
    return terms


def mwg_moment_series(theta: float, alpha: float, gamma: float, lam: float, r: int,
                      truncation_depth: int, trunc: MixtureTruncation | None = None,
                      rtol: float = 1e-8) -> float:
    """``E(X^r)`` for the modified-Weibull geometric law from the inversion series.

    Each index of the ``r``-fold sum runs from 1 to ``truncation_depth``.
    Raises :class:`DivergenceError` when the last block of terms is not
    negligible relative to the partial sum (a Cauchy test on the series).
    """
    if truncation_depth < 1 or r < 1:
        raise DomainError("need r >= 1 and truncation_depth >= 1")
    model = EwpsModel(Geometric(), ModifiedWeibull(gamma, lam, relaxed_domain=lam < 0),
                      theta, alpha)
    trunc = trunc or MixtureTruncation()
    p = trunc.weights(model.ps, theta)
    coef = _lambert_coefficients(gamma, lam, truncation_depth)
    total = 0.0
    for n, pn in enumerate(p, start=1):
        terms = _mw_series_moment(coef, gamma, n * alpha, r)
        value = terms.sum()
        if not np.isfinite(value):
            raise DivergenceError("moment series overflowed")
        # terms whose largest index equals the truncation depth form the last block
        tail = np.abs(terms[-max(1, truncation_depth // 5):]).sum()
        if tail > rtol * max(1.0, abs(value)):
            raise DivergenceError(
                f"moment series not converged at depth {truncation_depth} (n={n}, tail={tail:.3g})")
        total += pn * value
    return float(total)


class PPEntropy(NamedTuple):
    closed_form: float
    numeric: float
    gap: float


def pp_entropy_closed_form(theta: float, alpha: float, k: float) -> PPEntropy:
    """Evaluate the printed Pareto-Poisson entropy expression.

    The value is returned next to the quadrature entropy and their
    difference; the two are not expected to agree.
    """
    model = EwpsModel(Poisson(), Pareto(k), theta, alpha)
    e = math.expm1(theta)
    core = chi(2 * theta) - math.log(2 * theta) + shi(2 * theta) - EULER_GAMMA
    mu1 = (core / alpha - math.expm1(2 * theta) * math.log(k)) / (2 * e)
    mu2 = core / (2 * alpha * e)
    mu3 = alpha * theta * k ** (2 * alpha) / (4 * e) * (1 - (2 * theta + 1) * math.exp(2 * theta))
    closed = math.log(e / (theta * alpha)) - theta / e * (mu1 - alpha * mu2 + mu3)
    numeric = shannon_entropy_numeric(model)
    return PPEntropy(closed, numeric, closed - numeric)
