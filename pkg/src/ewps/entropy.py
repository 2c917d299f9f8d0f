"""Shannon entropy and the moment constraints that characterize the EWPS law."""
from __future__ import annotations

import math

import numpy as np

from ._quad import integrate
from .model import EwpsModel

__all__ = [
    "shannon_entropy_numeric",
    "shannon_entropy_formula",
    "max_entropy_constraint_residuals",
]


_U_POINTS = (1e-6, 1e-3, 0.05, 0.5, 0.95, 0.999, 1 - 1e-6, 1 - 1e-9)


def _expect_x(model: EwpsModel, func) -> float:
    """``E[func(X)] = int_0^1 func(Q(u)) du``, independent of the density."""

    def integrand(u):
        return func(float(model.quantile(u)))

    return integrate(integrand, 0.0, 1.0, points=_U_POINTS)


def _expect_weighted_y(model: EwpsModel, func) -> float:
    """``theta / C(theta) * E[C'(theta e^{-alpha H(Y)}) func(Y)]`` with ``Y ~ EW(alpha, xi)``.

    The weight is folded into log space so that large ``C(theta)`` cannot overflow.
    """
    ps, ew = model.ps, model.ew
    log_w0 = math.log(model.theta) - float(ps.log_c(model.theta))
    pts = model.breakpoints(model.alpha)

    def integrand(x):
        with np.errstate(over="ignore"):
            H = float(ew._H(x))
        g = float(model.baseline_pdf(model.alpha, x))
        if g == 0:
            return 0.0
        w = math.exp(log_w0 + float(ps.log_c_prime(model.theta * math.exp(-model.alpha * H))))
        return w * func(x) * g

    return integrate(integrand, model.support_low, points=pts)


def _log_c_prime_at(model: EwpsModel, x) -> float:
    with np.errstate(over="ignore"):
        H = float(model.ew._H(x))
    return float(model.ps.log_c_prime(model.theta * math.exp(-model.alpha * H)))


def shannon_entropy_numeric(model: EwpsModel) -> float:
    """``-int f log f`` by adaptive quadrature."""
    pts = model.breakpoints(model.alpha)

    def integrand(x):
        lf = float(model.logpdf(x))
        return 0.0 if np.isneginf(lf) else -math.exp(lf) * lf

    return integrate(integrand, model.support_low, points=pts)


def shannon_entropy_formula(model: EwpsModel, trunc=None) -> float:
    """Entropy from the decomposition into three baseline expectations.

    ``-log(theta alpha) + log C(theta) - A[log h] + alpha A[H] - A[log C']``
    where ``A[phi] = theta / C(theta) E[C'(theta e^{-alpha H(Y)}) phi(Y)]``
    and ``Y`` follows the extended-Weibull baseline with rate ``alpha``.
    ``trunc`` is accepted for interface symmetry; no series is summed here.
    """
    ew = model.ew
    a_logh = _expect_weighted_y(model, lambda x: float(ew._log_h(x)))
    a_H = _expect_weighted_y(model, lambda x: float(ew._H(x)))
    a_logc = _expect_weighted_y(model, lambda x: _log_c_prime_at(model, x))
    return (-math.log(model.theta * model.alpha) + float(model.ps.log_c(model.theta))
            - a_logh + model.alpha * a_H - a_logc)


def max_entropy_constraint_residuals(model: EwpsModel) -> np.ndarray:
    """Residuals of the three expectation identities (log C', log h, H).

    Each residual is ``E[phi(X)] - theta / C(theta) E[C'(u(Y)) phi(Y)]``.
    """
    ew = model.ew
    phis = (
        lambda x: _log_c_prime_at(model, x),
        lambda x: float(ew._log_h(x)),
        lambda x: float(ew._H(x)),
    )
    return np.array([_expect_x(model, phi) - _expect_weighted_y(model, phi) for phi in phis])
