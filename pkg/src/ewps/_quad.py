"""Adaptive quadrature on (possibly half-infinite) intervals split at breakpoints."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DivergenceError

EPSABS = 1e-10
EPSREL = 1e-8


def integrate(func, a: float, b: float = np.inf, points=(), epsabs: float = EPSABS,
              epsrel: float = EPSREL, limit: int = 200) -> float:
    """Integrate ``func`` over ``[a, b]`` piecewise between sorted breakpoints.

    The last piece may extend to ``+inf``.  Raises :class:`DivergenceError`
    when a piece returns a non-finite value or an error estimate far above
    the requested tolerance.
    """
    cuts = sorted({float(p) for p in points if np.isfinite(p) and a < p < b})
    edges = [a, *cuts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(func, lo, hi, epsabs=epsabs * 1e-2, epsrel=epsrel * 1e-2, limit=limit)
        if not np.isfinite(val) or err > max(1e3 * epsabs, 1e2 * epsrel * abs(val)):
            raise DivergenceError(f"quadrature failed on [{lo}, {hi}]: value={val}, error={err}")
        total += val
    return total
