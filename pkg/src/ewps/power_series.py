"""Zero-truncated power-series mixing distributions.

A family is described by its coefficients ``a_n`` and the series
``C(theta) = sum_n a_n theta**n``.  Each family below provides ``C``, its
first three derivatives, the inverse of ``C`` and the pmf
``p_n = a_n theta**n / C(theta)`` for ``n >= 1``.

Besides the public checked methods, every family exposes a few unchecked
helpers (``log_c``, ``log_c_prime``, ``psi1``, ``psi2``) that accept any
``u`` in ``[0, theta]`` and are used by the compound distribution and the
likelihood code.  They work in log space so that boundary fits
(``theta -> 1`` for the logarithmic and geometric mixers, large ``theta``
for the Poisson mixer) do not overflow.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.special import expit, gammaln

from .errors import DomainError, TruncationError

__all__ = [
    "PowerSeriesFamily",
    "Poisson",
    "Logarithmic",
    "Geometric",
    "Binomial",
    "get_power_series",
    "POWER_SERIES",
]


class PowerSeriesFamily(ABC):
    """Base class for the zero-truncated power-series mixers."""

    name: ClassVar[str]

    # ------------------------------------------------------------------
    # domain
    # ------------------------------------------------------------------
    @property
    @abstractmethod
    def theta_domain(self) -> tuple[float, float]:
        """Open interval of admissible ``theta`` values."""

    def in_domain(self, theta) -> bool:
        lo, hi = self.theta_domain
        t = np.asarray(theta, dtype=float)
        return bool(np.all((t > lo) & (t < hi)))

    def check_theta(self, theta) -> None:
        if not self.in_domain(theta):
            lo, hi = self.theta_domain
            raise DomainError(f"{self.name}: theta={theta!r} outside ({lo}, {hi})")

    @property
    def image(self) -> tuple[float, float]:
        """Range of ``C`` over the theta domain."""
        lo, hi = self.theta_domain
        return 0.0, float(self._c(np.float64(hi))) if np.isfinite(hi) else np.inf

    # ------------------------------------------------------------------
    # unchecked closed forms, valid on [0, sup theta_domain)
    # ------------------------------------------------------------------
    @abstractmethod
    def _c(self, u): ...

    @abstractmethod
    def _c_derivative(self, u, order: int): ...

    @abstractmethod
    def log_c(self, u):
        """``log C(u)``; ``-inf`` at ``u = 0``."""

    @abstractmethod
    def log_c_prime(self, u):
        """``log C'(u)``."""

    @abstractmethod
    def psi1(self, u):
        """``C''(u) / C'(u)``, the derivative of ``log C'``."""

    @abstractmethod
    def psi2(self, u):
        """Derivative of :meth:`psi1`."""

    @abstractmethod
    def _c_inverse_log(self, log_y):
        """Inverse of ``C`` given ``log y``."""

    @abstractmethod
    def log_coefficient(self, n):
        """``log a_n`` (``-inf`` where ``a_n = 0``)."""

    def _tail_ratio(self, theta: float, n: int) -> float:
        """Upper bound on ``p_{k+1} / p_k`` for all ``k >= n``."""
        return theta

    # ------------------------------------------------------------------
    # public checked operations
    # ------------------------------------------------------------------
    def c_value(self, theta):
        """Evaluate ``C(theta)``."""
        self.check_theta(theta)
        return self._c(np.asarray(theta, dtype=float))[()]

    def c_derivative(self, theta, order: int):
        """Evaluate the ``order``-th derivative of ``C`` (order 0 to 3)."""
        if order not in (0, 1, 2, 3):
            raise ValueError("order must be 0, 1, 2 or 3")
        self.check_theta(theta)
        t = np.asarray(theta, dtype=float)
        if order == 0:
            return self._c(t)[()]
        return self._c_derivative(t, order)[()]

    def c_inverse(self, y):
        """Return ``theta`` such that ``C(theta) = y``."""
        y = np.asarray(y, dtype=float)
        lo, hi = self.image
        if np.any(~(y > lo)) or np.any(~(y < hi)):
            raise DomainError(f"{self.name}: y={y!r} not in the image ({lo}, {hi}) of C")
        with np.errstate(divide="ignore"):
            return self._c_inverse_log(np.log(y))[()]

    def pmf(self, theta, n):
        """``P(N = n) = a_n theta**n / C(theta)`` for ``n >= 1``."""
        self.check_theta(theta)
        n = np.asarray(n)
        if np.any(n < 1):
            raise DomainError("n must be a positive integer")
        return np.exp(self._log_pmf(float(theta), n))[()]

    def _log_pmf(self, theta: float, n):
        n = np.asarray(n, dtype=float)
        return self.log_coefficient(n) + n * math.log(theta) - self.log_c(theta)

    def tail_cutoff(self, theta: float, eps: float, n_max: int = 10_000) -> int:
        """Smallest ``N`` with ``sum_{n > N} p_n < eps``.

        Raises :class:`TruncationError` when ``N`` would exceed ``n_max``.
        """
        if not 0.0 < eps < 1.0:
            raise DomainError("eps must lie in (0, 1)")
        self.check_theta(theta)
        size = 64
        while True:
            n = np.arange(1, size + 1)
            p = np.exp(self._log_pmf(theta, n))
            rho = self._tail_ratio(theta, size)
            if rho < 1.0:
                remainder = p[-1] * rho / (1.0 - rho)
                # tails[k] = sum_{n > k} p_n for k = 0..size
                tails = np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]]) + remainder
                hit = np.flatnonzero(tails < eps)
                if hit.size and remainder < 1e-6 * eps:
                    cutoff = max(int(hit[0]), 1)
                    if cutoff > n_max:
                        break
                    return cutoff
            if size > 4 * n_max:
                break
            size *= 2
        raise TruncationError(
            f"{self.name}(theta={theta}) needs more than n_max={n_max} terms for tail {eps}"
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


# ----------------------------------------------------------------------
# concrete families
# ----------------------------------------------------------------------
@dataclass(frozen=True, repr=False)
class Poisson(PowerSeriesFamily):
    name: ClassVar[str] = "poisson"

    @property
    def theta_domain(self):
        return 0.0, np.inf

    def _c(self, u):
        return np.expm1(u)

    def _c_derivative(self, u, order):
        return np.exp(u)

    def log_c(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            big = u + np.log1p(-np.exp(-np.maximum(u, 1.0)))
            small = np.log(np.expm1(np.minimum(u, 1.0)))
        return np.where(u > 1.0, big, small)[()]

    def log_c_prime(self, u):
        return np.asarray(u, dtype=float)[()]

    def psi1(self, u):
        return np.ones_like(np.asarray(u, dtype=float))[()]

    def psi2(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))[()]

    def _c_inverse_log(self, log_y):
        return np.logaddexp(0.0, log_y)

    def log_coefficient(self, n):
        return -gammaln(np.asarray(n, dtype=float) + 1.0)

    def _tail_ratio(self, theta, n):
        return theta / (n + 1.0)


@dataclass(frozen=True, repr=False)
class Logarithmic(PowerSeriesFamily):
    name: ClassVar[str] = "logarithmic"

    @property
    def theta_domain(self):
        return 0.0, 1.0

    @property
    def image(self):
        return 0.0, np.inf

    def _c(self, u):
        return -np.log1p(-u)

    def _c_derivative(self, u, order):
        return math.factorial(order - 1) * (1.0 - u) ** (-order)

    def log_c(self, u):
        with np.errstate(divide="ignore"):
            return np.log(-np.log1p(-np.asarray(u, dtype=float)))[()]

    def log_c_prime(self, u):
        return -np.log1p(-np.asarray(u, dtype=float))[()]

    def psi1(self, u):
        return (1.0 / (1.0 - np.asarray(u, dtype=float)))[()]

    def psi2(self, u):
        return (1.0 / (1.0 - np.asarray(u, dtype=float)) ** 2)[()]

    def _c_inverse_log(self, log_y):
        return -np.expm1(-np.exp(log_y))

    def log_coefficient(self, n):
        return -np.log(np.asarray(n, dtype=float))


@dataclass(frozen=True, repr=False)
class Geometric(PowerSeriesFamily):
    name: ClassVar[str] = "geometric"

    @property
    def theta_domain(self):
        return 0.0, 1.0

    @property
    def image(self):
        return 0.0, np.inf

    def _c(self, u):
        return u / (1.0 - u)

    def _c_derivative(self, u, order):
        return math.factorial(order) * (1.0 - u) ** (-order - 1)

    def log_c(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return (np.log(u) - np.log1p(-u))[()]

    def log_c_prime(self, u):
        return (-2.0 * np.log1p(-np.asarray(u, dtype=float)))[()]

    def psi1(self, u):
        return (2.0 / (1.0 - np.asarray(u, dtype=float)))[()]

    def psi2(self, u):
        return (2.0 / (1.0 - np.asarray(u, dtype=float)) ** 2)[()]

    def _c_inverse_log(self, log_y):
        return expit(log_y)

    def log_coefficient(self, n):
        return np.zeros_like(np.asarray(n, dtype=float))


@dataclass(frozen=True, repr=False)
class Binomial(PowerSeriesFamily):
    """Zero-truncated binomial mixer with a fixed number of trials ``m``."""

    m: int = 10
    name: ClassVar[str] = "binomial"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("binomial trials m must be a positive integer")

    @property
    def theta_domain(self):
        return 0.0, 1.0

    def _c(self, u):
        return np.expm1(self.m * np.log1p(u))

    def _c_derivative(self, u, order):
        m = self.m
        factor = math.perm(m, order)
        return factor * (1.0 + u) ** (m - order)

    def log_c(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.expm1(self.m * np.log1p(u)))[()]

    def log_c_prime(self, u):
        return (math.log(self.m) + (self.m - 1) * np.log1p(np.asarray(u, dtype=float)))[()]

    def psi1(self, u):
        return ((self.m - 1) / (1.0 + np.asarray(u, dtype=float)))[()]

    def psi2(self, u):
        return (-(self.m - 1) / (1.0 + np.asarray(u, dtype=float)) ** 2)[()]

    def _c_inverse_log(self, log_y):
        return np.expm1(np.logaddexp(0.0, log_y) / self.m)

    def log_coefficient(self, n):
        n = np.asarray(n, dtype=float)
        m = float(self.m)
        valid = n <= m
        safe = np.where(valid, n, 0.0)
        out = gammaln(m + 1.0) - gammaln(safe + 1.0) - gammaln(m - safe + 1.0)
        return np.where(valid, out, -np.inf)

    def tail_cutoff(self, theta: float, eps: float, n_max: int = 10_000) -> int:
        if not 0.0 < eps < 1.0:
            raise DomainError("eps must lie in (0, 1)")
        self.check_theta(theta)
        if self.m > n_max:
            raise TruncationError(f"binomial m={self.m} exceeds n_max={n_max}")
        return int(self.m)

    def __repr__(self) -> str:
        return f"Binomial(m={self.m})"


POWER_SERIES: dict[str, type[PowerSeriesFamily]] = {
    cls.name: cls for cls in (Poisson, Logarithmic, Geometric, Binomial)
}


def get_power_series(name: str, m: int | None = None) -> PowerSeriesFamily:
    """Look up a mixer by name (``poisson``, ``logarithmic``, ``geometric``, ``binomial``)."""
    key = name.strip().lower()
    if key not in POWER_SERIES:
        raise DomainError(f"unknown power-series family {name!r}; choose from {sorted(POWER_SERIES)}")
    if key == "binomial":
        return Binomial(10 if m is None else int(m))
    if m is not None:
        raise DomainError("trials m only applies to the binomial family")
    return POWER_SERIES[key]()
