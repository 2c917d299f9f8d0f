"""The compound extended-Weibull power-series (EWPS) distribution.

``X = min(X_1, ..., X_N)`` where the ``X_i`` are iid extended-Weibull with
rate ``alpha`` and ``N`` follows a zero-truncated power-series law with
parameter ``theta``.  Then

    S(x) = C(theta exp(-alpha H(x))) / C(theta)

and the density is an infinite mixture ``sum_n p_n g(x; n alpha, xi)`` of
extended-Weibull densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DomainError
from .generators import ExtendedWeibullFamily
from .power_series import PowerSeriesFamily

__all__ = ["EwpsModel", "MixtureTruncation"]

# probabilities at which quantiles are taken as quadrature breakpoints
_BREAK_PROBS = (1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1 - 1e-6, 1 - 1e-10)


@dataclass(frozen=True)
class MixtureTruncation:
    """Truncation rule for the infinite mixture series."""

    eps_tail: float = 1e-12
    n_max: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.eps_tail < 1.0:
            raise DomainError("eps_tail must lie in (0, 1)")
        if self.n_max < 1:
            raise DomainError("n_max must be positive")

    def weights(self, ps: PowerSeriesFamily, theta: float) -> np.ndarray:
        """Mixing probabilities ``p_1 .. p_N`` up to the tail cutoff."""
        size = ps.tail_cutoff(theta, self.eps_tail, self.n_max)
        return np.exp(ps._log_pmf(theta, np.arange(1, size + 1)))


@dataclass(frozen=True)
class EwpsModel:
    """A fully specified EWPS distribution.

    Parameters
    ----------
    ps : PowerSeriesFamily
        Mixer for the latent count ``N``.
    ew : ExtendedWeibullFamily
        Generator carrying the shape vector ``xi``.
    theta : float
        Mixer parameter, inside ``ps.theta_domain``.
    alpha : float
        Positive rate; must equal 1 when the generator fixes it.
    """

    ps: PowerSeriesFamily
    ew: ExtendedWeibullFamily
    theta: float
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "alpha", float(self.alpha))
        self.ps.check_theta(self.theta)
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError("alpha must be positive and finite")
        if self.ew.alpha_fixed and self.alpha != 1.0:
            raise DomainError(f"{self.ew.name} fixes alpha = 1")

    # ------------------------------------------------------------------
    @property
    def support_low(self) -> float:
        return self.ew.support_low

    @property
    def label(self) -> str:
        return f"{self.ps.name}-{self.ew.name}"

    def params(self) -> dict[str, float]:
        out = {"theta": self.theta}
        if not self.ew.alpha_fixed:
            out["alpha"] = self.alpha
        out.update(self.ew.xi_dict())
        return out

    def _u(self, H):
        return self.theta * np.exp(-self.alpha * H)

    def _log_survival(self, x):
        x = np.asarray(x, dtype=float)
        inside = x > self.support_low
        xs = np.where(inside, x, self.support_low)
        with np.errstate(over="ignore", divide="ignore"):
            H = self.ew._H(xs)
            val = self.ps.log_c(self._u(H)) - self.ps.log_c(self.theta)
        return np.where(inside, val, 0.0)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def survival(self, x):
        """``S(x) = C(theta e^{-alpha H(x)}) / C(theta)``."""
        return np.exp(self._log_survival(x))[()]

    def cdf(self, x):
        """``F(x) = 1 - S(x)``; zero below the support."""
        return (-np.expm1(self._log_survival(x)))[()]

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = x >= self.support_low
        xs = np.where(inside, x, max(self.support_low, 1.0))
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            H = self.ew._H(xs)
            u = self._u(H)
            val = (math.log(self.theta) + math.log(self.alpha) + self.ew._log_h(xs)
                   - self.alpha * H + self.ps.log_c_prime(u) - self.ps.log_c(self.theta))
        return np.where(inside & ~np.isposinf(H), val, -np.inf)[()]

    def pdf(self, x):
        """Density ``theta alpha h e^{-alpha H} C'(theta e^{-alpha H}) / C(theta)``."""
        return np.exp(self.logpdf(x))

    def hazard(self, x):
        """``f(x) / S(x)``; ``+inf`` where the survival underflows to zero."""
        logf = np.asarray(self.logpdf(x))
        logs = self._log_survival(x)
        with np.errstate(invalid="ignore", over="ignore"):
            out = np.where(np.isneginf(logs), np.inf, np.exp(logf - logs))
        return out[()]

    def mixture_pdf(self, x, trunc: MixtureTruncation | None = None):
        """Density from the truncated series ``sum_n p_n g(x; n alpha, xi)``."""
        trunc = trunc or MixtureTruncation()
        p = trunc.weights(self.ps, self.theta)
        x = np.asarray(x, dtype=float)
        inside = x >= self.support_low
        xs = np.where(inside, x, max(self.support_low, 1.0))
        n = np.arange(1, p.size + 1)
        H = self._H_safe(xs)
        H = np.where(np.isposinf(H), 0.0, H)[..., None]  # the first factor is already zero
        terms = p * np.exp(self.ew._log_g(self.alpha, xs[..., None]) + np.log(n)
                           - (n - 1) * self.alpha * H)
        return np.where(inside, terms.sum(axis=-1), 0.0)[()]

    def _H_safe(self, x):
        with np.errstate(over="ignore"):
            return self.ew._H(x)

    def quantile(self, u):
        """Inverse cdf via ``H^{-1}(-log[C^{-1}(C(theta)(1-u)) / theta] / alpha)``."""
        u = np.asarray(u, dtype=float)
        if np.any(np.isnan(u)) or np.any(u < 0) or np.any(u > 1):
            raise DomainError("quantile needs u in [0, 1]")
        with np.errstate(divide="ignore"):
            log_y = self.ps.log_c(self.theta) + np.log1p(-u)
            v = self.ps._c_inverse_log(log_y)
            t = -(np.log(v) - math.log(self.theta)) / self.alpha
        t = np.maximum(t, 0.0)
        out = np.full(u.shape, np.inf)
        finite = u < 1
        if np.any(finite):
            out[finite] = self.ew._H_inv(t[finite])
        out = np.where(u == 0, self.support_low, out)
        return out[()]

    def sample(self, n: int, seed: int | None = None) -> Dataset:
        """Draw ``n`` variates by inverse transform from a private generator."""
        if int(n) != n or n < 1:
            raise DomainError("sample size must be a positive integer")
        rng = np.random.default_rng(seed)
        values = self.quantile(rng.random(int(n)))
        return Dataset(np.atleast_1d(values), label=f"simulated {self.label}", source="simulated",
                       meta={"seed": seed, "params": self.params()})

    # ------------------------------------------------------------------
    # helpers for numerical integration
    # ------------------------------------------------------------------
    def breakpoints(self, rate: float | None = None) -> list[float]:
        """Quantiles of the compound law and, optionally, of ``EW(rate, xi)``."""
        pts = list(np.atleast_1d(self.quantile(np.array(_BREAK_PROBS))))
        if rate is not None:
            pts += list(np.atleast_1d(self.ew.ew_quantile(rate, np.array(_BREAK_PROBS))))
        return [p for p in pts if np.isfinite(p)]

    def baseline_pdf(self, rate: float, x):
        """Extended-Weibull density ``g(x; rate, xi)``."""
        return np.exp(self.ew._log_g(rate, np.asarray(x, dtype=float)))[()]

    def __repr__(self) -> str:
        return f"EwpsModel({self.ps!r}, {self.ew!r}, theta={self.theta!r}, alpha={self.alpha!r})"
