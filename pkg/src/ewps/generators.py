"""Extended-Weibull generator families.

An extended-Weibull (EW) law has cdf ``1 - exp(-alpha * H(x; xi))`` where
``H`` is a non-negative increasing function of ``x`` and ``h = dH/dx``.
Each family below implements ``H``, ``h``, ``log h``, the inverse of ``H``
and the first and second partial derivatives of ``H`` and ``log h`` with
respect to its shape vector ``xi``.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields, replace
from typing import ClassVar, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

__all__ = [
    "XiDerivatives",
    "ExtendedWeibullFamily",
    "Exponential",
    "Rayleigh",
    "Weibull",
    "ModifiedWeibull",
    "Pareto",
    "Gompertz",
    "Chen",
    "ExponentialPower",
    "GENERATORS",
    "get_generator",
]


class XiDerivatives(NamedTuple):
    """Partial derivatives with respect to ``xi``; the parameter axes come first."""

    dH: np.ndarray
    d2H: np.ndarray
    dlogh: np.ndarray
    d2logh: np.ndarray


def _stack(rows, shape):
    if not rows:
        return np.zeros((0,) + shape)
    return np.stack([np.broadcast_to(r, shape) for r in rows])


def _stack2(rows, shape):
    if not rows:
        return np.zeros((0, 0) + shape)
    return np.stack([_stack(r, shape) for r in rows])


class ExtendedWeibullFamily(ABC):
    """Base class for generator pairs ``(H, h)``.

    Subclasses are frozen dataclasses whose fields are the components of
    ``xi`` (in order), listed under their display names in ``param_names``.
    """

    name: ClassVar[str]
    param_names: ClassVar[tuple[str, ...]] = ()
    alpha_fixed: ClassVar[bool] = False
    # components held fixed (not estimated) when fitting
    fit_fixed: ClassVar[tuple[str, ...]] = ()

    # ------------------------------------------------------------------
    # parameter vector
    # ------------------------------------------------------------------
    @property
    def xi(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)][: len(self.param_names)],
                        dtype=float)

    def xi_dict(self) -> dict[str, float]:
        return dict(zip(self.param_names, (float(v) for v in self.xi)))

    def with_xi(self, values) -> "ExtendedWeibullFamily":
        names = [f.name for f in fields(self)][: len(self.param_names)]
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if values.size != len(names):
            raise DomainError(f"{self.name} expects {len(names)} shape parameters")
        return replace(self, **{k: float(v) for k, v in zip(names, values)})

    @classmethod
    def param_domain(cls, name: str, relaxed: bool = False) -> tuple[float, float]:
        """Open interval of admissible values for one component of ``xi``."""
        return 0.0, np.inf

    @property
    def support_low(self) -> float:
        return 0.0

    @property
    def relaxed(self) -> bool:
        """Whether the instance uses a parameter outside the textbook domain."""
        return False

    # ------------------------------------------------------------------
    # closed forms, unchecked
    # ------------------------------------------------------------------
    @abstractmethod
    def _H(self, x): ...

    @abstractmethod
    def _h(self, x): ...

    def _log_h(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._h(x))

    @abstractmethod
    def _H_inv(self, y): ...

    def _xi_derivs(self, x) -> XiDerivatives:
        shape = np.shape(x)
        return XiDerivatives(_stack([], shape), _stack2([], shape),
                             _stack([], shape), _stack2([], shape))

    # ------------------------------------------------------------------
    # public checked operations
    # ------------------------------------------------------------------
    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)) or np.any(x < self.support_low):
            raise DomainError(f"{self.name}: x must be >= {self.support_low}")
        return x

    def big_h(self, x):
        """``H(x; xi)``."""
        return self._H(self._check_x(x))[()]

    def small_h(self, x):
        """``h(x; xi) = dH/dx``."""
        return self._h(self._check_x(x))[()]

    def log_h(self, x):
        return self._log_h(self._check_x(x))[()]

    def big_h_inverse(self, y):
        """Return ``x`` with ``H(x; xi) = y`` for ``y >= 0``."""
        y = np.asarray(y, dtype=float)
        if np.any(np.isnan(y)) or np.any(y < 0):
            raise DomainError("H inverse needs y >= 0")
        return self._H_inv(y)[()]

    def xi_derivatives(self, x) -> XiDerivatives:
        """Analytic partials of ``H`` and ``log h`` with respect to ``xi``."""
        return self._xi_derivs(self._check_x(x))

    def ew_cdf(self, alpha: float, x):
        """Baseline cdf ``1 - exp(-alpha H(x))``."""
        self._check_alpha(alpha)
        with np.errstate(over="ignore"):
            return (-np.expm1(-alpha * self._H(self._check_x(x))))[()]

    def _log_g(self, alpha: float, x):
        """Unchecked ``log(alpha h(x)) - alpha H(x)``; ``-inf`` once ``H`` overflows."""
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            H = self._H(x)
            val = math.log(alpha) + self._log_h(x) - alpha * H
        return np.where(np.isposinf(H), -np.inf, val)

    def ew_pdf(self, alpha: float, x):
        """Baseline density ``alpha h(x) exp(-alpha H(x))``."""
        self._check_alpha(alpha)
        x = self._check_x(x)
        return np.exp(self._log_g(alpha, x))[()]

    def ew_quantile(self, alpha: float, u):
        """Quantile of the baseline law with rate ``alpha``."""
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return self._H_inv(-np.log1p(-u) / alpha)[()]

    def _check_alpha(self, alpha):
        if not alpha > 0:
            raise DomainError("alpha must be positive")
        if self.alpha_fixed and alpha != 1.0:
            raise DomainError(f"{self.name} fixes alpha = 1")

    def _check_positive(self, **values):
        for key, v in values.items():
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{self.name}: {key} must be positive, got {v!r}")


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Exponential(ExtendedWeibullFamily):
    name: ClassVar[str] = "exponential"

    def _H(self, x):
        return np.asarray(x, dtype=float)

    def _h(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def _log_h(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def _H_inv(self, y):
        return np.asarray(y, dtype=float)


@dataclass(frozen=True)
class Rayleigh(ExtendedWeibullFamily):
    name: ClassVar[str] = "rayleigh"

    def _H(self, x):
        return np.asarray(x, dtype=float) ** 2

    def _h(self, x):
        return 2.0 * np.asarray(x, dtype=float)

    def _H_inv(self, y):
        return np.sqrt(y)


@dataclass(frozen=True)
class Weibull(ExtendedWeibullFamily):
    gamma: float = 1.0
    name: ClassVar[str] = "weibull"
    param_names: ClassVar[tuple[str, ...]] = ("gamma",)

    def __post_init__(self):
        self._check_positive(gamma=self.gamma)

    def _H(self, x):
        return np.asarray(x, dtype=float) ** self.gamma

    def _h(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.gamma * x ** (self.gamma - 1.0)

    def _log_h(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return math.log(self.gamma) + (self.gamma - 1.0) * np.log(x)

    def _H_inv(self, y):
        return np.asarray(y, dtype=float) ** (1.0 / self.gamma)

    def _xi_derivs(self, x):
        g = self.gamma
        L = np.log(x)
        H = x**g
        shape = np.shape(x)
        return XiDerivatives(
            _stack([H * L], shape),
            _stack2([[H * L * L]], shape),
            _stack([1.0 / g + L], shape),
            _stack2([[np.full(shape, -1.0 / g**2)]], shape),
        )


@dataclass(frozen=True)
class ModifiedWeibull(ExtendedWeibullFamily):
    """``H = x**gamma * exp(lambda x)``.

    Negative ``lambda`` is admitted only with ``relaxed=True``; ``h`` is then
    positive only below ``-gamma / lambda``.
    """

    gamma: float = 1.0
    lam: float = 0.0
    relaxed_domain: bool = False
    name: ClassVar[str] = "modified_weibull"
    param_names: ClassVar[tuple[str, ...]] = ("gamma", "lambda")

    def __post_init__(self):
        self._check_positive(gamma=self.gamma)
        if not np.isfinite(self.lam):
            raise DomainError("modified_weibull: lambda must be finite")
        if self.lam < 0 and not self.relaxed_domain:
            raise DomainError("modified_weibull: lambda must be >= 0 (pass relaxed_domain=True to admit lambda < 0)")

    @classmethod
    def param_domain(cls, name, relaxed=False):
        if name == "lambda":
            return (-np.inf if relaxed else 0.0), np.inf
        return 0.0, np.inf

    @property
    def relaxed(self):
        return self.lam < 0

    @property
    def turning_point(self) -> float:
        """Largest ``x`` on which ``H`` is increasing."""
        return -self.gamma / self.lam if self.lam < 0 else np.inf

    def _H(self, x):
        x = np.asarray(x, dtype=float)
        return x**self.gamma * np.exp(self.lam * x)

    def _h(self, x):
        x = np.asarray(x, dtype=float)
        g, lam = self.gamma, self.lam
        with np.errstate(divide="ignore", invalid="ignore"):
            return x ** (g - 1.0) * np.exp(lam * x) * (g + lam * x)

    def _log_h(self, x):
        x = np.asarray(x, dtype=float)
        g, lam = self.gamma, self.lam
        with np.errstate(divide="ignore", invalid="ignore"):
            return (g - 1.0) * np.log(x) + lam * x + np.log(g + lam * x)

    def _H_inv(self, y):
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        for idx, target in np.ndenumerate(y):
            out[idx] = self._solve(float(target))
        return out

    def _solve(self, y: float) -> float:
        if y == 0.0:
            return 0.0
        if np.isinf(y):
            return np.inf
        g, lam = self.gamma, self.lam
        # log H(x) = g log x + lam x is increasing up to the turning point
        target = math.log(y)
        f = lambda x: g * math.log(x) + lam * x - target  # noqa: E731
        upper = 1.0
        while f(upper) < 0:
            upper *= 2.0
            if upper > self.turning_point:
                if f(self.turning_point) < 0:
                    raise DomainError("modified_weibull: y beyond the maximum of H")
                upper = self.turning_point
                break
        lower = min(upper, 1.0)
        while f(lower) > 0:
            lower *= 0.5
        return brentq(f, lower, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def _xi_derivs(self, x):
        g, lam = self.gamma, self.lam
        L = np.log(x)
        H = x**g * np.exp(lam * x)
        q = g + lam * x
        shape = np.shape(x)
        return XiDerivatives(
            _stack([H * L, H * x], shape),
            _stack2([[H * L * L, H * L * x], [H * L * x, H * x * x]], shape),
            _stack([L + 1.0 / q, x + x / q], shape),
            _stack2([[-1.0 / q**2, -x / q**2], [-x / q**2, -(x**2) / q**2]], shape),
        )


@dataclass(frozen=True)
class Pareto(ExtendedWeibullFamily):
    k: float = 1.0
    name: ClassVar[str] = "pareto"
    param_names: ClassVar[tuple[str, ...]] = ("k",)
    fit_fixed: ClassVar[tuple[str, ...]] = ("k",)

    def __post_init__(self):
        self._check_positive(k=self.k)

    @property
    def support_low(self):
        return self.k

    def _H(self, x):
        return np.log(np.asarray(x, dtype=float) / self.k)

    def _h(self, x):
        return 1.0 / np.asarray(x, dtype=float)

    def _log_h(self, x):
        return -np.log(np.asarray(x, dtype=float))

    def _H_inv(self, y):
        return self.k * np.exp(y)

    def _xi_derivs(self, x):
        k = self.k
        shape = np.shape(x)
        return XiDerivatives(
            _stack([np.full(shape, -1.0 / k)], shape),
            _stack2([[np.full(shape, 1.0 / k**2)]], shape),
            _stack([np.zeros(shape)], shape),
            _stack2([[np.zeros(shape)]], shape),
        )


@dataclass(frozen=True)
class Gompertz(ExtendedWeibullFamily):
    beta: float = 1.0
    name: ClassVar[str] = "gompertz"
    param_names: ClassVar[tuple[str, ...]] = ("beta",)

    def __post_init__(self):
        self._check_positive(beta=self.beta)

    def _H(self, x):
        return np.expm1(self.beta * np.asarray(x, dtype=float)) / self.beta

    def _h(self, x):
        return np.exp(self.beta * np.asarray(x, dtype=float))

    def _log_h(self, x):
        return self.beta * np.asarray(x, dtype=float)

    def _H_inv(self, y):
        return np.log1p(self.beta * np.asarray(y, dtype=float)) / self.beta

    def _xi_derivs(self, x):
        b = self.beta
        e = np.exp(b * x)
        em1 = np.expm1(b * x)
        dH = x * e / b - em1 / b**2
        d2H = x * x * e / b - 2.0 * x * e / b**2 + 2.0 * em1 / b**3
        shape = np.shape(x)
        return XiDerivatives(
            _stack([dH], shape),
            _stack2([[d2H]], shape),
            _stack([x], shape),
            _stack2([[np.zeros(shape)]], shape),
        )


@dataclass(frozen=True)
class Chen(ExtendedWeibullFamily):
    b: float = 1.0
    name: ClassVar[str] = "chen"
    param_names: ClassVar[tuple[str, ...]] = ("b",)

    def __post_init__(self):
        self._check_positive(b=self.b)

    def _H(self, x):
        return np.expm1(np.asarray(x, dtype=float) ** self.b)

    def _h(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.b * x ** (self.b - 1.0) * np.exp(x**self.b)

    def _log_h(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return math.log(self.b) + (self.b - 1.0) * np.log(x) + x**self.b

    def _H_inv(self, y):
        return np.log1p(np.asarray(y, dtype=float)) ** (1.0 / self.b)

    def _xi_derivs(self, x):
        b = self.b
        L = np.log(x)
        t = x**b
        e = np.exp(t)
        shape = np.shape(x)
        return XiDerivatives(
            _stack([e * t * L], shape),
            _stack2([[e * t * L * L * (1.0 + t)]], shape),
            _stack([1.0 / b + L + t * L], shape),
            _stack2([[-1.0 / b**2 + t * L * L]], shape),
        )


@dataclass(frozen=True)
class ExponentialPower(ExtendedWeibullFamily):
    """``H = exp((lambda x)**beta) - 1`` with ``alpha`` fixed to one."""

    lam: float = 1.0
    beta: float = 1.0
    name: ClassVar[str] = "exponential_power"
    param_names: ClassVar[tuple[str, ...]] = ("lambda", "beta")
    alpha_fixed: ClassVar[bool] = True

    def __post_init__(self):
        self._check_positive(**{"lambda": self.lam, "beta": self.beta})

    def _H(self, x):
        return np.expm1((self.lam * np.asarray(x, dtype=float)) ** self.beta)

    def _h(self, x):
        lx = self.lam * np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.beta * self.lam * np.exp(lx**self.beta) * lx ** (self.beta - 1.0)

    def _log_h(self, x):
        lx = self.lam * np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (math.log(self.beta * self.lam) + lx**self.beta
                    + (self.beta - 1.0) * np.log(lx))

    def _H_inv(self, y):
        return np.log1p(np.asarray(y, dtype=float)) ** (1.0 / self.beta) / self.lam

    def _xi_derivs(self, x):
        lam, beta = self.lam, self.beta
        ll = np.log(lam * x)
        t = (lam * x) ** beta
        e = np.exp(t)
        t_l = beta * t / lam
        t_b = t * ll
        t_ll = beta * (beta - 1.0) * t / lam**2
        t_lb = t / lam * (1.0 + beta * ll)
        t_bb = t * ll * ll
        shape = np.shape(x)
        return XiDerivatives(
            _stack([e * t_l, e * t_b], shape),
            _stack2([[e * (t_l * t_l + t_ll), e * (t_l * t_b + t_lb)],
                     [e * (t_l * t_b + t_lb), e * (t_b * t_b + t_bb)]], shape),
            _stack([beta / lam + t_l, 1.0 / beta + ll + t_b], shape),
            _stack2([[-beta / lam**2 + t_ll, 1.0 / lam + t_lb],
                     [1.0 / lam + t_lb, -1.0 / beta**2 + t_bb]], shape),
        )


GENERATORS: dict[str, type[ExtendedWeibullFamily]] = {
    cls.name: cls
    for cls in (Exponential, Rayleigh, Weibull, ModifiedWeibull, Pareto, Gompertz, Chen,
                ExponentialPower)
}


def get_generator(name: str, **xi: float) -> ExtendedWeibullFamily:
    """Build a generator from its name and named shape parameters.

    >>> get_generator("modified_weibull", gamma=2.0, **{"lambda": 0.5})
    ModifiedWeibull(gamma=2.0, lam=0.5, relaxed_domain=False)
    """
    key = name.strip().lower().replace("-", "_")
    if key not in GENERATORS:
        raise DomainError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    cls = GENERATORS[key]
    unknown = set(xi) - set(cls.param_names) - {"relaxed_domain"}
    if unknown:
        raise DomainError(f"{key} has no parameter(s) {sorted(unknown)}; expects {cls.param_names}")
    attr = {f.name: pn for f, pn in zip(fields(cls), cls.param_names)}
    kwargs = {a: float(xi[pn]) for a, pn in attr.items() if pn in xi}
    if "relaxed_domain" in xi:
        kwargs["relaxed_domain"] = bool(xi["relaxed_domain"])
    return cls(**kwargs)
