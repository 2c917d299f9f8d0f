"""Maximum-likelihood fitting of EWPS models.

Free parameters are ordered ``theta, alpha, xi...``; ``alpha`` is absent for
generators that fix it and ``xi`` components listed in ``fit_fixed`` (the
Pareto threshold) are held at the sample minimum.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import expit, logit

from .dataset import Dataset
from .errors import DomainError, InsufficientDataError
from .generators import ExtendedWeibullFamily, ModifiedWeibull, Pareto
from .model import EwpsModel
from .power_series import PowerSeriesFamily

__all__ = [
    "FitConfig",
    "FitReport",
    "LatentPosterior",
    "free_parameter_names",
    "log_likelihood",
    "score",
    "observed_info",
    "e_step",
    "latent_pmf",
    "em_fit",
    "direct_fit",
    "fit",
    "model_criteria",
    "ks_statistic",
]

METHODS = ("em", "direct", "em_then_direct")
_Z95 = 1.959963984540054
# EM iterations spent before the quasi-Newton polish takes over
_EM_WARMUP_MAX = 500


@dataclass(frozen=True)
class FitConfig:
    method: str = "em_then_direct"
    max_iter: int = 2000
    loglik_tol: float = 1e-9
    param_tol: float = 1e-8
    multistart: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if not (self.loglik_tol > 0 and self.param_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.multistart < 0:
            raise DomainError("multistart must be >= 0")


class LatentPosterior(NamedTuple):
    """``E(Z | X = x_i)`` for each observation."""

    z_expectations: np.ndarray


@dataclass
class FitReport:
    model: EwpsModel
    estimates: dict[str, float]
    std_errors: dict[str, float | None]
    loglik: float
    info_matrix: np.ndarray
    criteria: dict[str, float | None]
    ks: float
    iterations: int
    converged: bool
    trace: list[float]
    boundary_flags: list[str]
    relaxed_domain: bool
    degenerate: bool
    method: str
    n: int
    fixed: dict[str, float] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def neg2loglik(self) -> float:
        return -2.0 * self.loglik

    @property
    def n_params(self) -> int:
        return len(self.estimates)

    def to_dict(self) -> dict[str, Any]:
        trace = self.trace
        return {
            "model": self.model.label,
            "mixer": self.model.ps.name,
            "generator": self.model.ew.name,
            "method": self.method,
            "n": self.n,
            "n_params": self.n_params,
            "estimates": dict(self.estimates),
            "std_errors": dict(self.std_errors),
            "fixed": dict(self.fixed),
            "loglik": self.loglik,
            "neg2loglik": self.neg2loglik,
            "criteria": dict(self.criteria),
            "ks": self.ks,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace_summary": {
                "length": len(trace),
                "first": trace[0] if trace else None,
                "last": trace[-1] if trace else None,
            },
            "boundary_flags": list(self.boundary_flags),
            "relaxed_domain": self.relaxed_domain,
            "degenerate_information": self.degenerate,
            "info_matrix": np.asarray(self.info_matrix).tolist(),
        }


# ----------------------------------------------------------------------
# parameter bookkeeping
# ----------------------------------------------------------------------
def _free_xi_index(ew: ExtendedWeibullFamily) -> list[int]:
    return [i for i, name in enumerate(ew.param_names) if name not in ew.fit_fixed]


def free_parameter_names(ps: PowerSeriesFamily, ew: ExtendedWeibullFamily) -> list[str]:
    """Names of the estimated parameters in the order used by score and information."""
    names = ["theta"]
    if not ew.alpha_fixed:
        names.append("alpha")
    names += [ew.param_names[i] for i in _free_xi_index(ew)]
    return names


def _as_array(data) -> np.ndarray:
    return np.asarray(data.values if isinstance(data, Dataset) else data, dtype=float).ravel()


class _Pieces(NamedTuple):
    H: np.ndarray
    logh: np.ndarray
    u: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray


def _pieces(model: EwpsModel, x: np.ndarray) -> _Pieces:
    ew, ps = model.ew, model.ps
    with np.errstate(all="ignore"):
        H = ew._H(x)
        logh = ew._log_h(x)
        u = model.theta * np.exp(-model.alpha * H)
        return _Pieces(H, logh, u, ps.psi1(u), ps.psi2(u))


def _c_ratio(ps: PowerSeriesFamily, theta: float) -> float:
    """``C'(theta) / C(theta)`` in log space."""
    return math.exp(float(ps.log_c_prime(theta)) - float(ps.log_c(theta)))


def log_likelihood(model: EwpsModel, data) -> float:
    """Total log-likelihood; ``-inf`` when any observation lies outside the support."""
    x = _as_array(data)
    n = x.size
    if np.any(~np.isfinite(x)) or np.any(x < model.support_low):
        return -np.inf
    p = _pieces(model, x)
    with np.errstate(all="ignore"):
        val = (n * (math.log(model.theta) + math.log(model.alpha) - float(model.ps.log_c(model.theta)))
               - model.alpha * p.H.sum() + p.logh.sum() + np.sum(model.ps.log_c_prime(p.u)))
    return float(val) if np.isfinite(val) else -np.inf


def _free_derivs(model: EwpsModel, x: np.ndarray):
    d = model.ew._xi_derivs(x)
    idx = _free_xi_index(model.ew)
    return (d.dH[idx], d.d2H[np.ix_(idx, idx)], d.dlogh[idx], d.d2logh[np.ix_(idx, idx)])


def _check_interior(model: EwpsModel, x: np.ndarray) -> None:
    if not np.isfinite(log_likelihood(model, x)):
        raise DomainError("parameters or data outside the interior of the model domain")


def score(model: EwpsModel, data) -> np.ndarray:
    """Analytic gradient of :func:`log_likelihood` over the free parameters."""
    x = _as_array(data)
    _check_interior(model, x)
    n, theta, alpha = x.size, model.theta, model.alpha
    H, _, u, psi1, _ = _pieces(model, x)
    dH, _, dlogh, _ = _free_derivs(model, x)
    w1 = 1.0 + u * psi1
    g = [n / theta - n * _c_ratio(model.ps, theta) + np.sum(psi1 * u) / theta]
    if not model.ew.alpha_fixed:
        g.append(n / alpha - np.sum(H * w1))
    g += list(dlogh.sum(axis=-1) - alpha * (dH * w1).sum(axis=-1))
    return np.array(g, dtype=float)


def _hessian(model: EwpsModel, x: np.ndarray) -> np.ndarray:
    n, theta, alpha = x.size, model.theta, model.alpha
    ps = model.ps
    H, _, u, psi1, psi2 = _pieces(model, x)
    dH, d2H, _, d2logh = _free_derivs(model, x)
    e = np.exp(-alpha * H)
    w1 = 1.0 + u * psi1
    w2 = u * (psi1 + u * psi2)
    m = _c_ratio(ps, theta)
    # C''/C - (C'/C)^2 = m (psi1(theta) - m)
    h_tt = -n / theta**2 - n * m * (float(ps.psi1(theta)) - m) + np.sum(psi2 * e * e)
    rows_theta = [h_tt]
    if not model.ew.alpha_fixed:
        rows_theta.append(-np.sum(H * e * (psi2 * u + psi1)))
    k = dH.shape[0]
    h_txi = -alpha * (dH * e * (psi2 * u + psi1)).sum(axis=-1)
    rows_theta += list(h_txi)
    p = len(rows_theta)
    J = np.zeros((p, p))
    J[0, :] = rows_theta
    off = 1
    if not model.ew.alpha_fixed:
        J[1, 1] = -n / alpha**2 + np.sum(H * H * w2)
        J[1, 2:] = (-dH * w1 + alpha * H * dH * w2).sum(axis=-1)
        off = 2
    if k:
        xi_block = (d2logh.sum(axis=-1) - alpha * (d2H * w1).sum(axis=-1)
                    + alpha**2 * np.einsum("kn,ln,n->kl", dH, dH, w2))
        J[off:, off:] = xi_block
    J = np.triu(J) + np.triu(J, 1).T
    return J


def observed_info(model: EwpsModel, data) -> np.ndarray:
    """Negative analytic Hessian of the log-likelihood over the free parameters."""
    x = _as_array(data)
    _check_interior(model, x)
    return -_hessian(model, x)


def e_step(model: EwpsModel, data) -> LatentPosterior:
    """``E(Z | x) = 1 + u C''(u) / C'(u)`` with ``u = theta exp(-alpha H(x))``."""
    x = _as_array(data)
    p = _pieces(model, x)
    return LatentPosterior(1.0 + p.u * p.psi1)


def latent_pmf(model: EwpsModel, x: float, z_max: int) -> np.ndarray:
    """``P(Z = z | X = x)`` for ``z = 1..z_max``: ``z a_z u^(z-1) / C'(u)``."""
    u = float(model.theta * np.exp(-model.alpha * model.ew._H(np.float64(x))))
    z = np.arange(1, z_max + 1)
    with np.errstate(divide="ignore"):
        logp = (np.log(z) + model.ps.log_coefficient(z) + (z - 1) * math.log(u)
                - float(model.ps.log_c_prime(u)))
    return np.exp(logp)


def model_criteria(loglik: float, p: int, n: int) -> dict[str, float | None]:
    """AIC, BIC, AICC (absent when ``n <= p + 1``) and CAIC."""
    aic = -2.0 * loglik + 2.0 * p
    return {
        "AIC": aic,
        "BIC": -2.0 * loglik + p * math.log(n),
        "AICC": aic + 2.0 * p * (p + 1) / (n - p - 1) if n > p + 1 else None,
        "CAIC": -2.0 * loglik + p * (math.log(n) + 1.0),
    }


def ks_statistic(model: EwpsModel, data) -> float:
    """One-sample Kolmogorov-Smirnov distance between the data and ``model.cdf``."""
    x = np.sort(_as_array(data))
    n = x.size
    F = np.asarray(model.cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


# ----------------------------------------------------------------------
# fitting problem
# ----------------------------------------------------------------------
class _Problem:
    """A mixer/generator pair bound to data, with a free-parameter vector."""

    def __init__(self, ps: PowerSeriesFamily, ew: ExtendedWeibullFamily, x: np.ndarray):
        if isinstance(ew, ModifiedWeibull) and not ew.relaxed_domain:
            ew = replace(ew, relaxed_domain=True)
        self.fixed: dict[str, float] = {}
        if isinstance(ew, Pareto):
            ew = ew.with_xi([x.min()])
            self.fixed["k"] = float(x.min())
        self.ps, self.ew, self.x = ps, ew, x
        self.names = free_parameter_names(ps, ew)
        self.xi_idx = _free_xi_index(ew)
        self.n_alpha = 0 if ew.alpha_fixed else 1

    @property
    def p(self) -> int:
        return len(self.names)

    # vector <-> model ------------------------------------------------
    def model(self, vec) -> EwpsModel:
        vec = np.asarray(vec, dtype=float)
        xi = self.ew.xi.copy()
        xi[self.xi_idx] = vec[1 + self.n_alpha:]
        ew = self.ew.with_xi(xi)
        alpha = 1.0 if self.ew.alpha_fixed else vec[1]
        return EwpsModel(self.ps, ew, vec[0], alpha)

    def vector(self, model: EwpsModel) -> np.ndarray:
        head = [model.theta] + ([] if self.ew.alpha_fixed else [model.alpha])
        return np.array(head + list(model.ew.xi[self.xi_idx]))

    def loglik(self, vec) -> float:
        try:
            return log_likelihood(self.model(vec), self.x)
        except DomainError:
            return -np.inf

    # transforms to an unconstrained scale ------------------------------
    def _kinds(self) -> list[str]:
        lo, hi = self.ps.theta_domain
        kinds = ["logit" if np.isfinite(hi) else "log"]
        if not self.ew.alpha_fixed:
            kinds.append("log")
        for i in self.xi_idx:
            lo, hi = self.ew.param_domain(self.ew.param_names[i], relaxed=True)
            kinds.append("id" if np.isneginf(lo) else "log")
        return kinds

    def to_s(self, vec) -> np.ndarray:
        hi = self.ps.theta_domain[1]
        out = []
        for v, kind in zip(vec, self._kinds()):
            out.append(logit(v / hi) if kind == "logit" else math.log(v) if kind == "log" else v)
        return np.array(out, dtype=float)

    def from_s(self, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Natural parameters with first and second derivatives of the map."""
        hi = self.ps.theta_domain[1]
        vec, d1, d2 = [], [], []
        for v, kind in zip(s, self._kinds()):
            if kind == "logit":
                q = float(expit(v))
                vec.append(hi * q)
                d1.append(hi * q * (1 - q))
                d2.append(hi * q * (1 - q) * (1 - 2 * q))
            elif kind == "log":
                e = math.exp(min(v, 700.0))
                vec += [e]
                d1 += [e]
                d2 += [e]
            else:
                vec.append(v)
                d1.append(1.0)
                d2.append(0.0)
        return np.array(vec), np.array(d1), np.array(d2)

    def objective_s(self, s):
        vec, d1, _ = self.from_s(s)
        try:
            model = self.model(vec)
            ll = log_likelihood(model, self.x)
            if not np.isfinite(ll):
                return 1e300, np.zeros_like(s)
            g = score(model, self.x) * d1
        except (DomainError, FloatingPointError, ValueError, ZeroDivisionError, OverflowError):
            return 1e300, np.zeros_like(s)
        if not np.all(np.isfinite(g)):
            return 1e300, np.zeros_like(s)
        return -ll, -g

    def grad_hess_s(self, s):
        vec, d1, d2 = self.from_s(s)
        model = self.model(vec)
        g = score(model, self.x)
        Hm = _hessian(model, self.x)
        return g * d1, d1[:, None] * Hm * d1[None, :] + np.diag(g * d2)

    # starting values ---------------------------------------------------
    def starts(self, count: int, seed: int) -> list[np.ndarray]:
        rng = np.random.default_rng(seed)
        lo, hi = self.ps.theta_domain
        med = float(np.median(self.x))
        out = []
        for j in range(count + 1):
            xi = self.ew.xi.copy()
            if j == 0:
                theta = 0.5 * hi if np.isfinite(hi) else 1.0
            else:
                t = rng.uniform(-3.0, 3.0)
                theta = hi * float(expit(t)) if np.isfinite(hi) else math.exp(t)
                for i in self.xi_idx:
                    plo, _ = self.ew.param_domain(self.ew.param_names[i], relaxed=True)
                    if np.isneginf(plo):
                        # keep h positive over the data: |lambda| max(x) < gamma / 2
                        xi[i] = rng.uniform(-0.5, 0.5) * xi[0] / self.x.max()
                    else:
                        xi[i] = xi[i] * math.exp(rng.normal(0.0, 1.0))
            try:
                ew = self.ew.with_xi(xi)
                Hm = float(ew._H(np.float64(med)))
                alpha = math.log(2.0) / Hm if Hm > 0 else 1.0
            except DomainError:
                continue
            vec = [theta] + ([] if self.ew.alpha_fixed else [alpha]) + list(xi[self.xi_idx])
            if np.isfinite(self.loglik(vec)):
                out.append(np.array(vec))
        if not out:
            raise DomainError("no admissible starting value found")
        return out


# ----------------------------------------------------------------------
# EM
# ----------------------------------------------------------------------
def _theta_mstep(ps: PowerSeriesFamily, zbar: float) -> float:
    """Solve ``theta C'(theta) / C(theta) = zbar`` on the theta domain."""
    lo, hi = ps.theta_domain
    bounded = np.isfinite(hi)
    to_theta = (lambda s: hi * float(expit(s))) if bounded else (lambda s: math.exp(s))
    s_lo, s_hi = (-30.0, 30.0) if bounded else (-30.0, 20.0)
    target = math.log(zbar)

    def f(s):
        t = to_theta(s)
        return math.log(t) + float(ps.log_c_prime(t)) - float(ps.log_c(t)) - target

    if f(s_lo) >= 0:
        return to_theta(s_lo)
    if f(s_hi) <= 0:
        return to_theta(s_hi)
    s = brentq(f, s_lo, s_hi, xtol=1e-13, rtol=1e-14, maxiter=500)
    return to_theta(s)


def _modified_newton(fun, x0, valid, max_iter=50, tol=1e-12):
    """Maximize ``fun`` (returning value, gradient, Hessian) from ``x0``.

    Newton steps with the Hessian's eigenvalues forced negative, halved
    until the objective increases.
    """
    x = np.asarray(x0, dtype=float)
    f, g, Hm = fun(x)
    for _ in range(max_iter):
        w, V = np.linalg.eigh(Hm)
        floor = 1e-10 * max(1.0, np.max(np.abs(w)))
        w = -np.maximum(np.abs(w), floor)
        step = -(V @ ((V.T @ g) / w))
        t = 1.0
        improved = False
        for _ in range(60):
            xn = x + t * step
            if valid(xn):
                fn, gn, Hn = fun(xn)
                if np.isfinite(fn) and fn >= f:
                    improved = True
                    break
            t *= 0.5
        if not improved:
            break
        done = np.all(np.abs(xn - x) <= tol * (1.0 + np.abs(x))) or fn - f < 1e-15 * max(1, abs(f))
        x, f, g, Hm = xn, fn, gn, Hn
        if done:
            break
    return x, f


def _xi_mstep(prob: _Problem, z: np.ndarray, xi_free: np.ndarray):
    """Exact maximization of the complete-data objective over ``(alpha, xi)``.

    With ``alpha`` free it is profiled out (``alpha = n / sum z H``).
    """
    x, n = prob.x, prob.x.size
    base = prob.ew.xi.copy()

    def ew_of(v):
        xi = base.copy()
        xi[prob.xi_idx] = v
        return prob.ew.with_xi(xi)

    def valid(v):
        try:
            ew = ew_of(v)
        except DomainError:
            return False
        with np.errstate(all="ignore"):
            return bool(np.all(np.isfinite(ew._log_h(x))) and np.all(ew._H(x) >= 0))

    def fun(v):
        ew = ew_of(v)
        H, logh = ew._H(x), ew._log_h(x)
        d = ew._xi_derivs(x)
        idx = prob.xi_idx
        dH, d2H = d.dH[idx], d.d2H[np.ix_(idx, idx)]
        dlogh, d2logh = d.dlogh[idx], d.d2logh[np.ix_(idx, idx)]
        if prob.ew.alpha_fixed:
            f = logh.sum() - np.sum(z * H)
            g = dlogh.sum(-1) - (z * dH).sum(-1)
            Hm = d2logh.sum(-1) - (z * d2H).sum(-1)
        else:
            S = np.sum(z * H)
            a = (z * dH).sum(-1)
            f = -n * math.log(S) + logh.sum()
            g = dlogh.sum(-1) - n * a / S
            Hm = d2logh.sum(-1) - n * ((z * d2H).sum(-1) / S - np.outer(a, a) / S**2)
        return f, g, Hm

    if xi_free.size:
        xi_free, _ = _modified_newton(fun, xi_free, valid)
    if prob.ew.alpha_fixed:
        return None, xi_free
    H = ew_of(xi_free)._H(x)
    return n / float(np.sum(z * H)), xi_free


def _aitken_done(trace: list[float], tol: float) -> bool:
    if len(trace) < 3:
        return False
    d1 = trace[-1] - trace[-2]
    d0 = trace[-2] - trace[-3]
    if abs(d1) < 1e-14 * max(1.0, abs(trace[-1])):
        return True
    if d0 <= 0:
        return abs(d1) < tol
    rate = d1 / d0
    if not 0 <= rate < 1:
        return False
    return d1 / (1.0 - rate) < tol


def _em_run(prob: _Problem, vec: np.ndarray, max_iter: int, tol: float):
    vec = np.asarray(vec, dtype=float)
    ll = prob.loglik(vec)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        model = prob.model(vec)
        z = e_step(model, prob.x).z_expectations
        theta = _theta_mstep(prob.ps, float(z.mean()))
        alpha, xi = _xi_mstep(prob, z, vec[1 + prob.n_alpha:])
        new = np.array([theta] + ([] if alpha is None else [alpha]) + list(xi))
        ll_new = prob.loglik(new)
        if not np.isfinite(ll_new) or ll_new < ll - 1e-10 * max(1.0, abs(ll)):
            # numerical noise at the optimum; keep the previous point
            converged = True
            break
        vec, ll = new, ll_new
        trace.append(ll)
        if _aitken_done(trace, tol):
            converged = True
            break
    return vec, ll, trace, it, converged


# ----------------------------------------------------------------------
# direct maximization
# ----------------------------------------------------------------------
def _newton_polish(prob: _Problem, s: np.ndarray, max_iter: int = 30):
    f = -prob.objective_s(s)[0]
    for _ in range(max_iter):
        try:
            g, Hm = prob.grad_hess_s(s)
        except DomainError:
            break
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(Hm))):
            break
        w, V = np.linalg.eigh(Hm)
        if np.max(w) >= 0:
            break
        step = -(V @ ((V.T @ g) / w))
        t, improved = 1.0, False
        for _ in range(40):
            sn = s + t * step
            fn = -prob.objective_s(sn)[0]
            if fn >= f - 1e-12 * max(1.0, abs(f)) and fn > -1e299:
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        s, f = sn, fn
        if np.max(np.abs(t * step)) < 1e-12:
            break
    return s


def _direct_run(prob: _Problem, vec: np.ndarray, max_iter: int):
    s0 = prob.to_s(vec)
    res = minimize(prob.objective_s, s0, jac=True, method="BFGS",
                   options={"maxiter": max_iter, "gtol": 1e-8})
    s = res.x if res.fun <= prob.objective_s(s0)[0] else s0
    s = _newton_polish(prob, s)
    vec, _, _ = prob.from_s(s)
    return vec, prob.loglik(vec), int(res.nit)


def _scaled_gradient(prob: _Problem, vec: np.ndarray) -> float:
    try:
        g, _ = prob.grad_hess_s(prob.to_s(vec))
    except (DomainError, ValueError):
        return np.inf
    return float(np.max(np.abs(g))) / prob.x.size


# ----------------------------------------------------------------------
# report
# ----------------------------------------------------------------------
def _boundary_flags(prob: _Problem, vec: np.ndarray, se: np.ndarray | None, tol: float) -> list[str]:
    flags = []
    lo, hi = prob.ps.theta_domain
    for j, name in enumerate(prob.names):
        if j == 0:
            edges = [lo, hi]
        elif name == "alpha":
            edges = [0.0]
        else:
            edges = [prob.ew.param_domain(name, relaxed=True)[0]]
        edges = [e for e in edges if np.isfinite(e)]
        v = vec[j]
        near = any(abs(v - e) <= tol * max(1.0, abs(e)) for e in edges)
        # a bounded theta domain whose edge falls inside the Wald interval
        if j == 0 and np.isfinite(hi) and se is not None and np.isfinite(se[0]):
            near = near or any(v - _Z95 * se[0] <= e <= v + _Z95 * se[0] for e in edges)
        if near:
            flags.append(name)
    return flags


def _report(prob: _Problem, vec, trace, iterations, converged, method, config, t0) -> FitReport:
    model = prob.model(vec)
    x, n = prob.x, prob.x.size
    ll = log_likelihood(model, x)
    try:
        J = -_hessian(model, x)
    except (DomainError, ValueError, FloatingPointError):
        J = np.full((prob.p, prob.p), np.nan)
    degenerate = True
    se = None
    if np.all(np.isfinite(J)):
        try:
            np.linalg.cholesky(J)
            cov = np.linalg.inv(J)
            se = np.sqrt(np.diag(cov))
            degenerate = not np.all(np.isfinite(se))
        except np.linalg.LinAlgError:
            pass
    flags = _boundary_flags(prob, vec, se, config.param_tol)
    std = {}
    for j, name in enumerate(prob.names):
        ok = se is not None and not degenerate and name not in flags
        std[name] = float(se[j]) if ok else None
    return FitReport(
        model=model,
        estimates={k: float(v) for k, v in zip(prob.names, vec)},
        std_errors=std,
        loglik=ll,
        info_matrix=J,
        criteria=model_criteria(ll, prob.p, n),
        ks=ks_statistic(model, x),
        iterations=iterations,
        converged=bool(converged),
        trace=[float(v) for v in trace],
        boundary_flags=flags,
        relaxed_domain=bool(model.ew.relaxed),
        degenerate=degenerate,
        method=method,
        n=n,
        fixed=dict(prob.fixed),
        elapsed=time.perf_counter() - t0,
    )


def _prepare(ps, ew, data) -> _Problem:
    x = _as_array(data)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise DomainError("data must be nonempty and finite")
    if np.any(x <= 0):
        raise DomainError("lifetime data must be positive")
    prob = _Problem(ps, ew, x)
    if x.size <= prob.p:
        raise InsufficientDataError(f"insufficient data: need more than {prob.p} observations, got {x.size}")
    return prob


def em_fit(ps: PowerSeriesFamily, ew: ExtendedWeibullFamily, data,
           config: FitConfig | None = None) -> FitReport:
    """EM with the best of ``multistart + 1`` starts; ``ew`` supplies start 0's shape."""
    config = config or FitConfig(method="em")
    t0 = time.perf_counter()
    prob = _prepare(ps, ew, data)
    best = None
    for start in prob.starts(config.multistart, config.seed):
        run = _em_run(prob, start, config.max_iter, config.loglik_tol)
        if best is None or run[1] > best[1]:
            best = run
    vec, _, trace, it, conv = best
    return _report(prob, vec, trace, it, conv, "em", config, t0)


def direct_fit(ps: PowerSeriesFamily, ew: ExtendedWeibullFamily, data,
               config: FitConfig | None = None) -> FitReport:
    """Quasi-Newton ascent over unconstrained coordinates, best of all starts."""
    config = config or FitConfig(method="direct")
    t0 = time.perf_counter()
    prob = _prepare(ps, ew, data)
    best = None
    for start in prob.starts(config.multistart, config.seed):
        vec, ll, it = _direct_run(prob, start, config.max_iter)
        if best is None or ll > best[1]:
            best = (vec, ll, it)
    vec, ll, it = best
    conv = _scaled_gradient(prob, vec) < 1e-6
    return _report(prob, vec, [ll], it, conv, "direct", config, t0)


def _em_then_direct(ps, ew, data, config: FitConfig) -> FitReport:
    t0 = time.perf_counter()
    prob = _prepare(ps, ew, data)
    best = None
    for start in prob.starts(config.multistart, config.seed):
        vec, ll, trace, it, _ = _em_run(prob, start, min(config.max_iter, _EM_WARMUP_MAX),
                                         max(config.loglik_tol, 1e-6))
        pv, pll, pit = _direct_run(prob, vec, config.max_iter)
        if pll >= ll:
            vec, ll = pv, pll
            trace = trace + [pll]
            it += pit
        if best is None or ll > best[1]:
            best = (vec, ll, trace, it)
    vec, ll, trace, it = best
    conv = _scaled_gradient(prob, vec) < 1e-6
    return _report(prob, vec, trace, it, conv, "em_then_direct", config, t0)


def fit(ps: PowerSeriesFamily, ew: ExtendedWeibullFamily, data,
        config: FitConfig | None = None) -> FitReport:
    """Fit by the method named in ``config`` (EM, direct, or EM then direct)."""
    config = config or FitConfig()
    if config.method == "em":
        return em_fit(ps, ew, data, config)
    if config.method == "direct":
        return direct_fit(ps, ew, data, config)
    return _em_then_direct(ps, ew, data, config)
