"""Exponentiated Weibull model: Metropolis-Hastings fit and quantile-based priors."""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import random as rnd
from .distributions import ExpWeibull

__all__ = [
    "EwState",
    "EwConfig",
    "EwDraws",
    "NoRootError",
    "DegenerateProposalWarning",
    "ew_log_posterior",
    "fit_exp_weibull",
    "ew_quantiles",
    "ew_prior_from_quantiles",
]

PARAMS = ("alpha", "theta", "sigma")


class NoRootError(RuntimeError):
    def __init__(self, message, residual, best):
        super().__init__(f"{message} (best residual {residual:.3g})")
        self.residual = residual
        self.best = best


class DegenerateProposalWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EwState:
    alpha: float
    theta: float
    sigma: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.theta > 0 and self.sigma > 0):
            raise ValueError("exponentiated Weibull parameters must be positive")

    def dist(self):
        return ExpWeibull(self.alpha, self.theta, self.sigma)


@dataclass(frozen=True)
class EwConfig:
    """Sampler settings.

    ``scale`` holds the proposal standard deviations on the log scale. With
    ``adapt`` the pilot run replaces them by a full covariance, ``2.38^2 / d``
    times the pilot sample covariance. ``fixed`` pins parameters by name,
    e.g. ``{"theta": 1.0}`` for a Weibull fit.
    """

    burn_in: int = 2000
    thin: int = 5
    n_save: int = 2000
    seed: int = 0
    pilot_iters: int = 1000
    scale: tuple = (0.1, 0.1, 0.1)
    adapt: bool = True
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.scale) != 3 or any(s < 0 for s in self.scale):
            raise ValueError("scale must be three nonnegative numbers")
        if self.thin < 1 or self.n_save < 1 or self.burn_in < 0 or self.pilot_iters < 0:
            raise ValueError("invalid run lengths")
        unknown = set(self.fixed) - set(PARAMS)
        if unknown:
            raise ValueError(f"unknown fixed parameters {sorted(unknown)}")
        if any(not v > 0 for v in self.fixed.values()):
            raise ValueError("fixed values must be positive")

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["scale"] = list(self.scale)
        d["fixed"] = dict(self.fixed)
        return d


@dataclass(frozen=True)
class EwDraws:
    alpha: np.ndarray
    theta: np.ndarray
    sigma: np.ndarray
    acceptance: float
    proposal_cov: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    @property
    def n_draws(self):
        return self.alpha.size

    def as_array(self):
        return np.column_stack([self.alpha, self.theta, self.sigma])

    def states(self):
        return [EwState(*row) for row in self.as_array()]


def ew_log_posterior(log_params, times, censored, prior_means):
    """Log posterior of ``(log alpha, log theta, log sigma)``.

    Exponential priors with the given means, plus the log Jacobian of the
    log transform. Censored times contribute ``log(1 - F)``.
    """
    eta = np.asarray(log_params, dtype=float)
    a, th, s = np.exp(eta)
    if not np.all(np.isfinite([a, th, s])) or min(a, th, s) <= 0:
        return -np.inf
    d = ExpWeibull(a, th, s)
    ll = 0.0
    obs = ~censored
    if np.any(obs):
        ll += np.sum(d.logpdf(times[obs]))
    if np.any(censored):
        ll += np.sum(d.logsf(times[censored]))
    prior = -np.sum(np.exp(eta) / np.asarray(prior_means, dtype=float))
    out = ll + prior + eta.sum()
    return out if np.isfinite(out) else -np.inf


def fit_exp_weibull(data, prior_means, config=EwConfig()):
    """Random-walk Metropolis-Hastings on the log parameters.

    ``data`` is a :class:`~gammamrl.gibbs.Dataset` or a ``(times, censored)``
    pair. Parameters listed in ``config.fixed`` are held at their values.
    """
    times = np.asarray(getattr(data, "times", data[0] if isinstance(data, tuple) else data), dtype=float)
    censored = getattr(data, "censored", None)
    if censored is None:
        censored = data[1] if isinstance(data, tuple) else np.zeros(times.shape, bool)
    censored = np.asarray(censored, dtype=bool)
    prior_means = np.asarray(prior_means, dtype=float)
    if prior_means.shape != (3,) or np.any(~(prior_means > 0)):
        raise ValueError("prior means must be three positive numbers")

    rng = rnd.make_rng(config.seed)
    started = time.perf_counter()
    free = np.array([p not in config.fixed for p in PARAMS])
    eta = np.log(prior_means)
    for i, p in enumerate(PARAMS):
        if p in config.fixed:
            eta[i] = np.log(config.fixed[p])
    scale = np.where(free, np.asarray(config.scale, dtype=float), 0.0)
    cov = np.diag(scale**2)
    degenerate = not np.any(scale[free] > 0)
    if degenerate:
        warnings.warn("proposal scale is zero; the chain will not move", DegenerateProposalWarning,
                      stacklevel=2)

    def target(x):
        return ew_log_posterior(x, times, censored, prior_means)

    current = target(eta)
    if not np.isfinite(current):
        raise ValueError("starting point has zero posterior density")

    def step(eta, current, chol):
        z = rng.standard_normal(3)
        u = rng.random()
        if degenerate:
            return eta, current, False
        prop = eta + chol @ z
        prop[~free] = eta[~free]
        lp = target(prop)
        if np.log(u) < lp - current:
            return prop, lp, True
        return eta, current, False

    chol = np.sqrt(cov)
    k = int(free.sum())
    n_rounds = 5 if config.adapt and not degenerate else 1
    per_round = config.pilot_iters // n_rounds
    for r in range(n_rounds):
        iters = per_round if r < n_rounds - 1 else config.pilot_iters - per_round * (n_rounds - 1)
        pilot, moved = [], 0
        for _ in range(iters):
            eta, current, ok = step(eta, current, chol)
            moved += ok
            pilot.append(eta.copy())
        if n_rounds == 1 or iters < 20:
            continue
        rate = moved / iters
        sub = np.cov(np.array(pilot)[:, free], rowvar=False).reshape(k, k)
        usable = moved >= 10 and np.all(np.isfinite(sub)) and np.all(np.linalg.eigvalsh(sub) > 0)
        if usable:
            sub = (2.38**2 / k) * sub
        else:
            # too few moves to estimate a covariance: shrink or widen the current one
            sub = cov[np.ix_(free, free)] * (0.2 if rate < 0.1 else 3.0)
        cov = np.zeros((3, 3))
        cov[np.ix_(free, free)] = sub
        chol = np.zeros((3, 3))
        chol[np.ix_(free, free)] = np.linalg.cholesky(sub)

    for _ in range(config.burn_in):
        eta, current, _ = step(eta, current, chol)
    saved = np.empty((config.n_save, 3))
    accepted = 0
    for j in range(config.n_save):
        for _ in range(config.thin):
            eta, current, ok = step(eta, current, chol)
            accepted += ok
        saved[j] = np.exp(eta)
    total = config.n_save * config.thin
    return EwDraws(saved[:, 0], saved[:, 1], saved[:, 2], accepted / total, cov,
                   {"runtime_s": time.perf_counter() - started, "config": config.to_dict(),
                    "prior_means": prior_means.tolist()})


def ew_quantiles(alpha, theta, sigma, P):
    """Quantiles ``sigma * (-log(1 - P^(1/theta)))^(1/alpha)``."""
    return ExpWeibull(alpha, theta, sigma).quantile(P)


def _log_q(eta, P):
    la, lt, ls = eta
    inner = -np.log1p(-np.exp(np.log(P) * np.exp(-lt)))
    return ls + np.exp(-la) * np.log(inner)


def _jac(eta, P, h=1e-7):
    J = np.empty((P.size, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        J[:, k] = (_log_q(eta + e, P) - _log_q(eta - e, P)) / (2 * h)
    return J


def _newton(eta, P, target, tol, max_iter=200):
    r = _log_q(eta, P) - target
    norm = np.max(np.abs(r))
    for _ in range(max_iter):
        if not np.isfinite(norm):
            return eta, np.inf
        if norm < tol:
            break
        J = _jac(eta, P)
        try:
            delta = np.linalg.lstsq(J, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            return eta, norm
        step = 1.0
        while step > 1e-8:
            cand = eta + step * delta
            with np.errstate(all="ignore"):
                rc = _log_q(cand, P) - target
            nc = np.max(np.abs(rc))
            if np.isfinite(nc) and nc < norm:
                eta, r, norm = cand, rc, nc
                break
            step *= 0.5
        else:
            break
    return eta, norm


def ew_prior_from_quantiles(P, Q, *, n_starts=50, tol=1e-10, seed=0):
    """Solve ``P_j = [1 - exp(-(Q_j / sigma)^alpha)]^theta`` for ``(alpha, theta, sigma)``.

    Damped Newton on the log parameters with log-quantile residuals; the first
    start is ``(0, 0, log median(Q))`` and later ones are random around it.
    The solution is returned as the three exponential prior means.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != (3,) or Q.shape != (3,):
        raise ValueError("need three probabilities and three quantiles")
    if np.any((P <= 0) | (P >= 1)) or np.any(Q <= 0):
        raise ValueError("probabilities must lie in (0, 1) and quantiles be positive")
    if np.any(np.diff(P) <= 0) or np.any(np.diff(Q) <= 0):
        raise ValueError("P and Q must be strictly increasing")
    target = np.log(Q)
    rng = np.random.default_rng(seed)
    base = np.array([0.0, 0.0, np.log(Q[1])])
    best, best_norm = base, np.inf
    for k in range(n_starts):
        start = base if k == 0 else base + rng.normal(0.0, 1.5, 3)
        with np.errstate(all="ignore"):
            eta, norm = _newton(start, P, target, tol)
        if norm < best_norm:
            best, best_norm = eta, norm
        if norm < tol:
            return tuple(float(x) for x in np.exp(eta))
    raise NoRootError("no root of the quantile system found", best_norm, tuple(np.exp(best)))
