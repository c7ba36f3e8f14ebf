"""Truncated stick-breaking gamma mixtures and their survival functionals.

Kernels are gamma densities with shape ``exp(theta)`` and rate ``exp(phi)``.
All mixture sums are taken in log space.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from . import special
from .numerics import Grid, trapezoid_cumint

__all__ = [
    "MixtureParams",
    "MrlGrid",
    "MixtureFunctionals",
    "TruncationLevel",
    "stick_break",
    "truncation_level",
    "finiteness_A",
    "kernel_loglik",
    "mixture_mean",
    "mixture_functionals",
    "mixture_mrl",
    "mixture_mrl_grid",
    "check_mrl_characterization",
]

SURVIVAL_FLOOR = 1e-10


@dataclass(frozen=True)
class MixtureParams:
    """Weights and log-scale gamma atoms of a truncated mixture.

    Arrays have shape ``(..., L)``; leading axes index posterior draws.
    """

    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        th = np.asarray(self.theta, dtype=float)
        ph = np.asarray(self.phi, dtype=float)
        if not (w.shape == th.shape == ph.shape):
            raise ValueError("weights, theta and phi must share a shape")
        if np.any(w < 0) or np.any(np.abs(w.sum(axis=-1) - 1.0) > 1e-12):
            raise ValueError("weights must form a simplex")
        if not (np.all(np.isfinite(th)) and np.all(np.isfinite(ph))):
            raise ValueError("atoms must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @property
    def L(self):
        return self.weights.shape[-1]

    @property
    def shape(self):
        return np.exp(self.theta)

    @property
    def rate(self):
        return np.exp(self.phi)

    @classmethod
    def from_gamma(cls, weights, shapes, rates):
        """Build from gamma shapes and rates instead of their logs."""
        return cls(np.asarray(weights, dtype=float), np.log(shapes), np.log(rates))


@dataclass(frozen=True)
class MrlGrid:
    """Mixture mean residual life on a grid.

    ``values`` has shape ``(m,)`` or ``(B, m)``; ``missing`` marks points where
    the survival fell below the reporting floor (those values are NaN).
    """

    grid: Grid
    values: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        grid = self.grid if isinstance(self.grid, Grid) else Grid(self.grid)
        values = np.asarray(self.values, dtype=float)
        missing = np.asarray(self.missing, dtype=bool)
        if values.ndim not in (1, 2) or values.shape[-1] != len(grid):
            raise ValueError("values must have shape (m,) or (B, m) matching the grid")
        if missing.shape != values.shape:
            raise ValueError("missing must match values in shape")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", np.where(missing, np.nan, values))
        object.__setattr__(self, "missing", missing)


class MixtureFunctionals(NamedTuple):
    density: np.ndarray
    survival: np.ndarray
    hazard: np.ndarray
    underflow: np.ndarray


class TruncationLevel(NamedTuple):
    L: int
    expected_mass: float


def stick_break(v):
    """Weights from stick-breaking fractions ``v`` of shape ``(..., L - 1)``.

    ``p_1 = v_1``, ``p_l = v_l * prod_{r<l} (1 - v_r)`` and the last weight
    takes whatever is left so the result sums to one.
    """
    v = np.asarray(v, dtype=float)
    if np.any((v < 0) | (v > 1)):
        raise ValueError("stick fractions must lie in [0, 1]")
    remaining = np.cumprod(1.0 - v, axis=-1)
    before = np.concatenate([np.ones(v.shape[:-1] + (1,)), remaining[..., :-1]], axis=-1)
    head = v * before
    last = np.maximum(1.0 - head.sum(axis=-1, keepdims=True), 0.0)
    return np.concatenate([head, last], axis=-1)


def truncation_level(alpha, eps=1e-6):
    """Smallest ``L`` with ``(alpha / (alpha + 1))^L <= eps``.

    Also returns the prior expected total mass ``1 - (alpha / (alpha + 1))^L``
    of the first ``L`` sticks.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ratio = alpha / (alpha + 1.0)
    L = max(1, int(np.ceil(np.log(eps) / np.log(ratio))))
    while L > 1 and ratio ** (L - 1) <= eps:
        L -= 1
    while ratio**L > eps:
        L += 1
    return TruncationLevel(L, 1.0 - ratio**L)


def finiteness_A(mu, sigma):
    """Prior mean of the kernel mean, ``E exp(theta - phi)`` under ``N2(mu, sigma)``."""
    t = np.array([1.0, -1.0])
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return float(np.exp(t @ mu + 0.5 * t @ sigma @ t))


def kernel_loglik(t, censored, theta, phi):
    """Per-observation gamma log likelihood.

    Observed times contribute the log density, right-censored ones the log
    survival. Arrays broadcast against each other.
    """
    a = np.exp(theta)
    b = np.exp(phi)
    t = np.asarray(t, dtype=float)
    censored = np.asarray(censored, dtype=bool)
    a, b, t, censored = np.broadcast_arrays(a, b, t, censored)
    out = np.empty(a.shape)
    obs = ~censored
    if np.any(obs):
        ao, bo, to = a[obs], b[obs], t[obs]
        out[obs] = ao * np.log(bo) + (ao - 1.0) * np.log(to) - bo * to - special.gammaln(ao)
    if np.any(censored):
        out[censored] = special.log_gammaincc(a[censored], b[censored] * t[censored])
    return out


def _params(params):
    return params.weights, params.theta, params.phi


def mixture_mean(params):
    """``E(T) = sum_l p_l exp(theta_l - phi_l)``."""
    w, th, ph = _params(params)
    return np.sum(w * np.exp(th - ph), axis=-1)


def _log_components(w, th, ph, t):
    a = np.exp(th)[..., None, :]
    b = np.exp(ph)[..., None, :]
    tt = t[:, None]
    x = b * tt
    log_q = special.log_gammaincc(a, x)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)[..., None, :]
        log_f = a * np.log(b) + (a - 1.0) * np.log(tt) - x - special.gammaln(a)
        ratio = np.exp(a * np.log(x) - x - special.gammaln(a) - log_q)
    kernel_mrl = np.maximum((a - x + ratio) / b, np.finfo(float).tiny)
    return log_w, log_f, log_q, np.log(kernel_mrl) + log_q


_CHUNK_CELLS = 2_000_000


def _log_reduced(params, t):
    """``(log f, log S, log int_t^inf S)`` of the mixture, shape ``(..., m)``.

    Draws are processed in blocks so the ``(draws, m, L)`` intermediates stay small.
    """
    t = np.asarray(t, dtype=float)
    lead = params.weights.shape[:-1]
    L = params.L
    w = params.weights.reshape(-1, L)
    th = params.theta.reshape(-1, L)
    ph = params.phi.reshape(-1, L)
    n = w.shape[0]
    out = np.empty((3, n, t.size))
    step = max(1, _CHUNK_CELLS // max(1, t.size * L))
    for i in range(0, n, step):
        sl = slice(i, i + step)
        log_w, log_f, log_q, log_tail = _log_components(w[sl], th[sl], ph[sl], t)
        out[0, sl] = logsumexp(log_w + log_f, axis=-1)
        out[1, sl] = logsumexp(log_w + log_q, axis=-1)
        out[2, sl] = logsumexp(log_w + log_tail, axis=-1)
    out = out.reshape((3,) + lead + (t.size,))
    return out[0], out[1], out[2]


def mixture_functionals(params, grid, floor=0.0):
    """Density, survival and hazard of the mixture on ``grid``.

    ``underflow`` flags points where the survival is at or below ``floor``
    (there the hazard is still reported, computed in log space).
    """
    log_dens, log_surv, _ = _log_reduced(params, np.asarray(grid, dtype=float))
    surv = np.exp(log_surv)
    return MixtureFunctionals(
        density=np.exp(log_dens),
        survival=surv,
        hazard=np.exp(log_dens - log_surv),
        underflow=surv <= floor,
    )


def mixture_mrl(params, t):
    """Exact mixture mean residual life at arbitrary times (no quadrature).

    Each kernel's tail integral ``int_t^inf S_l(u) du`` has a closed form in
    the incomplete gamma function, so ``m(t) = sum p_l tail_l / sum p_l S_l``.
    """
    t = np.asarray(t, dtype=float)
    _, log_surv, log_tail = _log_reduced(params, np.atleast_1d(t))
    out = np.exp(log_tail - log_surv)
    return out.reshape(out.shape[:-1] + t.shape) if t.ndim == 0 else out


def mixture_mrl_grid(params, grid, method="exact", floor=SURVIVAL_FLOOR):
    """Mixture mean residual life over a grid.

    Parameters
    ----------
    params : MixtureParams
    grid : Grid
    method : {"exact", "trapezoid"}
        ``"exact"`` uses the closed-form kernel tail integrals.
        ``"trapezoid"`` is the recursion ``m(t_j) = (E(T) - I_j) / S(t_j)``
        where ``I_j`` integrates the survival from 0 to ``t_j`` by the
        trapezoid rule, the first segment closed with ``S(0) = 1``.
    floor : float
        Points with mixture survival below this are reported missing (NaN).
    """
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    t = grid.points
    _, log_surv, log_tail = _log_reduced(params, t)
    surv = np.exp(log_surv)
    if method == "exact":
        values = np.exp(log_tail - log_surv)
    elif method == "trapezoid":
        mean = np.asarray(mixture_mean(params))
        cum = trapezoid_cumint(surv, t, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = (mean[..., None] - cum) / surv
    else:
        raise ValueError(f"unknown method {method!r}")
    missing = ~(surv >= floor) | ~np.isfinite(values)
    values = np.where(missing, np.nan, values)
    return MrlGrid(grid, values, missing)


def check_mrl_characterization(mrl_grid, rel_tol=1e-6):
    """True when ``m(t) + t`` is non-decreasing along every row.

    Missing points are skipped; the tolerance is ``rel_tol * m(t_1)`` per row.
    """
    t = mrl_grid.grid.points
    vals = np.atleast_2d(mrl_grid.values)
    for row in vals:
        ok = np.isfinite(row)
        if ok.sum() < 2:
            continue
        y = row[ok] + t[ok]
        if np.any(np.diff(y) < -rel_tol * abs(row[ok][0])):
            return False
    return True
