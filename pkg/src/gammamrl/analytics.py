"""Posterior summaries: pointwise bands, two-group MRL comparisons and the
Gelfand-Ghosh posterior predictive loss."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import random as rnd
from .distributions import ExpWeibull
from .gibbs import sample_prior
from .mixture import (
    SURVIVAL_FLOOR,
    MrlGrid,
    mixture_functionals,
    mixture_mean,
    mixture_mrl,
    mixture_mrl_grid,
)
from .numerics import Grid

__all__ = [
    "FunctionalGrid",
    "ComparisonResult",
    "MrlDifference",
    "DEFAULT_K_GRID",
    "pointwise_bands",
    "functional_bands",
    "atom_correlation",
    "mrl_difference",
    "prob_mrl_greater",
    "prior_prob_mrl_greater",
    "gg_replicates_dpmm",
    "gg_replicates_ew",
    "gelfand_ghosh",
    "ew_functional_bands",
]

DEFAULT_K_GRID = (1.0, 2.0, 5.0, 10.0, 100.0, np.inf)


@dataclass(frozen=True)
class FunctionalGrid:
    """Pointwise median and equal-tailed band.

    ``n_valid`` counts usable draws per point; points with fewer than two are
    ``flagged`` and carry NaN.
    """

    grid: Grid
    median: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    n_valid: np.ndarray
    flagged: np.ndarray


@dataclass(frozen=True)
class ComparisonResult:
    k: np.ndarray
    D: np.ndarray
    G: float
    P: float

    def table(self):
        return [(float(k), float(d)) for k, d in zip(self.k, self.D)]


class MrlDifference(NamedTuple):
    t: np.ndarray
    samples: np.ndarray
    flagged: np.ndarray


def pointwise_bands(values, grid, level=0.95, missing=None):
    """Median and ``level`` band at each grid point.

    Quantiles interpolate linearly between order statistics: with sorted
    values ``x_1..x_n`` the ``q`` quantile is read at position
    ``1 + (n - 1) q``. NaN values and ``missing`` entries are skipped per point.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    if values.shape[1] != len(grid):
        raise ValueError("values and grid disagree in length")
    if missing is not None:
        values = np.where(np.asarray(missing, bool), np.nan, values)
    n_valid = np.sum(np.isfinite(values), axis=0)
    flagged = n_valid < 2
    tail = 0.5 * (1.0 - level)
    out = np.full((3, values.shape[1]), np.nan)
    ok = ~flagged
    if np.any(ok):
        with np.errstate(invalid="ignore"):
            vals = np.where(np.isfinite(values[:, ok]), values[:, ok], np.nan)
            out[:, ok] = np.nanquantile(vals, [tail, 0.5, 1.0 - tail], axis=0, method="linear")
    return FunctionalGrid(grid, out[1], out[0], out[2], level, n_valid, flagged)


def functional_bands(draws, grid, level=0.95, floor=SURVIVAL_FLOOR):
    """Bands for the density, survival, hazard and MRL of a fitted mixture."""
    params = draws.params
    fx = mixture_functionals(params, grid)
    mrl = mixture_mrl_grid(params, grid, floor=floor)
    return {
        "density": pointwise_bands(fx.density, grid, level),
        "survival": pointwise_bands(fx.survival, grid, level),
        "hazard": pointwise_bands(fx.hazard, grid, level, missing=fx.survival < floor),
        "mrl": pointwise_bands(mrl.values, grid, level, missing=mrl.missing),
    }


def atom_correlation(draws):
    """Per-draw correlation of the baseline normal, ``Sigma12 / sqrt(Sigma11 Sigma22)``."""
    S = np.asarray(draws.Sigma if hasattr(draws, "Sigma") else draws, dtype=float)
    return S[..., 0, 1] / np.sqrt(S[..., 0, 0] * S[..., 1, 1])


def _paired(drawsA, drawsB):
    if drawsA.n_draws != drawsB.n_draws:
        raise ValueError("paired comparisons need the same number of draws in both groups")


def mrl_difference(drawsA, drawsB, t_points, floor=SURVIVAL_FLOOR):
    """Paired samples of ``m_A(t) - m_B(t)`` at each requested time.

    At ``t = 0`` the difference of analytic mixture means is used. Entries
    where either group's survival is below ``floor`` are NaN and flagged.
    """
    _paired(drawsA, drawsB)
    t = np.atleast_1d(np.asarray(t_points, dtype=float))
    if np.any(t < 0):
        raise ValueError("times must be nonnegative")
    out = np.empty((drawsA.n_draws, t.size))
    flagged = np.zeros((drawsA.n_draws, t.size), bool)
    zero = t == 0
    if np.any(zero):
        diff = mixture_mean(drawsA.params) - mixture_mean(drawsB.params)
        out[:, zero] = diff[:, None]
    pos = ~zero
    if np.any(pos):
        tp = t[pos]
        with np.errstate(divide="ignore", invalid="ignore"):
            d = mixture_mrl(drawsA.params, tp) - mixture_mrl(drawsB.params, tp)
        low = (mixture_functionals(drawsA.params, tp).survival < floor) | \
              (mixture_functionals(drawsB.params, tp).survival < floor)
        low |= ~np.isfinite(d)
        out[:, pos] = np.where(low, np.nan, d)
        flagged[:, pos] = low
    return MrlDifference(t, out, flagged)


def prob_mrl_greater(drawsA, drawsB, grid, floor=SURVIVAL_FLOOR):
    """Fraction of index-paired draws with ``m_A(t) > m_B(t)`` at each grid point.

    Pairs where either MRL is missing are left out of that point's fraction.
    """
    _paired(drawsA, drawsB)
    a = mixture_mrl_grid(drawsA.params, grid, floor=floor)
    b = mixture_mrl_grid(drawsB.params, grid, floor=floor)
    return _greater(a, b)


def _greater(a, b):
    valid = ~(a.missing | b.missing)
    wins = np.sum((a.values > b.values) & valid, axis=0)
    n = valid.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(n > 0, wins / np.maximum(n, 1), np.nan)


def prior_prob_mrl_greater(hpA, hpB, L, grid, n_draws=2000, seed=0, floor=SURVIVAL_FLOOR):
    """The same curve with both groups drawn from their priors."""
    rng = rnd.make_rng(seed)
    pa = sample_prior(hpA, L, n_draws, rng)
    pb = sample_prior(hpB, L, n_draws, rng)
    return prob_mrl_greater(pa, pb, grid, floor=floor)


def gg_replicates_dpmm(draws, data, rng):
    """Per-observation replicate mean and variance under the mixture.

    At draw ``b`` observation ``i`` is replicated from the gamma kernel its
    label points to at that draw.
    """
    labels = draws.labels
    n = getattr(data, "n", None) or len(np.atleast_1d(getattr(data, "times", data)))
    if labels.shape[1] != n:
        raise ValueError("draws and data disagree in the number of observations")
    rows = np.arange(labels.shape[0])[:, None]
    shape = np.exp(draws.theta[rows, labels])
    rate = np.exp(draws.phi[rows, labels])
    reps = rng.gamma(shape, 1.0 / rate)
    return reps.mean(axis=0), reps.var(axis=0, ddof=1)


def gg_replicates_ew(draws, n, rng):
    """Replicate mean and variance per observation under the exponentiated Weibull fit.

    Replicates use the inverse CDF ``sigma (-log(1 - U^(1/theta)))^(1/alpha)``.
    """
    u = rng.random((draws.n_draws, n))
    a = np.asarray(draws.alpha)[:, None]
    th = np.asarray(draws.theta)[:, None]
    s = np.asarray(draws.sigma)[:, None]
    reps = s * (-np.log1p(-u ** (1.0 / th))) ** (1.0 / a)
    return reps.mean(axis=0), reps.var(axis=0, ddof=1)


def gelfand_ghosh(means, variances, observed, k_grid=DEFAULT_K_GRID):
    """``D_k = P + k / (k + 1) G`` with ``P = sum V_i`` and ``G = sum (E_i - t_i)^2``.

    ``k = inf`` gives ``P + G``.
    """
    E = np.asarray(means, dtype=float)
    V = np.asarray(variances, dtype=float)
    t = np.asarray(observed, dtype=float)
    if not (E.shape == V.shape == t.shape):
        raise ValueError("means, variances and observations must align")
    P = float(np.sum(V))
    G = float(np.sum((E - t) ** 2))
    k = np.asarray(k_grid, dtype=float)
    if np.any(k < 0):
        raise ValueError("k must be nonnegative")
    finite = np.where(np.isinf(k), 0.0, k)
    weight = np.where(np.isinf(k), 1.0, finite / (finite + 1.0))
    return ComparisonResult(k, P + weight * G, G, P)


def ew_functional_bands(draws, grid, level=0.95, floor=SURVIVAL_FLOOR):
    """Density, survival, hazard and MRL bands for exponentiated Weibull draws."""
    t = np.asarray(grid, dtype=float)
    dens, surv, mrl = [], [], []
    for a, th, s in zip(draws.alpha, draws.theta, draws.sigma):
        d = ExpWeibull(a, th, s)
        dens.append(d.pdf(t))
        surv.append(d.sf(t))
        mrl.append(d.mrl(t))
    dens, surv, mrl = map(np.array, (dens, surv, mrl))
    low = surv < floor
    mrl = MrlGrid(Grid(t), mrl, low | ~np.isfinite(mrl))
    with np.errstate(divide="ignore", invalid="ignore"):
        haz = dens / surv
    return {
        "density": pointwise_bands(dens, grid, level),
        "survival": pointwise_bands(surv, grid, level),
        "hazard": pointwise_bands(haz, grid, level, missing=low),
        "mrl": pointwise_bands(mrl.values, grid, level, missing=mrl.missing),
    }
