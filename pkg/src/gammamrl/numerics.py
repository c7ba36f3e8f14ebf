"""Time grids and cumulative trapezoid integration."""

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "default_grid", "trapezoid_cumint"]


@dataclass(frozen=True)
class Grid:
    """Strictly increasing, strictly positive evaluation times."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise ValueError("a grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if pts[0] <= 0:
            raise ValueError("grid points must be positive")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)


def default_grid(times, n_points=512):
    """Log-spaced grid from ``min(times) / 10`` to ``1.5 * max(times)``."""
    times = np.asarray(times, dtype=float)
    return Grid(np.geomspace(times.min() / 10.0, 1.5 * times.max(), n_points))


def trapezoid_cumint(f_values, grid, f0):
    """Cumulative trapezoid integrals of ``f`` from 0 to each grid point.

    Parameters
    ----------
    f_values : array of shape (..., m)
        Integrand at the grid points. Leading axes are batch axes.
    grid : Grid or array of shape (m,)
    f0 : float or array broadcastable to f_values[..., 0]
        Integrand at t = 0, which closes the leading segment ``[0, t_1]``.

    Returns
    -------
    ndarray of shape (..., m)
    """
    t = np.asarray(grid, dtype=float)
    f = np.asarray(f_values, dtype=float)
    if f.shape[-1] != t.size:
        raise ValueError(f"f_values has {f.shape[-1]} points, grid has {t.size}")
    first = 0.5 * t[0] * (np.asarray(f0, dtype=float) + f[..., 0])
    steps = 0.5 * np.diff(t) * (f[..., 1:] + f[..., :-1])
    out = np.empty(np.broadcast_shapes(f.shape, np.shape(first) + (1,)))
    out[..., 0] = first
    out[..., 1:] = first[..., None] + np.cumsum(steps, axis=-1)
    return out
