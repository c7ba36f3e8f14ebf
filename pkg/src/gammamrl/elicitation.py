"""Hyperprior settings for the gamma DP mixture and their elicitation."""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Hyperparams",
    "ElicitationError",
    "prior_mean_T",
    "prior_var_T",
    "elicit_hyperparameters",
    "expected_clusters",
]

_T1 = np.array([1.0, -2.0])
_T2 = np.array([2.0, -2.0])
_T3 = np.array([1.0, -1.0])


class ElicitationError(ValueError):
    """The variance target cannot be met; ``residual`` holds the best miss."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.6g})")
        self.residual = residual


def _spd(name, m):
    m = np.array(m, dtype=float)
    if m.shape != (2, 2) or not np.allclose(m, m.T):
        raise ValueError(f"{name} must be a symmetric 2x2 matrix")
    if np.any(np.linalg.eigvalsh(m) <= 0):
        raise ValueError(f"{name} must be positive definite")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Hyperparams:
    """Priors ``mu ~ N2(a_mu, B_mu)``, ``Sigma ~ IW(a_Sigma, B_Sigma)``,
    ``alpha ~ Gamma(a_alpha, b_alpha)`` (rate)."""

    a_mu: np.ndarray
    B_mu: np.ndarray
    B_Sigma: np.ndarray
    a_Sigma: float = 4.0
    a_alpha: float = 2.0
    b_alpha: float = 1.0
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a_mu = np.array(self.a_mu, dtype=float)
        if a_mu.shape != (2,) or not np.all(np.isfinite(a_mu)):
            raise ValueError("a_mu must be a finite 2-vector")
        a_mu.setflags(write=False)
        object.__setattr__(self, "a_mu", a_mu)
        object.__setattr__(self, "B_mu", _spd("B_mu", self.B_mu))
        object.__setattr__(self, "B_Sigma", _spd("B_Sigma", self.B_Sigma))
        if not self.a_Sigma > 3:
            raise ValueError("a_Sigma must exceed 3 for a finite inverse Wishart mean")
        if not (self.a_alpha > 0 and self.b_alpha > 0):
            raise ValueError("a_alpha and b_alpha must be positive")

    @classmethod
    def isotropic(cls, a_mu, b, a_Sigma=4.0, a_alpha=2.0, b_alpha=1.0):
        """``B_mu = B_Sigma = b * I``."""
        eye = np.eye(2)
        return cls(a_mu, b * eye, b * eye, a_Sigma, a_alpha, b_alpha)

    @property
    def sigma_mean(self):
        return self.B_Sigma / (self.a_Sigma - 3.0)

    def to_dict(self):
        return {
            "a_mu": self.a_mu.tolist(),
            "B_mu": self.B_mu.tolist(),
            "a_Sigma": float(self.a_Sigma),
            "B_Sigma": self.B_Sigma.tolist(),
            "a_alpha": float(self.a_alpha),
            "b_alpha": float(self.b_alpha),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["a_mu"], d["B_mu"], d["B_Sigma"], d.get("a_Sigma", 4.0),
                   d.get("a_alpha", 2.0), d.get("b_alpha", 1.0))


def _log_term(t, a_mu, B_mu, B_Sigma, a_Sigma):
    return t @ a_mu + 0.5 * t @ B_mu @ t + 0.5 * (t @ B_Sigma @ t) / (a_Sigma - 3.0)


def prior_mean_T(hp):
    """Approximate prior predictive mean of ``T``."""
    return float(np.exp(_log_term(_T3, hp.a_mu, hp.B_mu, hp.B_Sigma, hp.a_Sigma)))


def _var_approx(a_mu, B_mu, B_Sigma, a_Sigma):
    args = (a_mu, B_mu, B_Sigma, a_Sigma)
    return (
        np.exp(_log_term(_T1, *args))
        + np.exp(_log_term(_T2, *args))
        - np.exp(2.0 * _log_term(_T3, *args))
    )


def prior_var_T(hp):
    """First-order approximation to the prior predictive variance of ``T``.

    Uses the normal moment generating function for ``mu`` and replaces
    ``Sigma`` by its inverse Wishart mean inside the exponent.
    """
    return float(_var_approx(hp.a_mu, hp.B_mu, hp.B_Sigma, hp.a_Sigma))


def elicit_hyperparameters(center, range_, q_E, q_V, *, a_alpha=2.0, b_alpha=1.0,
                           a_Sigma=4.0, lo=1e-6, hi=10.0, tol=1e-10):
    """Hyperparameters from a rough center and range of the data.

    The prior range is taken as twice the data range, so the variance target
    is ``(2 * range / 4)^2``. A share ``q_E`` of the mean goes to
    ``exp(a_mu1 - a_mu2)`` and a share ``q_V`` of the variance to
    ``exp(a_mu1 - 2 a_mu2)``, which fixes ``a_mu``. The common diagonal
    ``b`` of ``B_mu = B_Sigma = b I`` is then found by bisection on
    ``(lo, hi)`` so the variance approximation hits the target.

    The bisection stops when the residual is below ``tol * max(1, target)``.
    """
    if not (center > 0 and range_ > 0):
        raise ValueError("center and range must be positive")
    if not (0 < q_E <= 1 and 0 < q_V <= 1):
        raise ValueError("q_E and q_V must lie in (0, 1]")
    target_var = (2.0 * range_ / 4.0) ** 2
    log_e = np.log(q_E * center)
    log_v = np.log(q_V * target_var)
    a2 = log_e - log_v
    a_mu = np.array([log_e + a2, a2])

    def resid(b):
        eye = b * np.eye(2)
        return _var_approx(a_mu, eye, eye, a_Sigma) - target_var

    r_lo, r_hi = resid(lo), resid(hi)
    if r_lo > 0:
        raise ElicitationError("variance target is below the approximation at the smallest b", r_lo)
    if not r_hi > 0:
        raise ElicitationError("variance target is above the approximation at the largest b", r_hi)
    scale = tol * max(1.0, target_var)
    b_lo, b_hi = lo, hi
    b = 0.5 * (lo + hi)
    for _ in range(400):
        b = 0.5 * (b_lo + b_hi)
        r = resid(b)
        if abs(r) <= scale or b_hi - b_lo <= 4 * np.finfo(float).eps * b:
            break
        if r > 0:
            b_hi = b
        else:
            b_lo = b
    info = {"center": center, "range": range_, "q_E": q_E, "q_V": q_V,
            "target_var": target_var, "b": b, "residual": float(resid(b))}
    hp = Hyperparams(a_mu, b * np.eye(2), b * np.eye(2), a_Sigma, a_alpha, b_alpha, info)
    return hp


def expected_clusters(alpha, n):
    """Approximate prior expected number of occupied clusters, ``alpha log((alpha + n) / alpha)``.

    The approximation is poor for ``alpha`` well below one.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return float(alpha * np.log((alpha + n) / alpha))
