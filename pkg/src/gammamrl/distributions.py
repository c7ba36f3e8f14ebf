"""Parametric lifetime catalog: density, survival, hazard and mean residual life.

Every family exposes ``logpdf``, ``logsf`` and ``log_tail``, the log of
``int_t^inf S(u) du``. The mean residual life is then
``exp(log_tail - logsf)``, which stays finite well past the point where the
survival function itself underflows.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from . import special

__all__ = [
    "UndefinedMRLError",
    "DivergenceError",
    "ShapeLabel",
    "Lifetime",
    "Gamma",
    "Weibull",
    "Lognormal",
    "Loglogistic",
    "Gompertz",
    "ExpWeibull",
    "LinearMRL",
    "CoreValues",
    "eval_core",
    "parametric_mrl",
    "survival_from_mrl",
    "moment_from_survival",
    "classify_mrl_shape",
    "numeric_mrl_shape",
    "empirical_mrl",
    "dist_from_spec",
]


class UndefinedMRLError(ValueError):
    """The mean residual life does not exist for these parameters."""


class DivergenceError(ArithmeticError):
    """A moment integral does not settle (the moment is infinite)."""


class ShapeLabel(str, enum.Enum):
    INC = "INC"
    DCR = "DCR"
    CONSTANT = "CONSTANT"
    BT = "BT"
    UBT = "UBT"
    UNDEFINED = "UNDEFINED"


def _t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("times must be nonnegative")
    return t


def _ret(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def _check_positive(**params):
    for name, value in params.items():
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive finite number, got {value}")


# Gauss-Legendre nodes for the composite tail integrals
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _log_space_tail(logsf, t, edges, panel=0.125):
    """``int_t^inf S(u) du`` by composite Gauss-Legendre in ``v = log u``.

    ``edges`` are increasing panel boundaries in ``v``. Beyond the last one
    the integrand is taken as zero, below the first one ``S`` is taken as
    one. Probe points below the first edge get extra panels of width
    ``panel``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    edges = np.asarray(edges, dtype=float)
    with np.errstate(divide="ignore"):
        logt = np.log(t)
    low = np.min(np.where(t > 0, logt, np.inf))
    if low < edges[0]:
        extra = edges[0] - panel * np.arange(int(np.ceil((edges[0] - low) / panel)), 0, -1)
        edges = np.concatenate([extra, edges])
    lo = edges[0]
    width = np.diff(edges)
    half = 0.5 * width
    v = 0.5 * (edges[1:] + edges[:-1])[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.exp(logsf(np.exp(v)) + v)
    panel_int = half * (vals @ _GL_W)
    # integral from each edge to the top edge
    upper_from_edge = np.concatenate([np.cumsum(panel_int[::-1])[::-1], [0.0]])
    out = np.empty_like(t)
    for k, (tk, lk) in enumerate(zip(t, logt)):
        if tk == 0:
            out[k] = upper_from_edge[0] + np.exp(lo)
            continue
        if lk >= edges[-1]:
            out[k] = 0.0
            continue
        j = int(np.searchsorted(edges, lk, side="right")) - 1
        # partial panel [log t, edges[j + 1]]
        a, b = lk, edges[j + 1]
        h = 0.5 * (b - a)
        vv = 0.5 * (a + b) + h * _GL_X
        part = h * np.dot(np.exp(logsf(np.exp(vv)) + vv), _GL_W)
        out[k] = part + upper_from_edge[j + 1]
    return out


def _graded_edges(zones):
    """Concatenate uniform panels; ``zones`` holds ``(start, stop, width)`` triples."""
    pieces = []
    for start, stop, width in zones:
        if stop > start:
            n = max(1, int(np.ceil((stop - start) / width)))
            pieces.append(np.linspace(start, stop, n + 1)[:-1])
    pieces.append([zones[-1][1]])
    return np.unique(np.concatenate(pieces))


@dataclass(frozen=True)
class Lifetime:
    """Base class for the parametric families."""

    def logpdf(self, t):
        raise NotImplementedError

    def logsf(self, t):
        raise NotImplementedError

    def log_tail(self, t):
        raise NotImplementedError

    @property
    def mean(self):
        return float(np.exp(self.log_tail(0.0)))

    def pdf(self, t):
        with np.errstate(divide="ignore", over="ignore"):
            return _ret(np.exp(self.logpdf(_t(t))))

    def sf(self, t):
        return _ret(np.exp(self.logsf(_t(t))))

    def cdf(self, t):
        return _ret(-np.expm1(self.logsf(_t(t))))

    def hazard(self, t):
        t = _t(t)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return _ret(np.exp(self.logpdf(t) - self.logsf(t)))

    def mrl(self, t):
        t = _t(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(self.log_tail(t) - self.logsf(t))
        return _ret(np.where(np.isfinite(self.logsf(t)), out, 0.0))

    def isf(self, q):
        """Time at which the survival function equals ``q``."""
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        target = np.log(q)
        lo, hi = 0.0, max(self.mean, 1e-300)
        while self.logsf(hi) > target:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise ArithmeticError("survival quantile beyond 1e300")
        if lo == 0.0:
            lo = hi
            while self.logsf(lo) <= target:
                lo *= 0.5
                if lo < 1e-300:
                    return 0.0
        return optimize.brentq(lambda x: float(self.logsf(x)) - target, lo, hi,
                               xtol=1e-300, rtol=1e-14)


@dataclass(frozen=True)
class Gamma(Lifetime):
    """Gamma(shape, rate), mean ``shape / rate``."""

    shape: float
    rate: float

    def __post_init__(self):
        _check_positive(shape=self.shape, rate=self.rate)

    def logpdf(self, t):
        a, b = self.shape, self.rate
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a * np.log(b) + (a - 1) * np.log(t) - b * t - special.gammaln(a)
        return np.where(t == 0, np.log(b) if a == 1 else (-np.inf if a > 1 else np.inf), out)

    def logsf(self, t):
        return special.log_gammaincc(self.shape, self.rate * np.asarray(t, dtype=float))

    def _mrl(self, t):
        a, b = self.shape, self.rate
        x = b * np.asarray(t, dtype=float)
        log_q = special.log_gammaincc(a, x)
        with np.errstate(divide="ignore"):
            ratio = np.exp(a * np.log(x) - x - special.gammaln(a) - log_q)
        return (a - x + ratio) / b, log_q

    def log_tail(self, t):
        m, log_q = self._mrl(t)
        return np.log(m) + log_q

    def mrl(self, t):
        return _ret(self._mrl(_t(t))[0])

    @property
    def mean(self):
        return self.shape / self.rate


@dataclass(frozen=True)
class Weibull(Lifetime):
    """Weibull(shape, scale) with ``S(t) = exp(-(t / scale)^shape)``."""

    shape: float
    scale: float

    def __post_init__(self):
        _check_positive(shape=self.shape, scale=self.scale)

    def logpdf(self, t):
        k, lam = self.shape, self.scale
        with np.errstate(divide="ignore"):
            return np.log(k / lam) + (k - 1) * np.log(t / lam) - (t / lam) ** k

    def logsf(self, t):
        return -((np.asarray(t, dtype=float) / self.scale) ** self.shape)

    def log_tail(self, t):
        k, lam = self.shape, self.scale
        z = (np.asarray(t, dtype=float) / lam) ** k
        return np.log(lam / k) + special.gammaln(1.0 / k) + special.log_gammaincc(1.0 / k, z)

    @property
    def mean(self):
        return self.scale * np.exp(special.gammaln(1.0 + 1.0 / self.shape))


@dataclass(frozen=True)
class Lognormal(Lifetime):
    """Lognormal with log-scale mean ``mu`` and log-scale standard deviation ``sigma``."""

    mu: float
    sigma: float

    def __post_init__(self):
        _check_positive(sigma=self.sigma)
        if not np.isfinite(self.mu):
            raise ValueError("mu must be finite")

    def _z(self, t):
        with np.errstate(divide="ignore"):
            return (np.log(np.asarray(t, dtype=float)) - self.mu) / self.sigma

    def logpdf(self, t):
        t = np.asarray(t, dtype=float)
        z = self._z(t)
        with np.errstate(divide="ignore"):
            return -0.5 * z**2 - np.log(t * self.sigma * np.sqrt(2 * np.pi))

    def logsf(self, t):
        return special.log_ndtr(-self._z(t))

    def mrl(self, t):
        t = _t(t)
        z = self._z(t)
        log_ratio = special.log_ndtr(-(z - self.sigma)) - special.log_ndtr(-z)
        return _ret(np.exp(self.mu + 0.5 * self.sigma**2 + log_ratio) - t)

    def log_tail(self, t):
        return np.log(self.mrl(t)) + self.logsf(t)

    @property
    def mean(self):
        return float(np.exp(self.mu + 0.5 * self.sigma**2))


@dataclass(frozen=True)
class Loglogistic(Lifetime):
    """Loglogistic(shape, scale) with ``S(t) = 1 / (1 + (t / scale)^shape)``.

    The mean, and so the mean residual life, exists only for ``shape > 1``.
    """

    shape: float
    scale: float

    def __post_init__(self):
        _check_positive(shape=self.shape, scale=self.scale)

    def _s(self, t):
        return (np.asarray(t, dtype=float) / self.scale) ** self.shape

    def logpdf(self, t):
        k, lam = self.shape, self.scale
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(k / lam) + (k - 1) * np.log(t / lam) - 2 * np.log1p(self._s(t))

    def logsf(self, t):
        return -np.log1p(self._s(t))

    def log_tail(self, t):
        k, lam = self.shape, self.scale
        if k <= 1:
            raise UndefinedMRLError("loglogistic mean residual life needs shape > 1")
        s = self._s(t)
        a, b = 1.0 / k, 1.0 - 1.0 / k
        log_beta = special.gammaln(a) + special.gammaln(b)
        with np.errstate(divide="ignore"):
            return np.log(lam / k) + log_beta + np.log(special.betainc(b, a, 1.0 / (1.0 + s)))

    @property
    def mean(self):
        if self.shape <= 1:
            raise UndefinedMRLError("loglogistic mean needs shape > 1")
        return self.scale * (np.pi / self.shape) / np.sin(np.pi / self.shape)


@dataclass(frozen=True)
class Gompertz(Lifetime):
    """Gompertz(shape, scale) with ``S(t) = exp(-shape * (exp(scale * t) - 1))``."""

    shape: float
    scale: float

    def __post_init__(self):
        _check_positive(shape=self.shape, scale=self.scale)

    def _z(self, t):
        with np.errstate(over="ignore"):
            return self.shape * np.exp(self.scale * np.asarray(t, dtype=float))

    def logpdf(self, t):
        z = self._z(t)
        with np.errstate(invalid="ignore"):
            out = np.log(self.scale) + np.log(z) + self.shape - z
        return np.where(np.isinf(z), -np.inf, out)

    def logsf(self, t):
        return self.shape - self._z(t)

    def log_tail(self, t):
        return self.shape - np.log(self.scale) + special.log_exp1(self._z(t))

    def mrl(self, t):
        z = self._z(_t(t))
        return _ret(np.exp(special.log_exp1_scaled(z)) / self.scale)


@dataclass(frozen=True)
class ExpWeibull(Lifetime):
    """Exponentiated Weibull with ``F(t) = [1 - exp(-(t / sigma)^alpha)]^theta``."""

    alpha: float
    theta: float
    sigma: float

    def __post_init__(self):
        _check_positive(alpha=self.alpha, theta=self.theta, sigma=self.sigma)

    def _z(self, t):
        return (np.asarray(t, dtype=float) / self.sigma) ** self.alpha

    def _log_f1(self, t):
        """``log(1 - exp(-z))``, kept finite when ``z`` underflows."""
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", under="ignore", invalid="ignore", over="ignore"):
            log_z = self.alpha * np.log(t / self.sigma)
            z = np.exp(log_z)
            small = z < 1.0
            zs = np.where(small & (z > 0), z, 1.0)
            # log z + log((1 - e^-z) / z), the second term -> 0 as z -> 0
            near = log_z + np.where(z > 0, np.log(-np.expm1(-zs) / zs), 0.0)
            return np.where(small, near, np.log1p(-np.exp(-z)))

    def logpdf(self, t):
        a, th, s = self.alpha, self.theta, self.sigma
        t = np.asarray(t, dtype=float)
        z = self._z(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (np.log(th * a / s) + (a - 1) * np.log(t / s) - z
                    + (th - 1) * self._log_f1(t))

    def logcdf(self, t):
        return self.theta * self._log_f1(t)

    def cdf(self, t):
        return _ret(np.exp(self.logcdf(_t(t))))

    def logsf(self, t):
        z = np.asarray(self._z(t), dtype=float)
        with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
            direct = np.log(-np.expm1(self.theta * self._log_f1(t)))
        # S ~ theta * exp(-z) once exp(-z) underflows
        return np.where(z > 700, np.log(self.theta) - z, direct)

    def quantile(self, p):
        """Inverse CDF ``sigma * (-log(1 - p^(1/theta)))^(1/alpha)``."""
        p = np.asarray(p, dtype=float)
        return _ret(self.sigma * (-np.log1p(-p ** (1.0 / self.theta))) ** (1.0 / self.alpha))

    def _edges(self, panel=0.125):
        a, th, s = self.alpha, self.theta, self.sigma
        ls = np.log(s)
        # below sigma F ~ (u / s)^(a th), which sets the scale 1 / (a th); the
        # drop of S past sigma has width about 1 / (a log(th)) in log u
        lower = ls + np.log(1e-17) / (a * th)
        knee = ls - 5.0 / a
        upper = ls + np.log(800.0 + max(np.log(th), 0.0)) / a
        fine = min(panel, 0.25 / (a * max(1.0, np.log1p(th))))
        body = min(panel, 0.25 / (a * th))
        return _graded_edges([(lower, min(knee, upper), body),
                              (max(knee, lower), upper + fine, fine)])

    def log_tail(self, t):
        a, th, s = self.alpha, self.theta, self.sigma
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        edges = self._edges()
        far = flat >= np.exp(edges[-1])
        out = np.empty_like(flat)
        if np.any(~far):
            with np.errstate(divide="ignore"):
                out[~far] = np.log(_log_space_tail(self.logsf, flat[~far], edges))
        if np.any(far):
            # S = theta exp(-z) to double precision out here, which integrates
            # to theta (sigma / alpha) Gamma(1 / alpha, z)
            z = self._z(flat[far])
            out[far] = (np.log(th * s / a) + special.gammaln(1.0 / a)
                        + special.log_gammaincc(1.0 / a, z))
        return out.reshape(t.shape)


def _two_product(a, b):
    """``a * b = p + e`` exactly (Dekker split, no FMA needed)."""
    p = a * b
    split = 134217729.0  # 2^27 + 1
    ca = split * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = split * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


@dataclass(frozen=True)
class LinearMRL(Lifetime):
    """Family with linear mean residual life ``m(t) = slope * t + intercept``.

    ``slope > -1`` and ``intercept > 0``. Negative slopes give bounded support
    ending at ``-intercept / slope``.
    """

    slope: float
    intercept: float

    def __post_init__(self):
        if not (np.isfinite(self.slope) and self.slope > -1):
            raise ValueError("slope must exceed -1")
        _check_positive(intercept=self.intercept)

    def _m(self, t):
        # slope * t + intercept cancels near the end of a bounded support, so
        # the product is split exactly (Dekker) before adding the intercept
        t = np.asarray(t, dtype=float)
        p, e = _two_product(self.slope, t)
        return (p + self.intercept) + e

    def logsf(self, t):
        a, b = self.slope, self.intercept
        t = np.asarray(t, dtype=float)
        if a == 0:
            return -t / b
        m = self._m(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            near_end = m < 0.5 * b
            log_ratio = np.where(near_end, np.log(np.where(near_end, m, b) / b), np.log1p(a * t / b))
            out = -(1.0 / a + 1.0) * log_ratio
        return np.where(m > 0, out, -np.inf)

    def logpdf(self, t):
        m = self._m(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(m > 0, np.log1p(self.slope) - np.log(m) + self.logsf(t), -np.inf)

    def log_tail(self, t):
        m = self._m(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(m > 0, np.log(m) + self.logsf(t), -np.inf)

    def mrl(self, t):
        m = self._m(_t(t))
        return _ret(np.maximum(m, 0.0))

    @property
    def mean(self):
        return float(self.intercept)


_FAMILIES = {
    "gamma": Gamma,
    "weibull": Weibull,
    "lognormal": Lognormal,
    "loglogistic": Loglogistic,
    "gompertz": Gompertz,
    "expweibull": ExpWeibull,
    "exp_weibull": ExpWeibull,
    "linear": LinearMRL,
    "linearmrl": LinearMRL,
}


def dist_from_spec(name, *params):
    """Build a family by name, e.g. ``dist_from_spec("gamma", 2, 1)``."""
    try:
        cls = _FAMILIES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(set(_FAMILIES))}") from None
    return cls(*map(float, params))


class CoreValues(NamedTuple):
    density: np.ndarray
    survival: np.ndarray
    hazard: np.ndarray
    underflow: np.ndarray


def eval_core(dist, t):
    """Density, survival and hazard at ``t``.

    Where the survival underflows to zero the hazard is reported as ``inf``
    and ``underflow`` is set.
    """
    t = _t(t)
    log_s = dist.logsf(t)
    log_f = dist.logpdf(t)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        dens = np.exp(log_f)
        surv = np.exp(log_s)
        haz = np.exp(log_f - log_s)
    underflow = surv == 0
    haz = np.where(underflow, np.inf, haz)
    return CoreValues(_ret(dens), _ret(surv), _ret(haz), _ret(underflow))


def parametric_mrl(dist, t):
    """Mean residual life ``E(T - t | T > t)`` of a catalog distribution."""
    return dist.mrl(t)


def survival_from_mrl(mrl, t, *, epsabs=0.0, epsrel=1e-12):
    """Survival function rebuilt from a mean residual life function.

    ``S(t) = m(0) / m(t) * exp(-int_0^t du / m(u))``.
    """
    def inv(u):
        value = float(mrl(u))
        if not value > 0:
            raise ValueError(f"mean residual life must be positive on the path, got {value} at {u}")
        return 1.0 / value

    m0 = float(mrl(0.0))
    if not m0 > 0:
        raise ValueError("m(0) must be positive")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(ts)
    for k, tk in enumerate(ts):
        if tk <= 0:
            raise ValueError("t must be positive")
        integral, _ = integrate.quad(inv, 0.0, tk, epsabs=epsabs, epsrel=epsrel, limit=500)
        out[k] = m0 / float(mrl(tk)) * np.exp(-integral)
    return _ret(out.reshape(np.shape(t)))


def moment_from_survival(dist, r, *, sf=None, hazard=None, scale=None, s_stop=1e-12):
    """``E(T^r) = r int_0^inf t^(r-1) S(t) dt``.

    Pass a catalog distribution, or ``dist=None`` with callables ``sf`` (and
    optionally ``hazard``). The integral is accumulated over doubling
    intervals until ``S < s_stop``; the remainder is closed with a tail
    correction based on the local hazard.

    Raises
    ------
    DivergenceError
        If the survival tail is too heavy for the r-th moment to exist.
    """
    if int(r) != r or r < 1:
        raise ValueError("r must be a positive integer")
    if dist is not None:
        sf = dist.sf
        hazard = dist.hazard
        if scale is None:
            try:
                scale = dist.isf(0.5)
            except (ArithmeticError, ValueError):
                scale = 1.0
    if sf is None:
        raise ValueError("need a distribution or a survival function")
    if hazard is None:
        def hazard(u, _h=1e-6):
            return -(np.log(sf(u * (1 + _h))) - np.log(sf(u * (1 - _h)))) / (2 * _h * u)
    scale = 1.0 if scale is None else float(scale)

    def integrand(u):
        return r * u ** (r - 1) * float(sf(u))

    total, _ = integrate.quad(integrand, 0.0, scale, epsabs=0.0, epsrel=1e-12, limit=500)
    lo, hi = scale, 2.0 * scale
    while True:
        piece, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=500)
        total += piece
        s_hi = float(sf(hi))
        if s_hi < s_stop:
            break
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise DivergenceError("survival did not fall below the stopping level")
    if s_hi == 0.0:
        return float(total)
    h = float(hazard(hi))
    if not h * hi > r:
        raise DivergenceError(f"tail too heavy for moment r={r} (local index {h * hi:.3g})")
    return float(total + r * hi ** (r - 1) * s_hi / (h - r / hi))


def _shape_from_signs(diffs, tol):
    signs = np.sign(np.where(np.abs(diffs) < tol, 0.0, diffs))
    signs = signs[signs != 0]
    if signs.size == 0:
        return ShapeLabel.CONSTANT
    runs = signs[np.concatenate([[True], signs[1:] != signs[:-1]])]
    pattern = tuple(int(s) for s in runs)
    return {
        (1,): ShapeLabel.INC,
        (-1,): ShapeLabel.DCR,
        (-1, 1): ShapeLabel.BT,
        (1, -1): ShapeLabel.UBT,
    }.get(pattern, ShapeLabel.UNDEFINED)


def numeric_mrl_shape(dist, n_points=500, rel_tol=1e-10, q_lo=1e-8, q_hi=1e-8):
    """Shape label read off the sign pattern of finite differences of ``m``.

    The grid starts at ``t = 0`` and continues log-spaced between the survival
    quantiles ``1 - q_lo`` and ``q_hi``. Steps smaller than ``rel_tol * m(0)``
    count as flat.
    """
    try:
        m0 = float(dist.mrl(0.0))
    except UndefinedMRLError:
        return ShapeLabel.UNDEFINED
    t_lo = dist.isf(1.0 - q_lo)
    t_hi = dist.isf(q_hi)
    if isinstance(dist, LinearMRL) and dist.slope < 0:
        t_hi = min(t_hi, -dist.intercept / dist.slope * (1 - 1e-9))
    t = np.concatenate([[0.0], np.geomspace(max(t_lo, 1e-300), t_hi, n_points - 1)])
    m = np.asarray(dist.mrl(t), dtype=float)
    return _shape_from_signs(np.diff(m), rel_tol * m0)


def classify_mrl_shape(dist):
    """Mean residual life shape from the published parameter rules.

    Exponentiated Weibull parameter combinations that the rules do not cover
    (``alpha == 1`` with ``theta != 1``, or ``alpha * theta == 1``) fall back to
    :func:`numeric_mrl_shape`.
    """
    def monotone(k):
        if k < 1:
            return ShapeLabel.INC
        if k > 1:
            return ShapeLabel.DCR
        return ShapeLabel.CONSTANT

    if isinstance(dist, (Gamma, Weibull)):
        return monotone(dist.shape)
    if isinstance(dist, Gompertz):
        return ShapeLabel.DCR
    if isinstance(dist, Loglogistic):
        return ShapeLabel.BT if dist.shape > 1 else ShapeLabel.UNDEFINED
    if isinstance(dist, Lognormal):
        return ShapeLabel.BT
    if isinstance(dist, LinearMRL):
        if dist.slope > 0:
            return ShapeLabel.INC
        return ShapeLabel.DCR if dist.slope < 0 else ShapeLabel.CONSTANT
    if isinstance(dist, ExpWeibull):
        a, th = dist.alpha, dist.theta
        at = a * th
        if th == 1:
            return monotone(a)
        if a < 1 and at < 1:
            return ShapeLabel.INC
        if a > 1 and at > 1:
            return ShapeLabel.DCR
        if a > 1 and th < 1 and at < 1:
            return ShapeLabel.UBT
        if a < 1 and th > 1 and at > 1:
            return ShapeLabel.BT
        return numeric_mrl_shape(dist)
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def empirical_mrl(times, t):
    """Empirical mean residual life of an uncensored sample.

    ``sum((x_i - t)_+) / #{x_i > t}``, and 0 beyond the largest observation.
    """
    x = np.sort(np.asarray(times, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("sample is empty")
    t = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t)
    csum = np.concatenate([[0.0], np.cumsum(x[::-1])])[::-1]  # csum[k] = sum(x[k:])
    k = np.searchsorted(x, tt, side="right")
    n_above = x.size - k
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(n_above > 0, (csum[k] - n_above * tt) / np.maximum(n_above, 1), 0.0)
    return _ret(out.reshape(t.shape))
