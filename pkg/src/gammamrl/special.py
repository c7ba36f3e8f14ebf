"""Special functions used by the survival catalog and the mixture sampler.

The regularized incomplete gamma functions are available in log space, which the
censored likelihood needs far into the upper tail. Values that scipy can
represent come from :mod:`scipy.special`; below ``1e-280`` they are continued
with a power series (``x < a + 1``) or a Lentz continued fraction (above), both
evaluated in log space. The remaining functions are thin wrappers.
"""

import numpy as np
from scipy import special as _sp

__all__ = [
    "InvalidArgumentError",
    "gammaln",
    "gammainc",
    "gammaincc",
    "log_gammainc",
    "log_gammaincc",
    "exp1",
    "log_exp1",
    "log_exp1_scaled",
    "ndtr",
    "log_ndtr",
    "betainc",
    "special_fns",
]

_TINY = 1e-300
_EPS = 1e-15
_MAX_ITER = 100_000


class InvalidArgumentError(ValueError):
    """Raised when a special function is called outside its domain."""


def gammaln(a):
    """Natural log of the gamma function."""
    return _sp.gammaln(a)


def _check_gamma_args(a, x):
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(a)) or np.any(np.isnan(x)):
        raise InvalidArgumentError("incomplete gamma arguments contain NaN")
    if np.any(a <= 0):
        raise InvalidArgumentError("incomplete gamma requires a > 0")
    if np.any(x < 0):
        raise InvalidArgumentError("incomplete gamma requires x >= 0")
    return np.broadcast_arrays(a, x)


def _series_log_p(a, x, tol):
    # log P(a, x) for x < a + 1; terms x^n / ((a+1)...(a+n))
    total = np.ones_like(x)
    term = np.ones_like(x)
    ap = a.copy()
    active = np.arange(x.size)
    for _ in range(_MAX_ITER):
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        done = term[active] < total[active] * tol
        active = active[~done]
        if active.size == 0:
            break
    else:
        raise RuntimeError("incomplete gamma series did not converge")
    return a * np.log(x) - x - _sp.gammaln(a + 1.0) + np.log(total)


def _cf_log_q(a, x, tol):
    # log Q(a, x) for x >= a + 1 via modified Lentz
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.arange(x.size)
    for i in range(1, _MAX_ITER):
        aa = a[active]
        an = -i * (i - aa)
        b[active] += 2.0
        dd = an * d[active] + b[active]
        dd = np.where(np.abs(dd) < _TINY, _TINY, dd)
        cc = b[active] + an / c[active]
        cc = np.where(np.abs(cc) < _TINY, _TINY, cc)
        dd = 1.0 / dd
        delta = dd * cc
        d[active] = dd
        c[active] = cc
        h[active] *= delta
        done = np.abs(delta - 1.0) < tol
        active = active[~done]
        if active.size == 0:
            break
    else:
        raise RuntimeError("incomplete gamma continued fraction did not converge")
    return a * np.log(x) - x - _sp.gammaln(a) + np.log(h)


def _log_pq_direct(a, x, tol=1e-13):
    """``(log P, log Q)`` from the series / continued fraction split alone."""
    a, x = _check_gamma_args(a, x)
    shape = a.shape
    a = a.ravel().astype(float)
    x = x.ravel().astype(float)
    log_p = np.empty_like(x)
    log_q = np.empty_like(x)

    zero = x == 0.0
    inf = np.isinf(x)
    series = (x < a + 1.0) & ~zero
    cfrac = ~(series | zero | inf)

    log_p[zero] = -np.inf
    log_q[zero] = 0.0
    log_p[inf] = 0.0
    log_q[inf] = -np.inf

    if np.any(series):
        lp = _series_log_p(a[series], x[series], tol)
        log_p[series] = lp
        log_q[series] = np.log1p(-np.exp(lp))
    if np.any(cfrac):
        lq = _cf_log_q(a[cfrac], x[cfrac], tol)
        log_q[cfrac] = lq
        log_p[cfrac] = np.log1p(-np.exp(lq))
    return log_p.reshape(shape), log_q.reshape(shape)


_LOG_DEEP = np.log(1e-280)


def _log_p(a, x):
    # compiled values where representable; own series in the deep lower tail
    a, x = _check_gamma_args(a, x)
    with np.errstate(divide="ignore"):
        out = np.array(np.log(_sp.gammainc(a, x)), dtype=float)
    deep = (out < _LOG_DEEP) & (x > 0)
    if np.any(deep):
        out[deep] = _log_pq_direct(a[deep], x[deep])[0]
    return out


def _log_q(a, x):
    # compiled values where representable; own continued fraction in the deep upper tail
    a, x = _check_gamma_args(a, x)
    with np.errstate(divide="ignore"):
        out = np.array(np.log(_sp.gammaincc(a, x)), dtype=float)
    deep = (out < _LOG_DEEP) & np.isfinite(x)
    if np.any(deep):
        out[deep] = _log_pq_direct(a[deep], x[deep])[1]
    return out


def _out(values):
    return values[()] if values.ndim == 0 else values


def log_gammainc(a, x):
    """Log of the regularized lower incomplete gamma function ``log P(a, x)``."""
    return _out(_log_p(a, x))


def log_gammaincc(a, x):
    """Log of the regularized upper incomplete gamma function ``log Q(a, x)``.

    Stays finite where ``Q`` itself underflows, e.g. ``log_gammaincc(2, 1e4)``.
    """
    return _out(_log_q(a, x))


def gammainc(a, x):
    """Regularized lower incomplete gamma ``P(a, x)``; the Gamma(a, 1) CDF."""
    return _out(np.exp(_log_p(a, x)))


def gammaincc(a, x):
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    return _out(np.exp(_log_q(a, x)))


def exp1(z):
    """Exponential integral ``E1(z)``, equal to the upper incomplete gamma ``Gamma(0, z)``."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise InvalidArgumentError("exp1 requires z > 0")
    return _out(_sp.exp1(z))


def _log_exp1_cf(z, tol=1e-15):
    # log(e^z E1(z)) by continued fraction, valid for z > 1
    b = z + 1.0
    c = np.full_like(z, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 10_000):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < tol):
            break
    return np.log(h)


def log_exp1(z):
    """``log E1(z)``, finite for large ``z`` where ``E1`` underflows."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise InvalidArgumentError("log_exp1 requires z > 0")
    z1 = np.atleast_1d(z).astype(float)
    out = np.empty_like(z1)
    small = z1 <= 50.0
    out[small] = np.log(_sp.exp1(z1[small]))
    if np.any(~small):
        out[~small] = _log_exp1_cf(z1[~small]) - z1[~small]
    return out.reshape(z.shape)[()] if z.ndim == 0 else out.reshape(z.shape)


def log_exp1_scaled(z):
    """``log(exp(z) E1(z))``, kept accurate when ``z`` is too large to add back."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise InvalidArgumentError("log_exp1_scaled requires z > 0")
    z1 = np.atleast_1d(z).astype(float)
    out = np.empty_like(z1)
    small = z1 <= 50.0
    out[small] = np.log(_sp.exp1(z1[small])) + z1[small]
    if np.any(~small):
        out[~small] = _log_exp1_cf(z1[~small])
    big = z1 > 1e8
    # the continued fraction's leading terms, 1/z (1 - 1/z + 2/z^2)
    out[big] = -np.log(z1[big]) + np.log1p(-1.0 / z1[big] + 2.0 / z1[big] ** 2)
    return out.reshape(z.shape)[()] if z.ndim == 0 else out.reshape(z.shape)


def ndtr(x):
    """Standard normal CDF."""
    return _sp.ndtr(x)


def log_ndtr(x):
    """Log of the standard normal CDF, accurate in the far lower tail."""
    return _sp.log_ndtr(x)


def betainc(a, b, x):
    """Regularized incomplete beta ``I_x(a, b)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise InvalidArgumentError("incomplete beta requires a, b > 0")
    if np.any((x < 0) | (x > 1)):
        raise InvalidArgumentError("incomplete beta requires 0 <= x <= 1")
    return _out(np.asarray(_sp.betainc(a, b, x)))


_DISPATCH = {
    "gammaln": gammaln,
    "gammainc": gammainc,
    "gammaincc": gammaincc,
    "log_gammainc": log_gammainc,
    "log_gammaincc": log_gammaincc,
    "exp1": exp1,
    "log_exp1": log_exp1,
    "ndtr": ndtr,
    "log_ndtr": log_ndtr,
    "betainc": betainc,
}


def special_fns(kind, *args):
    """Evaluate a special function by name.

    >>> round(float(special_fns("gammainc", 1.0, 1.0)), 6)
    0.632121
    """
    try:
        fn = _DISPATCH[kind]
    except KeyError:
        raise InvalidArgumentError(f"unknown special function {kind!r}") from None
    return fn(*args)
