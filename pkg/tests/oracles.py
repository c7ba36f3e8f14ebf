"""Independent reference computations for the test suite.

Nothing here calls into gammamrl's numerics: integrals go through
scipy.integrate.quad or mpmath, and closed forms are written out directly.
"""

import mpmath as mp
import numpy as np
from scipy import integrate, stats

mp.mp.dps = 40


def mp_gammainc_lower(a, x):
    """Regularized lower incomplete gamma in 40-digit arithmetic."""
    return float(mp.gammainc(a, 0, x, regularized=True))


def mp_log_gammaincc(a, x):
    return float(mp.log(mp.gammainc(a, x, mp.inf, regularized=True)))


def mp_log_gammainc(a, x):
    return float(mp.log(mp.gammainc(a, 0, x, regularized=True)))


def quad_gammainc_lower(a, x):
    """P(a, x) by quadrature of the gamma integrand."""
    val, _ = integrate.quad(lambda u: u ** (a - 1) * np.exp(-u), 0, x, epsabs=0, epsrel=1e-13,
                            limit=200)
    return val / float(mp.gamma(a))


def quad_e1(z):
    val, _ = integrate.quad(lambda u: np.exp(-u) / u, z, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    return val


def mpmath_sf(dist):
    """High-precision survival function of a catalog law, written from its definition."""
    name = type(dist).__name__
    if name == "Gamma":
        a, b = dist.shape, dist.rate
        return lambda t: mp.gammainc(a, b * t, mp.inf, regularized=True)
    if name == "Weibull":
        k, lam = dist.shape, dist.scale
        return lambda t: mp.exp(-(mp.mpf(t) / lam) ** k)
    if name == "Lognormal":
        mu, s = dist.mu, dist.sigma
        return lambda t: mp.ncdf(-(mp.log(t) - mu) / s) if t > 0 else mp.mpf(1)
    if name == "Loglogistic":
        k, lam = dist.shape, dist.scale
        return lambda t: 1 / (1 + (mp.mpf(t) / lam) ** k)
    if name == "Gompertz":
        g, lam = dist.shape, dist.scale
        return lambda t: mp.exp(-g * (mp.exp(lam * t) - 1))
    if name == "ExpWeibull":
        a, th, s = dist.alpha, dist.theta, dist.sigma
        return lambda t: -mp.expm1(th * mp.log(-mp.expm1(-(mp.mpf(t) / s) ** a)))
    if name == "LinearMRL":
        A, B = dist.slope, dist.intercept
        if A == 0:
            return lambda t: mp.exp(-mp.mpf(t) / B)

        def sf(t):
            m = A * mp.mpf(t) + B
            return (B / m) ** (1 / A + 1) if m > 0 else mp.mpf(0)
        return sf
    raise TypeError(name)


def quad_mrl(dist, t):
    """Mean residual life by brute-force quadrature: int_t^inf S / S(t)."""
    sf = mpmath_sf(dist)
    out = []
    for tk in np.atleast_1d(t):
        s_t = sf(tk)
        upper = mp.inf
        if type(dist).__name__ == "LinearMRL" and dist.slope < 0:
            upper = -mp.mpf(dist.intercept) / mp.mpf(dist.slope)
        if type(dist).__name__ == "Gompertz":
            # the double exponential swamps mpmath far out; stop once S has
            # dropped by a factor e^-200 relative to S(t)
            g, lam = mp.mpf(dist.shape), mp.mpf(dist.scale)
            upper = mp.log(mp.exp(lam * tk) + 200 / g) / lam
        if type(dist).__name__ == "ExpWeibull":
            # S falls off a cliff of width ~ 1 / alpha (in log u) at sigma and
            # has a shoulder of width ~ 1 / (alpha theta) below it
            a, th, s = mp.mpf(dist.alpha), mp.mpf(dist.theta), mp.mpf(dist.sigma)
            z_t = (mp.mpf(tk) / s) ** a
            upper = s * (z_t + 300) ** (1 / a)
            offsets = [-k / (a * th) for k in np.linspace(0, 40, 41)]
            offsets += [k / a for k in np.linspace(-5, 8, 53)]
            inner = sorted({s * mp.exp(d) for d in offsets if tk < s * mp.exp(d) < upper})
            tail = mp.quad(sf, [tk] + inner + [upper])
        elif upper == mp.inf:
            tail = mp.quad(sf, [tk, tk + 1, upper])
        else:
            tail = mp.quad(sf, [tk, upper])
        out.append(float(tail / s_t))
    return np.array(out)


def quad_mrl_callable(sf, t, upper=np.inf):
    """Mean residual life of a float survival callable by scipy quadrature."""
    out = []
    for tk in np.atleast_1d(t):
        tail, _ = integrate.quad(sf, tk, upper, epsabs=0, epsrel=1e-10, limit=500)
        out.append(tail / sf(tk))
    return np.array(out)


def mixture_sf(weights, shapes, rates):
    """Gamma mixture survival from scipy.stats."""
    w, a, b = (np.asarray(x, dtype=float) for x in (weights, shapes, rates))

    def sf(t):
        return float(np.sum(w * stats.gamma.sf(t, a, scale=1.0 / b)))
    return sf


def mixture_pdf(weights, shapes, rates):
    w, a, b = (np.asarray(x, dtype=float) for x in (weights, shapes, rates))

    def pdf(t):
        t = np.asarray(t, dtype=float)[..., None]
        return np.sum(w * stats.gamma.pdf(t, a, scale=1.0 / b), axis=-1)
    return pdf


def order_stat_quantile(x, q):
    """Linear interpolation between order statistics at position 1 + (n - 1) q."""
    x = np.sort(np.asarray(x, dtype=float))
    h = (x.size - 1) * q
    lo = int(np.floor(h))
    hi = min(lo + 1, x.size - 1)
    return x[lo] + (h - lo) * (x[hi] - x[lo])


def batch_means_se(x, n_batches=50):
    """Standard error of a correlated series' mean from non-overlapping batch means."""
    x = np.asarray(x, dtype=float)
    m = x.size // n_batches
    means = x[: m * n_batches].reshape(n_batches, m).mean(axis=1)
    return means.std(ddof=1) / np.sqrt(n_batches)


def float_sf(dist):
    """Survival function of a catalog law in double precision, from scipy.stats or its formula."""
    name = type(dist).__name__
    if name == "Gamma":
        law = stats.gamma(dist.shape, scale=1.0 / dist.rate)
        return law.sf
    if name == "Weibull":
        return lambda t: np.exp(-((t / dist.scale) ** dist.shape))
    if name == "Lognormal":
        law = stats.lognorm(dist.sigma, scale=np.exp(dist.mu))
        return law.sf
    if name == "Loglogistic":
        return lambda t: 1.0 / (1.0 + (t / dist.scale) ** dist.shape)
    if name == "Gompertz":
        return lambda t: np.exp(-dist.shape * np.expm1(min(dist.scale * t, 700.0)))
    if name == "ExpWeibull":
        a, th, s = dist.alpha, dist.theta, dist.sigma
        return lambda t: -np.expm1(th * np.log1p(-np.exp(-((t / s) ** a))))
    if name == "LinearMRL":
        A, B = dist.slope, dist.intercept
        if A == 0:
            return lambda t: np.exp(-t / B)
        return lambda t: (B / (A * t + B)) ** (1 / A + 1) if A * t + B > 0 else 0.0
    raise TypeError(name)


def support_end(dist):
    if type(dist).__name__ == "LinearMRL" and dist.slope < 0:
        return -dist.intercept / dist.slope
    return np.inf


def quad_mrl_logspace(dist, t):
    """``int_t^inf S(u) du / S(t)`` with the integral taken in ``v = log u``.

    Adaptive Gauss-Kronrod on ``[log t, log t + 40]`` with breakpoints, then
    the remainder to infinity.
    """
    sf = float_sf(dist)
    end = support_end(dist)

    def g(v):
        if v > 700:
            return 0.0
        u = np.exp(v)
        return float(sf(u)) * u if u < end else 0.0

    out = []
    for tk in np.atleast_1d(t):
        a = np.log(tk)
        b = a + 40.0 if not np.isfinite(end) else np.log(end)
        brk = [p for p in a + np.array([0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]) if p < b]
        tail, _ = integrate.quad(g, a, b, points=brk, epsabs=0, epsrel=1e-11, limit=500)
        if not np.isfinite(end):
            rest, _ = integrate.quad(g, b, np.inf, epsabs=0, epsrel=1e-11, limit=500)
            tail += rest
        out.append(tail / float(sf(tk)))
    return np.array(out)
