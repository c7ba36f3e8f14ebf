"""Random variate generation on top of :class:`numpy.random.Generator`.

Every chain owns exactly one generator; nothing here keeps global state.
"""

import numpy as np

__all__ = [
    "make_rng",
    "draw",
    "gamma",
    "beta",
    "uniform",
    "mvnormal",
    "wishart",
    "invwishart",
    "categorical",
]


def make_rng(seed):
    """Generator for one chain. Same seed, same stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _positive(name, value):
    value = np.asarray(value, dtype=float)
    if np.any(~(value > 0)):
        raise ValueError(f"{name} must be positive")
    return value


def gamma(rng, shape, rate, size=None):
    """Gamma variates with the given shape and rate (mean ``shape / rate``)."""
    shape = _positive("shape", shape)
    rate = _positive("rate", rate)
    return rng.gamma(shape, 1.0 / rate, size=size)


def beta(rng, a, b, size=None):
    return rng.beta(_positive("a", a), _positive("b", b), size=size)


def uniform(rng, size=None):
    return rng.random(size=size)


def _cholesky(cov):
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be a square matrix")
    if not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12):
        raise ValueError("covariance must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-10 * max(np.trace(cov), 1e-300)
    try:
        return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
    except np.linalg.LinAlgError:
        raise ValueError("covariance is not positive semi-definite") from None


def mvnormal(rng, mean, cov, size=None):
    """Multivariate normal draws through the Cholesky factor of ``cov``.

    A semi-definite ``cov`` gets ``1e-10 * trace`` added to its diagonal once
    before giving up.
    """
    mean = np.asarray(mean, dtype=float)
    chol = _cholesky(cov)
    d = mean.shape[-1]
    shape = (d,) if size is None else tuple(np.atleast_1d(size)) + (d,)
    z = rng.standard_normal(shape)
    return mean + z @ chol.T


def wishart(rng, df, scale):
    """Wishart(df, scale) draw from the Bartlett decomposition."""
    scale = np.asarray(scale, dtype=float)
    d = scale.shape[0]
    if not df > d - 1:
        raise ValueError(f"Wishart degrees of freedom must exceed {d - 1}")
    chol = _cholesky(scale)
    a = np.zeros((d, d))
    for i in range(d):
        a[i, i] = np.sqrt(rng.chisquare(df - i))
        a[i, :i] = rng.standard_normal(i)
    la = chol @ a
    return la @ la.T


def invwishart(rng, df, scale):
    """Inverse Wishart draw with mean ``scale / (df - d - 1)``.

    Drawn as the inverse of a Wishart(df, scale^-1) matrix.
    """
    scale = np.asarray(scale, dtype=float)
    w = wishart(rng, df, np.linalg.inv(scale))
    sigma = np.linalg.inv(w)
    return 0.5 * (sigma + sigma.T)


def categorical(rng, probs):
    """One category index per row of ``probs`` (rows must sum to one)."""
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    if np.any(probs < 0):
        raise ValueError("probabilities must be nonnegative")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-12):
        raise ValueError("probabilities must sum to one")
    cum = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0])[:, None] * cum[:, -1:]
    idx = (u >= cum).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


_DRAWS = {
    "gamma": gamma,
    "beta": beta,
    "uniform": uniform,
    "normal": mvnormal,
    "mvnormal": mvnormal,
    "wishart": wishart,
    "invwishart": invwishart,
    "categorical": categorical,
}


def draw(kind, rng, *params, **kwargs):
    """Draw from a named family, e.g. ``draw("beta", rng, 1.0, alpha)``."""
    try:
        fn = _DRAWS[kind]
    except KeyError:
        raise ValueError(f"unknown distribution {kind!r}") from None
    return fn(rng, *params, **kwargs)
