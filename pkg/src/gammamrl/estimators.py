"""scikit-learn style wrappers around the two survival models.

``X`` holds survival times (shape ``(n,)`` or ``(n, 1)``); right censoring is
passed separately to ``fit``. ``predict`` returns the posterior median mean
residual life at the given times and ``transform`` stacks the posterior median
density, survival, hazard and MRL.
"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .analytics import ew_functional_bands, functional_bands
from .distributions import ExpWeibull
from .elicitation import Hyperparams, elicit_hyperparameters
from .expweibull import EwConfig, NoRootError, ew_prior_from_quantiles, fit_exp_weibull
from .gibbs import Dataset, SamplerConfig, run_chain
from .mixture import SURVIVAL_FLOOR, mixture_functionals, mixture_mrl
from .numerics import default_grid

__all__ = ["GammaDPMMSurvival", "ExpWeibullSurvival"]


def _times(X):
    X = check_array(X, ensure_2d=False, dtype=float, input_name="X")
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError("X must hold a single column of times")
        X = X[:, 0]
    return X


def _nanmedian(values):
    # columns with no usable draw stay NaN
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmedian(values, axis=0)


def _censor(censored, n):
    if censored is None:
        return np.zeros(n, bool)
    c = check_array(censored, ensure_2d=False, dtype=None, input_name="censored")
    if c.shape != (n,):
        raise ValueError("censored must have one flag per time")
    return c.astype(bool)


class GammaDPMMSurvival(BaseEstimator):
    """Truncated Dirichlet process mixture of gamma kernels for survival data.

    Parameters
    ----------
    a_mu, b : optional
        Baseline mean prior location and common diagonal of ``B_mu`` and
        ``B_Sigma``. Elicited from the data with ``q_E`` and ``q_V`` when
        ``a_mu`` is None.
    L, burn_in, thin, n_save, pilot_iters, proposal_c, seed
        Sampler settings.
    level : float
        Probability of the pointwise bands.
    """

    def __init__(self, a_mu=None, b=None, a_Sigma=4.0, a_alpha=2.0, b_alpha=1.0,
                 q_E=0.6, q_V=0.025, L=40, burn_in=5000, thin=5, n_save=2000,
                 pilot_iters=500, proposal_c=2.0, seed=0, level=0.95, n_grid=512):
        self.a_mu = a_mu
        self.b = b
        self.a_Sigma = a_Sigma
        self.a_alpha = a_alpha
        self.b_alpha = b_alpha
        self.q_E = q_E
        self.q_V = q_V
        self.L = L
        self.burn_in = burn_in
        self.thin = thin
        self.n_save = n_save
        self.pilot_iters = pilot_iters
        self.proposal_c = proposal_c
        self.seed = seed
        self.level = level
        self.n_grid = n_grid

    def _hyperparams(self, t):
        if self.a_mu is not None:
            b = 0.1 if self.b is None else self.b
            return Hyperparams.isotropic(self.a_mu, b, self.a_Sigma, self.a_alpha, self.b_alpha)
        center = 0.5 * (t.min() + t.max())
        spread = max(t.max() - t.min(), 1e-3 * center)
        return elicit_hyperparameters(center, spread, self.q_E, self.q_V, a_alpha=self.a_alpha,
                                      b_alpha=self.b_alpha, a_Sigma=self.a_Sigma)

    def fit(self, X, censored=None):
        t = _times(X)
        data = Dataset(t, _censor(censored, t.size))
        self.hyperparams_ = self._hyperparams(t)
        config = SamplerConfig(L=self.L, burn_in=self.burn_in, thin=self.thin, n_save=self.n_save,
                               seed=self.seed, pilot_iters=self.pilot_iters,
                               proposal_c=self.proposal_c)
        self.draws_ = run_chain(data, self.hyperparams_, config)
        self.grid_ = default_grid(t, self.n_grid)
        self.acceptance_ = self.draws_.acceptance
        self.n_features_in_ = 1
        return self

    def bands(self, grid=None, level=None):
        check_is_fitted(self, "draws_")
        return functional_bands(self.draws_, grid or self.grid_, level or self.level)

    def predict(self, X):
        check_is_fitted(self, "draws_")
        t = _times(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            m = mixture_mrl(self.draws_.params, t)
        low = mixture_functionals(self.draws_.params, t).survival < SURVIVAL_FLOOR
        return _nanmedian(np.where(low, np.nan, m))

    def transform(self, X):
        check_is_fitted(self, "draws_")
        t = _times(X)
        fx = mixture_functionals(self.draws_.params, t)
        cols = [np.median(fx.density, axis=0), np.median(fx.survival, axis=0),
                np.median(fx.hazard, axis=0), self.predict(t)]
        return np.column_stack(cols)


class ExpWeibullSurvival(BaseEstimator):
    """Exponentiated Weibull model fitted by random-walk Metropolis-Hastings.

    Without ``prior_means`` the exponential prior means solve the quantile
    system at the data's 10%, 50% and 90% quantiles.
    """

    def __init__(self, prior_means=None, burn_in=2000, thin=5, n_save=2000, pilot_iters=1000,
                 scale=(0.1, 0.1, 0.1), fixed=None, seed=0, level=0.95, n_grid=512):
        self.prior_means = prior_means
        self.burn_in = burn_in
        self.thin = thin
        self.n_save = n_save
        self.pilot_iters = pilot_iters
        self.scale = scale
        self.fixed = fixed
        self.seed = seed
        self.level = level
        self.n_grid = n_grid

    def fit(self, X, censored=None):
        t = _times(X)
        c = _censor(censored, t.size)
        if self.prior_means is not None:
            means = tuple(float(m) for m in self.prior_means)
        else:
            P = (0.1, 0.5, 0.9)
            try:
                means = ew_prior_from_quantiles(P, np.quantile(t, P))
            except NoRootError as err:
                means = err.best
        self.prior_means_ = means
        config = EwConfig(burn_in=self.burn_in, thin=self.thin, n_save=self.n_save, seed=self.seed,
                          pilot_iters=self.pilot_iters, scale=tuple(self.scale),
                          fixed=dict(self.fixed or {}))
        self.draws_ = fit_exp_weibull((t, c), means, config)
        self.grid_ = default_grid(t, self.n_grid)
        self.acceptance_ = self.draws_.acceptance
        self.n_features_in_ = 1
        return self

    def bands(self, grid=None, level=None):
        check_is_fitted(self, "draws_")
        return ew_functional_bands(self.draws_, grid or self.grid_, level or self.level)

    def _per_draw(self, t, what):
        out = []
        for a, th, s in zip(self.draws_.alpha, self.draws_.theta, self.draws_.sigma):
            out.append(getattr(ExpWeibull(a, th, s), what)(t))
        return np.array(out)

    def predict(self, X):
        check_is_fitted(self, "draws_")
        t = _times(X)
        m = self._per_draw(t, "mrl")
        return _nanmedian(np.where(self._per_draw(t, "sf") < SURVIVAL_FLOOR, np.nan, m))

    def transform(self, X):
        check_is_fitted(self, "draws_")
        t = _times(X)
        return np.column_stack([np.median(self._per_draw(t, k), axis=0)
                                for k in ("pdf", "sf", "hazard")] + [self.predict(t)])
