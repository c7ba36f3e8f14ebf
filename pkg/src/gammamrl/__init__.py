"""Mean residual life inference with truncated Dirichlet process gamma mixtures."""

from .analytics import (
    ComparisonResult,
    FunctionalGrid,
    atom_correlation,
    functional_bands,
    gelfand_ghosh,
    gg_replicates_dpmm,
    gg_replicates_ew,
    mrl_difference,
    pointwise_bands,
    prob_mrl_greater,
)
from .distributions import (
    ExpWeibull,
    Gamma,
    Gompertz,
    LinearMRL,
    Loglogistic,
    Lognormal,
    ShapeLabel,
    Weibull,
    classify_mrl_shape,
    dist_from_spec,
    empirical_mrl,
    eval_core,
    moment_from_survival,
    parametric_mrl,
    survival_from_mrl,
)
from .elicitation import Hyperparams, elicit_hyperparameters, expected_clusters
from .estimators import ExpWeibullSurvival, GammaDPMMSurvival
from .expweibull import EwConfig, ew_prior_from_quantiles, fit_exp_weibull
from .gibbs import Dataset, PosteriorDraws, SamplerConfig, run_chain
from .mixture import (
    MixtureParams,
    MrlGrid,
    finiteness_A,
    mixture_functionals,
    mixture_mrl_grid,
    stick_break,
    truncation_level,
)
from .numerics import Grid, default_grid, trapezoid_cumint

__version__ = "0.1.0"
