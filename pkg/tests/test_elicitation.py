import numpy as np
import pytest
from scipy import stats

from gammamrl.elicitation import (
    ElicitationError,
    Hyperparams,
    elicit_hyperparameters,
    expected_clusters,
    prior_mean_T,
    prior_var_T,
)


def test_prior_mean_example():
    hp = Hyperparams.isotropic([4.1, 3.6], 0.1)
    assert prior_mean_T(hp) == pytest.approx(np.exp(0.7), rel=1e-14)
    assert np.exp(0.7) == pytest.approx(2.01375, abs=1e-5)


def test_prior_var_formula_by_hand():
    hp = Hyperparams.isotropic([1.0, 0.5], 0.2, a_Sigma=5.0)
    t1, t2, t3 = np.array([1, -2]), np.array([2, -2]), np.array([1, -1])

    def term(t):
        return t @ hp.a_mu + 0.1 * t @ t + 0.5 * 0.2 * (t @ t) / 2.0
    expected = np.exp(term(t1)) + np.exp(term(t2)) - np.exp(2 * term(t3))
    assert prior_var_T(hp) == pytest.approx(expected, rel=1e-14)


def test_elicitation_hits_targets():
    hp = elicit_hyperparameters(2.0, 3.0, 0.6, 0.025)
    target = (2 * 3.0 / 4) ** 2
    assert prior_var_T(hp) == pytest.approx(target, abs=1e-10 * target)
    assert hp.a_mu[0] - hp.a_mu[1] == pytest.approx(np.log(0.6 * 2.0))
    assert hp.a_mu[0] - 2 * hp.a_mu[1] == pytest.approx(np.log(0.025 * target))
    assert hp.a_Sigma == 4.0
    assert np.allclose(hp.B_mu, hp.B_Sigma)
    assert hp.B_mu[0, 1] == 0.0
    assert hp.info["residual"] == pytest.approx(0.0, abs=1e-9)


def test_full_mean_share_fixes_difference():
    hp = elicit_hyperparameters(3.0, 2.0, 1.0, 0.01)
    assert hp.a_mu[0] - hp.a_mu[1] == pytest.approx(np.log(3.0), rel=1e-14)
    # prior mean is exp(a1 - a2 + 2b), which tends to the center as b shrinks
    assert prior_mean_T(hp) == pytest.approx(3.0 * np.exp(2 * hp.B_mu[0, 0]), rel=1e-12)


def test_rats_like_settings_match_published_order():
    # survival in thousands of days, restricted-diet group spans roughly 0.1 to 4.5
    hp = elicit_hyperparameters(2.3, 4.4, 0.6, 0.025)
    published = np.array([4.1, 3.6])
    assert np.all(np.abs(hp.a_mu - published) < 0.5 * published)
    assert 0.01 <= hp.B_mu[0, 0] <= 1.0


def test_unattainable_variance_reports_residual():
    with pytest.raises(ElicitationError) as exc:
        elicit_hyperparameters(1.0, 1.0, 0.6, 0.025, hi=1e-5)
    assert np.isfinite(exc.value.residual)


def test_elicitation_validation():
    with pytest.raises(ValueError):
        elicit_hyperparameters(-1.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        elicit_hyperparameters(1.0, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        Hyperparams.isotropic([0.0, 0.0], 0.1, a_Sigma=3.0)
    with pytest.raises(ValueError):
        Hyperparams([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]], np.eye(2))


def test_hyperparams_round_trip():
    hp = Hyperparams.isotropic([1.0, 2.0], 0.3, a_alpha=3.0)
    again = Hyperparams.from_dict(hp.to_dict())
    assert again.to_dict() == hp.to_dict()


def test_expected_clusters_examples():
    assert expected_clusters(1.0, 200) == pytest.approx(np.log(201), rel=1e-14)
    assert expected_clusters(1.0, 200) == pytest.approx(5.3033, abs=1e-4)
    assert expected_clusters(1.0, 1) == pytest.approx(0.6931, abs=1e-4)
    assert expected_clusters(1e-8, 100) < 1e-6
    with pytest.raises(ValueError):
        expected_clusters(0.0, 10)


def test_variance_approximation_against_monte_carlo():
    # with a_Sigma = 4 the inverse Wishart has no exponential moments, so the
    # Monte Carlo variance is unbounded there; the sets below draw a_Sigma
    # large enough for a stable estimate
    rng = np.random.default_rng(2024)
    n = 100_000
    for _ in range(20):
        a_mu = np.array([rng.uniform(0, 3), rng.uniform(-1, 2)])
        a_sigma = rng.uniform(10, 40)
        b = rng.uniform(0.01, 0.1)
        hp = Hyperparams(a_mu, b * np.eye(2), b * (a_sigma - 3) * np.eye(2), a_sigma)
        mu = rng.multivariate_normal(a_mu, hp.B_mu, n)
        sig = stats.invwishart(df=a_sigma, scale=hp.B_Sigma).rvs(n, random_state=rng)
        x = mu + np.einsum("nij,nj->ni", np.linalg.cholesky(sig), rng.standard_normal((n, 2)))
        shape, rate = np.exp(x[:, 0]), np.exp(x[:, 1])
        mean = np.mean(shape / rate)
        var = np.mean(shape * (shape + 1) / rate**2) - mean**2
        assert abs(prior_var_T(hp) / var - 1) < 0.25
        assert abs(prior_mean_T(hp) / mean - 1) < 0.25
