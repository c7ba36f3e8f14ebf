"""Blocked Gibbs sampler for the truncated gamma DP mixture with right censoring.

One iteration updates, in order: atoms (Metropolis-Hastings for occupied
components, prior draws for empty ones), stick-breaking weights, labels, then
``mu``, ``Sigma`` and ``alpha``.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp, polygamma

from . import random as rnd
from .elicitation import Hyperparams
from .mixture import MixtureParams, kernel_loglik, stick_break

__all__ = [
    "Dataset",
    "ChainState",
    "SamplerConfig",
    "PosteriorDraws",
    "LabelUnderflowError",
    "atom_log_target",
    "update_atoms",
    "update_weights",
    "update_labels",
    "update_hypers",
    "initial_state",
    "unit_information_cov",
    "run_chain",
    "sample_prior",
]

_V_MAX = np.nextafter(1.0, 0.0)


class LabelUnderflowError(FloatingPointError):
    """Every component has zero likelihood at some observation."""


@dataclass(frozen=True)
class Dataset:
    """Survival times with right-censoring flags (``censored[i]`` True means ``t_i`` is a lower bound)."""

    times: np.ndarray
    censored: np.ndarray = None
    group: str = "all"

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        c = np.zeros(t.shape, bool) if self.censored is None else np.array(self.censored).ravel()
        if c.shape != t.shape:
            raise ValueError("times and censored must have the same length")
        if not np.all(np.isin(c, (0, 1, True, False))):
            raise ValueError("censoring flags must be 0 or 1")
        c = c.astype(bool)
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise ValueError("times must be finite and positive")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "censored", c)

    @property
    def n(self):
        return self.times.size

    @property
    def observed(self):
        return self.times[~self.censored]


@dataclass(frozen=True)
class ChainState:
    sticks: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    labels: np.ndarray
    mu: np.ndarray
    Sigma: np.ndarray
    alpha: float

    @property
    def L(self):
        return self.weights.size

    @property
    def counts(self):
        return np.bincount(self.labels, minlength=self.L)

    @property
    def params(self):
        return MixtureParams(self.weights, self.theta, self.phi)


@dataclass(frozen=True)
class SamplerConfig:
    L: int = 40
    burn_in: int = 5000
    thin: int = 5
    n_save: int = 2000
    seed: int = 0
    pilot_iters: int = 500
    proposal_c: float = 2.0
    proposal: str = "information"

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.burn_in < 0 or self.pilot_iters < 0:
            raise ValueError("burn_in and pilot_iters must be nonnegative")
        if self.thin < 1 or self.n_save < 1:
            raise ValueError("thin and n_save must be at least 1")
        if not self.proposal_c > 0:
            raise ValueError("proposal_c must be positive")
        if self.proposal not in ("information", "atoms"):
            raise ValueError("proposal must be 'information' or 'atoms'")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class PosteriorDraws:
    """Saved chain states stacked along the first axis."""

    alpha: np.ndarray
    mu: np.ndarray
    Sigma: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    sticks: np.ndarray
    labels: np.ndarray
    acceptance: float = float("nan")
    proposal_cov: np.ndarray = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("alpha", "mu", "Sigma", "weights", "theta", "phi", "sticks", "labels"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_draws(self):
        return self.alpha.size

    @property
    def L(self):
        return self.weights.shape[1]

    @property
    def params(self):
        return MixtureParams(self.weights, self.theta, self.phi)

    def subset(self, idx):
        idx = np.asarray(idx)
        return replace(
            self,
            alpha=self.alpha[idx], mu=self.mu[idx], Sigma=self.Sigma[idx],
            weights=self.weights[idx], theta=self.theta[idx], phi=self.phi[idx],
            sticks=self.sticks[idx], labels=self.labels[idx],
        )


def _mvn_logpdf(x, mean, cov):
    chol = np.linalg.cholesky(cov)
    z = np.linalg.solve(chol, (x - mean).T)
    return -0.5 * np.sum(z * z, axis=0) - np.log(np.diag(chol)).sum() - np.log(2 * np.pi)


def atom_log_target(atoms, state, data):
    """Unnormalized log full conditional of each atom given the other variables.

    ``atoms`` has shape ``(L, 2)``; row ``l`` is scored against the
    observations currently labelled ``l``.
    """
    atoms = np.asarray(atoms, dtype=float)
    lp = _mvn_logpdf(atoms, state.mu, state.Sigma)
    if data.n:
        ll = kernel_loglik(data.times, data.censored, atoms[state.labels, 0], atoms[state.labels, 1])
        lp = lp + np.bincount(state.labels, weights=ll, minlength=atoms.shape[0])
    return lp


def unit_information_cov(shape):
    """Inverse Fisher information of one gamma observation in (log shape, log rate)."""
    a = np.clip(np.asarray(shape, dtype=float), 1e-8, 1e15)
    # g = a psi'(a) - 1 cancels badly for large a, so switch to its asymptotic series
    big = a > 1e3
    ab = np.where(big, a, 1e3)
    series = 1 / (2 * ab) + 1 / (6 * ab**2) - 1 / (30 * ab**4) + 1 / (42 * ab**6)
    g = np.where(big, series, a * polygamma(1, np.where(big, 1.0, a)) - 1.0)
    scale = 1.0 / (a * g)
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0] = scale
    out[..., 0, 1] = out[..., 1, 0] = scale
    out[..., 1, 1] = scale * (1.0 + g)
    return out


def _proposal_covs(state, c, S2):
    """Per-component proposal covariances.

    A ``(2, 2)`` ``S2`` is used for every component (``c * S2``). A ``("unit", U)``
    pair gives ``c * (Sigma^-1 + M_l U^-1)^-1``, which only depends on
    variables held fixed during the atom step.
    """
    L = state.L
    if isinstance(S2, tuple):
        U_inv = np.linalg.inv(S2[1])
        prec = np.linalg.inv(state.Sigma)[None] + state.counts[:, None, None] * U_inv[None]
        return c * np.linalg.inv(prec)
    S2 = np.asarray(S2, dtype=float)
    return np.broadcast_to(c * S2, (L, 2, 2))


def update_atoms(state, data, c, S2, rng):
    """Refresh all atoms; returns ``(state, accepted, proposed)``.

    Empty components are drawn from ``N2(mu, Sigma)``. Occupied ones take one
    random-walk Metropolis-Hastings step.
    """
    L = state.L
    counts = state.counts
    active = counts > 0
    current = np.column_stack([state.theta, state.phi])
    covs = _proposal_covs(state, c, S2)
    z = rng.standard_normal((L, 2))
    u = rng.random(L)
    prior = rnd.mvnormal(rng, state.mu, state.Sigma, size=L)

    new = current.copy()
    accepted = 0
    if np.any(active):
        covs = 0.5 * (covs + np.swapaxes(covs, 1, 2))
        try:
            chols = np.linalg.cholesky(covs)
        except np.linalg.LinAlgError:
            chols = np.stack([rnd._cholesky(cv) for cv in covs])
        proposal = current + np.einsum("lij,lj->li", chols, z)
        proposal = np.where(active[:, None], proposal, current)
        log_ratio = atom_log_target(proposal, state, data) - atom_log_target(current, state, data)
        take = active & (np.log(u) < log_ratio)
        new[take] = proposal[take]
        accepted = int(take.sum())
    new[~active] = prior[~active]
    out = replace(state, theta=new[:, 0].copy(), phi=new[:, 1].copy())
    return out, accepted, int(active.sum())


def update_weights(state, rng):
    """Stick fractions ``V_l ~ Beta(1 + M_l, alpha + sum_{r>l} M_r)`` and weights."""
    L = state.L
    counts = state.counts
    if L == 1:
        return replace(state, sticks=np.zeros(0), weights=np.ones(1))
    tail = np.cumsum(counts[::-1])[::-1]
    later = np.append(tail[1:], 0)[: L - 1]
    v = rnd.beta(rng, 1.0 + counts[: L - 1], state.alpha + later)
    v = np.minimum(v, _V_MAX)
    return replace(state, sticks=v, weights=stick_break(v))


def label_log_probs(state, data):
    """Normalized log label probabilities, shape ``(n, L)``."""
    with np.errstate(divide="ignore"):
        log_w = np.log(state.weights)
    ll = kernel_loglik(data.times[:, None], data.censored[:, None], state.theta[None], state.phi[None])
    logits = log_w[None] + ll
    norm = logsumexp(logits, axis=1, keepdims=True)
    if not np.all(np.isfinite(norm)):
        bad = int(np.flatnonzero(~np.isfinite(norm.ravel()))[0])
        raise LabelUnderflowError(f"all label weights vanish at observation {bad}")
    return logits - norm


def update_labels(state, data, rng):
    if data.n == 0:
        return replace(state, labels=np.zeros(0, dtype=np.intp))
    probs = np.exp(label_log_probs(state, data))
    probs /= probs.sum(axis=1, keepdims=True)
    return replace(state, labels=rnd.categorical(rng, probs).astype(np.intp))


def update_hypers(state, hp, rng):
    """Draw ``mu``, then ``Sigma`` given the new ``mu``, then ``alpha``."""
    occupied = np.unique(state.labels)
    n_star = occupied.size
    atoms = np.column_stack([state.theta, state.phi])[occupied]

    B_inv = np.linalg.inv(hp.B_mu)
    S_inv = np.linalg.inv(state.Sigma)
    prec = B_inv + n_star * S_inv
    try:
        S2_mu = np.linalg.inv(prec)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("posterior covariance of mu is singular") from None
    S2_mu = 0.5 * (S2_mu + S2_mu.T)
    m_mu = S2_mu @ (B_inv @ hp.a_mu + S_inv @ atoms.sum(axis=0))
    mu = rnd.mvnormal(rng, m_mu, S2_mu)

    dev = atoms - mu
    sigma = rnd.invwishart(rng, n_star + hp.a_Sigma, hp.B_Sigma + dev.T @ dev)

    rate = hp.b_alpha - np.sum(np.log1p(-state.sticks))
    alpha = float(rnd.gamma(rng, state.L + hp.a_alpha - 1.0, rate))
    return replace(state, mu=mu, Sigma=sigma, alpha=alpha)


def gibbs_step(state, data, hp, c, S2, rng):
    state, acc, prop = update_atoms(state, data, c, S2, rng)
    state = update_weights(state, rng)
    state = update_labels(state, data, rng)
    state = update_hypers(state, hp, rng)
    return state, acc, prop


def initial_state(data, hp, L, rng):
    """Quantile-binned labels, moment-matched atoms, hyperparameters at prior means."""
    mu = np.array(hp.a_mu, dtype=float)
    sigma = np.array(hp.sigma_mean, dtype=float)
    alpha = hp.a_alpha / hp.b_alpha
    atoms = rnd.mvnormal(rng, mu, sigma, size=L)
    labels = np.zeros(data.n, dtype=np.intp)
    if data.n:
        k = min(L, 10, data.n)
        order = np.argsort(data.times, kind="stable")
        labels[order] = (np.arange(data.n) * k) // data.n
        for j in range(k):
            x = data.times[labels == j]
            m = x.mean()
            v = x.var() if x.size > 1 else 0.0
            if not v > 0:
                v = (m / 2.0) ** 2
            shape = m * m / v
            atoms[j] = np.log(shape), np.log(shape / m)
    counts = np.bincount(labels, minlength=L)
    if L > 1:
        later = np.append(np.cumsum(counts[::-1])[::-1][1:], 0)[: L - 1]
        a = 1.0 + counts[: L - 1]
        v = a / (a + alpha + later)
    else:
        v = np.zeros(0)
    return ChainState(v, stick_break(v), atoms[:, 0].copy(), atoms[:, 1].copy(),
                      labels, mu, sigma, alpha)


def _pooled_unit_cov(pilot):
    covs, wts = [], []
    for state in pilot:
        counts = state.counts
        occ = counts > 0
        if np.any(occ):
            covs.append(unit_information_cov(np.exp(state.theta[occ])))
            wts.append(counts[occ])
    if not covs:
        return None
    covs = np.concatenate(covs)
    wts = np.concatenate(wts).astype(float)
    return np.einsum("k,kij->ij", wts / wts.sum(), covs)


def _pooled_atom_cov(pilot):
    covs = []
    for state in pilot:
        occ = state.counts > 0
        if occ.sum() >= 2:
            covs.append(np.cov(np.column_stack([state.theta[occ], state.phi[occ]]), rowvar=False))
    return np.mean(covs, axis=0) if covs else None


def run_chain(data, hp, config=SamplerConfig()):
    """Run the blocked Gibbs sampler and return the saved draws.

    A pilot run of ``config.pilot_iters`` iterations sets the proposal
    covariance, which is then frozen for the burn-in and the saved part of
    the chain.
    """
    if not isinstance(data, Dataset):
        data = Dataset(*data) if isinstance(data, tuple) else Dataset(data)
    rng = rnd.make_rng(config.seed)
    started = time.perf_counter()
    state = initial_state(data, hp, config.L, rng)
    c = config.proposal_c

    if config.proposal == "information":
        shape0 = np.exp(np.median(state.theta[state.counts > 0])) if data.n else 1.0
        S2 = ("unit", unit_information_cov(shape0))
    else:
        S2 = np.array(hp.sigma_mean)
    pilot = []
    for _ in range(config.pilot_iters):
        state, _, _ = gibbs_step(state, data, hp, c, S2, rng)
        pilot.append(state)
    if config.proposal == "information":
        pooled = _pooled_unit_cov(pilot)
        if pooled is not None:
            S2 = ("unit", pooled)
    else:
        pooled = _pooled_atom_cov(pilot)
        if pooled is not None:
            S2 = pooled

    for _ in range(config.burn_in):
        state, _, _ = gibbs_step(state, data, hp, c, S2, rng)

    keep = []
    acc = prop = 0
    for _ in range(config.n_save):
        for _ in range(config.thin):
            state, a, p = gibbs_step(state, data, hp, c, S2, rng)
            acc += a
            prop += p
        keep.append(state)

    runtime = time.perf_counter() - started
    cov = S2[1] if isinstance(S2, tuple) else S2
    return _stack(keep, acc / prop if prop else float("nan"), cov,
                  {"runtime_s": runtime, "config": config.to_dict(), "n": data.n,
                   "group": data.group})


def _stack(states, acceptance=float("nan"), cov=None, info=None):
    return PosteriorDraws(
        alpha=np.array([s.alpha for s in states]),
        mu=np.stack([s.mu for s in states]),
        Sigma=np.stack([s.Sigma for s in states]),
        weights=np.stack([s.weights for s in states]),
        theta=np.stack([s.theta for s in states]),
        phi=np.stack([s.phi for s in states]),
        sticks=np.stack([s.sticks for s in states]),
        labels=np.stack([s.labels for s in states]),
        acceptance=acceptance,
        proposal_cov=cov,
        info=info or {},
    )


def sample_prior(hp, L, n_draws, rng):
    """Independent draws of the mixture from its prior."""
    states = []
    for _ in range(n_draws):
        alpha = float(rnd.gamma(rng, hp.a_alpha, hp.b_alpha))
        mu = rnd.mvnormal(rng, hp.a_mu, hp.B_mu)
        sigma = rnd.invwishart(rng, hp.a_Sigma, hp.B_Sigma)
        v = np.minimum(rnd.beta(rng, 1.0, alpha, size=L - 1), _V_MAX) if L > 1 else np.zeros(0)
        atoms = rnd.mvnormal(rng, mu, sigma, size=L)
        states.append(ChainState(v, stick_break(v), atoms[:, 0], atoms[:, 1],
                                 np.zeros(0, dtype=np.intp), mu, sigma, alpha))
    return _stack(states, info={"source": "prior"})
