"""Simulated gamma-mixture survival data, optionally right-censored.

Gamma components are given as ``(weight, shape, rate)``.
"""

from dataclasses import dataclass

import numpy as np

from . import random as rnd
from .gibbs import Dataset

__all__ = ["SimSpec", "PRESETS", "simulate", "preset"]


@dataclass(frozen=True)
class SimSpec:
    """Mixture components, sample size, censoring and seed.

    ``censoring`` is None, ``("fixed", c)`` to censor every time above ``c``
    at ``c``, or ``("exponential", rate)`` for an independent exponential
    censoring time.
    """

    components: tuple
    n: int
    censoring: tuple = None
    seed: int = 0
    group: str = "all"

    def __post_init__(self):
        comps = tuple(tuple(float(x) for x in c) for c in self.components)
        if not comps or any(len(c) != 3 for c in comps):
            raise ValueError("components are (weight, shape, rate) triples")
        w = np.array([c[0] for c in comps])
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("component weights must form a simplex")
        if any(c[1] <= 0 or c[2] <= 0 for c in comps):
            raise ValueError("shapes and rates must be positive")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.censoring is not None:
            kind, value = self.censoring
            if kind not in ("fixed", "exponential") or not float(value) > 0:
                raise ValueError("censoring is ('fixed', c) or ('exponential', rate) with a positive value")
        object.__setattr__(self, "components", comps)


PRESETS = {
    "sim1": ((0.35, 10, 0.5), (0.4, 20, 1), (0.15, 30, 5), (0.1, 40, 8)),
    "sim2": ((0.3, 15, 0.2), (0.25, 12, 0.5), (0.35, 8, 2), (0.1, 3, 6)),
}
PRESET_N = {"sim1": 200, "sim2": 100}


def preset(name, n=None, seed=0, censoring=None):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return SimSpec(PRESETS[name], PRESET_N[name] if n is None else n, censoring, seed, name)


def simulate(spec):
    """Draw a component for each observation by weight, then the gamma time."""
    rng = rnd.make_rng(spec.seed)
    w = np.array([c[0] for c in spec.components])
    shape = np.array([c[1] for c in spec.components])
    rate = np.array([c[2] for c in spec.components])
    comp = rnd.categorical(rng, np.broadcast_to(w, (spec.n, w.size))) if spec.n else np.zeros(0, int)
    t = rnd.gamma(rng, shape[comp], rate[comp]) if spec.n else np.zeros(0)
    censored = np.zeros(spec.n, bool)
    if spec.censoring is not None:
        kind, value = spec.censoring
        c = np.full(spec.n, float(value)) if kind == "fixed" else rnd.gamma(rng, 1.0, float(value), spec.n)
        censored = t > c
        t = np.where(censored, c, t)
    return Dataset(t, censored, spec.group)
