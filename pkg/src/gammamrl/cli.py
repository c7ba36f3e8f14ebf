"""Command line interface: simulate, fit, compare, catalog, elicit."""

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .analytics import (
    DEFAULT_K_GRID,
    atom_correlation,
    ew_functional_bands,
    functional_bands,
    gelfand_ghosh,
    gg_replicates_dpmm,
    gg_replicates_ew,
    mrl_difference,
    prior_prob_mrl_greater,
    prob_mrl_greater,
)
from .distributions import UndefinedMRLError, classify_mrl_shape, dist_from_spec, eval_core
from .elicitation import Hyperparams, elicit_hyperparameters, expected_clusters, prior_mean_T, prior_var_T
from .expweibull import EwConfig, NoRootError, ew_prior_from_quantiles, fit_exp_weibull
from .gibbs import SamplerConfig, run_chain
from .mixture import MrlGrid
from .numerics import Grid, default_grid
from .random import make_rng
from .simulate import PRESETS, SimSpec, preset, simulate

STATUS_NOTE = "input status 1 = event observed (censored = 0), status 0 = right-censored (censored = 1)"


@dataclass
class RunConfig:
    """Everything needed to reproduce a fit or comparison run."""

    data: str = None
    out: str = None
    model: str = "dpmm"
    L: int = 40
    burn_in: int = 5000
    thin: int = 5
    n_save: int = 2000
    seed: int = 0
    pilot_iters: int = 500
    proposal_c: float = 2.0
    a_mu: list = None
    b: float = None
    a_Sigma: float = 4.0
    a_alpha: float = 2.0
    b_alpha: float = 1.0
    q_E: float = 0.6
    q_V: float = 0.025
    ew_prior: list = None
    ew_scale: list = field(default_factory=lambda: [0.1, 0.1, 0.1])
    ew_pilot_iters: int = 1000
    grid_points: int = 512
    grid_min: float = None
    grid_max: float = None
    level: float = 0.95
    t_points: list = None
    prior_draws: int = 2000
    k_grid: list = None
    jobs: int = 1

    def validate(self):
        if self.data is None or not Path(self.data).is_file():
            raise ValueError(f"data file {self.data!r} does not exist")
        if self.out is None:
            raise ValueError("an output directory is required")
        if self.model not in ("dpmm", "exp_weibull"):
            raise ValueError("model must be 'dpmm' or 'exp_weibull'")
        SamplerConfig(self.L, self.burn_in, self.thin, self.n_save, self.seed,
                      self.pilot_iters, self.proposal_c)
        if self.a_mu is not None:
            Hyperparams.isotropic(self.a_mu, 0.1 if self.b is None else self.b, self.a_Sigma,
                                  self.a_alpha, self.b_alpha)
        elif not (0 < self.q_E <= 1 and 0 < self.q_V <= 1):
            raise ValueError("q_E and q_V must lie in (0, 1]")
        if self.ew_prior is not None and (len(self.ew_prior) != 3 or min(self.ew_prior) <= 0):
            raise ValueError("ew_prior needs three positive means")
        if not 0 < self.level < 1:
            raise ValueError("level must lie in (0, 1)")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.t_points is not None and any(t < 0 for t in self.t_points):
            raise ValueError("t_points must be nonnegative")

    def to_dict(self):
        # the output location does not affect results, so it is not echoed
        d = dataclasses.asdict(self)
        d.pop("out")
        return d


def _group_seed(seed, index, stream):
    return int(np.random.SeedSequence([seed, index, stream]).generate_state(1)[0])


def _hyperparams(cfg, data):
    if cfg.a_mu is not None:
        return Hyperparams.isotropic(cfg.a_mu, 0.1 if cfg.b is None else cfg.b, cfg.a_Sigma,
                                     cfg.a_alpha, cfg.b_alpha)
    t = data.times
    center = 0.5 * (t.min() + t.max())
    spread = max(t.max() - t.min(), 1e-3 * center)
    return elicit_hyperparameters(center, spread, cfg.q_E, cfg.q_V, a_alpha=cfg.a_alpha,
                                  b_alpha=cfg.b_alpha, a_Sigma=cfg.a_Sigma)


def _ew_prior(cfg, data):
    if cfg.ew_prior is not None:
        return tuple(float(x) for x in cfg.ew_prior)
    P = (0.1, 0.5, 0.9)
    try:
        return ew_prior_from_quantiles(P, np.quantile(data.times, P))
    except NoRootError as err:
        return tuple(float(x) for x in err.best)


def _fit_task(task):
    kind, data, prior, config = task
    if kind == "dpmm":
        return run_chain(data, prior, config)
    return fit_exp_weibull(data, prior, config)


def _run_tasks(tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            return list(pool.map(_fit_task, tasks))
    return [_fit_task(t) for t in tasks]


def _grid(cfg, groups):
    pooled = np.concatenate([d.times for d in groups.values()])
    if cfg.grid_min is None and cfg.grid_max is None:
        return default_grid(pooled, cfg.grid_points)
    lo = pooled.min() / 10 if cfg.grid_min is None else cfg.grid_min
    hi = 1.5 * pooled.max() if cfg.grid_max is None else cfg.grid_max
    return Grid(np.geomspace(lo, hi, cfg.grid_points))


def _write_bands(out, prefix, bands):
    for name, fg in bands.items():
        io.write_grid_csv(out / f"{prefix}_{name}.csv", fg)


def run(cfg, compare=False):
    """Fit every group (and for ``compare`` both models) and write the outputs.

    Returns the run directory. All files except ``timing.json`` depend only
    on the configuration and the data.
    """
    cfg.validate()
    groups = io.load_dataset(cfg.data)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = _grid(cfg, groups)
    names = list(groups)
    models = ("dpmm", "exp_weibull") if compare else (cfg.model,)

    tasks, keys, priors, seeds = [], [], {}, {}
    for gi, g in enumerate(names):
        data = groups[g]
        for mi, model in enumerate(models):
            seed = _group_seed(cfg.seed, gi, mi)
            seeds[f"{g}/{model}"] = seed
            if model == "dpmm":
                prior = _hyperparams(cfg, data)
                conf = SamplerConfig(cfg.L, cfg.burn_in, cfg.thin, cfg.n_save, seed,
                                     cfg.pilot_iters, cfg.proposal_c)
                priors[f"{g}/{model}"] = prior.to_dict() | {"elicitation": prior.info}
            else:
                prior = _ew_prior(cfg, data)
                conf = EwConfig(cfg.burn_in, cfg.thin, cfg.n_save, seed, cfg.ew_pilot_iters,
                                tuple(cfg.ew_scale))
                priors[f"{g}/{model}"] = {"prior_means": list(prior)}
            tasks.append((model, data, prior, conf))
            keys.append((g, model))
    results = dict(zip(keys, _run_tasks(tasks, cfg.jobs)))

    summary = {
        "config": cfg.to_dict(),
        "status_mapping": STATUS_NOTE,
        "groups": {g: {"n": groups[g].n, "n_censored": int(groups[g].censored.sum())} for g in names},
        "seeds": seeds,
        "priors": priors,
        "acceptance": {f"{g}/{m}": float(r.acceptance) for (g, m), r in results.items()},
        "grid": {"min": float(grid.points[0]), "max": float(grid.points[-1]), "n": len(grid)},
    }
    timing = {f"{g}/{m}": r.info.get("runtime_s") for (g, m), r in results.items()}

    for (g, model), draws in results.items():
        tag = f"{g}_{model}"
        if model == "dpmm":
            io.write_draws_csv(out / f"draws_{tag}.csv", draws)
            _write_bands(out, tag, functional_bands(draws, grid, cfg.level))
            io.write_columns_csv(out / f"correlation_{g}.csv", {"corr": atom_correlation(draws)})
            summary.setdefault("correlation_median", {})[g] = float(np.median(atom_correlation(draws)))
        else:
            io.write_ew_draws_csv(out / f"draws_{tag}.csv", draws)
            _write_bands(out, tag, ew_functional_bands(draws, grid, cfg.level))

    if "dpmm" in models and len(names) == 2:
        a, b = names
        da, db = results[(a, "dpmm")], results[(b, "dpmm")]
        pooled = np.concatenate([groups[g].times for g in names])
        t_points = cfg.t_points if cfg.t_points is not None else \
            [0.0] + [float(q) for q in np.quantile(pooled, [0.25, 0.5, 0.75])]
        diff = mrl_difference(da, db, t_points)
        io.write_columns_csv(out / "mrl_difference.csv",
                             {f"t={t!r}": diff.samples[:, j] for j, t in enumerate(diff.t)})
        post = prob_mrl_greater(da, db, grid)
        prior = prior_prob_mrl_greater(_hyperparams(cfg, groups[a]), _hyperparams(cfg, groups[b]),
                                       cfg.L, grid, cfg.prior_draws, _group_seed(cfg.seed, 99, 0))
        io.write_columns_csv(out / "prob_mrl_greater.csv",
                             {"t": grid.points, "posterior": post, "prior": prior})
        summary["two_group"] = {"A": a, "B": b, "t_points": list(map(float, diff.t))}

    if compare:
        k_grid = DEFAULT_K_GRID if cfg.k_grid is None else tuple(cfg.k_grid)
        table = {}
        for gi, g in enumerate(names):
            data = groups[g]
            for model in models:
                rng = make_rng(_group_seed(cfg.seed, gi, 10 + models.index(model)))
                draws = results[(g, model)]
                if model == "dpmm":
                    E, V = gg_replicates_dpmm(draws, data, rng)
                else:
                    E, V = gg_replicates_ew(draws, data.n, rng)
                res = gelfand_ghosh(E, V, data.times, k_grid)
                table[f"{g}/{model}"] = {"G": res.G, "P": res.P,
                                         "D": {repr(float(k)): float(d) for k, d in res.table()}}
        summary["gelfand_ghosh"] = table
        with open(out / "dk_table.csv", "w") as fh:
            fh.write("group,model,k,D,G,P\n")
            for key, v in table.items():
                g, m = key.split("/")
                for k, d in v["D"].items():
                    fh.write(f"{g},{m},{k},{d!r},{v['G']!r},{v['P']!r}\n")

    io.write_json(out / "summary.json", summary)
    io.write_json(out / "timing.json", {"runtime_s": timing})
    return out


def catalog(name, params, grid):
    """Rows of ``(t, f, S, h, m)`` and the MRL shape label."""
    dist = dist_from_spec(name, *params)
    t = np.asarray(grid, dtype=float)
    core = eval_core(dist, t)
    try:
        m = np.asarray(dist.mrl(t), dtype=float)
    except UndefinedMRLError:
        m = np.full(t.shape, np.nan)
    if t.ndim == 1 and t.size > 1 and t[0] > 0 and np.all(np.diff(t) > 0):
        m = MrlGrid(Grid(t), m, ~np.isfinite(m)).values
    label = classify_mrl_shape(dist)
    return np.column_stack([t, core.density, core.survival, core.hazard, m]), label


def _parser():
    p = argparse.ArgumentParser(prog="gammamrl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate gamma-mixture survival data")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--component", nargs=3, type=float, action="append",
                   metavar=("WEIGHT", "SHAPE", "RATE"))
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, required=True)
    cens = s.add_mutually_exclusive_group()
    cens.add_argument("--censor-fixed", type=float, metavar="C")
    cens.add_argument("--censor-rate", type=float, metavar="RATE")
    s.add_argument("--group", default=None)
    s.add_argument("--out", required=True)

    for name, helptext in (("fit", "fit one model to every group"),
                           ("compare", "fit both models and compute posterior predictive loss")):
        f = sub.add_parser(name, help=helptext)
        f.add_argument("--data")
        f.add_argument("--out")
        f.add_argument("--config", help="JSON file with run settings; flags override it")
        if name == "fit":
            f.add_argument("--model", choices=("dpmm", "exp_weibull"))
        for flag, typ in (("L", int), ("burn-in", int), ("thin", int), ("n-save", int),
                          ("seed", int), ("pilot-iters", int), ("proposal-c", float),
                          ("b", float), ("a-Sigma", float), ("a-alpha", float),
                          ("b-alpha", float), ("q-E", float), ("q-V", float),
                          ("grid-points", int), ("grid-min", float), ("grid-max", float),
                          ("level", float), ("prior-draws", int), ("jobs", int),
                          ("ew-pilot-iters", int)):
            f.add_argument(f"--{flag}", type=typ, dest=flag.replace("-", "_"))
        f.add_argument("--a-mu", nargs=2, type=float, dest="a_mu")
        f.add_argument("--ew-prior", nargs=3, type=float, dest="ew_prior")
        f.add_argument("--ew-scale", nargs=3, type=float, dest="ew_scale")
        f.add_argument("--t-points", nargs="+", type=float, dest="t_points")
        f.add_argument("--k-grid", nargs="+", type=float, dest="k_grid")

    c = sub.add_parser("catalog", help="tabulate a parametric law and classify its MRL shape")
    c.add_argument("--dist", required=True, nargs="+", metavar="NAME_AND_PARAMS",
                   help="e.g. --dist gamma 2 1")
    c.add_argument("--t-min", type=float, default=0.01)
    c.add_argument("--t-max", type=float, default=10.0)
    c.add_argument("--n-points", type=int, default=100)
    c.add_argument("--out")

    e = sub.add_parser("elicit", help="hyperparameters from a data center and range")
    e.add_argument("--center", type=float, required=True)
    e.add_argument("--range", type=float, required=True, dest="range_")
    e.add_argument("--q-E", type=float, default=0.6, dest="q_E")
    e.add_argument("--q-V", type=float, default=0.025, dest="q_V")
    e.add_argument("--a-alpha", type=float, default=2.0, dest="a_alpha")
    e.add_argument("--b-alpha", type=float, default=1.0, dest="b_alpha")
    e.add_argument("--n", type=int, help="sample size for the expected number of clusters")
    return p


def _run_config(args):
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            given = json.load(fh)
        unknown = set(given) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg = dataclasses.replace(cfg, **given)
    flags = {k: v for k, v in vars(args).items()
             if k in RunConfig.__dataclass_fields__ and v is not None}
    return dataclasses.replace(cfg, **flags)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "simulate":
            if args.preset:
                spec = preset(args.preset, args.n, args.seed)
                comps, n = spec.components, spec.n
            elif args.component:
                comps, n = args.component, args.n
                if n is None:
                    raise ValueError("--n is required with --component")
            else:
                raise ValueError("give --preset or at least one --component")
            censoring = (("fixed", args.censor_fixed) if args.censor_fixed is not None else
                         ("exponential", args.censor_rate) if args.censor_rate is not None else None)
            group = args.group or args.preset or "all"
            data = simulate(SimSpec(comps, n, censoring, args.seed, group))
            io.write_dataset(args.out, data)
            print(f"wrote {data.n} rows ({int(data.censored.sum())} censored) to {args.out}")
        elif args.command in ("fit", "compare"):
            out = run(_run_config(args), compare=args.command == "compare")
            print(f"results in {out}")
        elif args.command == "catalog":
            name, params = args.dist[0], [float(x) for x in args.dist[1:]]
            grid = np.geomspace(args.t_min, args.t_max, args.n_points)
            rows, label = catalog(name, params, grid)
            lines = ["t,f,S,h,m"] + [",".join(repr(float(x)) for x in r) for r in rows]
            lines.append(f"# shape: {label.value}")
            text = "\n".join(lines) + "\n"
            if args.out:
                Path(args.out).write_text(text)
                print(f"shape {label.value}; table in {args.out}")
            else:
                sys.stdout.write(text)
        elif args.command == "elicit":
            hp = elicit_hyperparameters(args.center, args.range_, args.q_E, args.q_V,
                                        a_alpha=args.a_alpha, b_alpha=args.b_alpha)
            out = hp.to_dict() | {"b": hp.info["b"], "prior_mean_T": prior_mean_T(hp),
                                  "prior_var_T": prior_var_T(hp),
                                  "target_var_T": hp.info["target_var"]}
            if args.n:
                out["expected_clusters_at_prior_mean_alpha"] = expected_clusters(
                    args.a_alpha / args.b_alpha, args.n)
            print(json.dumps(out, indent=2, sort_keys=True))
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
