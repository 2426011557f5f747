"""Command-line interface.

Subcommands: enumerate, sample, sweep, onsager, series-check, census, render.
Every subcommand reads a JSON run config (--config), is deterministic given
(config, seed), and writes CSV/JSON/PGM output atomically to --out (stdout
for text formats when --out is omitted).  --threads (or ISINGLAB_THREADS)
parallelizes independent chains without changing any output byte.

Exit codes: 0 success, 1 runtime or verification failure, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analytic, clusters, mcmc, series
from .config import ConfigError, build_lattice, build_params, load_config
from .exact import enumerate_table
from .lattice import Lattice
from .mcmc import Chain, Observable, SweepRow, chain_seed
from .model import ModelParams, SpinConfig
from .netpbm import render_bytes, write_atomic, write_text_atomic

CSV_HEADER = "temperature,observable,estimate,stderr,ess,n_sweeps,seed"


def build_observable(lattice: Lattice, spec: dict) -> Observable:
    kind = spec["type"]
    if kind == "magnetization":
        return mcmc.magnetization()
    if kind == "abs_magnetization":
        return mcmc.abs_magnetization()
    if kind == "spin":
        if "site" not in spec:
            raise ConfigError("spin observable needs a site")
        return mcmc.spin(lattice, tuple(spec["site"]))
    if kind == "spin_product":
        if "sites" not in spec:
            raise ConfigError("spin_product observable needs sites")
        return mcmc.spin_product(lattice, [tuple(s) for s in spec["sites"]])
    raise ConfigError(f"unknown observable type {kind!r}")


def _emit_text(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        write_text_atomic(out, text)


def _rows_to_csv(rows: list[SweepRow], n_sweeps: int) -> tuple[str, bool]:
    lines = [CSV_HEADER]
    failed = False
    for row in rows:
        if row.estimate is None:
            failed = True
            reason = row.error.replace(",", ";").replace("\n", " ")
            lines.append(f"{row.temperature!r},{row.observable},"
                         f"error:{reason},,,{n_sweeps},")
        else:
            e = row.estimate
            lines.append(f"{row.temperature!r},{e.observable},{e.mean!r},"
                         f"{e.stderr!r},{e.ess!r},{n_sweeps},{e.seed}")
    return "\n".join(lines) + "\n", failed


# -- subcommands ----------------------------------------------------------------


def cmd_enumerate(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    params = build_params(cfg)
    table = enumerate_table(lattice, params, cap=cfg.get("cap", 2 ** 30))
    report: dict = {
        "lattice": lattice.to_dict(),
        "temperature": "inf" if math.isinf(params.temperature) else params.temperature,
        "log_z": table.log_z,
        "n_configs": table.n_configs,
        "energy_levels": [[float(e), int(c)] for e, c in table.energy_levels.items()],
        "normalization": table.normalization_check(),
    }
    violated = abs(report["normalization"] - 1.0) > 1e-12
    for spec in cfg.get("marginals", []):
        window = [tuple(s) for s in spec["window"]]
        p = table.window_marginal(window, spec["pattern"])
        report.setdefault("marginals", []).append(
            {"window": spec["window"], "pattern": spec["pattern"], "probability": p})
    for sites in cfg.get("correlations", []):
        value = table.correlation(*[tuple(s) for s in sites])
        report.setdefault("correlations", []).append(
            {"sites": sites, "value": value})
    if "verify_gibbs" in cfg:
        w = cfg["verify_gibbs"]["window"]
        check = table.verify_gibbs_equations(w if isinstance(w, int) else tuple(w))
        ok = check.max_violation <= 1e-10
        report["gibbs_check"] = {
            "max_violation": check.max_violation,
            "n_groups": check.n_groups,
            "n_patterns": check.n_patterns,
            "pass": ok,
        }
        violated = violated or not ok
    for pair in cfg.get("verify_fkg", []):
        res = table.verify_fkg(tuple(pair[0]), tuple(pair[1]))
        report.setdefault("fkg", []).append(
            {"sites": pair, "lhs": res.lhs, "rhs": res.rhs, "holds": res.holds})
        violated = violated or not res.holds
    _emit_text(json.dumps(report, indent=2, sort_keys=True) + "\n", out)
    return 1 if violated else 0


def cmd_sample(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    params = build_params(cfg)
    observables = [build_observable(lattice, s) for s in cfg["observables"]]
    n_sweeps = cfg["n_sweeps"]
    rows: list[SweepRow] = []
    try:
        chain = Chain(lattice, params, chain_seed(seed, 0))
        for est in mcmc.estimate_many(chain, observables, n_sweeps,
                                      cfg.get("burn_in"), cfg["sampler"]):
            rows.append(SweepRow(params.temperature, est.observable, est))
    except ValueError as exc:
        for obs in observables:
            rows.append(SweepRow(params.temperature, obs.name, None, str(exc)))
    text, failed = _rows_to_csv(rows, n_sweeps)
    _emit_text(text, out)
    if "figure" in cfg:
        from .plotting import save_sweep_figure
        save_sweep_figure(rows, cfg["figure"])
    return 1 if failed else 0


def cmd_sweep(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    if "T" in cfg["model"]:
        raise ConfigError("sweep takes temperatures, not model.T")
    base = build_params(cfg, temperature=math.inf)  # validates kind/h/q
    observables = [build_observable(lattice, s) for s in cfg["observables"]]
    rows = mcmc.temperature_sweep(
        lattice, cfg["temperatures"], observables, cfg["n_sweeps"],
        cfg.get("burn_in"), master_seed=seed, sampler=cfg["sampler"],
        q=base.q, field=base.field, threads=threads)
    text, failed = _rows_to_csv(rows, cfg["n_sweeps"])
    _emit_text(text, out)
    if "figure" in cfg:
        from .plotting import save_sweep_figure
        save_sweep_figure(rows, cfg["figure"])
    return 1 if failed else 0


def cmd_onsager(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    if "temperatures" in cfg:
        ts = [float(t) for t in cfg["temperatures"]]
    else:
        ts = np.linspace(cfg.get("t_min", 0.1), cfg.get("t_max", 3.0),
                         cfg.get("count", 60)).tolist()
    if any(t <= 0 for t in ts):
        raise ConfigError("temperatures must be positive")
    ms = [analytic.onsager_magnetization(t) for t in ts]
    lines = ["temperature,magnetization"]
    lines += [f"{t!r},{m!r}" for t, m in zip(ts, ms)]
    _emit_text("\n".join(lines) + "\n", out)
    if "figure" in cfg:
        from .plotting import save_magnetization_curve
        save_magnetization_curve(ts, ms, cfg["figure"])
    return 0


def cmd_series_check(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    params = build_params(cfg)
    t_scale = cfg.get("t", 0.25)
    table = enumerate_table(lattice, params)

    free = lattice.free_sites
    picks = sorted({int(free[0]), int(free[len(free) // 2]), int(free[-1])})
    probs = series._table_probs(table)
    fs = [series.spin_variable(table, i, probs) for i in picks]

    r_full = series.verify_generating_identity(fs, t_scale)
    r_half = series.verify_generating_identity(fs, t_scale / 2)
    ratio = r_full / r_half if r_half > 0 else math.inf
    order = series.MAX_ORDER

    pair = spin_pair = None
    e0 = lattice.edges()
    if len(e0) > 0:
        a, b = int(e0[0][0]), int(e0[0][1])
        obs = series.spin_product_variable(table, (a, b), probs)
        edges = [(int(x), int(y)) for x, y in e0]
        slope = series.first_order_correction(obs, edges, table, 1.0) - obs.mean()
        d = 1e-3
        upper = enumerate_table(lattice, _shift_beta(params, d)).correlation(a, b)
        lower = enumerate_table(lattice, _shift_beta(params, -d)).correlation(a, b)
        upper2 = enumerate_table(lattice, _shift_beta(params, d / 2)).correlation(a, b)
        lower2 = enumerate_table(lattice, _shift_beta(params, -d / 2)).correlation(a, b)
        d1 = (upper - lower) / (2 * d)
        d2 = (upper2 - lower2) / d
        richardson = (4 * d2 - d1) / 3
        spin_pair = (a, b)
        pair = abs(slope - richardson)

    rows = [
        ("identity_residual_t", r_full, "", ""),
        ("identity_residual_t_half", r_half, "", ""),
        ("residual_ratio", ratio, f">={2 ** order}",
         "pass" if ratio >= 2 ** order else "fail"),
    ]
    if pair is not None:
        rows.append((f"first_order_vs_derivative{spin_pair}", pair, "<=1e-06",
                     "pass" if pair <= 1e-6 else "fail"))
    lines = ["check,value,threshold,status"]
    lines += [f"{name},{value!r},{thr},{status}" for name, value, thr, status in rows]
    _emit_text("\n".join(lines) + "\n", out)
    return 1 if any(r[3] == "fail" for r in rows) else 0


def _shift_beta(params: ModelParams, dbeta: float) -> ModelParams:
    beta = params.beta + dbeta
    t = math.inf if beta == 0 else 1.0 / beta
    return ModelParams(t, field=params.field, q=params.q)


def cmd_census(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    params = build_params(cfg) if "model" in cfg else None
    counts = clusters.interface_census(lattice, params, cap=cfg.get("cap", 2 ** 30))
    report = {
        "lattice": lattice.to_dict(),
        "areas": [[int(a), int(c)] for a, c in counts.items()],
        "total": int(sum(counts.values())),
    }
    _emit_text(json.dumps(report, indent=2, sort_keys=True) + "\n", out)
    return 0


def cmd_render(cfg: dict, seed: int, out: str | None, threads: int) -> int:
    lattice = build_lattice(cfg)
    if lattice.d != 2:
        raise ConfigError(f"rendering is 2D-only, got d={lattice.d}")
    if ("values" in cfg) == ("sample" in cfg):
        raise ConfigError("render needs exactly one of values or sample")
    if out is None:
        raise ConfigError("render writes binary data; --out is required")
    if "values" in cfg:
        q = None
        if cfg.get("model", {}).get("kind") == "potts":
            q = int(cfg["model"]["q"])
        try:
            config = SpinConfig(lattice, np.asarray(cfg["values"], dtype=np.int8), q)
        except ValueError as exc:
            raise ConfigError(f"invalid snapshot values: {exc}") from exc
    else:
        if "model" not in cfg or "T" not in cfg["model"]:
            raise ConfigError("render sampling needs a model with T")
        params = build_params(cfg)
        spec = cfg["sample"]
        chain = Chain(lattice, params, chain_seed(seed, 0))
        n_updates = spec["n_sweeps"] + spec.get("burn_in", 0)
        if spec["sampler"] == "wolff":
            chain.wolff_update(n_updates)
        else:
            chain.metropolis_sweep(n_updates)
        config = chain.config
    data = render_bytes(config, overlay=bool(cfg.get("overlay", False)))
    write_atomic(out, data)
    return 0


COMMANDS = {
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "sweep": cmd_sweep,
    "onsager": cmd_onsager,
    "series-check": cmd_series_check,
    "census": cmd_census,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isinglab",
        description="Lattice spin models: exact enumeration, Monte Carlo, "
                    "closed forms, and snapshot rendering.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides config seed; default 0)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default ISINGLAB_THREADS or 1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ISINGLAB_THREADS", "1"))
    try:
        cfg = load_config(args.config, args.command)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        return COMMANDS[args.command](cfg, seed, args.out, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
