"""Command-line front door.

Subcommands reproduce every table and figure dataset of the analysis:

* ``equilibria``  -- all equilibria with stability and market columns
* ``sweep``       -- fig1..fig5 data files over an alpha grid
* ``welfare``     -- first/second-best welfare report at one alpha
* ``calibrate``   -- the calibrated parameter table
* ``sensitivity`` -- the elasticity table
* ``mc``          -- finite-network Monte Carlo cell employment

Options can come from a flat ``key=value`` config file (# comments allowed)
and are overridden by command-line flags.  Every output file starts with a
header block echoing the fully resolved parameter set, so a run can be
reproduced from its own output.  Exit codes: 0 ok, 2 config error,
3 solver failure, 4 I/O error.

The only environment variables honored are OCCSEG_THREADS (Monte Carlo
replication thread count) and OCCSEG_BACKEND (kernel selection).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import CalibrationTargets, calibrate, find_alpha_hat
from .equilibrium import (
    Regime,
    classify_regime,
    enumerate_equilibria,
    probed_gaps,
    solve_partial,
    solve_symmetric,
)
from .errors import ConfigError, OccsegError
from .model import StrategyProfile, market_state
from .sensitivity import elasticities
from .welfare import welfare, welfare_report
from . import netmc

#: Every key a config file may set, with its coercion.
CONFIG_SCHEMA: dict[str, type] = {
    "alpha": float,
    "grid": int,
    "seed": int,
    "out": str,
    "format": str,
    "tol": float,
    # calibration targets
    "informal_share": float,
    "homophily_ratio": float,
    "target_employment": float,
    "target_income": float,
    "rho": float,
    "c1": float,
    # sweep grids
    "alpha_min": float,
    "alpha_max": float,
    "alpha_steps": int,
    "mu_steps": int,
    # sensitivity
    "rel_step": float,
    # monte carlo
    "n": int,
    "burn_in": float,
    "horizon": float,
    "replications": int,
    "probes": int,
}

DEFAULTS: dict[str, object] = {
    "alpha": 0.5,
    "grid": 200,
    "seed": 1,
    "out": ".",
    "format": "csv",
    "tol": 1e-9,
    "informal_share": 0.5,
    "homophily_ratio": 3.0,
    "target_employment": 0.95,
    "target_income": 40_000.0,
    "rho": 1.0e-4,
    "c1": None,
    "alpha_min": 0.50,
    "alpha_max": 0.95,
    "alpha_steps": 46,
    "mu_steps": 101,
    "rel_step": 1e-2,
    "n": 5_000,
    "burn_in": 200.0,
    "horizon": 1_000.0,
    "replications": 20,
    "probes": 100,
}


def _fmt(value) -> str:
    """Serialize one table value; floats carry 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def read_config(path: str) -> dict[str, object]:
    """Parse a flat key=value file, rejecting unknown keys and bad values."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_SCHEMA[key](val)
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: bad value for {key}: {val!r}"
            ) from exc
    return values


def resolve_config(args: argparse.Namespace) -> dict[str, object]:
    """defaults < config file < command-line flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in CONFIG_SCHEMA:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    return cfg


def write_table(
    out_dir: str,
    stem: str,
    fmt: str,
    meta: dict[str, object],
    columns: list[str],
    rows: list[list],
) -> Path:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.{fmt}"
    if fmt == "csv":
        lines = [f"# {k} = {_fmt(v)}" for k, v in meta.items()]
        lines.append(",".join(columns))
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        payload = {
            "meta": {k: v for k, v in meta.items()},
            "columns": columns,
            "rows": rows,
        }
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return path


def _meta(cfg: dict[str, object], command: str, **extra) -> dict[str, object]:
    # 'out' is where the file lives, not a parameter of the run; leaving it
    # out keeps reruns byte-identical regardless of destination
    meta = {"tool": "occseg", "version": __version__, "command": command}
    meta.update(
        {k: v for k, v in sorted(cfg.items()) if v is not None and k != "out"}
    )
    meta.update(extra)
    return meta


def _params_from(cfg: dict[str, object]):
    targets = CalibrationTargets(
        informal_share=cfg["informal_share"],
        homophily_ratio=cfg["homophily_ratio"],
        target_employment=cfg["target_employment"],
        target_income=cfg["target_income"],
        rho=cfg["rho"],
    )
    return calibrate(targets, alpha=cfg["alpha"], c1=cfg["c1"])


def cmd_equilibria(cfg: dict[str, object]) -> int:
    params = _params_from(cfg)
    reports = enumerate_equilibria(params, grid_n=cfg["grid"], tol=cfg["tol"])
    columns = [
        "mu_R", "mu_G", "kind", "satisfies_conditions", "stable",
        "det_jacobian", "J_RR", "J_RG", "J_GR", "J_GG",
        "s_AR", "s_AG", "s_BR", "s_BG", "L_A", "L_B", "w_A", "w_B",
        "Pi_AR", "Pi_AG", "Pi_BR", "Pi_BG", "dPi_R", "dPi_G",
    ]
    rows = []
    for r in reports:
        m = r.market
        rows.append([
            r.profile.mu_R, r.profile.mu_G, r.kind.value,
            r.satisfies_conditions, r.stable.value, r.det_jacobian,
            float(r.jacobian[0, 0]), float(r.jacobian[0, 1]),
            float(r.jacobian[1, 0]), float(r.jacobian[1, 1]),
            m.s_AR, m.s_AG, m.s_BR, m.s_BG, m.L_A, m.L_B, m.w_A, m.w_B,
            m.Pi_AR, m.Pi_AG, m.Pi_BR, m.Pi_BG, m.dPi_R, m.dPi_G,
        ])
    write_table(cfg["out"], "equilibria", cfg["format"],
                _meta(cfg, "equilibria"), columns, rows)
    return 0


def _mu_star(params) -> float:
    if classify_regime(params) is Regime.COMPLETE:
        return 0.0
    return solve_partial(params)


def cmd_sweep(cfg: dict[str, object]) -> int:
    alphas = np.linspace(cfg["alpha_min"], cfg["alpha_max"], cfg["alpha_steps"])
    mus = np.linspace(0.0, 1.0, cfg["mu_steps"])
    base = _params_from(cfg)
    meta = _meta(cfg, "sweep")

    fig1 = []
    for a in alphas:
        pa = base.with_alpha(float(a))
        for mu in mus:
            fig1.append([float(a), float(mu),
                         probed_gaps(1.0, float(mu), pa)[1]])
    write_table(cfg["out"], "fig1", cfg["format"], meta,
                ["alpha", "mu_G", "gap_G"], fig1)

    fig2, fig3, fig4, fig5 = [], [], [], []
    for a in alphas:
        pa = base.with_alpha(float(a))
        mu_star = _mu_star(pa)
        st = market_state(StrategyProfile(1.0, mu_star), pa)
        fig2.append([float(a), mu_star, st.w_A, st.w_B, 1.0 - st.w_B / st.w_A])
        fig3.append([float(a), mu_star, st.s_AR, st.s_AG, st.s_BR, st.s_BG])
        mu_sym = solve_symmetric(pa)
        w_seg = welfare(StrategyProfile(1.0, mu_star), pa)
        w_int = welfare(StrategyProfile(mu_sym, mu_sym), pa)
        fig4.append([float(a), mu_star, mu_sym, w_seg, w_int,
                     w_int / w_seg - 1.0])
        worst_seg = st.Pi_BG
        worst_int = market_state(StrategyProfile(mu_sym, mu_sym), pa).Pi_BG
        fig5.append([float(a), worst_int / worst_seg - 1.0])

    write_table(cfg["out"], "fig2", cfg["format"], meta,
                ["alpha", "mu_star", "w_A", "w_B", "wage_gap"], fig2)
    write_table(cfg["out"], "fig3", cfg["format"], meta,
                ["alpha", "mu_star", "s_AR", "s_AG", "s_BR", "s_BG"], fig3)
    write_table(cfg["out"], "fig4", cfg["format"], meta,
                ["alpha", "mu_star", "mu_symmetric", "W_segregated",
                 "W_integrated", "integration_gain"], fig4)
    write_table(cfg["out"], "fig5", cfg["format"], meta,
                ["alpha", "maximin_gain"], fig5)
    return 0


def cmd_welfare(cfg: dict[str, object]) -> int:
    params = _params_from(cfg)
    rep = welfare_report(params, grid_n=max(int(cfg["grid"]), 200))
    columns = [
        "alpha", "W_laissez_faire", "mu_star", "mu_symmetric",
        "first_best_mu_R", "first_best_mu_G", "first_best_kind",
        "first_best_value", "first_best_ties", "concavity_condition_holds",
        "integration_gain_I", "maximin_gain", "symmetric_multiplicity",
    ]
    rows = [[
        params.alpha, rep.W_value, rep.mu_star, rep.mu_symmetric,
        rep.first_best_profile.mu_R, rep.first_best_profile.mu_G,
        rep.first_best_kind.value, rep.first_best_value,
        len(rep.first_best_ties), rep.concavity_condition_holds,
        rep.integration_gain_I, rep.maximin_gain, rep.symmetric_multiplicity,
    ]]
    write_table(cfg["out"], "welfare", cfg["format"],
                _meta(cfg, "welfare"), columns, rows)
    return 0


def cmd_calibrate(cfg: dict[str, object]) -> int:
    params = _params_from(cfg)
    alpha_hat = find_alpha_hat(params)
    rows = [
        ["s0", params.s0],
        ["c1(p+kappa)", params.c1_pk],
        ["c1*lambda", params.c1_lam],
        ["rho", params.rho],
        ["theta", params.theta],
        ["c0", params.c0],
        ["s_H", params.s_H],
        ["s_L", params.s_L],
        ["alpha_hat", alpha_hat],
        ["wage_gap_at_alpha_hat", 2.0 - 1.0 / alpha_hat],
    ]
    write_table(cfg["out"], "calibration", cfg["format"],
                _meta(cfg, "calibrate"), ["parameter", "value"], rows)
    return 0


def cmd_sensitivity(cfg: dict[str, object]) -> int:
    params = _params_from(cfg)
    table = elasticities(params, rel_step=cfg["rel_step"])
    columns = [
        "parameter", "value", "elasticity_alpha_hat", "elasticity_wage_gap",
        "forward_elasticity_alpha_hat", "forward_elasticity_wage_gap",
        "methods_disagree",
    ]
    rows = [
        [r.parameter, r.value, r.elasticity_alpha_hat, r.elasticity_wage_gap,
         r.forward_elasticity_alpha_hat, r.forward_elasticity_wage_gap,
         r.methods_disagree]
        for r in table.rows
    ]
    meta = _meta(cfg, "sensitivity",
                 alpha_hat=table.alpha_hat, wage_gap=table.wage_gap)
    write_table(cfg["out"], "sensitivity", cfg["format"], meta, columns, rows)
    return 0


def cmd_mc(cfg: dict[str, object]) -> int:
    c1 = cfg["c1"] if cfg["c1"] is not None else 25.0
    base = dict(cfg)
    base["c1"] = c1
    params = _params_from(base)
    pop = netmc.generate_population(
        int(cfg["n"]), StrategyProfile(1.0, 0.0), params, seed=int(cfg["seed"])
    )
    res = netmc.simulate_labor(
        pop, params,
        burn_in=cfg["burn_in"], horizon=cfg["horizon"],
        replications=int(cfg["replications"]), probes=int(cfg["probes"]),
    )
    columns = ["group", "education", "n_agents", "probe", "mean_x",
               "employment", "half_width"]
    rows = [
        [c.group, c.education, c.n_agents, c.probe, c.mean_x,
         c.employment, c.half_width]
        for c in (res.cells[k] for k in sorted(res.cells))
    ]
    meta = _meta(cfg, "mc", backend=res.backend, c1=c1)
    write_table(cfg["out"], "mc_cells", cfg["format"], meta, columns, rows)
    return 0


COMMANDS = {
    "equilibria": cmd_equilibria,
    "sweep": cmd_sweep,
    "welfare": cmd_welfare,
    "calibrate": cmd_calibrate,
    "sensitivity": cmd_sensitivity,
    "mc": cmd_mc,
}


OUTPUT_COLUMNS = {
    "equilibria": (
        "equilibria: mu_R, mu_G, kind, satisfies_conditions, stable, "
        "det_jacobian, J_RR, J_RG, J_GR, J_GG, s_AR, s_AG, s_BR, s_BG, "
        "L_A, L_B, w_A, w_B, Pi_AR, Pi_AG, Pi_BR, Pi_BG, dPi_R, dPi_G"
    ),
    "sweep": (
        "fig1: alpha, mu_G, gap_G (payoff gap of the mixing group at mu_R=1)\n"
        "fig2: alpha, mu_star, w_A, w_B, wage_gap\n"
        "fig3: alpha, mu_star, s_AR, s_AG, s_BR, s_BG\n"
        "fig4: alpha, mu_star, mu_symmetric, W_segregated, W_integrated, "
        "integration_gain\n"
        "fig5: alpha, maximin_gain"
    ),
    "welfare": (
        "welfare: alpha, W_laissez_faire, mu_star, mu_symmetric, "
        "first_best_mu_R, first_best_mu_G, first_best_kind, "
        "first_best_value, first_best_ties, concavity_condition_holds, "
        "integration_gain_I, maximin_gain, symmetric_multiplicity"
    ),
    "calibrate": "calibration: parameter, value",
    "sensitivity": (
        "sensitivity: parameter, value, elasticity_alpha_hat, "
        "elasticity_wage_gap, forward_elasticity_alpha_hat, "
        "forward_elasticity_wage_gap, methods_disagree"
    ),
    "mc": (
        "mc_cells: group, education, n_agents, probe, mean_x, employment, "
        "half_width"
    ),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occseg",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(
            name,
            help=f"run the {name} analysis",
            epilog="output columns --\n" + OUTPUT_COLUMNS[name],
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--seed", type=int, help="RNG seed")
        p.add_argument("--alpha", type=float, help="Cobb-Douglas share of A")
        p.add_argument("--grid", type=int, help="grid resolution")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default csv)")
        p.add_argument("--tol", type=float, help="equilibrium tolerance")
        p.add_argument("--c1", type=float,
                       help="explicit friend-arrival rate; implies a "
                            "probability split usable by mc")
        if name == "sweep":
            p.add_argument("--alpha-min", dest="alpha_min", type=float)
            p.add_argument("--alpha-max", dest="alpha_max", type=float)
            p.add_argument("--alpha-steps", dest="alpha_steps", type=int)
            p.add_argument("--mu-steps", dest="mu_steps", type=int)
        if name == "sensitivity":
            p.add_argument("--rel-step", dest="rel_step", type=float)
        if name == "mc":
            p.add_argument("--n", type=int, help="population size")
            p.add_argument("--burn-in", dest="burn_in", type=float)
            p.add_argument("--horizon", type=float)
            p.add_argument("--replications", type=int)
            p.add_argument("--probes", type=int,
                           help="probe agents per empty cell")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"occseg: config error: {exc}", file=sys.stderr)
        return 2
    except OccsegError as exc:
        print(f"occseg: solver error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"occseg: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"occseg: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
