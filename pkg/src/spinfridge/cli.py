"""Command-line interface: config-driven runs emitting CSV/JSON with provenance.

Commands: single, evolve, optimize, scaling, markov, validate.  Every output
carries the fully resolved configuration and the library version; identical
configs (and seeds) produce byte-identical files.  Exit codes: 0 success,
1 configuration error, 2 numerical or physics failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .analysis import (
    coupling_engine_factory,
    first_local_min,
    fit_power_law,
    neville_extrapolate,
    neville_lower_diagonal_diffs,
    optimize_t1,
    scaling_sweep,
)
from .config import ConfigError, RunConfig, dump_canonical, load_config
from .engine import RefrigeratorEngine
from .markov import (
    integrate_gksl,
    markov_optimize,
    temperature_trajectories,
    thermal_product_state,
)
from .oracle import build_dense, dense_evolve_and_trace
from .spinstar import (
    SingleStarParams,
    ground_population_series,
    heat_current_series,
    reduced_bath_populations,
    reduced_spin_state,
    temperature_array,
)
from . import thermo

ORACLE_TOLERANCE = 1e-9


def _provenance_lines(config: RunConfig) -> list[str]:
    return [f"# spinfridge {__version__}", f"# config: {dump_canonical(config)}"]


def _write_csv(path: str, config: RunConfig, header: list[str], columns) -> None:
    lines = _provenance_lines(config)
    lines.append(",".join(header))
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, config: RunConfig, results: dict) -> None:
    payload = {
        "version": __version__,
        "config": json.loads(dump_canonical(config)),
        "results": results,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_single(config: RunConfig) -> None:
    params = config.single
    times = config.time_grid.points()
    r = ground_population_series(params, times)
    temps = temperature_array(r, params.epsilon)
    qdot_s, qdot_b = heat_current_series(params, times)
    _write_csv(
        config.output_path,
        config,
        ["t", "T1", "r1", "QdotS1", "QdotB1"],
        [times, temps, r, qdot_s, qdot_b],
    )


def _run_evolve(config: RunConfig) -> None:
    engine = RefrigeratorEngine(config.refrigerator, prune_tol=config.prune_tol)
    times = config.time_grid.points()
    series = [engine.temperature_series(i, times) for i in (1, 2, 3)]
    currents = thermo.heat_current_series(engine, times)
    header = (
        ["t", "T1", "T2", "T3", "r1", "r2", "r3"]
        + ["QdotS1", "QdotS2", "QdotS3", "QdotB1", "QdotB2", "QdotB3"]
    )
    columns = (
        [times]
        + [s.temperature for s in series]
        + [s.ground_population for s in series]
        + [currents.qdot_s[k] for k in range(3)]
        + [currents.qdot_b[k] for k in range(3)]
    )
    _write_csv(config.output_path, config, header, columns)


def _run_optimize(config: RunConfig) -> None:
    opt = config.optimization
    factory = coupling_engine_factory(config.refrigerator, config.prune_tol)
    ranges = (opt.coupling_range,) * 3 + (opt.g_range,)
    grid = config.time_grid
    result = optimize_t1(
        factory,
        ranges=ranges,
        budget=opt.budget,
        seed=opt.seed,
        time_grid=(grid.start, grid.stop, grid.step),
    )
    _write_json(config.output_path, config, {
        "best_coupling": [float(v) for v in result.best_params[:3]],
        "best_g": float(result.best_params[3]),
        "best_time": result.best_time,
        "best_t1": result.best_t1,
        "best_ground_population": result.best_ground_population,
        "evaluations": result.evaluations,
        "restarts": result.restarts,
    })


def _run_scaling(config: RunConfig) -> None:
    opt = config.optimization
    grid = config.time_grid
    report = scaling_sweep(
        config.refrigerator,
        config.n_list,
        per_n_budget=opt.budget,
        seed=opt.seed,
        prune_tol=max(config.prune_tol, 1e-9),
        time_grid=(grid.start, grid.stop, grid.step),
    )
    ns, t1 = report.table()
    _, tl = report.local_min_table()
    rows = [
        {
            "n": row.n,
            "best_coupling": [float(v) for v in row.best_params[:3]],
            "best_g": float(row.best_params[3]),
            "best_time": row.best_time,
            "best_t1": row.best_t1,
            "local_min_time": row.local_min_time,
            "local_min_t1": row.local_min_t1,
            "evaluations": row.evaluations,
        }
        for row in report.rows
    ]
    results: dict = {"sweep": rows}
    h = 1.0 / ns
    tab = neville_extrapolate(h, t1, 0.0)
    results["neville_t1"] = {
        "h": list(h),
        "values": list(t1),
        "extrapolated": tab.extrapolated,
        "d_chain": [float(v) for v in neville_lower_diagonal_diffs(tab)],
        "stability_warning": tab.stability_warning,
    }
    tab_tl = neville_extrapolate(h, tl, 0.0)
    results["neville_local_min_time"] = {
        "extrapolated": tab_tl.extrapolated,
        "stability_warning": tab_tl.stability_warning,
    }
    if len(ns) >= 4:
        try:
            t_inf = "plateau" if np.any(ns >= 35) else tab.extrapolated
            fit = fit_power_law(ns, t1, t_inf=t_inf)
            results["t1_fit"] = {
                "t_inf": fit.t_inf, "a": fit.a, "b": fit.b,
                "sigma": fit.sigma, "n_points": fit.n_points,
            }
        except ValueError as exc:
            results["t1_fit"] = {"error": str(exc)}
        try:
            fit_tl = fit_power_law(ns, tl, t_inf=tab_tl.extrapolated)
            results["local_min_time_fit"] = {
                "t_inf": fit_tl.t_inf, "a": fit_tl.a, "b": fit_tl.b,
                "sigma": fit_tl.sigma, "n_points": fit_tl.n_points,
            }
        except ValueError as exc:
            results["local_min_time_fit"] = {"error": str(exc)}
    _write_json(config.output_path, config, results)


def _run_markov(config: RunConfig) -> None:
    params = config.markov
    times = config.time_grid.points()
    if config.markov_action == "optimize":
        opt = config.optimization
        grid = config.time_grid
        result = markov_optimize(
            params,
            alpha_range=opt.alpha_range,
            g_range=opt.g_range,
            budget=opt.budget,
            seed=opt.seed,
            time_grid=(grid.start, grid.stop, grid.step),
        )
        _write_json(config.output_path, config, {
            "best_alpha": list(result.alpha),
            "best_g": result.g,
            "best_time": result.best_time,
            "best_t1": result.best_t1,
            "evaluations": result.evaluations,
            "restarts": result.restarts,
        })
        return
    traj = integrate_gksl(params, thermal_product_state(params), times)
    r, temps = temperature_trajectories(params, traj)
    _write_csv(
        config.output_path,
        config,
        ["t", "T1", "T2", "T3", "r1", "r2", "r3"],
        [times, temps[0], temps[1], temps[2], r[0], r[1], r[2]],
    )


def _validate_single_star(report: dict) -> float:
    worst = 0.0
    cases = []
    for n in (1, 2, 3):
        for eps, bath_e in ((1.0, 2.0), (2.0, 1.0)):
            cases.append(SingleStarParams(eps, bath_e, 0.5, n, 1.0))
    for params in cases:
        model = build_dense(params)
        spectrum = model.spectrum()
        for t in (0.0, 0.7, 3.1):
            spin = np.max(np.abs(
                dense_evolve_and_trace(model, t, 0, spectrum=spectrum)
                - reduced_spin_state(params, t)
            ))
            bath = np.max(np.abs(
                np.diag(dense_evolve_and_trace(model, t, 1, spectrum=spectrum)).real
                - reduced_bath_populations(params, t)
            ))
            worst = max(worst, float(spin), float(bath))
    report["single_star_max_deviation"] = worst
    return worst


def _validate_refrigerator(config: RunConfig, report: dict) -> float:
    params = config.refrigerator
    model = build_dense(params)
    spectrum = model.spectrum()
    engine = RefrigeratorEngine(params, prune_tol=0.0)
    worst = 0.0
    for t in (0.0, 2.0, 5.0):
        for qubit in (1, 2, 3):
            dev_q = np.max(np.abs(
                dense_evolve_and_trace(model, t, 2 * (qubit - 1), spectrum=spectrum)
                - engine.reduced_qubit_state(qubit, t)
            ))
            dev_b = np.max(np.abs(
                np.diag(dense_evolve_and_trace(model, t, 2 * qubit - 1,
                                               spectrum=spectrum)).real
                - engine.reduced_bath_populations(qubit, t)
            ))
            worst = max(worst, float(dev_q), float(dev_b))
    report["refrigerator_max_deviation"] = worst
    report["refrigerator_dense_dimension"] = model.dimension
    return worst


def _run_validate(config: RunConfig) -> None:
    report: dict = {"tolerance": ORACLE_TOLERANCE}
    worst = _validate_single_star(report)
    worst = max(worst, _validate_refrigerator(config, report))
    report["max_deviation"] = worst
    report["passed"] = bool(worst < ORACLE_TOLERANCE)
    _write_json(config.output_path, config, report)
    if not report["passed"]:
        raise RuntimeError(
            f"oracle validation failed: max deviation {worst:.3e} "
            f"exceeds {ORACLE_TOLERANCE:.1e}"
        )


_RUNNERS = {
    "single": _run_single,
    "evolve": _run_evolve,
    "optimize": _run_optimize,
    "scaling": _run_scaling,
    "markov": _run_markov,
    "validate": _run_validate,
}


def run(config: RunConfig) -> None:
    """Execute one validated configuration."""
    _RUNNERS[config.mode](config)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinfridge",
        description="Spin-star absorption refrigerator simulations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("single", "single qubit-bath pair time series"),
        ("evolve", "three-qubit refrigerator time series"),
        ("optimize", "minimize the cold-qubit temperature over couplings"),
        ("scaling", "optimal temperature versus bath size, fit and extrapolation"),
        ("markov", "Markovian master-equation baseline"),
        ("validate", "compare sector dynamics against the dense brute-force model"),
    ):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("config", help="path to the JSON run configuration")
        cmd.add_argument("--output", help="override output.path from the config")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.command)
        if args.output:
            object.__setattr__(config, "output_path", args.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical/physics failures map to exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {config.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
