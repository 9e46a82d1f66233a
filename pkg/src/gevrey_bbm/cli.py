"""Batch front door: config files, verification subcommands, CSV/JSON output.

Usage:
    gevrey-bbm <simulate|verify-identities|conservation|radius|schedule|sweep>
               --config PATH [--key value ...]

Config files are flat ``key = value`` text with INI-style sections (sections
are organizational only; keys are globally flat).  Every key can also be
overridden on the command line by a flag of the same name.  Every run embeds
the full resolved config and seed in its JSON output for reproducibility.

Exit-code map (public contract): 0 ok, 2 config error, 3 simulation failure,
4 identity violation, 5 insufficient data, 6 cross-check failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor


from . import analytics, errors, evolution, identities
from .multipliers import GevreyWeight, ModelParams, SymbolKind
from .spectral import Grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_IDENTITY = 4
EXIT_DATA = 5
EXIT_CROSSCHECK = 6

COMMON_DEFAULTS = {
    "n_points": "256",
    "domain_length": "64.0",
    "alpha": "2.0",
    "dt": "1e-3",
    "t_end": "10.0",
    "sigma": "0.1",
    "s": "0.0",
    "kind": "cosh",
    "data": "gaussian",
    "amplitude": "0.5",
    "width": "4.0",
    "sample_every": "100",
    "seed": "20240823",
    "noise_floor": "1e-14",
    "linear": "false",
    "output_csv": "",
    "output_json": "",
    "sigma_grid": "0.01,0.0207,0.0429,0.0889,0.1842,0.3",
    "alpha_grid": "2.0",
    "k_max": "20",
    "coordinate_range": "10",
    "symbolic_k_max": "6",
    "fab_samples": "10000",
    "fab_sigmas": "0.01,0.1,0.5",
    "T": "100.0",
    "sigma0": "1.0",
    "C1": "",
    "C2": "",
    "u0_norm": "1.0",
    "delta": "",
    "jobs": "1",
}


def load_config(path: str | None) -> dict[str, str]:
    resolved = dict(COMMON_DEFAULTS)
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise errors.InvalidInput(f"config file not found: {path}")
        for section in [parser.defaults()] + [parser[s] for s in parser.sections()]:
            for key, value in dict(section).items():
                resolved[key] = value
    return resolved


def apply_overrides(config: dict[str, str], extra: list[str]) -> dict[str, str]:
    if len(extra) % 2 != 0:
        raise errors.InvalidInput(f"dangling override flag: {extra[-1]!r}")
    for flag, value in zip(extra[::2], extra[1::2]):
        if not flag.startswith("--"):
            raise errors.InvalidInput(f"expected --key value overrides, got {flag!r}")
        config[flag[2:].replace("-", "_")] = value
    return config


def _floats(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def _bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _grid(config) -> Grid:
    return Grid(int(config["n_points"]), float(config["domain_length"]))


def _weight(config) -> GevreyWeight:
    kind = SymbolKind.COSH if config["kind"] == "cosh" else SymbolKind.EXP
    return GevreyWeight(float(config["sigma"]), float(config["s"]), kind)


def _initial_data(config, grid: Grid):
    name = config["data"]
    if name not in evolution.INITIAL_DATA:
        raise errors.InvalidInput(f"unknown initial data {name!r}")
    factory = evolution.INITIAL_DATA[name]
    if name == "cosine":
        return factory(grid, float(config["amplitude"]))
    return factory(grid, float(config["amplitude"]), float(config["width"]))


def _calibration(config) -> analytics.Calibration:
    cal = analytics.default_calibration()
    c1 = float(config["C1"]) if config["C1"] else cal.c1
    c2 = float(config["C2"]) if config["C2"] else cal.c2
    return analytics.Calibration(c1=c1, c2=c2, alpha=cal.alpha,
                                 sigma_ref=cal.sigma_ref, n_points=cal.n_points,
                                 domain_length=cal.domain_length, seed=cal.seed)


def write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


CSV_HEADER = ["t", "l2", "h1", "energy", "h1_invariant", "sigma_est"]


def cmd_simulate(config: dict[str, str]) -> int:
    grid = _grid(config)
    weight = _weight(config)
    params = ModelParams(float(config["alpha"]), grid,
                         float(config["dt"]), float(config["t_end"]))
    u0 = _initial_data(config, grid)
    traj = evolution.simulate(u0, params, weight,
                              sample_every=int(config["sample_every"]),
                              linear=_bool(config["linear"]))
    rows = []
    for t, state, report in zip(traj.times, traj.states, traj.reports):
        try:
            lo, hi = analytics.default_band(state, float(config["noise_floor"]))
            sigma_est, _ = analytics.estimate_radius(
                state, lo, hi, float(config["noise_floor"]))
        except (errors.SpectrumTooThin, errors.InvalidInput):
            sigma_est = math.nan
        rows.append([repr(float(t)), repr(report.l2), repr(report.h1),
                     repr(report.energy), repr(report.h1_invariant),
                     repr(sigma_est)])
    if config["output_csv"]:
        with open(config["output_csv"], "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    final = traj.reports[-1]
    write_json(config["output_json"], {
        "config": config,
        "samples": len(rows),
        "final": {"t": float(traj.times[-1]), "l2": final.l2, "h1": final.h1,
                  "energy": final.energy, "h1_invariant": final.h1_invariant},
    })
    return EXIT_OK


def cmd_verify_identities(config: dict[str, str]) -> int:
    k_max = int(config["k_max"])
    coordinate_range = int(config["coordinate_range"])
    report = identities.verify_factor_identity(
        k_max, coordinate_range, symbolic_k_max=int(config["symbolic_k_max"]))
    fab = {}
    for sigma in _floats(config["fab_sigmas"]):
        cal = identities.check_fab_bound(int(config["fab_samples"]), sigma,
                                         seed=int(config["seed"]))
        fab[repr(sigma)] = {"max_ratio": cal.max_ratio, "usable": cal.usable}
    write_json(config["output_json"], {
        "config": config,
        "identity": {
            "k_max": report.k_max,
            "coordinate_range": coordinate_range,
            "triads_tested": report.triads_tested,
            "all_equal": report.all_equal,
            "max_defect": str(report.max_defect),
            "special_cases": {
                "k=1": "3·ξ₁ξ₂ξ₃",
                "k=2": "−5·ξ₁ξ₂ξ₃·e₂",
            },
        },
        "series_bound": fab,
    })
    return EXIT_OK


def cmd_conservation(config: dict[str, str]) -> int:
    grid = _grid(config)
    cal = _calibration(config)
    alpha = float(config["alpha"])
    u0 = _initial_data(config, grid)
    params = ModelParams(alpha, grid, float(config["dt"]), float(config["t_end"]))
    if config["delta"]:
        delta = float(config["delta"])
    else:
        delta = evolution.lifespan(u0, _weight(config), alpha, cal.c1)
    sigmas = _floats(config["sigma_grid"])
    if len(sigmas) == 1:
        reports = [analytics.measure_defect(u0, sigmas[0], delta, params,
                                            c_cal=cal.c2)]
        slope = None
    else:
        slope, reports = analytics.defect_scaling_fit(u0, sigmas, delta, params,
                                                      c_cal=cal.c2)
    write_json(config["output_json"], {
        "config": config,
        "delta": delta,
        "calibration": {"c1": cal.c1, "c2": cal.c2},
        "slope": slope,
        "reports": [
            {"sigma": r.sigma, "defect": r.defect, "defect_abs": r.defect_abs,
             "predicted_bound": r.predicted_bound,
             "bound_satisfied": r.bound_satisfied}
            for r in reports
        ],
    })
    return EXIT_OK


def cmd_radius(config: dict[str, str]) -> int:
    grid = _grid(config)
    weight = _weight(config)
    params = ModelParams(float(config["alpha"]), grid,
                         float(config["dt"]), float(config["t_end"]))
    u0 = _initial_data(config, grid)
    traj = evolution.simulate(u0, params, weight,
                              sample_every=int(config["sample_every"]),
                              linear=_bool(config["linear"]))
    fit = analytics.track_radius(traj, noise_floor=float(config["noise_floor"]))
    write_json(config["output_json"], {
        "config": config,
        "mu_fit": fit.mu_fit,
        "c_fit": fit.c_fit,
        "c_check": fit.c_check,
        "pointwise_ok": fit.pointwise_ok,
        "band": list(fit.band),
        "samples": [list(s) for s in fit.samples],
    })
    return EXIT_OK


def cmd_schedule(config: dict[str, str]) -> int:
    cal = _calibration(config)
    result = analytics.schedule_sigma(
        float(config["T"]), float(config["sigma0"]), cal.c1, cal.c2,
        alpha=float(config["alpha"]), u0_norm=float(config["u0_norm"]))
    write_json(config["output_json"], {
        "config": config,
        "horizon_T": result.horizon_T,
        "n_steps": result.n_steps,
        "delta": result.delta,
        "sigma_assigned": result.sigma_assigned,
        "per_step_checks": [list(c) for c in result.per_step_checks],
        "all_checks_ok": all(c[3] for c in result.per_step_checks),
    })
    return EXIT_OK


def _sweep_task(task: dict) -> tuple[str, dict]:
    grid = Grid(task["n_points"], task["domain_length"])
    params = ModelParams(task["alpha"], grid, task["dt"], task["delta"])
    factory = evolution.INITIAL_DATA[task["data"]]
    u0 = factory(grid, task["amplitude"], task["width"])
    report = analytics.measure_defect(u0, task["sigma"], task["delta"],
                                      params, c_cal=task["c2"])
    key = f"alpha={task['alpha']!r},sigma={task['sigma']!r}"
    return key, {
        "alpha": task["alpha"],
        "sigma": task["sigma"],
        "defect": report.defect,
        "defect_abs": report.defect_abs,
        "predicted_bound": report.predicted_bound,
        "bound_satisfied": report.bound_satisfied,
    }


def cmd_sweep(config: dict[str, str]) -> int:
    grid = _grid(config)
    cal = _calibration(config)
    tasks = []
    for alpha in _floats(config["alpha_grid"]):
        u0 = _initial_data(config, grid)
        if config["delta"]:
            delta = float(config["delta"])
        else:
            delta = evolution.lifespan(u0, _weight(config), alpha, cal.c1)
        for sigma in _floats(config["sigma_grid"]):
            tasks.append({
                "n_points": grid.n_points,
                "domain_length": grid.domain_length,
                "alpha": alpha, "sigma": sigma, "delta": delta,
                "dt": float(config["dt"]), "data": config["data"],
                "amplitude": float(config["amplitude"]),
                "width": float(config["width"]), "c2": cal.c2,
            })
    jobs = int(config["jobs"])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(task) for task in tasks]
    write_json(config["output_json"], {
        "config": config,
        "calibration": {"c1": cal.c1, "c2": cal.c2},
        "results": dict(sorted(results)),
    })
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "verify-identities": cmd_verify_identities,
    "conservation": cmd_conservation,
    "radius": cmd_radius,
    "schedule": cmd_schedule,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gevrey-bbm", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="key = value config file")
    args, extra = parser.parse_known_args(argv)
    try:
        config = apply_overrides(load_config(args.config), extra)
    except (errors.InvalidInput, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](config)
    except (errors.InvalidInput, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except errors.BlowupDetected as exc:
        write_json(config["output_json"],
                   {"config": config, "error": "blowup", "time": exc.time})
        print(f"simulation failure: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except (errors.NoConvergence, errors.OverflowRisk) as exc:
        print(f"simulation failure: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except errors.IdentityViolation as exc:
        print(f"identity violation: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (errors.InsufficientData, errors.SpectrumTooThin,
            errors.NoFit, errors.SeriesDivergence) as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except errors.CrossCheckFailure as exc:
        print(f"cross-check failure: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK


if __name__ == "__main__":
    sys.exit(main())
