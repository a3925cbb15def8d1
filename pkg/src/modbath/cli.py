"""Command-line front end: scenario configuration, figure regeneration,
self-test execution, CSV emission.

    modbath <scenario> [--config file.json] [--out dir] [--seed N] [--key value ...]

Scenarios: two-level, spin-bath, ion-heating, fig2, fig3, selftest.
Configuration is a flat JSON object; flags mirror config keys and win
over file values (defaults < file < flags).  Unknown keys are rejected.

Exit codes: 0 success, 1 selftest invariant failure, 2 config error,
3 numeric error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import selftest as selftest_mod
from .ion_heating import HeatingParams, fidelity_curve
from .numerics import NumericError, TimeGrid
from .spin_bath import (BathParams, DensityMatrix2, SpinParams,
                        coherence_lifetime, evolve_rho, relaxation_coefficient,
                        steady_state_excited)
from .specfun import ModulationParams, j0_zero
from .two_level import TwoLevelParams, evolve, fitted_decay_rate, \
    predicted_population_rate
from .numerics import period_average

FORMAT_VERSION = 1

EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


SCENARIOS = ("two-level", "spin-bath", "ion-heating", "fig2", "fig3", "selftest")


def _defaults(scenario: str) -> dict:
    if scenario == "fig2":
        return {"g": 1.0, "kappa": 10.0, "m": j0_zero(5),
                "nu_over_pi_g": [20.0, 5.0, 0.5, 0.05]}
    if scenario == "fig3":
        return {"omega0": 1.0, "kappa": 1.0, "Omega": math.sqrt(2.0),
                "m": j0_zero(1), "nu_list": [5.0, 3.0], "t_max": 10.0,
                "method": "analytic", "n_traj": 4000}
    if scenario == "two-level":
        return {"g": 1.0, "kappa": 10.0, "m": j0_zero(5), "nu": 20.0 * math.pi,
                "t_max": None}
    if scenario == "spin-bath":
        return {"kappa_b": 1.0, "omega": 1.0, "omega0": 1.0,
                "c0_minus_plus": 1.0, "c0_plus_minus": 0.5,
                "m": j0_zero(1), "nu": 10.0, "t_max": None}
    if scenario == "ion-heating":
        return {"omega0": 1.0, "kappa": 1.0, "Omega": math.sqrt(2.0),
                "m": j0_zero(1), "nu": 5.0, "t_max": 10.0,
                "method": "analytic", "n_traj": 4000}
    if scenario == "selftest":
        return {}
    raise ConfigError(f"unknown scenario '{scenario}'")

_POSITIVE_KEYS = {"g", "kappa", "kappa_b", "omega0", "nu", "t_max"}
_NONNEGATIVE_KEYS = {"Omega", "m", "c0_minus_plus", "c0_plus_minus"}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    parameters: dict
    output_path: str
    seed: int
    format_version: int = FORMAT_VERSION


def _validate(scenario: str, params: dict) -> None:
    for key, value in params.items():
        if key in _POSITIVE_KEYS and value is not None:
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigError(f"key '{key}' must be a positive number")
        if key in _NONNEGATIVE_KEYS:
            if not isinstance(value, (int, float)) or value < 0:
                raise ConfigError(f"key '{key}' must be a nonnegative number")
    if params.get("method") not in (None, "analytic", "mc"):
        raise ConfigError("key 'method' must be 'analytic' or 'mc'")
    if "n_traj" in params and (not isinstance(params["n_traj"], int)
                               or params["n_traj"] < 100):
        raise ConfigError("key 'n_traj' must be an integer >= 100")
    for key in ("nu_list", "nu_over_pi_g"):
        if key in params:
            vals = params[key]
            if (not isinstance(vals, list) or not vals
                    or any(not isinstance(v, (int, float)) or v <= 0 for v in vals)):
                raise ConfigError(f"key '{key}' must be a list of positive numbers")


def parse_config(text: str, scenario: str | None = None, overrides: dict | None = None,
                 output_path: str = ".", seed: int = 0) -> ScenarioConfig:
    """Strict parse of a flat JSON config document into a ScenarioConfig.

    Unknown keys are rejected; a 'scenario' key in the file must agree
    with the scenario given on the command line (if any).
    """
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    file_scenario = doc.pop("scenario", None)
    if file_scenario is not None:
        if file_scenario not in SCENARIOS:
            raise ConfigError(f"key 'scenario': unknown scenario '{file_scenario}'")
        if scenario is not None and file_scenario != scenario:
            raise ConfigError("key 'scenario': config file disagrees with command line")
        scenario = file_scenario
    if scenario is None:
        raise ConfigError("no scenario given")
    params = _defaults(scenario)
    for source in (doc, overrides or {}):
        for key, value in source.items():
            if key not in params:
                raise ConfigError(f"unknown key '{key}' for scenario '{scenario}'")
            params[key] = value
    _validate(scenario, params)
    return ScenarioConfig(scenario=scenario, parameters=params,
                          output_path=output_path, seed=seed)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: str, config: ScenarioConfig, columns, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# modbath-format v{config.format_version}\n")
        fh.write(f"# scenario = {config.scenario}\n")
        for key in sorted(config.parameters):
            fh.write(f"# {key} = {_fmt(config.parameters[key])}\n")
        fh.write(f"# seed = {config.seed}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")


def _two_level_curve(params: TwoLevelParams, t_max=None):
    """Population trajectory plus its period-averaged envelope."""
    pred = predicted_population_rate(params)
    if t_max is None:
        t_max = min(3.0 / pred, 1e4 / params.g)
    grid = TimeGrid.from_fastest(t_max, params.omega_fast)
    store_every = max(1, grid.n_steps // 200000)
    if params.mod.m > 0:
        # keep at least 8 stored samples per modulation period for smoothing
        store_every = max(1, min(store_every,
                                 int(params.mod.period / (8.0 * grid.dt))))
    traj = evolve(params, grid, store_every=store_every)
    pop = np.abs(traj.states[:, 0]) ** 2
    t = traj.times
    if params.mod.m > 0 and params.mod.period <= (t[-1] - t[0]) / 8.0:
        t_s, pop_s = period_average(t, pop, params.mod.period)
        pop_smooth = np.interp(t, t_s, pop_s)
    else:
        pop_smooth = pop
    return t, pop, pop_smooth


def _run_fig2(config: ScenarioConfig) -> None:
    p = config.parameters
    curves = [(f"fig2_nu_over_pi_{r:g}.csv",
               ModulationParams(m=p["m"], nu=r * math.pi * p["g"]))
              for r in p["nu_over_pi_g"]]
    curves.append(("fig2_unmodulated.csv", ModulationParams(m=0.0, nu=1.0)))
    for fname, mod in curves:
        tl = TwoLevelParams(g=p["g"], kappa=p["kappa"], mod=mod)
        t, pop, smooth = _two_level_curve(tl)
        _write_csv(os.path.join(config.output_path, fname), config,
                   ("t", "pop_a", "pop_a_smoothed"), zip(t, pop, smooth))
        rate, resid = fitted_decay_rate(tl)
        label = f"nu={mod.nu:g}" if mod.m > 0 else "m=0"
        print(f"fig2 {label}: fitted rate {rate:.6g} (ln-residual {resid:.2g}) "
              f"-> {fname}")


def _run_fig3(config: ScenarioConfig) -> None:
    p = config.parameters
    runs = [(f"fig3_nu_{nu:g}.csv", ModulationParams(m=p["m"], nu=nu))
            for nu in p["nu_list"]]
    runs.append(("fig3_unmodulated.csv", ModulationParams(m=0.0, nu=1.0)))
    for fname, mod in runs:
        hp = HeatingParams(omega0=p["omega0"], kappa=p["kappa"], Omega=p["Omega"],
                           mod=mod)
        grid = TimeGrid.from_fastest(p["t_max"], hp.omega_fast)
        result = fidelity_curve(hp, grid, method=p["method"], n_traj=p["n_traj"],
                                seed=config.seed, n_workers=_n_workers())
        if p["method"] == "analytic":
            t, f = result
            cols, rows = ("t", "F"), zip(t, f)
        else:
            t, f, f_err = result
            cols, rows = ("t", "F", "F_err"), zip(t, f, f_err)
        _write_csv(os.path.join(config.output_path, fname), config, cols, rows)
        label = f"nu={mod.nu:g}" if mod.m > 0 else "unmodulated"
        print(f"fig3 {label}: final fidelity {f[-1]:.6g} -> {fname}")


def _run_two_level(config: ScenarioConfig) -> None:
    p = config.parameters
    mod = ModulationParams(m=p["m"], nu=p["nu"]) if p["m"] > 0 \
        else ModulationParams(m=0.0, nu=1.0)
    tl = TwoLevelParams(g=p["g"], kappa=p["kappa"], mod=mod)
    t, pop, smooth = _two_level_curve(tl, p["t_max"])
    fname = os.path.join(config.output_path, "two_level.csv")
    _write_csv(fname, config, ("t", "pop_a", "pop_a_smoothed"),
               zip(t, pop, smooth))
    rate, resid = fitted_decay_rate(tl, p["t_max"])
    print(f"two-level: fitted rate {rate:.6g} (ln-residual {resid:.2g}) -> {fname}")


def _run_spin_bath(config: ScenarioConfig) -> None:
    p = config.parameters
    mod = ModulationParams(m=p["m"], nu=p["nu"]) if p["m"] > 0 \
        else ModulationParams(m=0.0, nu=1.0)
    bath = BathParams(kappa_b=p["kappa_b"], omega=p["omega"],
                      c0_minus_plus=p["c0_minus_plus"],
                      c0_plus_minus=p["c0_plus_minus"])
    spin = SpinParams(omega0=p["omega0"], mod=mod)
    gd = relaxation_coefficient(bath, spin, "down")
    gu = relaxation_coefficient(bath, spin, "up")
    lifetime = coherence_lifetime(gd, gu)
    t_max = p["t_max"] if p["t_max"] is not None else 5.0 * lifetime
    grid = TimeGrid.from_fastest(t_max, 20.0 / lifetime)
    rho0 = DensityMatrix2(rho_ee=1.0, rho_gg=0.0, rho_eg=0.0)
    traj = evolve_rho(gd, gu, rho0, grid)
    fname = os.path.join(config.output_path, "spin_bath.csv")
    _write_csv(fname, config,
               ("t", "rho_ee", "rho_gg", "re_rho_eg", "im_rho_eg"),
               zip(traj.times, traj.rho_ee, traj.rho_gg,
                   traj.rho_eg.real, traj.rho_eg.imag))
    print(f"spin-bath: coherence lifetime {lifetime:.6g}, steady rho_ee "
          f"{steady_state_excited(gd, gu):.6g} -> {fname}")


def _run_ion_heating(config: ScenarioConfig) -> None:
    p = config.parameters
    mod = ModulationParams(m=p["m"], nu=p["nu"]) if p["m"] > 0 \
        else ModulationParams(m=0.0, nu=1.0)
    hp = HeatingParams(omega0=p["omega0"], kappa=p["kappa"], Omega=p["Omega"],
                       mod=mod)
    grid = TimeGrid.from_fastest(p["t_max"], hp.omega_fast)
    result = fidelity_curve(hp, grid, method=p["method"], n_traj=p["n_traj"],
                            seed=config.seed, n_workers=_n_workers())
    fname = os.path.join(config.output_path, "ion_heating.csv")
    if p["method"] == "analytic":
        t, f = result
        _write_csv(fname, config, ("t", "F"), zip(t, f))
    else:
        t, f, f_err = result
        _write_csv(fname, config, ("t", "F", "F_err"), zip(t, f, f_err))
    print(f"ion-heating: final fidelity {f[-1]:.6g} -> {fname}")


def _n_workers() -> int:
    raw = os.environ.get("MODBATH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("MODBATH_THREADS must be an integer >= 0") from None
    if n < 0:
        raise ConfigError("MODBATH_THREADS must be an integer >= 0")
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return n


_RUNNERS = {
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "two-level": _run_two_level,
    "spin-bath": _run_spin_bath,
    "ion-heating": _run_ion_heating,
}


def run_scenario(config: ScenarioConfig) -> int:
    """Execute one scenario; returns the process exit status."""
    if config.scenario == "selftest":
        failures = selftest_mod.run(verbose=True)
        return EXIT_SELFTEST if failures else 0
    _RUNNERS[config.scenario](config)
    return 0


def _parse_cli(argv):
    parser = argparse.ArgumentParser(
        prog="modbath",
        description="Open-quantum-system decay/decoherence suppression by "
                    "frequency modulation of the system-bath coupling.")
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    known, extra = parser.parse_known_args(argv)

    overrides = {}
    i = 0
    while i < len(extra):
        key = extra[i]
        if not key.startswith("--") or i + 1 >= len(extra):
            raise ConfigError(f"expected '--key value' pairs, got '{key}'")
        raw = extra[i + 1]
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        overrides[key[2:]] = value
        i += 2
    return known, overrides


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        known, overrides = _parse_cli(argv)
        text = ""
        if known.config is not None:
            with open(known.config) as fh:
                text = fh.read()
        config = parse_config(text, scenario=known.scenario, overrides=overrides,
                              output_path=known.out, seed=known.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        return run_scenario(config)
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
