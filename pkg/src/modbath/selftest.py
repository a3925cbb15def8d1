"""Built-in invariant suite behind `modbath selftest`.

Each check is a cheap, self-contained property of one module; the CLI
prints one pass/fail line per property and exits nonzero on any failure.
The full pytest suite is the authoritative verification; this is the
field diagnostic.
"""

from __future__ import annotations

import numpy as np

from .ion_heating import HeatingParams, fidelity, heating_moments_analytic, \
    heating_moments_mc, integral_I
from .numerics import TimeGrid, integrate_linear
from .spin_bath import BathParams, DensityMatrix2, SpinParams, \
    coherence_lifetime, evolve_rho, relaxation_coefficient
from .specfun import ModulationParams, bessel_j, j0_zero, jacobi_anger_order, \
    phase
from .two_level import TwoLevelParams, effective_rate_sum, evolve, \
    golden_rule_rate


def _bessel_sum_rule():
    for m in np.linspace(0.0, 20.0, 9):
        n = jacobi_anger_order(m, 1e-6)
        l = np.arange(-n, n + 1)
        if abs((bessel_j(l, m) ** 2).sum() - 1.0) >= 1e-10:
            return False
    return True


def _jacobi_anger_identity():
    mod = ModulationParams(m=j0_zero(5), nu=2.0)
    n = jacobi_anger_order(mod.m, 1e-9)
    l = np.arange(-n, n + 1)
    coef = bessel_j(l, mod.m)
    t = np.linspace(0.0, mod.period, 1000, endpoint=False)
    lhs = np.exp(-1j * phase(mod, t))
    rhs = (coef[:, None] * np.exp(-1j * np.outer(l, mod.nu * t))).sum(axis=0)
    return np.max(np.abs(lhs - rhs)) < 1e-8


def _bessel_reflection():
    n = np.arange(-20, 21)
    x = 7.3
    return np.max(np.abs(bessel_j(-n, x) - (-1.0) ** n * bessel_j(n, x))) < 1e-13


def _j0_zero_residuals():
    return all(abs(bessel_j(0, j0_zero(k))) < 1e-10 for k in range(1, 51))


def _bessel_recurrence():
    x = np.linspace(0.5, 100.0, 40)
    for n in range(1, 51):
        resid = bessel_j(n - 1, x) + bessel_j(n + 1, x) - (2.0 * n / x) * bessel_j(n, x)
        if np.max(np.abs(resid)) >= 1e-10:
            return False
    return True


def _rk4_convergence():
    # scalar decay: halving dt must shrink the error ~16x (4th order)
    gen = lambda t: np.array([[-1.0 + 0.5j]])
    errs = []
    for n_pts in (40, 80):
        grid = TimeGrid(t_max=2.0, dt=2.0 / n_pts)
        traj = integrate_linear(gen, np.array([1.0 + 0j]), grid)
        exact = np.exp((-1.0 + 0.5j) * traj.times)
        errs.append(np.max(np.abs(traj.states[:, 0] - exact)))
    ratio = errs[0] / errs[1]
    return 14.0 < ratio < 18.0


def _two_level_unitarity():
    mod = ModulationParams(m=j0_zero(1), nu=5.0)
    params = TwoLevelParams(g=1.0, kappa=0.0, mod=mod)
    # 20 points per period is enough for the decay-rate work; unitarity at
    # the 1e-8 level over long spans needs the finer grid used here
    grid = TimeGrid.from_fastest(50.0, params.omega_fast, 40)
    traj = evolve(params, grid, store_every=10)
    norm = (np.abs(traj.states) ** 2).sum(axis=1)
    return np.max(np.abs(norm - 1.0)) < 1e-8


def _golden_rule():
    params = TwoLevelParams(g=1.0, kappa=10.0, mod=ModulationParams(0.0, 1.0))
    gamma = golden_rule_rate(params)
    sum0 = effective_rate_sum(params).real
    return abs(gamma - 0.1) < 1e-15 and abs(sum0 - gamma) < 1e-15

def _master_equation_properties():
    mod = ModulationParams(m=j0_zero(1), nu=10.0)
    bath = BathParams(kappa_b=1.0, omega=1.0, c0_minus_plus=1.0, c0_plus_minus=0.4)
    spin = SpinParams(omega0=1.5, mod=mod)
    gd = relaxation_coefficient(bath, spin, "down")
    gu = relaxation_coefficient(bath, spin, "up")
    rho0 = DensityMatrix2(rho_ee=0.9, rho_gg=0.1, rho_eg=0.2 + 0.1j)
    lifetime = coherence_lifetime(gd, gu)
    grid = TimeGrid.from_fastest(3.0 * lifetime, 40.0 / lifetime)
    traj = evolve_rho(gd, gu, rho0, grid)
    trace_ok = np.max(np.abs(traj.rho_ee + traj.rho_gg - 1.0)) < 1e-12
    pos_ok = traj.rho_ee.min() > -1e-10 and traj.rho_gg.min() > -1e-10
    schwarz_ok = np.all(np.abs(traj.rho_eg) ** 2
                        <= traj.rho_ee * traj.rho_gg + 1e-10)
    return trace_ok and pos_ok and schwarz_ok


def _integral_limit_continuity():
    ok = True
    for w in (0.5, 1.0, 5.0):
        for t in (1.0, 10.0):
            on = integral_I(w, -w, 1.0, t)
            off = integral_I(w, -w + 1e-6 * w, 1.0, t)
            ok = ok and abs(on - off) / abs(on) < 1e-4
    return ok


def _fidelity_bounds():
    mod = ModulationParams(m=j0_zero(1), nu=5.0)
    params = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0), mod=mod)
    for t in (0.0, 1.0, 5.0, 10.0):
        f = fidelity(heating_moments_analytic(params, t))
        if not 0.0 < f <= 1.0:
            return False
    return fidelity(heating_moments_analytic(params, 0.0)) == 1.0


def _ou_stationarity():
    params = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0),
                           mod=ModulationParams(0.0, 1.0))
    grid = TimeGrid.from_fastest(5.0, params.omega_fast)
    series = heating_moments_mc(params, grid, n_traj=400, seed=7)
    ana = heating_moments_analytic(params, float(series.times[-1]))
    diff = abs(series.mean_abs_v2[-1] - ana.mean_abs_v2)
    return diff < 4.0 * series.stderr_abs[-1] + 1e-12


CHECKS = [
    ("specfun: Bessel sum rule", _bessel_sum_rule),
    ("specfun: Jacobi-Anger identity", _jacobi_anger_identity),
    ("specfun: reflection J_-n = (-1)^n J_n", _bessel_reflection),
    ("specfun: J0 zero residuals", _j0_zero_residuals),
    ("specfun: three-term recurrence", _bessel_recurrence),
    ("numerics: RK4 4th-order convergence", _rk4_convergence),
    ("two_level: unitarity at kappa=0", _two_level_unitarity),
    ("two_level: golden-rule limit", _golden_rule),
    ("spin_bath: trace/positivity along trajectories", _master_equation_properties),
    ("ion_heating: integral limit continuity", _integral_limit_continuity),
    ("ion_heating: fidelity bounds", _fidelity_bounds),
    ("ion_heating: MC moments vs analytic", _ou_stationarity),
]


def run(verbose: bool = True) -> list[str]:
    """Run every check; returns the list of failed check names."""
    failures = []
    for name, check in CHECKS:
        try:
            ok = bool(check())
        except Exception as exc:  # a crash is a failure, not an abort
            ok = False
            name = f"{name} (raised {type(exc).__name__}: {exc})"
        if not ok:
            failures.append(name)
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
    if verbose:
        n = len(CHECKS)
        print(f"{n - len(failures)}/{n} properties passed")
    return failures
