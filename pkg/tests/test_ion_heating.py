import numpy as np
import pytest
from scipy.integrate import dblquad

from modbath.ion_heating import (HeatingMoments, HeatingParams, MC_BLOCK,
                                 _mc_block, fidelity, fidelity_curve,
                                 heating_moments_analytic,
                                 heating_moments_analytic_series,
                                 heating_moments_mc, integral_I)
from modbath.numerics import TimeGrid
from modbath.specfun import ModulationParams, j0_zero

NO_MOD = ModulationParams(m=0.0, nu=1.0)


def dblquad_oracle(wa, wb, kappa, t):
    """Direct quadrature of the correlation double integral, with the inner
    range split at the |t1 - t2| kink so each piece is smooth."""

    def integrand(t2, t1, trig):
        ph = wa * t1 + wb * t2
        return trig(ph) * np.exp(-kappa * abs(t1 - t2))

    out = 0.0
    for lo, hi in ((lambda t1: 0.0, lambda t1: t1),
                   (lambda t1: t1, lambda t1: t)):
        re, _ = dblquad(integrand, 0.0, t, lo, hi, args=(np.cos,),
                        epsabs=1e-12, epsrel=1e-12)
        im, _ = dblquad(integrand, 0.0, t, lo, hi, args=(np.sin,),
                        epsabs=1e-12, epsrel=1e-12)
        out += re + 1j * im
    return out


class TestIntegralI:
    def test_zero_time(self):
        assert integral_I(1.0, 2.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_static_field(self):
        # wa = wb = 0: 2 (kappa t - 1 + e^{-kappa t}) / kappa^2
        kappa, t = 0.7, 3.0
        expected = 2.0 * (kappa * t - 1.0 + np.exp(-kappa * t)) / kappa**2
        assert integral_I(0.0, 0.0, kappa, t) == pytest.approx(expected, rel=1e-13)

    def test_symmetry_in_frequencies(self):
        for wa, wb in ((1.3, -0.4), (5.0, 5.0), (-2.0, 0.1)):
            assert integral_I(wa, wb, 1.0, 2.5) == pytest.approx(
                integral_I(wb, wa, 1.0, 2.5), rel=1e-14)

    def test_against_dblquad_oracle(self):
        cases = [(1.0, -1.0, 1.0, 4.0), (3.0, 2.0, 0.5, 2.0),
                 (0.0, 5.0, 2.0, 1.0), (-4.0, 4.5, 1.5, 3.0)]
        for wa, wb, kappa, t in cases:
            got = integral_I(wa, wb, kappa, t)
            ref = dblquad_oracle(wa, wb, kappa, t)
            assert abs(got - ref) < 1e-8 * (1.0 + abs(ref))

    def test_near_singular_against_oracle(self):
        # wa + wb -> 0 is a removable singularity; sweep right across the
        # series/exact switchover
        wa, kappa, t = 2.0, 1.0, 3.0
        for k in range(2, 9):
            wb = -wa + 10.0**(-k)
            got = integral_I(wa, wb, kappa, t)
            ref = dblquad_oracle(wa, wb, kappa, t)
            assert abs(got - ref) < 1e-8 * (1.0 + abs(ref))

    def test_limit_continuity(self):
        at_zero = integral_I(2.0, -2.0, 1.0, 3.0)
        near = integral_I(2.0, -2.0 + 1e-10, 1.0, 3.0)
        assert abs(at_zero - near) < 1e-9

    def test_vectorized(self):
        t = np.linspace(0.0, 5.0, 7)
        out = integral_I(1.0, -0.5, 2.0, t)
        for i, ti in enumerate(t):
            assert out[i] == pytest.approx(integral_I(1.0, -0.5, 2.0, ti),
                                           rel=1e-14)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            integral_I(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            integral_I(1.0, 1.0, 1.0, -0.1)


class TestAnalyticMoments:
    def test_unmodulated_matches_single_integral(self):
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0),
                               mod=NO_MOD)
        t = 4.0
        mom = heating_moments_analytic(params, t)
        pref = params.Omega**2 / 2.0
        assert mom.mean_abs_v2 == pytest.approx(
            pref * integral_I(1.0, -1.0, 1.0, t).real, rel=1e-12)
        assert mom.mean_v2 == pytest.approx(
            -pref * integral_I(1.0, 1.0, 1.0, t), rel=1e-12)

    def test_unmodulated_linear_growth(self):
        # broadband long-time limit: <|v|^2> ~ Omega^2 kappa t / (kappa^2 + w0^2)
        params = HeatingParams(omega0=3.0, kappa=2.0, Omega=1.0, mod=NO_MOD)
        t = 400.0
        mom = heating_moments_analytic(params, t)
        slope = params.Omega**2 * params.kappa / (params.kappa**2 + params.omega0**2)
        assert mom.mean_abs_v2 == pytest.approx(slope * t, rel=0.01)

    def test_cauchy_schwarz(self):
        mod = ModulationParams(m=j0_zero(1), nu=5.0)
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0), mod=mod)
        for t in (0.5, 2.0, 10.0):
            mom = heating_moments_analytic(params, t)
            assert abs(mom.mean_v2) <= mom.mean_abs_v2 + 1e-10

    def test_modulation_suppresses_heating(self):
        plain = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0),
                              mod=NO_MOD)
        modded = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0),
                               mod=ModulationParams(m=j0_zero(1), nu=5.0))
        t = 10.0
        assert (heating_moments_analytic(modded, t).mean_abs_v2
                < 0.5 * heating_moments_analytic(plain, t).mean_abs_v2)

    def test_series_matches_pointwise(self):
        mod = ModulationParams(m=j0_zero(1), nu=3.0)
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=1.0, mod=mod)
        grid = TimeGrid(t_max=2.0, dt=0.5)
        series = heating_moments_analytic_series(params, grid)
        for i, t in enumerate(grid.times):
            mom = heating_moments_analytic(params, float(t))
            assert series.mean_abs_v2[i] == pytest.approx(mom.mean_abs_v2,
                                                          rel=1e-12, abs=1e-15)
            assert series.mean_v2[i] == pytest.approx(mom.mean_v2,
                                                      rel=1e-12, abs=1e-15)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            HeatingParams(omega0=0.0, kappa=1.0, Omega=1.0, mod=NO_MOD)
        with pytest.raises(ValueError):
            HeatingParams(omega0=1.0, kappa=1.0, Omega=-1.0, mod=NO_MOD)
        with pytest.raises(ValueError):
            HeatingParams(omega0=1.0, kappa=1.0, Omega=1.0, mod=NO_MOD,
                          trunc_tol=1e-3)


class TestFidelity:
    def test_no_heating(self):
        assert fidelity(HeatingMoments(0.0, 0.0)) == 1.0

    def test_simple_values(self):
        assert fidelity(HeatingMoments(1.0, 0.0)) == pytest.approx(0.5)
        a = np.sqrt(3.0) - 1.0
        assert fidelity(HeatingMoments(a, 0.0)) == pytest.approx(3.0**-0.5)

    def test_squeezed_moment_raises_less(self):
        # a nonzero <v^2> always raises F at fixed <|v|^2>
        assert (fidelity(HeatingMoments(0.5, 0.4))
                > fidelity(HeatingMoments(0.5, 0.0)))

    def test_radicand_error(self):
        bad = HeatingMoments(0.1, 0.5, stderr_abs=0.2)  # only noise-consistent
        with pytest.raises(ValueError):
            fidelity(bad)

    def test_moment_validation(self):
        with pytest.raises(ValueError):
            HeatingMoments(-0.1, 0.0)
        with pytest.raises(ValueError):
            HeatingMoments(0.1, 0.5)


class TestMonteCarlo:
    def _params(self, m=0.0, nu=1.0):
        mod = ModulationParams(m=m, nu=nu) if m > 0 else NO_MOD
        return HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0), mod=mod)

    def _grid(self, params, t_max=4.0):
        return TimeGrid.from_fastest(t_max, params.omega_fast, 40)

    def test_zero_drive(self):
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=0.0, mod=NO_MOD)
        grid = self._grid(params)
        t, f, f_err = fidelity_curve(params, grid, method="mc", n_traj=200, seed=0)
        assert np.all(f == 1.0)
        assert np.all(f_err == 0.0)

    def test_noise_is_stationary(self):
        # sample variance of w across trajectories stays at Omega^2/2 for
        # every time slice (the process starts in its stationary law)
        params = self._params()
        grid = self._grid(params, t_max=6.0)
        seqs = np.random.SeedSequence(7).spawn(MC_BLOCK)
        var_w = _mc_block(params, grid.times, seqs)["var_w"]
        target = params.Omega**2 / 2.0
        assert abs(np.mean(var_w) - target) < 0.15 * target
        assert np.max(np.abs(var_w - target)) < 0.5 * target

    def test_determinism_and_worker_invariance(self):
        params = self._params(m=j0_zero(1), nu=4.0)
        grid = self._grid(params, t_max=2.0)
        a = heating_moments_mc(params, grid, 500, seed=3)
        b = heating_moments_mc(params, grid, 500, seed=3)
        c = heating_moments_mc(params, grid, 500, seed=3, n_workers=4)
        assert np.array_equal(a.mean_abs_v2, b.mean_abs_v2)
        assert np.array_equal(a.mean_v2, b.mean_v2)
        assert np.array_equal(a.mean_abs_v2, c.mean_abs_v2)
        assert np.array_equal(a.mean_v2, c.mean_v2)
        d = heating_moments_mc(params, grid, 500, seed=4)
        assert not np.array_equal(a.mean_abs_v2, d.mean_abs_v2)

    def test_agrees_with_analytic(self):
        for m, nu in ((0.0, 1.0), (j0_zero(1), 5.0)):
            params = self._params(m=m, nu=nu)
            grid = self._grid(params, t_max=5.0)
            mc = heating_moments_mc(params, grid, 2000, seed=2)
            ana = heating_moments_analytic_series(params, grid)
            for i in (len(grid.times) // 2, -1):
                err = max(mc.stderr_abs[i], 1e-12)
                z = abs(mc.mean_abs_v2[i] - ana.mean_abs_v2[i]) / err
                # 4 sigma plus 2% slack for trapezoid bias
                assert z < 4.0 + 0.02 * ana.mean_abs_v2[i] / err

    def test_too_few_trajectories(self):
        params = self._params()
        with pytest.raises(ValueError):
            heating_moments_mc(params, self._grid(params), 50, seed=0)


class TestFidelityCurve:
    def test_analytic_shape_and_range(self):
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0),
                               mod=ModulationParams(m=j0_zero(1), nu=5.0))
        grid = TimeGrid.from_fastest(10.0, params.omega_fast)
        t, f = fidelity_curve(params, grid)
        assert f[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all((0.0 < f) & (f <= 1.0))
        assert f[-1] < f[0]

    def test_modulated_beats_unmodulated(self):
        base = dict(omega0=1.0, kappa=1.0, Omega=np.sqrt(2.0))
        plain = HeatingParams(mod=NO_MOD, **base)
        modded = HeatingParams(mod=ModulationParams(m=j0_zero(1), nu=5.0), **base)
        grid = TimeGrid.from_fastest(10.0, modded.omega_fast)
        _, f_plain = fidelity_curve(plain, grid)
        _, f_mod = fidelity_curve(modded, grid)
        assert f_mod[-1] > f_plain[-1]

    def test_bad_method(self):
        params = HeatingParams(omega0=1.0, kappa=1.0, Omega=1.0, mod=NO_MOD)
        grid = TimeGrid.from_fastest(1.0, params.omega_fast)
        with pytest.raises(ValueError):
            fidelity_curve(params, grid, method="exact")
