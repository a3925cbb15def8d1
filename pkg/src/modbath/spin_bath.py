"""Modulated spin--heat-bath master equation with exponential bath
correlations C(tau) = C0 exp(-kappa_b tau - i omega tau).

With the coupling phase modulated and the modulation index on a zero of
J0, the relaxation coefficients acquire the sideband factor

    gamma = C0 * 2 J1(m)^2 (kappa_b - i Delta) / ((kappa_b - i Delta)^2 + nu^2),

Delta = omega0 - omega.  Without modulation the standard coefficient
C0 / (kappa_b - i Delta) applies.

The density-matrix evolution is reduced analytically to populations plus
one coherence.  Writing the generator as
-( gamma_down (S+S- rho - S- rho S+) + gamma_up (rho S-S+ - S+ rho S-) ) + h.c.
and working out the 2x2 matrix elements gives

    d rho_ee / dt = -2 Re(gamma_down) rho_ee + 2 Re(gamma_up) rho_gg
    d rho_eg / dt = -(gamma_down + gamma_up) rho_eg

(the h.c. piece contributes nothing to the eg element, so the level
shifts Im(gamma) rotate only the coherence).  The trace is preserved
exactly by construction; a brute-force 4x4 superoperator path exists in
the tests as an oracle for this reduction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import TimeGrid, integrate_linear
from .specfun import ModulationParams, bessel_j


@dataclass(frozen=True)
class BathParams:
    """Exponential bath correlation: decay rate, center frequency and the
    zero-lag amplitudes of the two correlation functions."""

    kappa_b: float
    omega: float
    c0_minus_plus: float  # amplitude of C-+, drives the downward channel
    c0_plus_minus: float  # amplitude of C+-, drives the upward channel

    def __post_init__(self):
        if self.kappa_b <= 0:
            raise ValueError("BathParams: kappa_b must be > 0")
        if self.c0_minus_plus < 0 or self.c0_plus_minus < 0:
            raise ValueError("BathParams: correlation amplitudes must be >= 0")


@dataclass(frozen=True)
class SpinParams:
    omega0: float
    mod: ModulationParams


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 density matrix: real populations and one complex coherence."""

    rho_ee: float
    rho_gg: float
    rho_eg: complex

    def __post_init__(self):
        if abs(self.rho_ee + self.rho_gg - 1.0) > 1e-9:
            raise ValueError("DensityMatrix2: trace must be 1")
        if self.rho_ee < -1e-12 or self.rho_gg < -1e-12:
            raise ValueError("DensityMatrix2: populations must be >= 0")
        if abs(self.rho_eg) ** 2 > self.rho_ee * self.rho_gg + 1e-9:
            raise ValueError("DensityMatrix2: positivity violated")


def spectral_factor(kappa_b: float, delta: float, mod: ModulationParams) -> complex:
    """Sideband-filtered bath spectral response at detuning Delta."""
    kd = kappa_b - 1j * delta
    if mod.m == 0:
        return 1.0 / kd
    if not mod.suppression_tuned:
        raise ValueError("spectral_factor: m > 0 requires J0(m) = 0 "
                         "(carrier-suppressed tuning)")
    j1_sq = bessel_j(1, mod.m) ** 2
    return 2.0 * j1_sq * kd / (kd * kd + mod.nu**2)


def relaxation_coefficient(bath: BathParams, spin: SpinParams, channel: str,
                           include_counter_rotating: bool = False) -> complex:
    """Complex relaxation coefficient gamma for the 'down' or 'up' channel.

    include_counter_rotating adds the same spectral factor evaluated at
    the sum frequency -(omega0 + omega); off by default (sensitivity knob
    only, the rotating-wave generator is complete without it).
    """
    if channel == "down":
        c0 = bath.c0_minus_plus
    elif channel == "up":
        c0 = bath.c0_plus_minus
    else:
        raise ValueError("relaxation_coefficient: channel must be 'down' or 'up'")
    delta = spin.omega0 - bath.omega
    gamma = c0 * spectral_factor(bath.kappa_b, delta, spin.mod)
    if include_counter_rotating:
        gamma = gamma + c0 * spectral_factor(bath.kappa_b,
                                             -(spin.omega0 + bath.omega), spin.mod)
    return gamma


@dataclass(frozen=True)
class RhoTrajectory:
    times: np.ndarray
    rho_ee: np.ndarray
    rho_gg: np.ndarray
    rho_eg: np.ndarray

    def __getitem__(self, i) -> DensityMatrix2:
        return DensityMatrix2(rho_ee=float(self.rho_ee[i]),
                              rho_gg=float(self.rho_gg[i]),
                              rho_eg=complex(self.rho_eg[i]))


def evolve_rho(gamma_down: complex, gamma_up: complex, rho0: DensityMatrix2,
               grid: TimeGrid) -> RhoTrajectory:
    """Evolve the reduced Bloch system for given relaxation coefficients.

    State vector (rho_ee, rho_eg, 1); rho_gg = 1 - rho_ee identically, so
    the trace is exact along the whole trajectory.
    """
    gd_r = gamma_down.real
    gu_r = gamma_up.real
    gen = np.array([
        [-2.0 * (gd_r + gu_r), 0.0, 2.0 * gu_r],
        [0.0, -(gamma_down + gamma_up), 0.0],
        [0.0, 0.0, 0.0],
    ], dtype=complex)
    x0 = np.array([rho0.rho_ee, rho0.rho_eg, 1.0], dtype=complex)
    traj = integrate_linear(lambda t: gen, x0, grid)
    rho_ee = traj.states[:, 0].real
    return RhoTrajectory(times=traj.times, rho_ee=rho_ee, rho_gg=1.0 - rho_ee,
                         rho_eg=traj.states[:, 1])


def steady_state_excited(gamma_down: complex, gamma_up: complex) -> float:
    """Stationary excited-state population Re(gamma_up) / Re(gamma_down + gamma_up)."""
    total = gamma_down.real + gamma_up.real
    if total <= 0:
        raise ValueError("steady_state_excited: total relaxation rate must be > 0")
    return gamma_up.real / total


def coherence_lifetime(gamma_down: complex, gamma_up: complex) -> float:
    """1/e time of |rho_eg|, i.e. 1 / Re(gamma_down + gamma_up).

    Returns inf (with a warning) when the total rate vanishes.
    """
    total = gamma_down.real + gamma_up.real
    if total < 0:
        raise ValueError("coherence_lifetime: negative total relaxation rate")
    if total == 0:
        warnings.warn("coherence_lifetime: zero total rate, coherence never decays",
                      stacklevel=2)
        return math.inf
    return 1.0 / total
