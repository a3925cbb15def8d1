"""Fixed-step RK4 integration of linear ODE systems with time-dependent
complex coefficients, plus the rate-fitting and coarse-graining helpers
shared by the dynamics modules.

The integrator is deliberately fixed-step: every trajectory in this
library has a known fastest angular frequency (modulation sidebands up to
roughly (m + 2) nu, plus the bare rates), so the caller states it once and
the grid enforces at least 20 points per fastest period.  That keeps runs
deterministic and makes stroboscopic sampling trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

POINTS_PER_PERIOD = 20


class ResolutionError(ValueError):
    """Time grid too coarse for the declared fastest frequency."""


class NumericError(ArithmeticError):
    """Non-finite values encountered during integration."""


class FitError(RuntimeError):
    """Decay-rate fit could not be performed on the given data."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, t_max] with step dt.

    If omega_fast (the fastest angular frequency in the problem) is given,
    construction fails unless dt <= (2 pi / omega_fast) / 20.
    """

    t_max: float
    dt: float
    omega_fast: float | None = None

    def __post_init__(self):
        if self.dt <= 0 or self.t_max <= 0:
            raise ValueError("TimeGrid: dt and t_max must be > 0")
        if self.n_steps < 2:
            raise ValueError("TimeGrid: need at least 2 steps")
        if self.omega_fast is not None:
            dt_max = (2.0 * math.pi / self.omega_fast) / POINTS_PER_PERIOD
            if self.dt > dt_max * (1 + 1e-12):
                raise ResolutionError(
                    f"TimeGrid: dt={self.dt:g} exceeds {dt_max:g} required to "
                    f"resolve omega_fast={self.omega_fast:g}"
                )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    @classmethod
    def from_fastest(cls, t_max: float, omega_fast: float,
                     points_per_period: int = POINTS_PER_PERIOD) -> "TimeGrid":
        """Grid resolving omega_fast with the given points per period (>= 20)."""
        if points_per_period < POINTS_PER_PERIOD:
            raise ResolutionError("from_fastest: need at least 20 points per period")
        dt = (2.0 * math.pi / omega_fast) / points_per_period
        n = max(2, int(math.ceil(t_max / dt)))
        return cls(t_max=n * dt, dt=dt, omega_fast=omega_fast)


@dataclass(frozen=True)
class ComplexTrajectory:
    """Times and one complex state vector per time."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("ComplexTrajectory: times/states length mismatch")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("ComplexTrajectory: times must be strictly increasing")


def integrate_linear(generator, initial, grid: TimeGrid) -> ComplexTrajectory:
    """Integrate dx/dt = A(t) x with classic RK4 on the given grid.

    generator(t) must return the complex matrix A(t); the full trajectory
    including t = 0 is returned.  Local truncation error is O(dt^5).
    """
    y = np.asarray(initial, dtype=complex).copy()
    dim = y.shape[0]
    dt = grid.dt
    n = grid.n_steps
    out = np.empty((n + 1, dim), dtype=complex)
    out[0] = y
    for k in range(n):
        t = k * dt
        a1 = np.asarray(generator(t), dtype=complex)
        a2 = np.asarray(generator(t + 0.5 * dt), dtype=complex)
        a3 = np.asarray(generator(t + dt), dtype=complex)
        if not (np.isfinite(a1).all() and np.isfinite(a2).all()
                and np.isfinite(a3).all()):
            raise NumericError(f"integrate_linear: non-finite generator near t={t:g}")
        k1 = a1 @ y
        k2 = a2 @ (y + 0.5 * dt * k1)
        k3 = a2 @ (y + 0.5 * dt * k2)
        k4 = a3 @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    if not np.isfinite(out).all():
        raise NumericError("integrate_linear: non-finite state in trajectory")
    return ComplexTrajectory(times=grid.times, states=out)


def fit_decay_rate(t, y, window):
    """Least-squares exponential rate over the window [t_lo, t_hi].

    Fits ln y vs t; returns (rate, residual) with rate = -slope and
    residual the RMS misfit in ln-space.  Needs >= 10 points with y > 0.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    t_lo, t_hi = window
    mask = (t >= t_lo) & (t <= t_hi)
    if np.count_nonzero(mask) < 10:
        raise FitError("fit_decay_rate: fewer than 10 points in the fit window")
    if np.any(y[mask] <= 0):
        raise FitError("fit_decay_rate: nonpositive values in the fit window")
    tw = t[mask]
    ln_y = np.log(y[mask])
    slope, intercept = np.polyfit(tw, ln_y, 1)
    resid = ln_y - (slope * tw + intercept)
    return -slope, float(np.sqrt(np.mean(resid**2)))


def period_average(t, y, period):
    """Boxcar average over consecutive non-overlapping windows of one period.

    Removes the fast modulation wiggles from a trajectory before fitting.
    Input must be uniformly sampled; output times are window midpoints.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y)
    if period <= 0:
        raise ValueError("period_average: period must be > 0")
    dts = np.diff(t)
    if len(dts) == 0 or not np.allclose(dts, dts[0], rtol=1e-9):
        raise ValueError("period_average: series must be uniformly sampled")
    dt = dts[0]
    if period < 4 * dt:
        raise ResolutionError("period_average: period smaller than 4 samples")
    if period > t[-1] - t[0]:
        raise ValueError("period_average: period exceeds the series span")
    n_per = int(round(period / dt))
    n_win = len(y) // n_per
    y_avg = y[: n_win * n_per].reshape(n_win, n_per).mean(axis=1)
    t_avg = t[: n_win * n_per].reshape(n_win, n_per).mean(axis=1)
    return t_avg, y_avg
