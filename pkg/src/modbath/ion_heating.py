"""Heating of a trapped ion's ground state by a modulated Gaussian
stochastic field, and the ground-state fidelity

    F(t) = [1 + 2<|v|^2> + <|v|^2>^2 - |<v^2>|^2]^(-1/2).

Two independent routes to the moments are provided:

* an analytic route through the double sideband sums
      <|v|^2> =  (Omega^2/2) sum_{n,p} J_n(m) J_p(m) I(w0 - n nu, -w0 + p nu)
      <v^2>   = -(Omega^2/2) sum_{n,p} J_n(m) J_p(m) I(w0 - n nu,  w0 - p nu)
  with the closed-form correlation integral
      I(wa, wb) = int_0^t int_0^t exp(i wa t1 + i wb t2 - kappa |t1 - t2|);

* a Monte-Carlo route sampling stationary Ornstein-Uhlenbeck noise
  (the unique stationary Gaussian Markov process with exponential
  autocorrelation) and integrating v(t) directly per trajectory.

The field's physical constants never appear individually; only the
strength Omega defined by <u u*> = (Omega^2/2) exp(-kappa |t - t'|) is
stored.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import lfilter

from .numerics import NumericError, TimeGrid
from .specfun import ModulationParams, bessel_j, jacobi_anger_order, phase

# Fixed Monte-Carlo accumulation block: reductions happen block by block
# in index order, so results are bitwise identical for any worker count.
MC_BLOCK = 250


@dataclass(frozen=True)
class HeatingParams:
    omega0: float
    kappa: float
    Omega: float
    mod: ModulationParams
    trunc_tol: float = 1e-8

    def __post_init__(self):
        if self.omega0 <= 0 or self.kappa <= 0:
            raise ValueError("HeatingParams: omega0 and kappa must be > 0")
        if self.Omega < 0:
            raise ValueError("HeatingParams: Omega must be >= 0")
        if not (0 < self.trunc_tol <= 1e-4):
            raise ValueError("HeatingParams: trunc_tol must be in (0, 1e-4]")

    @property
    def omega_fast(self) -> float:
        if self.mod.m > 0:
            return self.omega0 + (self.mod.m + 2.0) * self.mod.nu + self.kappa
        return self.omega0 + self.kappa


@dataclass(frozen=True)
class HeatingMoments:
    """<|v|^2> (real) and <v^2> (complex), with Monte-Carlo standard
    errors (zero on the analytic path)."""

    mean_abs_v2: float
    mean_v2: complex
    stderr_abs: float = 0.0
    stderr_v2: float = 0.0

    def __post_init__(self):
        if self.mean_abs_v2 < 0 or self.stderr_abs < 0 or self.stderr_v2 < 0:
            raise ValueError("HeatingMoments: negative moment or error")
        slack = 3.0 * (self.stderr_abs + self.stderr_v2) + 1e-10
        if abs(self.mean_v2) > self.mean_abs_v2 + slack:
            raise ValueError("HeatingMoments: |<v^2>| exceeds <|v|^2> beyond noise")


@dataclass(frozen=True)
class HeatingMomentsSeries:
    times: np.ndarray
    mean_abs_v2: np.ndarray
    mean_v2: np.ndarray
    stderr_abs: np.ndarray = None
    stderr_v2: np.ndarray = None

    def __post_init__(self):
        if self.stderr_abs is None:
            object.__setattr__(self, "stderr_abs", np.zeros_like(self.mean_abs_v2))
        if self.stderr_v2 is None:
            object.__setattr__(self, "stderr_v2", np.zeros_like(self.mean_abs_v2))

    def __getitem__(self, i) -> HeatingMoments:
        return HeatingMoments(mean_abs_v2=float(self.mean_abs_v2[i]),
                              mean_v2=complex(self.mean_v2[i]),
                              stderr_abs=float(self.stderr_abs[i]),
                              stderr_v2=float(self.stderr_v2[i]))


# threshold below which the exp(i S t) difference quotient switches to its
# Taylor series; double-precision cancellation appears near 1e-8 * scale
_SMALL_PHASE = 1e-6


def integral_I(omega_alpha, omega_beta, kappa, t):
    """Closed form of the exponential-correlation double integral.

    Equals int_0^t int_0^t exp(i wa t1 + i wb t2 - kappa |t1 - t2|) dt1 dt2,
    symmetrized over (wa, wb).  The removable singularity at
    wa + wb -> 0 is handled by a series branch of the phase difference
    quotient q = (exp(i S t) - 1)/(i S), which reproduces the limiting
    form (and its higher corrections) without cancellation.  Vectorized
    over all arguments.
    """
    if np.any(np.asarray(kappa) <= 0):
        raise ValueError("integral_I: kappa must be > 0")
    if np.any(np.asarray(t) < 0):
        raise ValueError("integral_I: t must be >= 0")
    wa, wb, kap, tt = np.broadcast_arrays(*map(np.asarray,
                                               (omega_alpha, omega_beta, kappa, t)))
    s = wa + wb

    small = np.abs(s) * np.maximum(tt, 1.0 / kap) < _SMALL_PHASE
    s_safe = np.where(small, 1.0, s)
    z = 1j * s * tt
    q_series = tt * (1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0)
    with np.errstate(invalid="ignore", over="ignore"):
        q_exact = (np.exp(1j * s_safe * tt) - 1.0) / (1j * s_safe)
    q = np.where(small, q_series, q_exact)

    def half(w_first):
        b = kap - 1j * w_first
        return (b * q - 1.0 + np.exp(-b * tt)) / (b * (b + 1j * s))

    out = half(wa) + half(wb)
    if out.ndim == 0:
        return complex(out)
    return out


def _moment_sums(params: HeatingParams, t):
    """Vectorized double sideband sums; t may be a scalar or 1-D array."""
    n_max = jacobi_anger_order(params.mod.m, params.trunc_tol)
    orders = np.arange(-n_max, n_max + 1)
    j = bessel_j(orders, params.mod.m)
    weight = np.outer(j, j)[..., None]  # (n, p, 1)

    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    w_n = (params.omega0 - orders * params.mod.nu)[:, None, None]
    w_p = (params.omega0 - orders * params.mod.nu)[None, :, None]
    tt = t_arr[None, None, :]

    pref = params.Omega**2 / 2.0
    abs_v2 = pref * (weight * integral_I(w_n, -w_p, params.kappa, tt)).sum(axis=(0, 1))
    v2 = -pref * (weight * integral_I(w_n, w_p, params.kappa, tt)).sum(axis=(0, 1))

    # <|v|^2> is real up to the truncation residue of the double sum
    imag_resid = np.abs(abs_v2.imag)
    scale = 1.0 + np.abs(abs_v2.real)
    if np.any(imag_resid > 1e-10 * scale):
        raise NumericError("heating moments: <|v|^2> acquired an imaginary part")
    return abs_v2.real, v2


def heating_moments_analytic(params: HeatingParams, t: float) -> HeatingMoments:
    """Moments at a single time via the truncated double sideband sums."""
    abs_v2, v2 = _moment_sums(params, float(t))
    return HeatingMoments(mean_abs_v2=float(abs_v2[0]), mean_v2=complex(v2[0]))


def fidelity(moments: HeatingMoments) -> float:
    """Ground-state fidelity [1 + 2a + a^2 - |b|^2]^(-1/2), in (0, 1]."""
    a = moments.mean_abs_v2
    b2 = abs(moments.mean_v2) ** 2
    radicand = 1.0 + 2.0 * a + a * a - b2
    if radicand < 1.0 - 1e-9:
        raise ValueError("fidelity: radicand below 1, moments violate a >= |b|")
    return 1.0 / math.sqrt(max(radicand, 1.0 - 1e-9))


def _mc_block(params: HeatingParams, times, seed_seqs):
    """Trajectories for one seed block; returns per-time moment sums."""
    n_steps = len(times) - 1
    dt = times[1] - times[0]
    n_blk = len(seed_seqs)
    noise = np.empty((n_blk, n_steps))
    w0 = np.empty(n_blk)
    for i, ss in enumerate(seed_seqs):
        rng = np.random.default_rng(ss)
        w0[i] = rng.standard_normal()
        noise[i] = rng.standard_normal(n_steps)

    var = params.Omega**2 / 2.0
    alpha = math.exp(-params.kappa * dt)
    sigma = math.sqrt(var * (1.0 - alpha * alpha))
    w0 *= math.sqrt(var)
    # exact AR(1) update: w_{k+1} = alpha w_k + sigma xi_k, w_0 ~ N(0, var)
    decay = alpha ** np.arange(1, n_steps + 1)
    w_rest = lfilter([1.0], [1.0, -alpha], sigma * noise, axis=1) + w0[:, None] * decay
    w = np.concatenate([w0[:, None], w_rest], axis=1)

    rot = np.exp(1j * (params.omega0 * times - phase(params.mod, times)))
    v = 1j * cumulative_trapezoid(w * rot[None, :], dx=dt, axis=1, initial=0.0)

    abs_v2 = np.abs(v) ** 2
    v2 = v * v
    return {
        "sum_abs": abs_v2.sum(axis=0),
        "sum_abs_sq": (abs_v2**2).sum(axis=0),
        "sum_v2": v2.sum(axis=0),
        "sum_v2_re_sq": (v2.real**2).sum(axis=0),
        "sum_v2_im_sq": (v2.imag**2).sum(axis=0),
        "var_w": w.var(axis=0, ddof=1) if n_blk > 1 else None,
    }


def heating_moments_mc(params: HeatingParams, t_grid: TimeGrid, n_traj: int,
                       seed: int, n_workers: int = 1) -> HeatingMomentsSeries:
    """Monte-Carlo moments over the whole grid from n_traj OU trajectories.

    Per-trajectory streams are spawned deterministically from (seed,
    trajectory index); block sums are reduced in index order, so the
    result is independent of n_workers.
    """
    if n_traj < 100:
        raise ValueError("heating_moments_mc: need n_traj >= 100")
    times = t_grid.times
    children = np.random.SeedSequence(seed).spawn(n_traj)
    blocks = [children[i:i + MC_BLOCK] for i in range(0, n_traj, MC_BLOCK)]

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(lambda b: _mc_block(params, times, b), blocks))
    else:
        results = [_mc_block(params, times, b) for b in blocks]

    sum_abs = sum(r["sum_abs"] for r in results)
    sum_abs_sq = sum(r["sum_abs_sq"] for r in results)
    sum_v2 = sum(r["sum_v2"] for r in results)
    sum_v2_re_sq = sum(r["sum_v2_re_sq"] for r in results)
    sum_v2_im_sq = sum(r["sum_v2_im_sq"] for r in results)

    if not (np.isfinite(sum_abs).all() and np.isfinite(sum_v2).all()):
        raise NumericError("heating_moments_mc: non-finite sample")

    n = float(n_traj)
    mean_abs = sum_abs / n
    mean_v2 = sum_v2 / n
    var_abs = np.maximum(sum_abs_sq / n - mean_abs**2, 0.0) * n / (n - 1)
    var_re = np.maximum(sum_v2_re_sq / n - mean_v2.real**2, 0.0) * n / (n - 1)
    var_im = np.maximum(sum_v2_im_sq / n - mean_v2.imag**2, 0.0) * n / (n - 1)
    return HeatingMomentsSeries(
        times=times,
        mean_abs_v2=mean_abs,
        mean_v2=mean_v2,
        stderr_abs=np.sqrt(var_abs / n),
        stderr_v2=np.sqrt((var_re + var_im) / n),
    )


def heating_moments_analytic_series(params: HeatingParams,
                                    t_grid: TimeGrid) -> HeatingMomentsSeries:
    """Analytic moments evaluated on every grid time."""
    abs_v2, v2 = _moment_sums(params, t_grid.times)
    return HeatingMomentsSeries(times=t_grid.times, mean_abs_v2=abs_v2, mean_v2=v2)


def fidelity_curve(params: HeatingParams, t_grid: TimeGrid, method: str = "analytic",
                   n_traj: int = 4000, seed: int = 0, n_workers: int = 1):
    """Fidelity vs time.

    Returns (times, F) for the analytic route and (times, F, F_err) for
    the Monte-Carlo route, with F_err the 1-sigma band propagated from
    the moment standard errors.
    """
    if method == "analytic":
        series = heating_moments_analytic_series(params, t_grid)
    elif method == "mc":
        series = heating_moments_mc(params, t_grid, n_traj, seed, n_workers)
    else:
        raise ValueError("fidelity_curve: method must be 'analytic' or 'mc'")

    a = series.mean_abs_v2
    b_abs = np.abs(series.mean_v2)
    radicand = np.maximum(1.0 + 2.0 * a + a * a - b_abs**2, 1.0 - 1e-9)
    f = 1.0 / np.sqrt(radicand)
    if method == "analytic":
        return series.times, f
    # dF/da = -(1 + a) F^3, dF/d|b| = |b| F^3
    f_err = f**3 * np.sqrt((1.0 + a) ** 2 * series.stderr_abs**2
                           + b_abs**2 * series.stderr_v2**2)
    return series.times, f, f_err
