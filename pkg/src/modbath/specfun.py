"""Integer-order Bessel functions of the first kind, zeros of J0, and
truncation control for the sideband (Jacobi-Anger) expansion

    exp(-i m sin(nu t)) = sum_l J_l(m) exp(-i l nu t).

Everything here is a pure function; the rest of the library builds its
sideband arithmetic on top of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

# Validated ranges for bessel_j.  scipy's jv is accurate to ~1e-15 here;
# the limits just keep callers honest about what has been tested.
MAX_ORDER = 200
MAX_ARG = 500.0

# |J0(m)| below this counts as "carrier removed".
SUPPRESSION_TOL = 1e-10

MAX_ZERO_INDEX = 50


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer order n.

    Accepts scalars or arrays in either argument.  Raises ValueError
    outside the validated range |n| <= 200, |x| <= 500.
    """
    n_arr = np.asarray(n)
    x_arr = np.asarray(x, dtype=float)
    if not np.issubdtype(n_arr.dtype, np.integer):
        if not np.all(n_arr == np.round(n_arr)):
            raise ValueError("bessel_j: order must be an integer")
        n_arr = n_arr.astype(int)
    if np.any(np.abs(n_arr) > MAX_ORDER):
        raise ValueError(f"bessel_j: |order| > {MAX_ORDER} is outside the validated range")
    if np.any(np.abs(x_arr) > MAX_ARG):
        raise ValueError(f"bessel_j: |argument| > {MAX_ARG} is outside the validated range")
    out = special.jv(n_arr, x_arr)
    if out.ndim == 0:
        return float(out)
    return out


def j0_zero(k: int) -> float:
    """k-th positive root of J0, k = 1..50, to better than 1e-10 absolute.

    Each root is bracketed from the asymptotic spacing (the k-th root sits
    near (k - 1/4)*pi), pinned down by bisection and polished with Newton
    steps using J0' = -J1.  No tabulated root values are used.
    """
    if not (1 <= k <= MAX_ZERO_INDEX):
        raise ValueError(f"j0_zero: k must be in [1, {MAX_ZERO_INDEX}]")
    lo = (k - 0.75) * math.pi
    hi = (k + 0.25) * math.pi
    f_lo = bessel_j(0, lo)
    f_hi = bessel_j(0, hi)
    if f_lo * f_hi >= 0:  # cannot happen for k <= 50; guards the bracket logic
        raise RuntimeError("j0_zero: bracket does not straddle a sign change")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j(0, mid)
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    x = 0.5 * (lo + hi)
    for _ in range(4):
        x = x + bessel_j(0, x) / bessel_j(1, x)  # J0' = -J1
    return x


def jacobi_anger_order(m: float, tol: float) -> int:
    """Smallest N with sum_{|l|>N} J_l(m)^2 < tol^2.

    By the Bessel sum rule sum_l J_l(m)^2 = 1, this guarantees the
    truncated sideband expansion approximates exp(-i m sin(nu t)) with
    sup-norm error < tol.  The tail is summed directly (never as
    1 - head, which would lose everything below machine epsilon).
    """
    if m < 0:
        raise ValueError("jacobi_anger_order: m must be >= 0")
    if not (0 < tol < 1):
        raise ValueError("jacobi_anger_order: tol must be in (0, 1)")
    # J_l(m) decays super-exponentially for l > m; this cutoff is generous.
    l_max = int(math.ceil(m)) + 120
    l = np.arange(0, l_max + 1)
    j_sq = special.jv(l, m) ** 2
    # tail(N) = sum_{|l| > N} J_l^2 = 2 * sum_{l > N} J_l^2
    tail = 2.0 * np.cumsum(j_sq[::-1])[::-1]
    tol_sq = tol * tol
    for n_trunc in range(l_max):
        if tail[n_trunc + 1] < tol_sq:
            return n_trunc
    raise RuntimeError("jacobi_anger_order: tail did not fall below tolerance")


@dataclass(frozen=True)
class ModulationParams:
    """Phase modulation Phi(t) = m sin(nu t) of the system-bath coupling.

    m is the dimensionless modulation index, nu the angular modulation
    frequency.  m = 0 means no modulation (nu is then ignored).
    """

    m: float
    nu: float

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("ModulationParams: m must be >= 0")
        if self.m > 0 and self.nu <= 0:
            raise ValueError("ModulationParams: nu must be > 0 when modulation is active")

    @property
    def suppression_tuned(self) -> bool:
        """True iff m sits on a zero of J0 (the carrier term is removed)."""
        return abs(bessel_j(0, self.m)) < SUPPRESSION_TOL

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.nu


NO_MODULATION = ModulationParams(m=0.0, nu=1.0)


def phase(mod: ModulationParams, t):
    """Instantaneous modulation phase Phi(t) = m sin(nu t)."""
    return mod.m * np.sin(mod.nu * np.asarray(t, dtype=float))
