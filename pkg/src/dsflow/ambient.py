"""de Sitter space as the warped product (0, inf) x S^n with warp cosh.

Besides the warp functions this module evaluates the exact integral
quantities of the coordinate slices {s} x S^n.  They serve both as oracles
for the quadrature code and as the right-hand sides of the geometric
inequalities checked in :mod:`dsflow.verify`.

Sign convention: the ambient metric is -dr^2 + cosh(r)^2 sigma, so the
curvature factor eps*K in the quermassintegral recursion equals -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma

from .errors import ArgumentError, DomainError, RangeError

EPS_K = -1.0

INVERT_RTOL = 1e-12
INVERT_ATOL = 1e-14
DEFAULT_S_MAX = 10.0


def sphere_area(n: int) -> float:
    """Area of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    if n < 0:
        raise ArgumentError(f"sphere dimension must be >= 0, got {n}")
    return float(2.0 * math.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0))


def warp(r):
    """Return (lambda, lambda', lambda'') = (cosh r, sinh r, cosh r)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError(f"radial coordinate must be >= 0, got min {r_arr.min()!r}")
    if r_arr.ndim == 0:
        x = float(r_arr)
        return math.cosh(x), math.sinh(x), math.cosh(x)
    c = np.cosh(r_arr)
    return c, np.sinh(r_arr), c


def cosh_power_integral(n: int, s):
    """int_0^s cosh^n(t) dt by the reduction formula (exact for every n >= 0)."""
    s = np.asarray(s, dtype=float)
    c, sh = np.cosh(s), np.sinh(s)
    if n % 2 == 0:
        acc, m = s.copy(), 0
    else:
        acc, m = sh.copy(), 1
    while m < n:
        m += 2
        acc = c ** (m - 1) * sh / m + (m - 1) / m * acc
    return acc if acc.ndim else float(acc)


@dataclass(frozen=True)
class AmbientSpace:
    """de Sitter space of dimension n+1 viewed as a warped product over S^n."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ArgumentError(f"ambient dimension n must be an integer >= 2, got {self.n!r}")

    @property
    def omega_n(self) -> float:
        return sphere_area(self.n)

    def warp(self, r):
        return warp(r)

    def phi(self, k: int, s):
        return slice_phi(k, s, self.n)

    def psi(self, l: int, s):
        return slice_psi(l, s, self.n)

    def invert(self, kind: str, index: int, value: float, s_max: float = DEFAULT_S_MAX):
        return invert_slice_profile(kind, index, value, self.n, s_max=s_max)


def _check_s(s):
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(~np.isfinite(s_arr)):
        raise DomainError(f"slice radius must be finite and >= 0, got {s!r}")
    return s_arr


def slice_phi(k: int, s, n: int):
    """Quermassintegral A_k of the slice {s} x S^n, k in {-1, ..., n}."""
    if not (-1 <= k <= n):
        raise ArgumentError(f"quermassintegral index must lie in [-1, {n}], got {k}")
    s_arr = _check_s(s)
    om = sphere_area(n)
    if k == -1:
        out = (n + 1) * om * np.asarray(cosh_power_integral(n, s_arr))
    elif k == 0:
        out = om * np.cosh(s_arr) ** n
    else:
        lead = om * np.sinh(s_arr) ** k * np.cosh(s_arr) ** (n - k)
        out = lead + EPS_K * k / (n - k + 2) * np.asarray(slice_phi(k - 2, s_arr, n))
    return float(out) if np.ndim(out) == 0 else out


def slice_psi(l: int, s, n: int):
    """Weighted curvature integral B_l of the slice {s} x S^n, l in {1, ..., n}."""
    if not (1 <= l <= n):
        raise ArgumentError(f"weighted integral index must lie in [1, {n}], got {l}")
    s_arr = _check_s(s)
    out = sphere_area(n) * np.sinh(s_arr) ** (l + 1) * np.cosh(s_arr) ** (n - l)
    return float(out) if np.ndim(out) == 0 else out


def slice_profile(kind: str, index: int, n: int):
    """Return the scalar profile s -> phi_index(s) or psi_index(s)."""
    if kind == "phi":
        slice_phi(index, 0.0, n)  # validates index
        return lambda s: slice_phi(index, s, n)
    if kind == "psi":
        slice_psi(index, 0.0, n)
        return lambda s: slice_psi(index, s, n)
    raise ArgumentError(f"unknown profile kind {kind!r}; expected 'phi' or 'psi'")


class SliceRoot(NamedTuple):
    s: float
    at_boundary: bool


def invert_slice_profile(kind: str, index: int, value: float, n: int,
                         s_max: float = DEFAULT_S_MAX) -> SliceRoot:
    """Solve profile(s) = value for s in [0, s_max].

    The profile must be increasing on the bracket (true for phi_0 and every
    psi_l).  The bracket starts at [0, 1] and doubles until it holds the
    value or reaches ``s_max``.
    """
    f = slice_profile(kind, index, n)
    value = float(value)
    tol = INVERT_RTOL * abs(value) + INVERT_ATOL
    f0 = f(0.0)
    if abs(value - f0) <= tol:
        return SliceRoot(0.0, True)
    if value < f0:
        raise RangeError(f"{kind}_{index}: value {value!r} below profile minimum {f0!r}")
    hi = min(1.0, s_max)
    while f(hi) < value:
        if hi >= s_max:
            raise RangeError(f"{kind}_{index}: value {value!r} exceeds profile at s_max={s_max}")
        hi = min(2.0 * hi, s_max)
    s = brentq(lambda x: f(x) - value, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
               maxiter=500)
    # polish with Newton steps on a centred-difference slope
    for _ in range(3):
        res = f(s) - value
        if abs(res) <= tol:
            break
        ds = 1e-7 * max(s, 1e-3)
        slope = (f(s + ds) - f(max(s - ds, 0.0))) / (s + ds - max(s - ds, 0.0))
        if slope <= 0:
            break
        s = min(max(s - res / slope, 0.0), hi)
    if abs(f(s) - value) > tol:
        raise RangeError(f"{kind}_{index}: inversion residual {f(s) - value!r} exceeds tolerance")
    return SliceRoot(float(s), False)
