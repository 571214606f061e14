"""Compiled inner loop for axisymmetric RK stages.

Mirrors ``flow.axisymmetric_velocity`` node by node; the numpy version stays
the reference and the test suite compares the two.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# status codes returned by the kernel
OK = 0
NOT_SPACELIKE = 1
OUT_OF_CONE = 2


@njit(cache=True)
def _sym(kt, kp, n, m):
    if m == 0:
        return 1.0
    return kp ** (m - 1) * ((n - m) * kp + m * kt) / n


@njit(cache=True)
def axisym_velocity_kernel(r, h, n, k, fl1, out):
    N = r.size - 1
    for j in range(N + 1):
        if j == 0:
            rp = 0.0
            rpp = 2.0 * (r[1] - r[0]) / (h * h)
            az = rpp
        elif j == N:
            rp = 0.0
            rpp = 2.0 * (r[N - 1] - r[N]) / (h * h)
            az = rpp
        else:
            rp = (r[j + 1] - r[j - 1]) / (2.0 * h)
            rpp = (r[j + 1] - 2.0 * r[j] + r[j - 1]) / (h * h)
            az = rp / math.tan(j * h)
        lam = math.cosh(r[j])
        lamp = math.sinh(r[j])
        ups2 = 1.0 - (rp / lam) ** 2
        if not ups2 > 0.0:
            return NOT_SPACELIKE
        ups = math.sqrt(ups2)
        lam2 = lam * lam
        kt = (rpp + lam * lamp - 2.0 * lamp / lam * rp * rp) / (ups * ups2 * lam2)
        kp = (az + lam * lamp) / (ups * lam2)
        num = _sym(kt, kp, n, k)
        den = _sym(kt, kp, n, k - 1)
        if not (num > 0.0 and den > 0.0):
            return OUT_OF_CONE
        u = lam / ups
        if fl1:
            out[j] = ups * (1.0 - lamp * den / (u * num))
        else:
            out[j] = ups * (u * num / den - lamp)
    return OK


def axisym_velocity(r: np.ndarray, h: float, n: int, k: int, fl1: bool):
    out = np.empty_like(r)
    status = axisym_velocity_kernel(np.ascontiguousarray(r, dtype=np.float64), float(h), int(n),
                                    int(k), bool(fl1), out)
    return out, status
