"""Normalized elementary symmetric functions of principal curvatures.

All functions accept a single curvature tuple of shape ``(n,)`` or a batch of
shape ``(..., n)``; the last axis always indexes curvatures.  Tables of
normalized values are laid out as ``E[..., m]`` for m = 0, ..., n+1 with
E_0 = 1 and E_{n+1} = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ArgumentError, ConeViolationError, SingularQuotientError

TOL_CONE = 1e-12
TOL_DIV = 1e-300


def curvature_tuple(kappa) -> np.ndarray:
    """Canonical (ascending) form of a curvature tuple or batch."""
    k = np.asarray(kappa, dtype=float)
    if k.ndim == 0:
        raise ArgumentError("curvature tuple must have at least one entry")
    return np.sort(k, axis=-1)


def elementary_raw(kappa) -> np.ndarray:
    """Unnormalized e_0, ..., e_n via the prefix recurrence e_m += k_j e_{m-1}."""
    k = np.asarray(kappa, dtype=float)
    n = k.shape[-1]
    e = np.zeros(k.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for j in range(n):
        kj = k[..., j]
        # descending m keeps e_{m-1} at its previous-prefix value
        for m in range(j + 1, 0, -1):
            e[..., m] += kj * e[..., m - 1]
    return e


def _binomials(n: int) -> np.ndarray:
    return np.array([comb(n, m) for m in range(n + 1)], dtype=float)


def elementary_table(kappa) -> np.ndarray:
    """Normalized table E_0, ..., E_{n+1} with E_m = e_m / C(n, m)."""
    k = np.asarray(kappa, dtype=float)
    n = k.shape[-1]
    e = elementary_raw(k)
    out = np.zeros(k.shape[:-1] + (n + 2,))
    out[..., : n + 1] = e / _binomials(n)
    return out


def _check_k(k: int, n: int):
    if not (1 <= k <= n):
        raise ArgumentError(f"curvature index k must lie in [1, {n}], got {k}")


def cone_margin(E: np.ndarray, k: int) -> np.ndarray:
    """min_{m <= k} E_m for a table (or batch of tables)."""
    return np.min(E[..., 1 : k + 1], axis=-1)


def cone_membership(kappa, k: int, tol: float = TOL_CONE) -> tuple[str, float]:
    """Classify a single tuple against the cone Gamma_k^+.

    Returns ``(status, margin)`` with status one of ``"inside"``,
    ``"boundary"``, ``"outside"`` and margin = min_{m<=k} E_m.  A margin
    within ``tol`` of zero is reported as boundary rather than forced to a
    side.
    """
    kap = curvature_tuple(kappa)
    if kap.ndim != 1:
        raise ArgumentError("cone_membership takes a single curvature tuple")
    _check_k(k, kap.size)
    margin = float(cone_margin(elementary_table(kap), k))
    if margin > tol:
        return "inside", margin
    if margin >= -tol:
        return "boundary", margin
    return "outside", margin


def is_strictly_convex(kappa, tol: float = TOL_CONE) -> bool:
    kap = curvature_tuple(kappa)
    status, _ = cone_membership(kap, kap.size, tol)
    return status == "inside" and bool(kap[0] > tol)


def quotient_F(E: np.ndarray, k: int):
    """F = E_k / E_{k-1} from a table; raises if the denominator vanishes."""
    E = np.asarray(E, dtype=float)
    _check_k(k, E.shape[-1] - 2)
    den = E[..., k - 1]
    if np.any(np.abs(den) < TOL_DIV):
        raise SingularQuotientError(f"E_{k - 1} vanishes; quotient E_{k}/E_{k - 1} undefined")
    F = E[..., k] / den
    return float(F) if F.ndim == 0 else F


def elementary_omit(kappa) -> np.ndarray:
    """Unnormalized e_m of the tuple with entry i removed.

    Output shape ``(..., n, n)``: ``[..., i, m]`` holds e_m(kappa | i) for
    m = 0, ..., n-1.
    """
    k = np.asarray(kappa, dtype=float)
    n = k.shape[-1]
    idx = np.array([[j for j in range(n) if j != i] for i in range(n)], dtype=int)
    sub = k[..., idx]  # (..., n, n-1)
    return elementary_raw(sub)


def elementary_gradient(kappa) -> np.ndarray:
    """dE_m/dkappa_i as an array ``[..., i, m]`` for m = 0, ..., n+1."""
    k = np.asarray(kappa, dtype=float)
    n = k.shape[-1]
    omit = elementary_omit(k)
    grad = np.zeros(k.shape[:-1] + (n, n + 2))
    binom = _binomials(n)
    for m in range(1, n + 1):
        grad[..., m] = omit[..., m - 1] / binom[m]
    return grad


def quotient_gradient_unchecked(kappa, k: int, E=None) -> np.ndarray:
    """dF/dkappa_i without the cone check (for hot loops)."""
    k_arr = np.asarray(kappa, dtype=float)
    if E is None:
        E = elementary_table(k_arr)
    dE = elementary_gradient(k_arr)
    num = E[..., k - 1, None] * dE[..., k] - E[..., k, None] * dE[..., k - 1]
    return num / E[..., k - 1, None] ** 2


def quotient_gradient(kappa, k: int) -> np.ndarray:
    """Gradient of F = E_k/E_{k-1} with respect to the principal curvatures.

    Requires the tuple (every tuple, for a batch) to lie strictly inside
    Gamma_k^+, where every component is positive.
    """
    kap = np.asarray(kappa, dtype=float)
    n = kap.shape[-1]
    _check_k(k, n)
    E = elementary_table(kap)
    margin = cone_margin(E, k)
    if np.any(margin <= TOL_CONE):
        raise ConeViolationError(
            f"tuple not strictly inside Gamma_{k}^+ (margin {float(np.min(margin)):.3e}); "
            "F loses monotonicity")
    return quotient_gradient_unchecked(kap, k, E)


@dataclass(frozen=True)
class SymFuncTable:
    """E-values of one tuple plus the active quotient and its gradient."""

    E: np.ndarray
    k: int
    F: float
    gradF: np.ndarray


def sym_table(kappa, k: int) -> SymFuncTable:
    kap = curvature_tuple(kappa)
    E = elementary_table(kap)
    return SymFuncTable(E=E, k=k, F=quotient_F(E, k), gradF=quotient_gradient(kap, k))


def newton_chain(E: np.ndarray, k: int) -> np.ndarray:
    """Ratios E_{m}/E_{m-1} for m = 1, ..., k+1 (nonincreasing on Gamma_k)."""
    E = np.asarray(E, dtype=float)
    return np.stack([E[..., m] / E[..., m - 1] for m in range(1, k + 2)], axis=-1)
