"""Induced geometry of a spacelike radial graph in de Sitter space.

For a graph r over (S^n, sigma) the ambient metric -dr^2 + cosh(r)^2 sigma
induces

    g_ij = lam^2 sigma_ij - r_i r_j,
    h_ij = (r_,ij + lam lam' sigma_ij - 2 lam' / lam r_i r_j) / ups,
    ups  = sqrt(1 - |Dr|^2 / lam^2),   u = lam / ups,

with r_,ij the sigma-covariant Hessian.  Tensors are stored in a
sigma-orthonormal frame (e_theta, e_phi / sin theta, ...), which makes the
axisymmetric case diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import NumericsError, SpacelikeError
from ..symfun import cone_margin, elementary_table
from .field import RadialField
from .grid import AxisymmetricGrid, LatLongGrid


@dataclass(frozen=True)
class GeometryFrame:
    """Geometric state at a single node."""

    lam: float
    lam_p: float
    upsilon: float
    u: float
    Theta: float
    g: np.ndarray
    g_inv: np.ndarray
    h: np.ndarray
    W: np.ndarray
    kappa: np.ndarray
    E: np.ndarray
    area_weight: float
    pinch_gap: float


def axisymmetric_derivatives(r: np.ndarray, h: float):
    """r', r'' and the azimuthal Hessian eigenvalue cot(theta) r'.

    Even ghost extension at both poles; at the poles the azimuthal term is its
    L'Hopital limit r''.
    """
    rp = np.empty_like(r)
    rpp = np.empty_like(r)
    rp[1:-1] = (r[2:] - r[:-2]) / (2 * h)
    rp[0] = rp[-1] = 0.0
    rpp[1:-1] = (r[2:] - 2 * r[1:-1] + r[:-2]) / h**2
    rpp[0] = 2 * (r[1] - r[0]) / h**2
    rpp[-1] = 2 * (r[-2] - r[-1]) / h**2
    az = np.empty_like(r)
    N = r.size - 1
    theta = np.arange(1, N) * h
    az[1:-1] = rp[1:-1] / np.tan(theta)
    az[0] = rpp[0]
    az[-1] = rpp[-1]
    return rp, rpp, az


def axisymmetric_curvatures(r: np.ndarray, h: float):
    """Lean kernel: (lam, lam', ups, kappa_theta, kappa_phi) for a profile r(theta)."""
    rp, rpp, az = axisymmetric_derivatives(r, h)
    lam = np.cosh(r)
    lam_p = np.sinh(r)
    ups2 = 1.0 - (rp / lam) ** 2
    _spacelike_check(ups2)
    ups = np.sqrt(ups2)
    lam2 = lam * lam
    k_t = (rpp + lam * lam_p - 2.0 * lam_p / lam * rp * rp) / (ups * ups2 * lam2)
    k_p = (az + lam * lam_p) / (ups * lam2)
    return lam, lam_p, ups, k_t, k_p


def _spacelike_check(ups2: np.ndarray):
    bad = np.flatnonzero(~(ups2 > 0))
    if bad.size:
        if np.any(np.isnan(ups2)):
            raise NumericsError("NaN in radial derivatives")
        raise SpacelikeError(f"graph not spacelike at {bad.size} node(s), worst upsilon^2 = "
                             f"{ups2.ravel()[bad].min():.3e}", bad.tolist())


class Geometry:
    """Per-node geometry of a RadialField, stored as arrays over flattened nodes.

    Index ``i`` of every array refers to node ``i`` of ``field.values.ravel()``;
    ``frame(i)`` packages one node as a :class:`GeometryFrame`.
    """

    def __init__(self, field, lam, lam_p, upsilon, kappa, weights, g_diag=None, h_diag=None,
                 g=None, h=None, grad_sq=None):
        self.field = field
        self.n = field.n
        self.lam = lam
        self.lam_p = lam_p
        self.upsilon = upsilon
        self.u = lam / upsilon
        self.Theta = self.u / lam_p if np.all(lam_p > 0) else np.divide(
            self.u, lam_p, out=np.full_like(lam, np.inf), where=lam_p > 0)
        self.kappa = kappa
        self.E = elementary_table(kappa)
        self.area_density = lam**self.n * upsilon
        self.weights = weights
        self.dmu = self.area_density * weights
        self.grad_sq = grad_sq
        self._g_diag = g_diag
        self._h_diag = h_diag
        self._g = g
        self._h = h

    @property
    def r(self) -> np.ndarray:
        return self.field.values.ravel()

    @property
    def size(self) -> int:
        return self.lam.size

    @cached_property
    def g(self) -> np.ndarray:
        if self._g is not None:
            return self._g
        return _diag_tensor(self._g_diag)

    @cached_property
    def h(self) -> np.ndarray:
        if self._h is not None:
            return self._h
        return _diag_tensor(self._h_diag)

    @cached_property
    def g_inv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @cached_property
    def W(self) -> np.ndarray:
        return self.g_inv @ self.h

    @property
    def pinch_gap(self) -> np.ndarray:
        """Smallest eigenvalue of Theta I - W."""
        return self.Theta - self.kappa[:, -1]

    @property
    def max_g_inv(self) -> np.ndarray:
        """Largest eigenvalue of g^{-1} relative to sigma, 1 / (lam^2 ups^2)."""
        return 1.0 / (self.lam * self.upsilon) ** 2

    def cone_margins(self, k: int) -> np.ndarray:
        return cone_margin(self.E, k)

    def frame(self, i: int) -> GeometryFrame:
        return GeometryFrame(
            lam=float(self.lam[i]), lam_p=float(self.lam_p[i]), upsilon=float(self.upsilon[i]),
            u=float(self.u[i]), Theta=float(self.Theta[i]), g=self.g[i], g_inv=self.g_inv[i],
            h=self.h[i], W=self.W[i], kappa=self.kappa[i], E=self.E[i],
            area_weight=float(self.dmu[i]), pinch_gap=float(self.pinch_gap[i]))

    def frames(self) -> list[GeometryFrame]:
        return [self.frame(i) for i in range(self.size)]


def _diag_tensor(diag: np.ndarray) -> np.ndarray:
    M, n = diag.shape
    out = np.zeros((M, n, n))
    idx = np.arange(n)
    out[:, idx, idx] = diag
    return out


def _axisymmetric_geometry(field: RadialField) -> Geometry:
    grid = field.grid
    n = grid.n
    r = field.values
    rp, rpp, az = axisymmetric_derivatives(r, grid.h)
    lam = np.cosh(r)
    lam_p = np.sinh(r)
    ups2 = 1.0 - (rp / lam) ** 2
    _spacelike_check(ups2)
    ups = np.sqrt(ups2)
    lam2 = lam * lam
    h_tt = (rpp + lam * lam_p - 2.0 * lam_p / lam * rp * rp) / ups
    h_pp = (az + lam * lam_p) / ups
    g_tt = lam2 * ups2
    k_t = h_tt / g_tt
    k_p = h_pp / lam2
    kappa = np.empty((r.size, n))
    kappa[:, 0] = k_t
    kappa[:, 1:] = k_p[:, None]
    kappa.sort(axis=1)
    if not np.all(np.isfinite(kappa)):
        raise NumericsError("non-finite principal curvatures")
    g_diag = np.empty((r.size, n))
    g_diag[:, 0] = g_tt
    g_diag[:, 1:] = lam2[:, None]
    h_diag = np.empty((r.size, n))
    h_diag[:, 0] = h_tt
    h_diag[:, 1:] = h_pp[:, None]
    return Geometry(field, lam, lam_p, ups, kappa, grid.weights, g_diag=g_diag, h_diag=h_diag,
                    grad_sq=rp * rp)


def latlong_derivatives(r: np.ndarray, grid: LatLongGrid):
    """Central differences with cross-pole ghost rows (phi shifted by pi)."""
    Nt, Np = r.shape
    half = Np // 2
    ext = np.empty((Nt + 2, Np))
    ext[1:-1] = r
    ext[0] = np.roll(r[0], -half)
    ext[-1] = np.roll(r[-1], -half)
    ht, hp = grid.h_theta, grid.h_phi
    r_t = (ext[2:] - ext[:-2]) / (2 * ht)
    r_tt = (ext[2:] - 2 * r + ext[:-2]) / ht**2
    r_p = (np.roll(r, -1, axis=1) - np.roll(r, 1, axis=1)) / (2 * hp)
    r_pp = (np.roll(r, -1, axis=1) - 2 * r + np.roll(r, 1, axis=1)) / hp**2
    # ghost rows hold the smooth continuation R(-theta, phi) = r(theta, phi + pi)
    ext_p = (np.roll(ext, -1, axis=1) - np.roll(ext, 1, axis=1)) / (2 * hp)
    r_tp = (ext_p[2:] - ext_p[:-2]) / (2 * ht)
    return r_t, r_p, r_tt, r_tp, r_pp


def _latlong_geometry(field: RadialField) -> Geometry:
    grid = field.grid
    r = field.values
    th = grid.theta[:, None]
    s, c = np.sin(th), np.cos(th)
    r_t, r_p, r_tt, r_tp, r_pp = latlong_derivatives(r, grid)
    # sigma-orthonormal frame components
    d1 = r_t
    d2 = r_p / s
    H11 = r_tt
    H12 = (r_tp - c / s * r_p) / s
    H22 = r_pp / s**2 + c / s * r_t
    lam = np.cosh(r)
    lam_p = np.sinh(r)
    ups2 = 1.0 - (d1 * d1 + d2 * d2) / lam**2
    _spacelike_check(ups2)
    ups = np.sqrt(ups2)
    M = r.size
    D = np.stack([d1.ravel(), d2.ravel()], axis=1)
    H = np.empty((M, 2, 2))
    H[:, 0, 0] = H11.ravel()
    H[:, 0, 1] = H[:, 1, 0] = H12.ravel()
    H[:, 1, 1] = H22.ravel()
    lam_f, lamp_f, ups_f = lam.ravel(), lam_p.ravel(), ups.ravel()
    DD = D[:, :, None] * D[:, None, :]
    eye = np.eye(2)
    g = lam_f[:, None, None] ** 2 * eye - DD
    h = (H + (lam_f * lamp_f)[:, None, None] * eye
         - 2.0 * (lamp_f / lam_f)[:, None, None] * DD) / ups_f[:, None, None]
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    kappa = np.linalg.eigvalsh(Linv @ h @ np.swapaxes(Linv, 1, 2))
    if not np.all(np.isfinite(kappa)):
        raise NumericsError("non-finite principal curvatures")
    return Geometry(field, lam_f, lamp_f, ups_f, kappa, grid.weights.ravel(), g=g, h=h,
                    grad_sq=(d1 * d1 + d2 * d2).ravel())


def compute_geometry(field: RadialField) -> Geometry:
    """Full geometry pipeline for a radial graph; raises SpacelikeError if not spacelike."""
    if isinstance(field.grid, AxisymmetricGrid):
        return _axisymmetric_geometry(field)
    if isinstance(field.grid, LatLongGrid):
        return _latlong_geometry(field)
    raise TypeError(f"unsupported grid {type(field.grid).__name__}")
