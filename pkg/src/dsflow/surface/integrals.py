"""Surface integrals, Minkowski residuals and pointwise monitors."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from ..ambient import EPS_K, cosh_power_integral
from .geometry import Geometry


def integrate_scalar(geom: Geometry, weight) -> float:
    """Quadrature of int_Sigma f d mu.

    ``weight`` is a per-node array, a scalar, or a callable taking the
    Geometry and returning one of those.
    """
    f = weight(geom) if callable(weight) else weight
    if np.ndim(f) == 0:
        return float(f) * float(np.sum(geom.dmu))
    return float(np.dot(np.ravel(f), geom.dmu))


def enclosed_volume_term(geom: Geometry, base: float = 0.0) -> float:
    """A_{-1} = (n+1) int_{S^n} int_base^r cosh^n dt d sigma."""
    n = geom.n
    radial = (n + 1) * (np.asarray(cosh_power_integral(n, geom.r)) - cosh_power_integral(n, base))
    return float(np.sum(radial * geom.weights))


def quermassintegrals(geom: Geometry, base: float = 0.0) -> np.ndarray:
    """A_{-1}, ..., A_n as an array indexed by k + 1."""
    n = geom.n
    A = np.empty(n + 2)
    A[0] = enclosed_volume_term(geom, base)
    for k in range(0, n + 1):
        A[k + 1] = integrate_scalar(geom, geom.E[:, k])
        if k >= 1:
            A[k + 1] += EPS_K * k / (n + 2 - k) * A[k - 1]
    return A


def weighted_integrals(geom: Geometry, base: float = 0.0) -> np.ndarray:
    """B_{-1}, ..., B_n as an array indexed by k + 1."""
    n = geom.n
    B = np.empty(n + 2)
    B[0] = float(np.sum((geom.lam ** (n + 1) - np.cosh(base) ** (n + 1)) * geom.weights))
    for k in range(0, n + 1):
        B[k + 1] = integrate_scalar(geom, geom.lam_p * geom.E[:, k])
    return B


def minkowski_residual(geom: Geometry, l: int) -> float:
    """Quadrature of int (u E_l - lam' E_{l-1}) d mu (zero in the continuum)."""
    return integrate_scalar(geom, geom.u * geom.E[:, l] - geom.lam_p * geom.E[:, l - 1])


def monitors(geom: Geometry, k: int) -> dict:
    """Node minima of the pointwise hypotheses plus r bounds."""
    r = geom.r
    return {
        "min_upsilon_sq": float(np.min(geom.upsilon**2)),
        "min_cone_margin": float(np.min(geom.cone_margins(k))),
        "min_pinch_gap": float(np.min(geom.pinch_gap)),
        "min_kappa": float(np.min(geom.kappa[:, 0])),
        "osc_r": float(r.max() - r.min()),
        "max_r": float(r.max()),
        "min_r": float(r.min()),
        "max_u": float(np.max(geom.u)),
    }


@dataclass
class IntegralReport:
    """Integral quantities and monitor minima at one flow time.

    ``A`` and ``B`` hold indices -1..n at positions 0..n+1; use :meth:`a` and
    :meth:`b` for index-based access.
    """

    t: float
    A: list
    B: list
    minkowski_residuals: list
    osc_r: float
    max_speed: float
    min_upsilon_sq: float
    min_cone_margin: float
    min_pinch_gap: float
    min_kappa: float
    max_r: float
    min_r: float
    max_u: float
    extra: dict = dc_field(default_factory=dict)

    def a(self, k: int) -> float:
        return self.A[k + 1]

    def b(self, k: int) -> float:
        return self.B[k + 1]

    def to_dict(self) -> dict:
        return asdict(self)

    def is_finite(self) -> bool:
        vals = [self.t, *self.A, *self.B, *self.minkowski_residuals, self.osc_r, self.max_speed,
                self.min_upsilon_sq, self.min_cone_margin, self.min_pinch_gap, self.min_kappa]
        return bool(np.all(np.isfinite(vals)))


def integral_report(geom: Geometry, k: int, t: float = 0.0, max_speed: float = float("nan"),
                    base: float = 0.0, mon: dict | None = None) -> IntegralReport:
    n = geom.n
    if mon is None:
        mon = monitors(geom, k)
    return IntegralReport(
        t=float(t),
        A=quermassintegrals(geom, base).tolist(),
        B=weighted_integrals(geom, base).tolist(),
        minkowski_residuals=[minkowski_residual(geom, l) for l in range(1, n + 1)],
        osc_r=mon["osc_r"], max_speed=float(max_speed),
        min_upsilon_sq=mon["min_upsilon_sq"], min_cone_margin=mon["min_cone_margin"],
        min_pinch_gap=mon["min_pinch_gap"], min_kappa=mon["min_kappa"],
        max_r=mon["max_r"], min_r=mon["min_r"], max_u=mon["max_u"],
    )
