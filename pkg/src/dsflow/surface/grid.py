"""Sphere grids and their quadrature weights.

Both grids are equispaced in the polar angle.  Quadrature in theta uses
product-integration weights: the nodal values are interpolated by a cosine
series and the series is integrated exactly against sin^{n-1}(theta).  On
the node-including axisymmetric grid this is Clenshaw-Curtis quadrature in
the variable cos(theta) (for n = 2); on the cell-centred lat-long grid it is
Fejer's first rule.  Constant integrands (coordinate slices) are integrated
to roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import gammaln, gammasgn

from ..ambient import sphere_area
from ..errors import ArgumentError


@lru_cache(maxsize=64)
def _sine_power_moments(power: int, m_max: int) -> np.ndarray:
    """mu_m = int_0^pi cos(m t) sin^power(t) dt for m = 0..m_max.

    Closed form pi cos(m pi/2) Gamma(p+1) / (2^p Gamma(1+(p+m)/2) Gamma(1+(p-m)/2)),
    evaluated in log-gamma form; odd m vanish by symmetry about pi/2.
    """
    p = float(power)
    m = np.arange(m_max + 1, dtype=float)
    mu = np.zeros(m_max + 1)
    even = m % 2 == 0
    a = 1.0 + (p + m[even]) / 2.0
    b = 1.0 + (p - m[even]) / 2.0
    pole = (b <= 0) & (b == np.round(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        logmag = np.log(np.pi) + gammaln(p + 1) - p * np.log(2.0) - gammaln(a) - gammaln(b)
        val = np.where(pole, 0.0, (-1.0) ** (m[even] / 2) * gammasgn(b) * np.exp(logmag))
    mu[even] = val
    return mu


@lru_cache(maxsize=64)
def node_weights(N: int, power: int) -> np.ndarray:
    """Weights on theta_j = j pi / N, j = 0..N, for int_0^pi f sin^power."""
    mu = _sine_power_moments(power, N)
    theta = np.arange(N + 1) * np.pi / N
    cm = np.ones(N + 1)
    cm[0] = cm[-1] = 0.5
    cos_mt = np.cos(np.outer(np.arange(N + 1), theta))
    w = (2.0 / N) * (cm * mu) @ cos_mt
    w[0] *= 0.5
    w[-1] *= 0.5
    w.setflags(write=False)
    return w


@lru_cache(maxsize=64)
def cell_weights(N: int, power: int) -> np.ndarray:
    """Weights on theta_j = (j + 1/2) pi / N, j = 0..N-1, for int_0^pi f sin^power."""
    mu = _sine_power_moments(power, N - 1)
    theta = (np.arange(N) + 0.5) * np.pi / N
    cm = np.ones(N)
    cm[0] = 0.5
    cos_mt = np.cos(np.outer(np.arange(N), theta))
    w = (2.0 / N) * (cm * mu) @ cos_mt
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class AxisymmetricGrid:
    """Profile grid theta_j = j pi / N (j = 0..N) on S^n, radial function of theta only.

    ``weights`` already include the factor omega_{n-1} sin^{n-1}(theta) so that
    ``sum(f * weights)`` approximates int_{S^n} f d sigma.
    """

    N: int
    n: int
    kind = "axisymmetric"

    def __post_init__(self):
        if self.N < 4:
            raise ArgumentError(f"axisymmetric grid needs N >= 4 intervals, got {self.N}")
        if self.n < 2:
            raise ArgumentError(f"sphere dimension must be >= 2, got {self.n}")

    @property
    def h(self) -> float:
        return np.pi / self.N

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N + 1,)

    @cached_property
    def weights(self) -> np.ndarray:
        w = sphere_area(self.n - 1) * node_weights(self.N, self.n - 1)
        w.setflags(write=False)
        return w

    @property
    def min_spacing(self) -> float:
        return self.h

    def to_dict(self) -> dict:
        return {"grid_kind": self.kind, "n": self.n, "N": self.N}


@dataclass(frozen=True)
class LatLongGrid:
    """Cell-centred latitude-longitude grid on S^2.

    theta_i = (i + 1/2) pi / N_theta avoids the poles; phi_j = 2 pi j / N_phi
    is periodic.  N_phi must be even so that the stencil can reach across a
    pole (the node opposite in phi).
    """

    N_theta: int
    N_phi: int
    n: int = 2
    kind = "latlong"

    def __post_init__(self):
        if self.n != 2:
            raise ArgumentError("lat-long grid is only available for n = 2")
        if self.N_theta < 4 or self.N_phi < 4 or self.N_phi % 2:
            raise ArgumentError(
                f"lat-long grid needs N_theta >= 4 and even N_phi >= 4, got {self.N_theta}x{self.N_phi}")

    @property
    def h_theta(self) -> float:
        return np.pi / self.N_theta

    @property
    def h_phi(self) -> float:
        return 2 * np.pi / self.N_phi

    @property
    def theta(self) -> np.ndarray:
        return (np.arange(self.N_theta) + 0.5) * self.h_theta

    @property
    def phi(self) -> np.ndarray:
        return np.arange(self.N_phi) * self.h_phi

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N_theta, self.N_phi)

    @cached_property
    def weights(self) -> np.ndarray:
        wt = cell_weights(self.N_theta, 1)
        w = np.repeat(wt[:, None] * self.h_phi, self.N_phi, axis=1)
        w.setflags(write=False)
        return w

    @property
    def min_spacing(self) -> float:
        # azimuthal spacing shrinks to sin(theta_0) h_phi next to the poles
        return min(self.h_theta, np.sin(self.theta[0]) * self.h_phi)

    def to_dict(self) -> dict:
        return {"grid_kind": self.kind, "n": 2, "N_theta": self.N_theta, "N_phi": self.N_phi}
