"""Radial graphs over the sphere and initial-data generators."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import lpmv

from ..errors import ArgumentError, ConstructionError, SpacelikeError
from .grid import AxisymmetricGrid, LatLongGrid

DEFAULT_N = 256
DEFAULT_LATLONG = (128, 256)


@dataclass(frozen=True, eq=False)
class RadialField:
    """The graph {(r(xi), xi)} sampled on a sphere grid.

    ``values`` has the grid's shape: (N+1,) for axisymmetric grids and
    (N_theta, N_phi) for lat-long grids.
    """

    grid: AxisymmetricGrid | LatLongGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ArgumentError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.grid.n

    def with_values(self, values) -> "RadialField":
        return RadialField(self.grid, values)

    @property
    def osc(self) -> float:
        return float(self.values.max() - self.values.min())

    def to_dict(self) -> dict:
        d = self.grid.to_dict()
        v = self.values.T if isinstance(self.grid, LatLongGrid) else self.values
        d["values"] = [float(x) for x in v.ravel()]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RadialField":
        kind = d.get("grid_kind")
        vals = np.asarray(d["values"], dtype=float)
        if kind == "axisymmetric":
            grid = AxisymmetricGrid(int(d["N"]), int(d["n"]))
            return cls(grid, vals)
        if kind == "latlong":
            grid = LatLongGrid(int(d["N_theta"]), int(d["N_phi"]), int(d.get("n", 2)))
            # serialized phi-major: phi is the slow index
            return cls(grid, vals.reshape(grid.N_phi, grid.N_theta).T)
        raise ArgumentError(f"unknown grid_kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "RadialField":
        return cls.from_dict(json.loads(text))


def make_grid(n: int, kind: str = "axisymmetric", N: int | None = None,
              N_theta: int | None = None, N_phi: int | None = None):
    if kind == "axisymmetric":
        return AxisymmetricGrid(N or DEFAULT_N, n)
    if kind == "latlong":
        return LatLongGrid(N_theta or DEFAULT_LATLONG[0], N_phi or DEFAULT_LATLONG[1], n)
    raise ArgumentError(f"unknown grid kind {kind!r}")


def slice_field(grid, s0: float) -> RadialField:
    return RadialField(grid, np.full(grid.shape, float(s0)))


def cosine_modes_field(grid, s0: float, modes) -> RadialField:
    """r = s0 + sum_j a_j cos(j theta); axisymmetric grids only."""
    if not isinstance(grid, AxisymmetricGrid):
        raise ArgumentError("cosine_modes requires an axisymmetric grid; use harmonic_modes for lat-long")
    th = grid.theta
    r = np.full(grid.shape, float(s0))
    for j, a in modes:
        r += float(a) * np.cos(int(j) * th)
    return RadialField(grid, r)


def harmonic_modes_field(grid, s0: float, modes) -> RadialField:
    """r = s0 + sum a * P_l^m(cos theta) cos(m phi) on a lat-long grid.

    ``modes`` holds triples (l, m, a).
    """
    if not isinstance(grid, LatLongGrid):
        raise ArgumentError("harmonic_modes requires a lat-long grid")
    th, ph = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    r = np.full(grid.shape, float(s0))
    for l, m, a in modes:
        l, m = int(l), int(m)
        if not (0 <= m <= l):
            raise ArgumentError(f"harmonic mode needs 0 <= m <= l, got l={l}, m={m}")
        r += float(a) * lpmv(m, l, np.cos(th)) * np.cos(m * ph)
    return RadialField(grid, r)


def random_modes_field(grid, s0: float, seed: int, modes=(2, 3, 4), amp_range=(0.01, 0.05),
                       count: int | None = None) -> RadialField:
    """Seeded random cosine-mode perturbation of a slice (axisymmetric)."""
    rng = np.random.default_rng(seed)
    modes = list(modes)
    if count is None:
        count = int(rng.integers(1, len(modes) + 1))
    chosen = sorted(rng.choice(modes, size=count, replace=False).tolist())
    amps = rng.uniform(*amp_range, size=count) * rng.choice([-1.0, 1.0], size=count)
    return cosine_modes_field(grid, s0, list(zip(chosen, amps.tolist())))


def validate_field(field: RadialField, k: int | None = None, require=("spacelike",)):
    """Check initial-data hypotheses; raise ConstructionError naming the worst node.

    ``require`` may contain ``"spacelike"``, ``"cone"`` (k-convexity, needs k),
    ``"convex"`` (all curvatures positive) and ``"pinched"``.
    Returns the monitor dictionary when every condition holds.
    """
    from .geometry import compute_geometry
    from .integrals import monitors

    if np.any(field.values < 0):
        j = int(np.argmin(field.values))
        raise ConstructionError("radial function must be nonnegative", "positivity", j)
    try:
        geom = compute_geometry(field)
    except SpacelikeError as exc:
        raise ConstructionError(f"spacelike condition violated at {len(exc.nodes)} node(s)",
                                "spacelike", exc.nodes[0] if exc.nodes else None) from exc
    kk = k if k is not None else field.n
    mon = monitors(geom, kk)
    checks = {
        "cone": (mon["min_cone_margin"], np.argmin(geom.cone_margins(kk))),
        "convex": (mon["min_kappa"], np.argmin(geom.kappa[:, 0])),
        "pinched": (mon["min_pinch_gap"], np.argmin(geom.pinch_gap)),
    }
    for cond in require:
        if cond == "spacelike":
            continue
        if cond not in checks:
            raise ArgumentError(f"unknown validation condition {cond!r}")
        if cond == "cone" and k is None:
            raise ArgumentError("cone validation needs k")
        value, node = checks[cond]
        if not value > 0:
            raise ConstructionError(f"{cond} condition violated (min {value:.3e} at node {int(node)})",
                                    cond, int(node))
    return mon


def make_surface(spec: dict, n: int | None = None, grid=None, k: int | None = None,
                 require=("spacelike",)) -> RadialField:
    """Build and validate a RadialField from a surface description.

    Recognised ``spec["kind"]`` values: ``slice`` (s0), ``cosine_modes``
    (s0, modes=[[j, a], ...]), ``harmonic_modes`` (s0, modes=[[l, m, a], ...];
    lat-long, n = 2), ``random_modes`` (s0, seed, optional modes/amp_range/count),
    ``values`` (explicit node values) and ``field`` (a serialized RadialField).
    """
    kind = spec.get("kind")
    if kind == "field":
        field = RadialField.from_dict(spec["field"])
    else:
        if grid is None:
            gs = spec.get("grid", {})
            grid = make_grid(n if n is not None else int(spec.get("n", 2)), gs.get("kind", "axisymmetric"),
                             gs.get("N"), gs.get("N_theta"), gs.get("N_phi"))
        if kind == "slice":
            field = slice_field(grid, spec["s0"])
        elif kind == "cosine_modes":
            field = cosine_modes_field(grid, spec["s0"], spec.get("modes", []))
        elif kind == "harmonic_modes":
            field = harmonic_modes_field(grid, spec["s0"], spec.get("modes", []))
        elif kind == "random_modes":
            field = random_modes_field(grid, spec["s0"], int(spec.get("seed", 0)),
                                       tuple(spec.get("modes", (2, 3, 4))),
                                       tuple(spec.get("amp_range", (0.01, 0.05))),
                                       spec.get("count"))
        elif kind == "values":
            field = RadialField(grid, np.asarray(spec["values"], dtype=float).reshape(grid.shape))
        else:
            raise ArgumentError(f"unknown surface kind {kind!r}")
    validate_field(field, k, require)
    return field
