"""Time integration of the two locally constrained flows.

Both flows move the graph with normal speed S, which for a radial graph is
the scalar equation dr/dt = ups * S at fixed xi:

    FL1:  S = 1 - E_{k-1} / (Theta E_k) = 1 - 1/(Theta F)
    FL3:  S = u F - lam'

with F = E_k/E_{k-1} and Theta = u/lam'.  Coordinate slices are stationary
for both.  Stepping is classical RK4 under a parabolic CFL restriction.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import _kernels
from ._kernels import axisym_velocity
from .errors import ConeViolationError, ConfigError, ConstructionError, NumericsError, SpacelikeError
from .surface.field import RadialField
from .surface.geometry import Geometry, axisymmetric_curvatures, compute_geometry
from .surface.grid import AxisymmetricGrid
from .surface.integrals import IntegralReport, integral_report, monitors
from .symfun import TOL_DIV, quotient_gradient_unchecked

log = logging.getLogger(__name__)

FLOW_KINDS = ("FL1", "FL3")
MONITOR_NAMES = ("spacelike", "cone", "pinched", "convex")
MONITOR_SLACK = 1e-9
# steps between refreshes of the stable step size
DT_REFRESH = 10


@dataclass
class FlowConfig:
    flow_kind: str = "FL1"
    k: int = 2
    t_end: float = 50.0
    cfl: float = 0.2
    record_every: int = 1
    stop_tol: float = 1e-9
    enforce: tuple = ("spacelike", "cone")
    store_fields: bool = False
    max_steps: int | None = None

    def __post_init__(self):
        if self.flow_kind not in FLOW_KINDS:
            raise ConfigError(f"flow_kind must be one of {FLOW_KINDS}, got {self.flow_kind!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k!r}")
        if not self.cfl > 0:
            raise ConfigError(f"cfl must be positive, got {self.cfl!r}")
        if not self.t_end >= 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end!r}")
        if int(self.record_every) < 1:
            raise ConfigError("record_every must be >= 1")
        if not self.stop_tol > 0:
            raise ConfigError("stop_tol must be positive")
        bad = set(self.enforce) - set(MONITOR_NAMES)
        if bad:
            raise ConfigError(f"unknown monitors in enforce: {sorted(bad)}")
        self.enforce = tuple(self.enforce)

    @property
    def required_hypotheses(self) -> tuple:
        if self.flow_kind == "FL1":
            return ("spacelike", "cone", "pinched")
        return ("spacelike", "convex")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["enforce"] = list(self.enforce)
        return d


def speed(geom: Geometry, flow_kind: str, k: int, check_cone: bool = True) -> np.ndarray:
    """Normal speed S at every node."""
    if not (1 <= k <= geom.n):
        raise ConfigError(f"k must lie in [1, {geom.n}], got {k}")
    E = geom.E
    if check_cone:
        margin = geom.cone_margins(k)
        if np.any(margin <= 0):
            raise ConeViolationError(f"curvature left Gamma_{k}^+ (min margin {margin.min():.3e})")
    den = E[:, k - 1]
    if np.any(np.abs(den) < TOL_DIV):
        raise NumericsError(f"E_{k - 1} vanished")
    F = E[:, k] / den
    if flow_kind == "FL1":
        return 1.0 - 1.0 / (geom.Theta * F)
    if flow_kind == "FL3":
        return geom.u * F - geom.lam_p
    raise ConfigError(f"unknown flow kind {flow_kind!r}")


def radial_velocity(geom: Geometry, flow_kind: str, k: int, check_cone: bool = True) -> np.ndarray:
    """dr/dt = ups * S, shaped like the field values."""
    v = geom.upsilon * speed(geom, flow_kind, k, check_cone)
    return v.reshape(geom.field.values.shape)


def axisymmetric_velocity(values: np.ndarray, grid, flow_kind: str, k: int) -> np.ndarray:
    """dr/dt for an axisymmetric profile without building a Geometry.

    With kappa = (k_t, k_p, ..., k_p) the normalized symmetric functions are
    E_m = k_p^{m-1} ((n-m) k_p + m k_t) / n.
    """
    n = grid.n
    lam, lam_p, ups, k_t, k_p = axisymmetric_curvatures(values, grid.h)

    def E(m):
        if m == 0:
            return 1.0
        return k_p ** (m - 1) * ((n - m) * k_p + m * k_t) / n

    num, den = E(k), E(k - 1)
    if np.any(np.asarray(den) <= 0) or np.any(num <= 0):
        raise ConeViolationError(f"curvature left Gamma_{k}^+ during a stage")
    u = lam / ups
    if flow_kind == "FL1":
        return ups * (1.0 - lam_p * den / (u * num))
    return ups * (u * num / den - lam_p)


def stable_dt(geom: Geometry, k: int, cfl: float, flow_kind: str = "FL1") -> float:
    """Explicit step size cfl * dx^2 / D for the largest nodal diffusivity D.

    D = c * max(max_i dF/dk_i, sum_i dF/dk_i / 3) * max eig(g^{-1}), with
    c = 1/(Theta F^2) for FL1 and c = u for FL3.  The sum term accounts for
    the pole rows, where every principal direction feels r''.
    """
    if not cfl > 0:
        raise ConfigError(f"cfl must be positive, got {cfl!r}")
    grad = quotient_gradient_unchecked(geom.kappa, k, geom.E)
    F = geom.E[:, k] / geom.E[:, k - 1]
    fprime = np.maximum(grad.max(axis=1), grad.sum(axis=1) / 3.0)
    if flow_kind == "FL1":
        coef = 1.0 / (geom.Theta * F * F)
    elif flow_kind == "FL3":
        coef = geom.u
    else:
        raise ConfigError(f"unknown flow kind {flow_kind!r}")
    D = float(np.max(coef * fprime * geom.max_g_inv))
    if not (D > 0 and np.isfinite(D)):
        raise ConfigError(f"nonpositive diffusivity estimate {D!r}; data outside the cone?")
    return cfl * geom.field.grid.min_spacing ** 2 / D


def step(field: RadialField, geom: Geometry | None, dt: float, flow_kind: str, k: int,
         k1: np.ndarray | None = None, check_cone: bool = True) -> RadialField:
    """One RK4 step of dr/dt = ups * S; geometry is recomputed at every stage."""
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt!r}")

    lean = isinstance(field.grid, AxisymmetricGrid)

    def rhs(values):
        if lean:
            v, status = axisym_velocity(values, field.grid.h, field.n, k, flow_kind == "FL1")
            if status == _kernels.NOT_SPACELIKE:
                raise SpacelikeError("graph lost spacelikeness during a stage")
            if status == _kernels.OUT_OF_CONE:
                raise ConeViolationError(f"curvature left Gamma_{k}^+ during a stage")
            return v
        return radial_velocity(compute_geometry(field.with_values(values)), flow_kind, k, check_cone)

    r0 = field.values
    if k1 is None:
        k1 = (radial_velocity(geom, flow_kind, k, check_cone) if geom is not None else rhs(r0))
    k2 = rhs(r0 + 0.5 * dt * k1)
    k3 = rhs(r0 + 0.5 * dt * k2)
    k4 = rhs(r0 + dt * k3)
    r1 = r0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(r1)):
        raise NumericsError("non-finite radial function after step")
    return field.with_values(r1)


@dataclass
class Trajectory:
    config: FlowConfig
    times: list = dc_field(default_factory=list)
    reports: list = dc_field(default_factory=list)
    fields: list = dc_field(default_factory=list)
    termination: str = "running"
    reason: str = ""
    steps: int = 0
    final_field: RadialField | None = None
    r_infinity: float | None = None
    metadata: dict = dc_field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.final_field.n

    def series(self, name: str) -> np.ndarray:
        """Time series of a report quantity: 'A_k', 'B_k', or a report attribute."""
        if name.startswith("A_") or name.startswith("B_"):
            idx = int(name[2:])
            getter = IntegralReport.a if name[0] == "A" else IntegralReport.b
            return np.array([getter(rep, idx) for rep in self.reports])
        return np.array([getattr(rep, name) for rep in self.reports])

    def csv_header(self) -> list:
        n = self.n
        return (["t"] + [f"A_{k}" for k in range(-1, n + 1)] + [f"B_{k}" for k in range(-1, n + 1)]
                + ["osc_r", "max_speed", "min_upsilon_sq", "min_cone_margin", "min_pinch_gap",
                   "min_kappa"] + [f"minkowski_res_{l}" for l in range(1, n + 1)])

    def csv_rows(self):
        for rep in self.reports:
            yield ([rep.t, *rep.A, *rep.B, rep.osc_r, rep.max_speed, rep.min_upsilon_sq,
                    rep.min_cone_margin, rep.min_pinch_gap, rep.min_kappa, *rep.minkowski_residuals])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.csv_header())
            for row in self.csv_rows():
                w.writerow([f"{x:.16e}" for x in row])

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "termination": self.termination,
            "reason": self.reason,
            "steps": self.steps,
            "r_infinity": self.r_infinity,
            "metadata": self.metadata,
            "columns": self.csv_header(),
            "reports": [rep.to_dict() for rep in self.reports],
            "final_field": self.final_field.to_dict() if self.final_field is not None else None,
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, allow_nan=True))


def _violations(mon: dict, enforce) -> str | None:
    if "cone" in enforce and not mon["min_cone_margin"] > 0:
        return f"cone monitor violated (min margin {mon['min_cone_margin']:.3e})"
    if "pinched" in enforce and mon["min_pinch_gap"] < -MONITOR_SLACK:
        return f"pinching monitor violated (min gap {mon['min_pinch_gap']:.3e})"
    if "convex" in enforce and mon["min_kappa"] < -MONITOR_SLACK:
        return f"convexity monitor violated (min kappa {mon['min_kappa']:.3e})"
    return None


def check_hypotheses(geom: Geometry, config: FlowConfig):
    mon = monitors(geom, config.k)
    if "cone" in config.required_hypotheses and not mon["min_cone_margin"] > 0:
        raise ConstructionError(f"initial data not {config.k}-convex", "cone")
    if "pinched" in config.required_hypotheses and not mon["min_pinch_gap"] > 0:
        raise ConstructionError("initial data violates the pinching condition", "pinched")
    if "convex" in config.required_hypotheses and not mon["min_kappa"] > 0:
        raise ConstructionError("initial data not strictly convex", "convex")


def run(config: FlowConfig, initial: RadialField, check_initial: bool = True) -> Trajectory:
    """Integrate until t_end or until the graph has settled on a slice."""
    n = initial.n
    if config.k > n:
        raise ConfigError(f"k = {config.k} exceeds n = {n}")
    traj = Trajectory(config=config)
    traj.metadata = {
        "n": n,
        "grid": initial.grid.to_dict(),
        "proven_regime": not (config.flow_kind == "FL3" and config.k >= 3),
    }
    if not traj.metadata["proven_regime"]:
        traj.metadata["note"] = "outside proven regime: FL3 long-time existence is known for k <= 2"
    field = initial
    geom = compute_geometry(field)
    if check_initial:
        check_hypotheses(geom, config)
    t = 0.0
    vel = radial_velocity(geom, config.flow_kind, config.k)

    mon = monitors(geom, config.k)

    def record():
        max_speed = float(np.max(np.abs(vel)))
        traj.times.append(t)
        traj.reports.append(integral_report(geom, config.k, t, max_speed, mon=mon))
        if config.store_fields:
            traj.fields.append(field)

    record()
    last_recorded = 0
    while True:
        converged = field.osc < config.stop_tol and float(np.max(np.abs(vel))) < config.stop_tol
        if converged:
            traj.termination = "converged"
            break
        if t >= config.t_end * (1 - 1e-15):
            traj.termination = "t_end_reached"
            break
        if config.max_steps is not None and traj.steps >= config.max_steps:
            traj.termination = "t_end_reached"
            traj.reason = "max_steps reached"
            break
        if traj.steps % DT_REFRESH == 0:
            dt_stable = stable_dt(geom, config.k, config.cfl, config.flow_kind)
        dt = min(dt_stable, config.t_end - t)
        try:
            new_field = step(field, geom, dt, config.flow_kind, config.k, k1=vel)
            new_geom = compute_geometry(new_field)
            new_vel = radial_velocity(new_geom, config.flow_kind, config.k)
        except (SpacelikeError, ConeViolationError, NumericsError) as exc:
            traj.termination = "aborted"
            traj.reason = f"{type(exc).__name__}: {exc}"
            break
        field, geom, vel = new_field, new_geom, new_vel
        t += dt
        traj.steps += 1
        mon = monitors(geom, config.k)
        mon_reason = _violations(mon, config.enforce)
        if mon_reason:
            record()
            last_recorded = traj.steps
            traj.termination = "aborted"
            traj.reason = mon_reason
            break
        if traj.steps % config.record_every == 0:
            record()
            last_recorded = traj.steps
    if last_recorded != traj.steps:
        record()
    traj.final_field = field
    if traj.termination == "converged":
        traj.r_infinity = float(np.mean(field.values))
    log.info("flow %s k=%d finished: %s after %d steps, t=%.6g", config.flow_kind, config.k,
             traj.termination, traj.steps, t)
    return traj
