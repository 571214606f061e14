"""Executable checks on trajectories and single surfaces.

Every check returns a :class:`CheckResult`.  A result passes when its worst
violation does not exceed its tolerance; results whose hypotheses are not met
are still computed but carry status ``"skipped"``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .ambient import invert_slice_profile, slice_phi, slice_psi
from .errors import ConfigError, RangeError
from .flow import Trajectory, speed
from .surface.field import RadialField
from .surface.geometry import Geometry, compute_geometry
from .surface.integrals import integrate_scalar, monitors, quermassintegrals, weighted_integrals

CONSERVATION_TOL = 1e-5
MONOTONE_SLACK = 1e-9
RATE_TOL = 1e-2
INEQUALITY_TOL = 1e-8
EQUALITY_TOL = 1e-6
BARRIER_SLACK = 1e-10
SUPPORT_SLACK = 1e-9
PRESERVATION_SLACK = 1e-9


@dataclass
class CheckResult:
    name: str
    status: str
    worst_violation: float
    tolerance: float
    details: list = dc_field(default_factory=list)

    @classmethod
    def judge(cls, name, worst, tol, details=None):
        worst = float(worst)
        status = "pass" if worst <= tol else "fail"
        return cls(name, status, worst, float(tol), details or [])

    @classmethod
    def skipped(cls, name, reason, tol=float("nan"), details=None):
        d = [{"reason": reason}] + list(details or [])
        return cls(name, "skipped", float("nan"), float(tol), d)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("worst_violation", "tolerance"):
            if not math.isfinite(d[key]):
                d[key] = None
        return d


def format_table(results) -> str:
    rows = [("check", "status", "worst", "tol")]
    for r in results:
        rows.append((r.name, r.status, f"{r.worst_violation:.3e}", f"{r.tolerance:.1e}"))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _config_of(traj: Trajectory):
    return traj.config.flow_kind, traj.config.k, traj.n


# -- conservation and monotonicity ------------------------------------------------

def check_conserved(traj: Trajectory, quantity: str, tol: float = CONSERVATION_TOL) -> CheckResult:
    """Relative drift max_t |Q(t) - Q(0)| / |Q(0)| of a conserved quantity.

    ``quantity`` is ``"B_n"`` (conserved by FL1 with k = n) or ``"A_0"``
    (conserved by FL3 with k = 2).
    """
    kind, k, n = _config_of(traj)
    if quantity == "B_n":
        if kind != "FL1" or k != n:
            raise ConfigError(f"B_n is conserved only along FL1 with k = n; got {kind} k={k} n={n}")
        series = traj.series(f"B_{n}")
    elif quantity == "A_0":
        if kind != "FL3" or k != 2:
            raise ConfigError(f"A_0 is conserved only along FL3 with k = 2; got {kind} k={k}")
        series = traj.series("A_0")
    else:
        raise ConfigError(f"unknown conserved quantity {quantity!r}")
    drift = np.abs(series - series[0]) / abs(series[0])
    i = int(np.argmax(drift))
    return CheckResult.judge(f"conserved:{quantity}", drift[i], tol,
                             [{"t": traj.times[i], "value": float(series[i]), "initial": float(series[0])}])


def check_monotone(traj: Trajectory, quantity: str, direction: str,
                   slack: float = MONOTONE_SLACK) -> CheckResult:
    """Largest forbidden relative increment between consecutive records.

    ``direction`` is ``"nonincreasing"``, ``"nondecreasing"`` or ``"constant"``.
    """
    q = traj.series(quantity)
    name = f"monotone:{quantity}:{direction}"
    if q.size < 2:
        return CheckResult.judge(name, 0.0, slack)
    inc = np.diff(q) / np.maximum(np.abs(q[:-1]), np.finfo(float).tiny)
    if direction == "nonincreasing":
        bad = inc
    elif direction == "nondecreasing":
        bad = -inc
    elif direction == "constant":
        bad = np.abs(inc)
    else:
        raise ConfigError(f"unknown direction {direction!r}")
    i = int(np.argmax(bad))
    worst = max(0.0, float(bad[i]))
    return CheckResult.judge(name, worst, slack, [
        {"t": traj.times[i + 1], "increment": float(q[i + 1] - q[i]),
         "total_change": float(q[-1] - q[0])}])


def check_barriers(traj: Trajectory, slack: float = BARRIER_SLACK) -> CheckResult:
    """max r never rises above, and min r never falls below, an earlier value."""
    mx = traj.series("max_r")
    mn = traj.series("min_r")
    rise = mx - np.minimum.accumulate(mx)
    fall = np.maximum.accumulate(mn) - mn
    worst = float(max(rise.max(), fall.max()))
    return CheckResult.judge("barriers:C0", worst, slack, [
        {"max_r_rise": float(rise.max()), "min_r_fall": float(fall.max())}])


def check_support_bound(traj: Trajectory, slack: float = SUPPORT_SLACK) -> CheckResult:
    """Spatial maximum of the support function u is nonincreasing."""
    mu = traj.series("max_u")
    rise = mu - np.minimum.accumulate(mu)
    return CheckResult.judge("support:max_u", float(rise.max()), slack)


def check_preserved(traj: Trajectory, monitor: str, slack: float = PRESERVATION_SLACK) -> CheckResult:
    """A positive monitor ("min_pinch_gap", "min_cone_margin", "min_kappa") stays >= -slack."""
    series = traj.series(monitor)
    name = f"preserved:{monitor}"
    if not series[0] > 0:
        return CheckResult.skipped(name, "monitor not positive initially", slack)
    low = float(series.min())
    return CheckResult.judge(name, max(0.0, -low), slack, [{"min": low, "initial": float(series[0])}])


# -- rate formulas ----------------------------------------------------------------

def rate_integral(geom: Geometry, quantity: str, flow_kind: str, k: int) -> float:
    """Time derivative of A_l or B_l predicted from the current surface.

    A_l: (n - l) int E_{l+1} S dmu.  Along FL3 with k = 2 the integrand is
    u E_2 E_{l+1} / E_1 - lam' E_{l+1}.
    B_l: (1 + l) int u E_l S dmu + (n - l) int lam' E_{l+1} S dmu.
    """
    n = geom.n
    kind, l = quantity[0], int(quantity[2:])
    if not (quantity[1] == "_" and kind in "AB" and 0 <= l <= n):
        raise ConfigError(f"unsupported rate quantity {quantity!r}")
    S = speed(geom, flow_kind, k, check_cone=False)
    E = geom.E
    if kind == "A":
        return (n - l) * integrate_scalar(geom, E[:, l + 1] * S)
    return ((1 + l) * integrate_scalar(geom, geom.u * E[:, l] * S)
            + (n - l) * integrate_scalar(geom, geom.lam_p * E[:, l + 1] * S))


def cross_check_rate(traj: Trajectory, quantity: str, tol: float = RATE_TOL) -> CheckResult:
    """Centred differences of a recorded integral against its rate formula.

    Mismatches are normalized by the largest predicted rate along the
    trajectory, so late times where both sides vanish do not dominate.
    """
    name = f"rate:{quantity}"
    if len(traj.fields) != len(traj.reports) or len(traj.fields) < 3:
        return CheckResult.skipped(name, "trajectory lacks field snapshots", tol)
    kind, k, _ = _config_of(traj)
    q = traj.series(quantity)
    t = np.asarray(traj.times)
    fd = (q[2:] - q[:-2]) / (t[2:] - t[:-2])
    pred = np.array([rate_integral(compute_geometry(f), quantity, kind, k) for f in traj.fields[1:-1]])
    scale = float(np.max(np.abs(pred)))
    mismatch = np.abs(fd - pred)
    if scale == 0.0:
        worst = float(mismatch.max())
    else:
        worst = float(mismatch.max() / scale)
    i = int(np.argmax(mismatch))
    return CheckResult.judge(name, worst, tol, [
        {"t": float(t[i + 1]), "finite_difference": float(fd[i]), "formula": float(pred[i]),
         "rate_scale": scale}])


def check_pointwise_rate(traj: Trajectory, tol: float = 1e-3) -> CheckResult:
    """Rate of lam' following the normal motion equals u S at every node.

    Snapshots are taken at fixed xi, while the normal flow also moves points
    tangentially by S Dr / (lam^2 ups); the forward difference is corrected
    by that transport term before comparison.
    """
    name = "rate:pointwise_lambda_prime"
    if len(traj.fields) != len(traj.reports) or len(traj.fields) < 2:
        return CheckResult.skipped(name, "trajectory lacks field snapshots", tol)
    kind, k, _ = _config_of(traj)
    worst, scale = 0.0, 0.0
    for i in range(len(traj.fields) - 1):
        g0 = compute_geometry(traj.fields[i])
        dt = traj.times[i + 1] - traj.times[i]
        S = speed(g0, kind, k, check_cone=False)
        fd = (np.sinh(traj.fields[i + 1].values.ravel()) - g0.lam_p) / dt
        transport = S * g0.grad_sq / (g0.lam * g0.upsilon)
        target = g0.u * S
        worst = max(worst, float(np.max(np.abs(fd + transport - target))))
        scale = max(scale, float(np.max(np.abs(target))))
    rel = worst / scale if scale > 0 else worst
    return CheckResult.judge(name, rel, tol, [{"abs_mismatch": worst, "rate_scale": scale}])


# -- inequalities -----------------------------------------------------------------

def _margin_result(name, lhs, rhs, gated, tol, extra=None):
    margin = rhs - lhs
    rel = margin / abs(rhs) if rhs != 0 else margin
    details = [{"lhs": lhs, "rhs": rhs, "margin": margin, "relative_margin": rel,
                "equality_case": bool(abs(margin) <= EQUALITY_TOL * abs(rhs)), **(extra or {})}]
    if gated:
        return CheckResult.skipped(name, "hypotheses unmet", tol, details)
    return CheckResult.judge(name, max(0.0, -rel), tol, details)


def check_inequalities(field: RadialField, tol: float = INEQUALITY_TOL) -> list:
    """Margins of the weighted and quermassintegral inequalities for one surface.

    Checked: B_n <= psi_n(psi_l^{-1}(B_l)) for l = 1..n-1,
    A_{n-1} <= phi_{n-1}(psi_{n-1}^{-1}(B_{n-1})), and
    A_k <= phi_k(phi_0^{-1}(A_0)) for k = 1..n-2 with f_k taken to be the
    slice profile phi_k.  Surfaces that are not strictly convex and pinched
    get their margins computed but are not judged.
    """
    n = field.n
    geom = compute_geometry(field)
    mon = monitors(geom, n)
    hypotheses = {"strictly_convex": mon["min_kappa"] > 0, "pinched": mon["min_pinch_gap"] > 0}
    gated = not all(hypotheses.values())
    A = quermassintegrals(geom)
    B = weighted_integrals(geom)
    out = []

    def invert(kind, idx, value, label):
        try:
            return invert_slice_profile(kind, idx, value, n).s
        except RangeError as exc:
            raise RangeError(f"cannot invert {kind}_{idx} at {label} = {value!r}: {exc}") from exc

    for l in range(1, n):
        s = invert("psi", l, B[l + 1], f"B_{l}")
        out.append(_margin_result(f"ineq:B_{n}<=psi_{n}(psi_{l}^-1(B_{l}))", B[n + 1],
                                  slice_psi(n, s, n), gated, tol, {"s": s, **hypotheses}))
    s = invert("psi", n - 1, B[n], f"B_{n - 1}")
    out.append(_margin_result(f"ineq:A_{n - 1}<=phi_{n - 1}(psi_{n - 1}^-1(B_{n - 1}))", A[n],
                              slice_phi(n - 1, s, n), gated, tol, {"s": s, **hypotheses}))
    if n >= 3:
        s0 = invert("phi", 0, A[1], "A_0")
        for k in range(1, n - 1):
            out.append(_margin_result(f"ineq:A_{k}<=phi_{k}(phi_0^-1(A_0))", A[k + 1],
                                      slice_phi(k, s0, n), gated, tol,
                                      {"s": s0, "note": "f_k interpreted as slice profile", **hypotheses}))
    return out


# -- limit identification ---------------------------------------------------------

def identify_limit(traj: Trajectory) -> dict:
    """Radius of the limiting slice and how well the final surface matches it."""
    if traj.termination != "converged":
        return {"status": "skipped", "reason": f"trajectory {traj.termination}"}
    field = traj.final_field
    r = field.values
    r_inf = float(np.mean(r))
    geom = compute_geometry(field)
    err = float(np.max(np.abs(r - r_inf)) + np.max(np.abs(geom.kappa - math.tanh(r_inf))))
    out = {"status": "ok", "r_infinity": r_inf, "slice_match_error": err}
    kind, k, n = _config_of(traj)
    if kind == "FL1" and k == n:
        q0 = float(traj.series(f"B_{n}")[0])
        out["conserved"] = f"B_{n}"
        out["limit_value"] = slice_psi(n, r_inf, n)
    elif kind == "FL3" and k == 2:
        q0 = float(traj.series("A_0")[0])
        out["conserved"] = "A_0"
        out["limit_value"] = slice_phi(0, r_inf, n)
    else:
        return out
    q = traj.series(out["conserved"])
    out["initial_value"] = q0
    out["integral_match"] = abs(q0 - out["limit_value"]) / abs(q0)
    out["conservation_drift"] = float(np.max(np.abs(q - q0)) / abs(q0))
    out["final_mismatch"] = abs(float(q[-1]) - out["limit_value"]) / abs(q0)
    return out


def check_limit(traj: Trajectory, match_tol: float = 1e-6, integral_tol: float = 1e-5) -> list:
    info = identify_limit(traj)
    if info["status"] != "ok":
        return [CheckResult.skipped("limit:slice_match", info["reason"], match_tol)]
    out = [CheckResult.judge("limit:slice_match", info["slice_match_error"], match_tol, [info])]
    if "integral_match" in info:
        out.append(CheckResult.judge(f"limit:{info['conserved']}=profile(r_inf)",
                                     info["integral_match"], integral_tol, [info]))
        # triangle: |Q0 - P(r_inf)| <= drift + |Q(T) - P(r_inf)|
        gap = info["integral_match"] - (info["conservation_drift"] + info["final_mismatch"])
        out.append(CheckResult.judge("limit:consistency", max(0.0, gap), 1e-12, [info]))
    return out


# -- suites -----------------------------------------------------------------------

FIELD_CHECKS = ("inequalities",)


def default_checks(flow_kind: str, k: int, n: int) -> list:
    """Checks whose hypotheses a flow of this kind satisfies."""
    checks = [{"name": "barriers"}, {"name": "limit"}, {"name": "inequalities", "on": "initial"}]
    if flow_kind == "FL1":
        checks += [{"name": "support"}, {"name": "preserved", "monitor": "min_pinch_gap"},
                   {"name": "preserved", "monitor": "min_cone_margin"},
                   {"name": "monotone", "quantity": f"A_{n - 1}", "direction": "nondecreasing"}]
        checks += [{"name": "monotone", "quantity": f"B_{l}", "direction": "nonincreasing"}
                   for l in range(0, k)]
        if k == n:
            checks.append({"name": "conserved", "quantity": "B_n"})
    else:
        checks += [{"name": "preserved", "monitor": "min_kappa"}]
        checks += [{"name": "monotone", "quantity": f"A_{l}", "direction": "nondecreasing"}
                   for l in range(1, n - 1)]
        if k == 2:
            checks.append({"name": "conserved", "quantity": "A_0"})
    return checks


def needs_trajectory(check: dict) -> bool:
    return not (check["name"] in FIELD_CHECKS and check.get("on", "initial") == "initial")


def needs_fields(check: dict) -> bool:
    return check["name"] in ("rate", "pointwise_rate")


def _quantity(check: dict, n: int) -> str:
    q = check.get("quantity")
    if q is None:
        raise ConfigError(f"check {check['name']!r} needs a quantity")
    return q.replace("_n", f"_{n}") if q.endswith("_n") and check["name"] != "conserved" else q


def run_check(check: dict, traj: Trajectory | None = None, field: RadialField | None = None) -> list:
    """Evaluate one check description (as in a run specification)."""
    name = check["name"]
    tol = check.get("tolerance")
    kw = {} if tol is None else {"tol": tol}
    if name == "inequalities":
        target = field if check.get("on", "initial") == "initial" else traj.final_field
        return check_inequalities(target, **kw)
    if traj is None:
        raise ConfigError(f"check {name!r} needs a trajectory")
    n = traj.n
    if name == "conserved":
        return [check_conserved(traj, check.get("quantity", "B_n"), **kw)]
    if name == "monotone":
        if "direction" not in check:
            raise ConfigError("monotone check needs a direction")
        kw = {} if tol is None else {"slack": tol}
        return [check_monotone(traj, _quantity(check, n), check["direction"], **kw)]
    if name == "rate":
        return [cross_check_rate(traj, _quantity(check, n), **kw)]
    if name == "pointwise_rate":
        return [check_pointwise_rate(traj, **kw)]
    if name == "limit":
        return check_limit(traj)
    kw = {} if tol is None else {"slack": tol}
    if name == "barriers":
        return [check_barriers(traj, **kw)]
    if name == "support":
        return [check_support_bound(traj, **kw)]
    if name == "preserved":
        return [check_preserved(traj, check.get("monitor", "min_pinch_gap"), **kw)]
    raise ConfigError(f"unknown check {name!r}")


def run_checks(checks, traj: Trajectory | None = None, field: RadialField | None = None,
               workers: int | None = None) -> list:
    """Run independent checks, optionally on a thread pool; results keep input order."""
    if workers is not None and workers > 1 and len(checks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: run_check(c, traj, field), checks))
    else:
        parts = [run_check(c, traj, field) for c in checks]
    return [r for part in parts for r in part]
