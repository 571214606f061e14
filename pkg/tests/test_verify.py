import math

import numpy as np
import pytest

from dsflow import schemas
from dsflow.errors import ConfigError
from dsflow.flow import FlowConfig, run
from dsflow.surface import AxisymmetricGrid, make_surface, slice_field
from dsflow.verify import (CheckResult, check_barriers, check_conserved, check_inequalities, check_limit,
                           check_monotone, check_pointwise_rate, check_preserved, check_support_bound,
                           cross_check_rate, default_checks, format_table, identify_limit, rate_integral,
                           run_checks)


def surface(n=2, a=0.05, mode=2, s0=1.0, N=64):
    return make_surface({"kind": "cosine_modes", "s0": s0, "modes": [[mode, a]], "grid": {"N": N}}, n=n)


@pytest.fixture(scope="module")
def short_fl1():
    return run(FlowConfig("FL1", 2, t_end=0.02, store_fields=True), surface(N=256))


@pytest.fixture(scope="module")
def slice_traj():
    return run(FlowConfig("FL1", 2), slice_field(AxisymmetricGrid(64, 2), 1.0))


def test_check_result_semantics():
    assert CheckResult.judge("x", 1e-3, 1e-3).status == "pass"
    assert CheckResult.judge("x", 2e-3, 1e-3).status == "fail"
    sk = CheckResult.skipped("x", "why")
    assert sk.status == "skipped" and sk.to_dict()["worst_violation"] is None
    schemas.validate({"version": 1, "all_passed": True, "results": [sk.to_dict()]}, "check_report")


def test_slice_trajectory_passes_everything(slice_traj):
    assert check_conserved(slice_traj, "B_n").worst_violation == 0.0
    for d in ("nonincreasing", "nondecreasing", "constant"):
        assert check_monotone(slice_traj, "B_1", d).passed
    res = check_limit(slice_traj)
    assert all(r.passed for r in res)
    info = identify_limit(slice_traj)
    assert info["r_infinity"] == 1.0 and info["slice_match_error"] <= 1e-12


def test_mismatched_conservation_pairing(short_fl1):
    with pytest.raises(ConfigError):
        check_conserved(short_fl1, "A_0")
    with pytest.raises(ConfigError):
        check_conserved(short_fl1, "B_1")


def test_monotone_detects_wrong_direction(short_fl1):
    assert check_monotone(short_fl1, "B_1", "nonincreasing").passed
    assert check_monotone(short_fl1, "A_1", "nondecreasing").passed
    wrong = check_monotone(short_fl1, "B_1", "nondecreasing")
    assert wrong.status == "fail" and wrong.worst_violation > 1e-9
    with pytest.raises(ConfigError):
        check_monotone(short_fl1, "B_1", "sideways")


def test_short_run_flow_checks(short_fl1):
    for r in (check_barriers(short_fl1), check_support_bound(short_fl1),
              check_preserved(short_fl1, "min_pinch_gap"), check_preserved(short_fl1, "min_cone_margin"),
              cross_check_rate(short_fl1, "B_1"), cross_check_rate(short_fl1, "A_1"),
              check_pointwise_rate(short_fl1)):
        assert r.passed, (r.name, r.worst_violation)


def test_rate_mismatch_is_spatial_second_order():
    worst = []
    for N in (64, 128):
        traj = run(FlowConfig("FL1", 2, t_end=0.01, store_fields=True), surface(N=N))
        worst.append(cross_check_rate(traj, "A_1").worst_violation)
    assert math.log2(worst[0] / worst[1]) > 1.8


def test_rate_checks_need_snapshots():
    traj = run(FlowConfig("FL1", 2, t_end=0.01), surface())
    assert cross_check_rate(traj, "B_1").status == "skipped"
    assert check_pointwise_rate(traj).status == "skipped"


def test_rate_integral_forms_agree():
    # along FL3 with k = 2 the A_l rate is (n - l) int (u E_2 E_{l+1}/E_1 - lam' E_{l+1})
    from dsflow.surface import compute_geometry, integrate_scalar
    g = compute_geometry(surface(n=3))
    E = g.E
    for l in range(0, 3):
        lit = (3 - l) * integrate_scalar(g, g.u * E[:, 2] * E[:, l + 1] / E[:, 1] - g.lam_p * E[:, l + 1])
        assert rate_integral(g, f"A_{l}", "FL3", 2) == pytest.approx(lit, rel=1e-12)
    # FL1 with k = n: d/dt A_{n-1} = int (u E_n - lam' E_{n-1}) / u
    g = compute_geometry(surface())
    lit = integrate_scalar(g, (g.u * g.E[:, 2] - g.lam_p * g.E[:, 1]) / g.u)
    assert rate_integral(g, "A_1", "FL1", 2) == pytest.approx(lit, rel=1e-12)


def test_identify_limit_skips_unconverged(short_fl1):
    assert identify_limit(short_fl1)["status"] == "skipped"
    assert check_limit(short_fl1)[0].status == "skipped"


@pytest.mark.parametrize("n", [2, 3, 4])
def test_inequalities_vanish_on_slices(n):
    res = check_inequalities(slice_field(AxisymmetricGrid(256, n), 0.8))
    assert len(res) == n if n == 2 else len(res) == (n - 1) + 1 + (n - 2)
    for r in res:
        assert r.passed
        assert abs(r.details[0]["relative_margin"]) <= 1e-9
        assert r.details[0]["equality_case"]


def test_inequality_margins_grow_with_amplitude():
    margins = []
    for a in (0.01, 0.03, 0.05):
        res = check_inequalities(surface(a=a, N=256))
        assert all(r.passed for r in res)
        margins.append([r.details[0]["relative_margin"] for r in res])
    margins = np.array(margins)
    assert np.all(margins > 0)
    assert np.all(np.diff(margins, axis=0) > 0)


def test_inequalities_gated_without_pinching():
    res = check_inequalities(surface(s0=2.0, mode=4, a=0.2))
    assert all(r.status == "skipped" for r in res)
    assert all(math.isfinite(r.details[1]["margin"]) for r in res)
    assert res[0].details[0]["reason"] == "hypotheses unmet"


def test_default_suites_and_parallel_runner(short_fl1):
    checks = default_checks("FL1", 2, 2)
    serial = run_checks(checks, short_fl1, short_fl1.fields[0])
    threaded = run_checks(checks, short_fl1, short_fl1.fields[0], workers=3)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in threaded]
    assert {r.status for r in serial} <= {"pass", "skipped"}
    table = format_table(serial)
    assert table.splitlines()[0].startswith("check")
    assert any(c["name"] == "conserved" for c in default_checks("FL3", 2, 3))
    assert not any(c["name"] == "conserved" for c in default_checks("FL3", 3, 3))
