import math

import numpy as np
import pytest

from dsflow.errors import ConfigError, ConstructionError
from dsflow.flow import (FlowConfig, axisymmetric_velocity, radial_velocity, run, stable_dt, step)
from dsflow._kernels import axisym_velocity
from dsflow.surface import AxisymmetricGrid, compute_geometry, make_surface, slice_field


def surface(N=64, n=2, s0=1.0, modes=((2, 0.05),)):
    return make_surface({"kind": "cosine_modes", "s0": s0, "modes": [list(m) for m in modes],
                         "grid": {"N": N}}, n=n)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("kind", ["FL1", "FL3"])
def test_kernel_matches_reference_velocities(n, kind):
    f = surface(N=96, n=n, modes=((2, 0.05), (3, 0.02)))
    geom = compute_geometry(f)
    for k in range(1, n + 1):
        ref = radial_velocity(geom, kind, k)
        lean = axisymmetric_velocity(f.values, f.grid, kind, k)
        fast, status = axisym_velocity(f.values, f.grid.h, n, k, kind == "FL1")
        assert status == 0
        assert np.allclose(lean, ref, rtol=1e-12, atol=1e-14)
        assert np.allclose(fast, ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("kind", ["FL1", "FL3"])
def test_slice_is_stationary(kind):
    f = slice_field(AxisymmetricGrid(64, 3), 1.3)
    geom = compute_geometry(f)
    assert np.max(np.abs(radial_velocity(geom, kind, 2))) < 1e-13
    g = f
    for _ in range(10):
        g = step(g, None, 1e-3, kind, 2)
    assert np.max(np.abs(g.values - f.values)) < 1e-13


def test_rk4_global_order():
    f = surface(N=32)
    T = 0.02

    def integrate(m):
        g = f
        for _ in range(m):
            g = step(g, None, T / m, "FL1", 2)
        return g.values

    ref = integrate(64)
    e = [np.max(np.abs(integrate(m) - ref)) for m in (4, 8)]
    assert math.log2(e[0] / e[1]) > 3.7


def test_rk4_local_order():
    # one step versus two half steps differs by C dt^5
    f = surface(N=32)

    def gap(dt):
        two = step(step(f, None, dt / 2, "FL3", 2), None, dt / 2, "FL3", 2).values
        return np.max(np.abs(step(f, None, dt, "FL3", 2).values - two))

    assert math.log2(gap(2e-3) / gap(1e-3)) > 4.7


def test_stable_dt_scaling():
    g64 = compute_geometry(slice_field(AxisymmetricGrid(64, 2), 1.0))
    g128 = compute_geometry(slice_field(AxisymmetricGrid(128, 2), 1.0))
    assert stable_dt(g64, 2, 0.2) / stable_dt(g128, 2, 0.2) == pytest.approx(4.0, rel=1e-12)
    assert stable_dt(g64, 2, 0.4) == pytest.approx(2 * stable_dt(g64, 2, 0.2))
    for kind in ("FL1", "FL3"):
        assert stable_dt(compute_geometry(surface()), 2, 0.2, kind) > 0


def test_zero_cfl_rejected():
    with pytest.raises(ConfigError):
        FlowConfig(cfl=0.0)
    with pytest.raises(ConfigError):
        stable_dt(compute_geometry(surface()), 2, 0.0)
    with pytest.raises(ConfigError):
        FlowConfig(flow_kind="FL2")
    with pytest.raises(ConfigError):
        FlowConfig(enforce=("spacelike", "bogus"))


def test_run_rejects_unpinched_data_for_fl1():
    f = surface(s0=2.0, modes=((4, 0.2),))
    with pytest.raises(ConstructionError) as exc:
        run(FlowConfig("FL1", 2, t_end=0.1), f)
    assert exc.value.condition == "pinched"
    with pytest.raises(ConfigError):
        run(FlowConfig("FL1", 3, t_end=0.1), surface())


def test_slice_run_converges_immediately():
    traj = run(FlowConfig("FL1", 2), slice_field(AxisymmetricGrid(64, 2), 0.5))
    assert traj.termination == "converged"
    assert traj.steps == 0 and len(traj.reports) == 1
    assert traj.r_infinity == 0.5


def test_short_run_bookkeeping(tmp_path):
    cfg = FlowConfig("FL1", 2, t_end=0.05, record_every=7, store_fields=True)
    traj = run(cfg, surface())
    assert traj.termination == "t_end_reached"
    assert traj.times[-1] == pytest.approx(0.05, rel=1e-12)
    assert len(traj.fields) == len(traj.reports) == len(traj.times)
    assert np.all(np.diff(traj.times) > 0)
    traj.write_csv(tmp_path / "a.csv")
    run(cfg, surface()).write_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0].split(",")
    assert header == traj.csv_header()
    assert len(header) == 1 + 2 * 4 + 6 + 2


def test_max_steps_stops_run():
    traj = run(FlowConfig("FL3", 2, t_end=1.0, max_steps=5), surface())
    assert traj.steps == 5 and traj.reason == "max_steps reached"


def test_unstable_step_size_aborts():
    traj = run(FlowConfig("FL1", 2, t_end=1.0, cfl=200.0), surface(N=64, modes=((6, 0.02),)))
    assert traj.termination == "aborted"
    assert traj.reason


def test_unproven_regime_flagged():
    traj = run(FlowConfig("FL3", 3, t_end=0.01), surface(n=3))
    assert traj.metadata["proven_regime"] is False
    assert "proven" in traj.metadata["note"]
    assert run(FlowConfig("FL3", 2, t_end=0.0), surface(n=3)).metadata["proven_regime"] is True


def test_short_fl1_run_respects_barriers():
    traj = run(FlowConfig("FL1", 2, t_end=0.2), surface())
    assert np.all(np.diff(traj.series("max_r")) <= 1e-12)
    assert np.all(np.diff(traj.series("min_r")) >= -1e-12)
    assert traj.series("osc_r")[-1] < traj.series("osc_r")[0]
