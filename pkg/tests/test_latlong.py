"""Smoke tests for the n = 2 latitude-longitude backend."""
import math

import numpy as np
import pytest

from dsflow.ambient import slice_phi, slice_psi
from dsflow.flow import FlowConfig, run
from dsflow.surface import (LatLongGrid, RadialField, compute_geometry, make_surface, minkowski_residual,
                            quermassintegrals, slice_field, weighted_integrals)


def test_slice_on_latlong():
    geom = compute_geometry(slice_field(LatLongGrid(16, 32), 1.0))
    assert np.max(np.abs(geom.kappa - math.tanh(1.0))) < 1e-12
    A, B = quermassintegrals(geom), weighted_integrals(geom)
    for k in range(-1, 3):
        assert A[k + 1] == pytest.approx(slice_phi(k, 1.0, 2), rel=1e-12)
    assert B[3] == pytest.approx(slice_psi(2, 1.0, 2), rel=1e-12)


def test_zonal_harmonic_matches_axisymmetric_backend():
    a = 0.04
    ll = make_surface({"kind": "harmonic_modes", "s0": 1.0, "modes": [[2, 0, a]],
                       "grid": {"kind": "latlong", "N_theta": 64, "N_phi": 16}}, n=2)
    ax = make_surface({"kind": "cosine_modes", "s0": 1.0 + a / 4, "modes": [[2, 3 * a / 4]],
                       "grid": {"N": 512}}, n=2)
    g1, g2 = compute_geometry(ll), compute_geometry(ax)
    assert np.allclose(quermassintegrals(g1), quermassintegrals(g2), rtol=2e-4)
    assert np.allclose(weighted_integrals(g1), weighted_integrals(g2), rtol=2e-4)


def test_nonaxisymmetric_minkowski_residual_shrinks():
    res = []
    for Nt in (16, 32, 64):
        f = make_surface({"kind": "harmonic_modes", "s0": 1.0, "modes": [[2, 1, 0.01], [3, 2, 0.002]],
                          "grid": {"kind": "latlong", "N_theta": Nt, "N_phi": 2 * Nt}}, n=2)
        res.append(abs(minkowski_residual(compute_geometry(f), 1)))
    assert res[2] < res[1] < res[0]
    assert res[2] < 1e-3


def test_latlong_serialization_is_phi_major():
    g = LatLongGrid(4, 8)
    vals = 1.0 + np.arange(32, dtype=float).reshape(4, 8) / 100
    f = RadialField(g, vals)
    d = f.to_dict()
    assert d["values"][:4] == list(vals[:, 0])
    back = RadialField.from_json(f.to_json())
    assert np.array_equal(back.values, vals)


def test_short_flow_on_latlong():
    f = make_surface({"kind": "harmonic_modes", "s0": 1.0, "modes": [[2, 1, 0.01]],
                      "grid": {"kind": "latlong", "N_theta": 12, "N_phi": 24}}, n=2)
    traj = run(FlowConfig("FL1", 2, t_end=0.05), f)
    assert traj.termination == "t_end_reached"
    assert traj.series("osc_r")[-1] < traj.series("osc_r")[0]
    b2 = traj.series("B_2")
    assert abs(b2[-1] - b2[0]) / b2[0] < 1e-3
