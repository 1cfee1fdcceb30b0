"""Winding numbers, the probe scan, Newton preimages, and the cross check."""

import math

import numpy as np
import pytest

from hvl import (
    CrossCheck,
    IndeterminateProbeError,
    ParameterError,
    cross_check,
    eval_f,
    newton_preimages,
    presets,
    trace_circle,
    valence_scan,
    winding_number,
)

import oracles

EX1 = presets.example1()
EX2 = presets.example2()


# ---------------------------------------------------------------------------
# Winding numbers


def test_winding_matches_ray_crossing_oracle():
    """Angle-increment winding against an independent ray-crossing count at
    seeded probe points, on the p=2 boundary image."""
    tr = trace_circle(EX1, 1.0, n=4096)
    rng = np.random.default_rng(43)
    checked = 0
    for _ in range(40):
        w = complex(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6))
        dist = np.min(np.abs(tr.points - w))
        if dist < 5e-3:  # keep the oracle's crossing count unambiguous
            continue
        got = winding_number(tr, w)
        assert got.winding == oracles.ray_winding(tr.points, w)
        assert got.min_curve_distance == pytest.approx(dist, rel=1e-12)
        checked += 1
    assert checked >= 30


def test_winding_at_origin_is_p():
    tr = trace_circle(EX1, 1.0, n=2048)
    assert winding_number(tr, 0.0).winding == 2
    tr2 = trace_circle(EX2, 0.999, n=2048)
    assert winding_number(tr2, 0.0).winding == 3


def test_winding_far_outside_is_zero():
    tr = trace_circle(EX1, 1.0, n=2048)
    assert winding_number(tr, 10.0 + 3.0j).winding == 0


def test_winding_probe_too_close():
    tr = trace_circle(EX1, 1.0, n=2048)
    w = complex(tr.points[100])  # on the curve
    with pytest.raises(IndeterminateProbeError):
        winding_number(tr, w)
    # a generous explicit clearance rejects even comfortable probes
    with pytest.raises(IndeterminateProbeError):
        winding_number(tr, 0.0, probe_clearance=5.0)


# ---------------------------------------------------------------------------
# Scan


def test_scan_counts_on_p2_preset():
    report = valence_scan(EX1, r=0.999, grid=(32, 32), n_samples=2048)
    assert report.max_valence == 2
    assert report.consistent_with_p
    assert report.counts[2] == report.n_attained
    assert report.n_attained > 0
    assert 0 < len(report.attained_at) <= 8
    # every exemplar actually winds twice
    tr = trace_circle(EX1, 0.999, n=2048)
    for w in report.attained_at:
        assert winding_number(tr, w).winding == 2
    assert report.n_probes == 32 * 32
    assert report.n_indeterminate < 0.2 * report.n_probes


def test_scan_univalent_preset():
    report = valence_scan(presets.octagon(), r=0.999, grid=(24, 24), n_samples=2048)
    assert report.max_valence == 1
    assert report.consistent_with_p


def test_scan_grid_validation():
    with pytest.raises(ParameterError):
        valence_scan(EX1, grid=(1, 8))


def test_scan_worker_count_does_not_change_results():
    a = valence_scan(EX2, r=0.999, grid=(20, 20), n_samples=2048, workers=1)
    b = valence_scan(EX2, r=0.999, grid=(20, 20), n_samples=2048, workers=8)
    assert a.to_dict() == b.to_dict()


def test_scan_report_dict_shape():
    report = valence_scan(EX1, r=0.999, grid=(16, 16), n_samples=2048)
    doc = report.to_dict()
    assert doc["p"] == 2
    assert doc["max_valence"] == report.max_valence
    assert isinstance(doc["counts"], dict)
    assert all(isinstance(k, str) for k in doc["counts"])
    assert doc["consistent_with_p"] is True


# ---------------------------------------------------------------------------
# Newton preimages


def test_preimages_match_polynomial_oracle():
    """For w = 1/2 on the real axis the preimage equation of the p=2 preset
    restricted to real z is 0.4 z**5 + z**2 - 0.5 = 0; its two real roots in
    (-1, 1) are the only preimages (checked against numpy.roots)."""
    pre = newton_preimages(EX1, 0.5, n_starts=256)
    assert pre.count == 2
    poly_roots = np.roots([0.4, 0.0, 0.0, 1.0, 0.0, -0.5])
    real = np.sort([r.real for r in poly_roots if abs(r.imag) < 1e-12 and abs(r) < 1])
    got = np.sort(pre.roots.real)
    assert np.max(np.abs(pre.roots.imag)) < 1e-9
    assert np.max(np.abs(got - real)) < 1e-8
    # residuals are |f(z) - w| after convergence
    for z in pre.roots:
        assert abs(eval_f(EX1, complex(z)) - 0.5) < 1e-9
    assert max(pre.residuals) < 1e-9


def test_preimages_seeded_probes_p3():
    """At random targets the preimage count must reproduce the winding
    number (simple roots only; the scan says valence <= 3)."""
    rng = np.random.default_rng(47)
    tr = trace_circle(EX2, 0.999, n=2048)
    for _ in range(6):
        w = complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8))
        if np.min(np.abs(tr.points - w)) < 1e-2:
            continue
        wind = winding_number(tr, w).winding
        pre = newton_preimages(EX2, w, n_starts=200)
        inside = np.sum(np.abs(pre.roots) < 0.999)
        assert inside == wind


def test_preimages_requires_enough_starts():
    with pytest.raises(ParameterError):
        newton_preimages(EX1, 0.5, n_starts=50)


def test_preimages_none_outside_image():
    pre = newton_preimages(EX1, 25.0 + 0j, n_starts=128)
    assert pre.count == 0


def test_preimages_deduplication():
    """All converged starts collapse to the distinct root set."""
    pre = newton_preimages(EX1, 0.5, n_starts=512)
    assert pre.count == 2
    assert pre.n_converged >= 100
    d = abs(pre.roots[0] - pre.roots[1])
    assert d > 1e-3


# ---------------------------------------------------------------------------
# Cross check


def test_cross_check_agrees_at_regular_value():
    verdict, details = cross_check(EX1, 0.5)
    assert verdict is CrossCheck.AGREE
    assert details["winding"] == details["preimages_inside"] == 2
    assert details["min_jacobian"] > 1.0


def test_cross_check_flags_degenerate_origin():
    """w = 0 pulls back to a double zero of the p=2 preset at z = 0, where
    the Jacobian vanishes; the verdict must be indeterminate, not a bare
    disagreement."""
    verdict, details = cross_check(EX1, 0.0)
    assert verdict is CrossCheck.INDETERMINATE_MULTIPLICITY
    assert details["min_jacobian"] is not None
    assert abs(details["min_jacobian"]) < 1e-8


def test_cross_check_reuses_supplied_trace():
    tr = trace_circle(EX1, 0.999, n=2048)
    v1, d1 = cross_check(EX1, 0.5, trace=tr)
    v2, d2 = cross_check(EX1, 0.5)
    assert v1 is v2 is CrossCheck.AGREE
    assert d1["winding"] == d2["winding"]
