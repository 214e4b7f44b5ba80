import numpy as np
import pytest

from wavedecay import estimates as est
from wavedecay.norms import op_norm_1_to_inf, op_norm_2, op_norm_2_to_inf
from wavedecay.radialop import PotentialSpec, build_G


def _factors(rng, m, k):
    left = rng.standard_normal((m, k))
    right = rng.standard_normal((m, k))
    coeff = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return left, right, coeff


def test_lr_norm2_matches_dense(rng):
    left, right, coeff = _factors(rng, 80, 12)
    dense = left @ (coeff[:, None] * right.T)
    assert est._lr_norm2(left, right, coeff) == pytest.approx(
        op_norm_2(dense), rel=1e-10)


def test_lr_mixed_norms_match_dense(small_grid, rng):
    left, right, coeff = _factors(rng, small_grid.M, 10)
    dense = left @ (coeff[:, None] * right.T)
    got = est._lr_norm_2_to_inf(left, right, coeff, small_grid, 4)
    assert got == pytest.approx(op_norm_2_to_inf(dense, small_grid, 4),
                                rel=1e-9)
    got = est._lr_norm_1_to_inf(left, right, coeff, small_grid, 4, chunk=37)
    assert got == pytest.approx(op_norm_1_to_inf(dense, small_grid, 4),
                                rel=1e-9)


def test_band_floor_and_tilt(small_grid, potential, profile):
    op = build_G(small_grid, 4, potential)
    root, amp, vecs = est._band(op, profile, 1.0)
    assert root.shape == amp.shape == (vecs.shape[1],)
    # support [1, 2] of the profile restricts the kept frequencies
    assert root.min() >= 1.0 - 1e-9 and root.max() <= 2.0 + 1e-9
    r2, a2, _ = est._band(op, profile, 1.0, tilt=1.0)
    assert np.allclose(a2, amp[np.isin(root, r2)] * r2) or np.allclose(
        a2, amp * root)
    rf, af, _ = est._band(op, profile, 1.0, amp_floor=1e-2)
    assert rf.size < root.size
    assert np.all(np.abs(af) > 1e-2 * np.abs(amp).max() * (1 - 1e-12))


def test_stability_and_ratio_report():
    assert est._stability([1.0, 4.0, 2.0]) == 4.0
    assert est._stability([0.0, 0.0]) == 0.0
    rep = est._ratio_report([1.0, 2.5], cap=3.0, note="x")
    assert rep["passed"] and rep["ratio"] == 2.5 and rep["note"] == "x"
    assert not est._ratio_report([1.0, 4.0], cap=3.0)["passed"]


def test_cone_sup_tracks_stated_rate(profile):
    # |K| on the cone decays like t^{-(n-1)/2} once the window transient
    # has died out
    a = est._cone_sup(4, profile, 1.0, 64.0)
    b = est._cone_sup(4, profile, 1.0, 128.0)
    assert b / a == pytest.approx(2.0 ** -1.5, rel=0.05)


def test_kernel_t_window():
    assert est.KERNEL_T[0] == 8.0
    assert est.KERNEL_T[-1] == 128.0
    assert len(est.KERNEL_T) == 9


def test_free_kernel_sup_cone_restriction(profile):
    full = est._free_kernel_sup(4, profile, 1.0, 8.0)
    cone = est._free_kernel_sup(4, profile, 1.0, 8.0, cone_only=True)
    assert 0.0 < cone <= full * (1 + 1e-12)


def test_rollup_rows_flatten():
    reports = {
        "2.7": {"t": {"fitted_exponent": -1.5, "target": -1.5,
                      "tolerance": 0.2, "variable": "t", "passed": True},
                "_meta": {"fitted_exponent": 0.0, "passed": False}},
        "3.2": {"ratio": 1.1, "cap": 3.0, "passed": True},
        "_notes": {"passed": False},
    }
    rows = est.rollup_rows(reports)
    keys = sorted(r[0] for r in rows)
    assert keys == ["2.7.t", "3.2"]
    fit_row = next(r for r in rows if r[0] == "2.7.t")
    assert fit_row[1:] == ["t", -1.5, -1.5, 0.2, True]
    ratio_row = next(r for r in rows if r[0] == "3.2")
    assert ratio_row[2] == 3.0 and ratio_row[3] == 1.1 and ratio_row[5]


def test_emit_reports_round_trip(tmp_path):
    import json

    reports = {"9.1": {"fitted_exponent": -1.0, "passed": True,
                       "window": [1.0, 8.0]},
               "_skip": {"x": 1}}
    written = est.emit_reports(reports, str(tmp_path))
    names = sorted(p.split("/")[-1] for p in written)
    assert names == ["estimate_9_1.json", "rollup.csv"]
    back = json.loads((tmp_path / "estimate_9_1.json").read_text())
    assert back["fitted_exponent"] == -1.0
    assert not (tmp_path / "estimate__skip.json").exists()


def test_smoothing_normalizes_by_band_mass(small_grid, profile):
    """Totals are reported per unit of band energy, with the raw totals
    kept alongside."""
    pot = PotentialSpec(2.0, 3.0)
    rep = est.check_smoothing(small_grid, 4, pot, profile, (1.0, 0.5))
    entry = rep["3.2_time"]
    assert "totals_per_band_mass" in entry and "raw_totals" in entry
    assert set(entry["totals_per_band_mass"]) == {"1", "0.5"}
    assert "passed" in entry
