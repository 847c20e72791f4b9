import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpeps.analysis import (CSV_FIELDS, ChiSeries, SweepPlan, abs_error_curve, chi_convergence_report,
                            extrapolate_chi, read_records, records_to_csv, records_to_json, run_sweep)
from gpeps.errors import InvalidArgument


def test_exact_linear_data():
    chis = [8, 16, 24, 32, 48, 64]
    fit = extrapolate_chi(ChiSeries(chis, [0.3 - 1.7 / c for c in chis]), k=5)
    assert fit.intercept == pytest.approx(0.3, abs=1e-12)
    assert fit.slope == pytest.approx(-1.7, abs=1e-10)
    assert fit.residual <= 1e-12


def test_constant_series():
    fit = extrapolate_chi(ChiSeries([2, 4, 8], [0.25] * 3), k=3)
    assert fit.intercept == pytest.approx(0.25, abs=1e-15)
    assert fit.slope == pytest.approx(0.0, abs=1e-13)


def test_window_uses_largest_chis():
    chis = [4, 8, 12, 16, 32, 64, 128, 256, 512]
    vals = [0.1 + 2.0 / c for c in chis]
    for i in range(4):
        vals[i] = 10.0 * (i + 1)  # wrecked low-chi points
    fit = extrapolate_chi(ChiSeries(chis, vals), k=5)
    assert fit.chis_used == (32, 64, 128, 256, 512)
    assert fit.intercept == pytest.approx(0.1, abs=1e-12)


def test_too_few_points():
    with pytest.raises(InvalidArgument):
        extrapolate_chi(ChiSeries([2, 4], [0.1, 0.2]), k=5)
    with pytest.raises(InvalidArgument):
        extrapolate_chi(ChiSeries([2, 4], [0.1, 0.2]), k=1)


def test_series_rejects_duplicate_chi():
    with pytest.raises(InvalidArgument):
        ChiSeries([4, 4], [0.1, 0.2])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_window_invariant_under_small_chi_points(top, junk):
    chis = [64, 128, 256]
    base = extrapolate_chi(ChiSeries(chis, top), k=3)
    more = extrapolate_chi(ChiSeries([4, 8, 16] + chis, junk + top), k=3)
    assert base == more


def test_abs_error_curve():
    ref = [(0.1 * i, math.sin(i)) for i in range(5)]
    assert all(e == 0 for _, e in abs_error_curve(ref, ref))
    shifted = [(t, v + 1e-3) for t, v in ref]
    np.testing.assert_allclose([e for _, e in abs_error_curve(shifted, ref)], 1e-3, rtol=1e-9)
    with pytest.raises(InvalidArgument):
        abs_error_curve(ref[:4], ref)


def test_tree_error_curve_against_oracle():
    thetas = list(np.linspace(0, np.pi / 2, 9))
    common = dict(size="fixture:tree10", thetas=thetas, steps=3, chis=[32], observables=["avg_z"])
    test = run_sweep(SweepPlan(**common))
    ref = run_sweep(SweepPlan(**common, engine="oracle"))
    curve = abs_error_curve([(r.theta_h, r.value) for r in test], [(r.theta_h, r.value) for r in ref])
    assert max(e for _, e in curve) <= 1e-9


def test_single_point_sweep():
    recs = run_sweep(SweepPlan("fixture:path8", [0.5], 2, [4], ["z@3"]))
    assert len(recs) == 1
    assert recs[0].site == 3 and recs[0].error == ""


def test_sweep_sorted_and_deterministic():
    plan = SweepPlan("fixture:ring12hex", [1.0, 0.2, 0.6], 2, [4, 2], ["z@0", "avg_z", "cw@3@n2"])
    a, b = run_sweep(plan), run_sweep(plan)
    assert [r.sort_key() for r in a] == sorted(r.sort_key() for r in a)
    assert [r.value for r in a] == [r.value for r in b]
    assert len(a) == 3 * 2 * 3


def test_every_step_records():
    recs = run_sweep(SweepPlan("fixture:path8", [0.4], 3, [8], ["avg_z"], every_step=True))
    assert [r.steps for r in recs] == [1, 2, 3]


def test_plan_validation():
    with pytest.raises(InvalidArgument):
        SweepPlan("fixture:path8", [2.0], 1, [4], ["avg_z"]).validate()
    with pytest.raises(InvalidArgument):
        SweepPlan("fixture:path8", [0.1], 1, [4], ["z@99"]).validate()
    with pytest.raises(InvalidArgument):
        SweepPlan("fixture:path8", [0.1], 1, [4], ["pauli:X1,Z2"]).validate()
    with pytest.raises(InvalidArgument):
        SweepPlan("nowhere", [0.1], 1, [4], ["avg_z"]).validate()
    with pytest.raises(InvalidArgument):
        SweepPlan("infinite", [0.1], 1, [4], ["avg_z"], engine="oracle").validate()


def test_failed_point_gets_error_marker():
    plan = SweepPlan("fixture:path8", [0.5], 2, [4], ["avg_z"], bp=(1e-16, 1))
    recs = run_sweep(plan)
    assert math.isnan(recs[0].value)
    assert "ConvergenceError" in recs[0].error


def test_oracle_engine_pauli_strings():
    recs = run_sweep(SweepPlan("fixture:path8", [0.0], 2, [1], ["pauli:Z1,Z2", "pauli:X1"], engine="oracle"))
    assert {r.observable: r.value for r in recs} == {"pauli:Z1,Z2": pytest.approx(1.0),
                                                     "pauli:X1": pytest.approx(0.0)}


def test_csv_roundtrip(tmp_path):
    recs = run_sweep(SweepPlan("fixture:path8", [0.3, 0.6], 1, [4], ["avg_z", "z@2"]))
    text = records_to_csv(recs)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    path = tmp_path / "r.csv"
    path.write_text(text)
    back = read_records(path)
    assert [r.value for r in back] == [r.value for r in recs]
    assert all(r.config_hash == recs[0].config_hash for r in back)
    assert '"config_hash"' in records_to_json(recs)


def test_chi_convergence_report():
    recs = run_sweep(SweepPlan("fixture:path8", [0.9], 4, [2, 4, 16], ["avg_z"], every_step=True))
    rep = chi_convergence_report(recs, "avg_z")
    assert rep[1][2] == pytest.approx(0.0, abs=1e-12)
    assert rep[4][16] == 0.0
    assert rep[4][2] > 1e-4
