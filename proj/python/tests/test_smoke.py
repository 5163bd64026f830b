import math
import random

import pytest

import calband


def test_clopper_pearson_closed_forms():
    # z = 0 upper bound solves (1 - xi)^m = delta.
    assert calband.cp_upper(0, 5, 0.05) == pytest.approx(1 - 0.05 ** 0.2, abs=1e-12)
    assert calband.cp_lower(3, 3, 0.05) == pytest.approx(0.05 ** (1 / 3), abs=1e-12)
    assert calband.cp_upper(4, 4, 0.01) == 1.0
    assert calband.binom_cdf(3, 10, 0.5) == pytest.approx(176 / 1024, abs=1e-15)


def test_isotonic_regression_pools_violators():
    assert calband.isotonic_regression([1.0, 0.0, 0.0, 1.0]) == pytest.approx([1 / 3, 1 / 3, 1 / 3, 1.0])
    assert calband.isotonic_regression([2.0, 0.0], [1.0, 3.0]) == pytest.approx([0.5, 0.5])
    with pytest.raises(ValueError):
        calband.isotonic_regression([1.0], [0.0])


def _sample(n, seed, p=lambda x: x):
    rng = random.Random(seed)
    xs = [rng.random() for _ in range(n)]
    ys = [int(rng.random() < p(x)) for x in xs]
    return xs, ys


def test_band_contains_fit_and_orders():
    xs, ys = _sample(400, 3)
    raw = calband.calibration_band(xs, ys, method="raw")
    nc = calband.calibration_band(xs, ys, method="nc")
    yb = calband.calibration_band(xs, ys, method="yb")
    assert len(nc) == len(set(xs))
    for i in range(len(nc)):
        assert yb.lower[i] <= nc.lower[i] <= raw.lower[i]
        assert raw.upper[i] <= nc.upper[i] <= yb.upper[i]
    lo, hi = nc(0.5)
    assert 0.0 <= lo <= hi <= 1.0
    lo, hi = nc(-1.0, extrapolate=False)
    assert math.isnan(lo) and math.isnan(hi)


def test_full_index_family():
    xs, ys = _sample(60, 5)
    full = calband.calibration_band(xs, ys, method="raw", K=None)
    assert len(full.knots) == 60


def test_analyze_report():
    xs, ys = _sample(300, 11)
    report = calband.analyze(xs, ys)
    assert set(report) == {"band", "verdict", "isotonicity", "hosmer_lemeshow", "meta"}
    assert report["meta"]["n"] == 300
    assert 0.0 <= report["isotonicity"]["p_value"] <= 1.0
    assert report["verdict"]["classical_reject"] in (True, False)


def test_mismatched_lengths_rejected():
    with pytest.raises(ValueError):
        calband.calibration_band([0.1, 0.2], [1])


def test_simulate_is_deterministic():
    a = calband.simulate("monomial", 0.5, n=256, reps=4, seed=9)
    b = calband.simulate("monomial", 0.5, n=256, reps=4, seed=9, threads=1)
    assert a == b
    assert 0.0 <= a["coverage_rate"] <= 1.0
    assert len(a["mean_width"]) == 101
    assert calband.family_value("wave", 0.5, 0.25) == pytest.approx(0.4375)
