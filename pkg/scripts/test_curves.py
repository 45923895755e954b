"""Tests for threshold-accuracy curves and empirical CDFs."""

import pytest
from hypothesis import given, strategies as st

from src.estimators import ConfidenceScore
from src.harness import DEFAULT_THRESHOLDS, empirical_cdf, threshold_accuracy_curve


def _scores(*pairs):
    return [ConfidenceScore(count, n, "nhc") for count, n in pairs]


def test_selective_accuracy_by_definition():
    # classes A=0, B=1; confidences 1.0, 0.5, 0.2
    curve = threshold_accuracy_curve([0, 1, 0], [0, 1, 1], _scores((10, 10), (5, 10), (2, 10)), [0.0, 0.3])
    (t0, t3) = curve.rows
    assert (t0.accuracy, t0.kept_count) == (pytest.approx(2 / 3), 3)
    assert (t3.accuracy, t3.kept_count) == (1.0, 2)


def test_empty_buckets_are_marked():
    curve = threshold_accuracy_curve([0, 1], [0, 0], _scores((1, 7), (3, 7)), [0.0, 0.5, 1.0])
    assert [r.kept_count for r in curve.rows] == [2, 0, 0]
    assert [r.accuracy for r in curve.rows] == [0.5, None, None]
    assert curve.highest_nonempty().threshold == 0.0


def test_all_correct_gives_accuracy_one():
    scores = _scores((0, 4), (1, 4), (2, 4), (3, 4), (4, 4))
    curve = threshold_accuracy_curve([2] * 5, [2] * 5, scores)
    assert all(r.accuracy == 1.0 for r in curve.nonempty())
    assert [r.threshold for r in curve.rows] == list(DEFAULT_THRESHOLDS)


def test_threshold_comparison_is_exact():
    # 7/20 sits exactly on the threshold
    curve = threshold_accuracy_curve([0], [0], _scores((7, 20)), [0.35])
    assert curve.rows[0].kept_count == 1


def test_kept_count_never_grows():
    scores = _scores(*[(k % 8, 7) for k in range(40)])
    curve = threshold_accuracy_curve([k % 3 for k in range(40)], [k % 2 for k in range(40)], scores)
    kept = [r.kept_count for r in curve.rows]
    assert all(b <= a for a, b in zip(kept, kept[1:]))


def test_curve_argument_checks():
    with pytest.raises(ValueError, match="Length mismatch"):
        threshold_accuracy_curve([0, 1], [0], _scores((1, 2), (2, 2)))
    with pytest.raises(ValueError):
        threshold_accuracy_curve([], [], [])
    with pytest.raises(ValueError):
        threshold_accuracy_curve([0], [0], _scores((1, 2)), [0.5, 0.2])


def test_monotone_check_uses_slack():
    curve = threshold_accuracy_curve([0, 0, 1, 1], [0, 1, 1, 0], _scores((1, 4), (2, 4), (3, 4), (4, 4)),
                                     [0.0, 0.5, 1.0])
    # accuracies 0.5, 1/3, 0.0
    assert not curve.is_monotone()
    assert curve.is_monotone(slack=0.5)


def test_cdf_of_constant_scores():
    cdf = empirical_cdf(_scores((0, 5), (0, 5), (0, 5)))
    assert cdf.rows == [(0.0, 1.0)]


def test_cdf_of_two_values():
    cdf = empirical_cdf([0.0, 1.0, 0.0, 1.0])
    assert cdf.rows == [(0.0, 0.5), (1.0, 1.0)]
    assert cdf.at(-0.1) == 0.0
    assert cdf.at(0.5) == 0.5


def test_cdf_quantiles():
    cdf = empirical_cdf([0.2, 0.4, 0.4, 0.6, 0.8])
    assert cdf.fractions[-1] == 1.0
    assert cdf.quantile(0.25) == 0.4
    assert cdf.quantile(0.2) == 0.2
    assert cdf.quantile(1.0) == 0.8
    with pytest.raises(ValueError):
        cdf.quantile(0.0)


def test_cdf_needs_scores():
    with pytest.raises(ValueError):
        empirical_cdf([])


_records = st.integers(1, 12).flatmap(lambda n: st.lists(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, n)), min_size=1, max_size=60
).map(lambda rows: (n, rows)))


@given(_records)
def test_curve_and_cdf_shape(records):
    n, rows = records
    truths, preds, counts = zip(*rows)
    scores = [ConfidenceScore(c, n, "nhc") for c in counts]

    curve = threshold_accuracy_curve(truths, preds, scores)
    kept = [r.kept_count for r in curve.rows]
    assert kept[0] == len(rows)
    assert all(b <= a for a, b in zip(kept, kept[1:]))
    assert all((r.accuracy is None) == (r.kept_count == 0) for r in curve.rows)

    cdf = empirical_cdf(scores)
    assert all(b > a for a, b in zip(cdf.fractions, cdf.fractions[1:]))
    assert cdf.fractions[-1] == 1.0
