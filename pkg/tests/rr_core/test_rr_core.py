#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Unit tests for the RR windowing and burden primitives.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# vendor libraries
import numpy as np
import pytest

# local libraries
from rrburden.exceptions import (
    EmptyInput,
    InvalidLabel,
    InvalidRecording,
    LengthMismatch,
    NonPositiveDuration,
    RecordingTooShort,
)
from rrburden.models.recording import BeatLabel, Recording, SeverityClass
from rrburden.rr_core import (
    binarize_label,
    compute_afb,
    compute_eaf,
    is_mixed_window,
    normalize_rr,
    segment_windows,
    severity_class,
    total_af_seconds,
    window_category,
    window_label,
)

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

ORACLE_INSTANCES = 1000
""" Randomised instances per formula checked against a plain loop. """

# ------------------------------------------------------------------------------
# TESTS
# ------------------------------------------------------------------------------


def test_binarize_label():
    assert binarize_label(BeatLabel.AF) == 1
    assert binarize_label(BeatLabel.AFL) == 1
    assert binarize_label(BeatLabel.AT) == 0
    assert binarize_label(BeatLabel.OTHER) == 0
    assert binarize_label(BeatLabel.SVT_OTHER) == 0

    with pytest.raises(InvalidLabel):
        binarize_label(7)


def test_recording_rejects_invalid_input():
    with pytest.raises(InvalidRecording):
        create_recording([800, 800], [0])
    with pytest.raises(InvalidRecording):
        create_recording([800, 0], [0, 0])
    with pytest.raises(InvalidRecording):
        create_recording([800, 10000], [0, 0])
    with pytest.raises(InvalidLabel):
        create_recording([800, 800], [0, 5])
    with pytest.raises(InvalidRecording):
        create_recording([800, 800], [0, 0], age=17)


def test_recording_duration_is_exact_sum():
    recording = create_recording([800, 601, 999], [0, 1, 2])
    assert recording.duration_ms == 2400
    assert recording.binary_labels().tolist() == [0, 1, 1]


def test_segment_exact_multiple():
    windows = segment_windows(create_recording([800] * 118, [0] * 118), 60)

    assert len(windows) == 2
    assert [w.start_beat for w in windows] == [0, 59]
    assert not any(w.padded for w in windows)


def test_segment_pads_long_remainder():
    rr = np.arange(500, 650)
    windows = segment_windows(create_recording(rr, [0] * 150), 60)

    assert len(windows) == 3
    last = windows[-1]
    assert last.padded
    assert last.n_rr == 32
    assert len(last.rr) == 59
    assert last.duration_ms == int(rr[118:].sum())
    # edge padding repeats the last true value
    assert np.all(last.rr[32:] == rr[-1])


def test_segment_drops_short_remainder():
    windows = segment_windows(create_recording([800] * 140, [0] * 140), 60)

    # 140 - 118 = 22 < 30
    assert len(windows) == 2
    assert sum(w.duration_ms for w in windows) == 118 * 800


def test_segment_too_short():
    with pytest.raises(RecordingTooShort):
        segment_windows(create_recording([800] * 40, [0] * 40), 60)


def test_segment_labels_windows():
    labels = [1] * 31 + [0] * 28 + [3] * 59
    windows = segment_windows(create_recording([700] * 118, labels), 60)

    assert windows[0].ref_label == 1
    assert windows[0].category == BeatLabel.AF
    assert windows[1].ref_label == 0
    assert windows[1].category == BeatLabel.AT
    assert not windows[1].mixed


def test_window_label():
    assert window_label([1] * 31 + [0] * 28) == 1
    assert window_label([0] * 59) == 0
    # ties resolve to AF_l
    assert window_label([1] * 29 + [0] * 29) == 1

    with pytest.raises(EmptyInput):
        window_label([])


def test_window_category_ties():
    assert window_category([1, 1, 2, 2, 0]) == BeatLabel.AF
    assert window_category([3, 3, 4, 4]) == BeatLabel.AT
    assert window_category([0, 0, 0, 2]) == BeatLabel.OTHER


def test_mixed_window():
    assert is_mixed_window([0] * 50 + [1] * 9)
    assert not is_mixed_window([1] * 50 + [0] * 9)
    assert not is_mixed_window([0] * 59)


def test_compute_afb():
    assert compute_afb([1000, 2000], [1, 1]) == 100.0
    assert compute_afb([30000, 70000], [1, 0]) == pytest.approx(30.0)

    with pytest.raises(EmptyInput):
        compute_afb([], [])
    with pytest.raises(LengthMismatch):
        compute_afb([1000, 2000], [1])
    with pytest.raises(NonPositiveDuration):
        compute_afb([1000, 0], [1, 0])


def test_compute_afb_complement():
    rng = np.random.default_rng(3)
    durations = rng.integers(20000, 60000, size=40)
    labels = rng.integers(0, 2, size=40)

    total = compute_afb(durations, labels) + compute_afb(durations, 1 - labels)
    assert total == pytest.approx(100.0, abs=1e-9)


def test_compute_eaf():
    assert compute_eaf([1000, 2000], [1, 0], [1, 0]) == 0.0
    assert compute_eaf([50000, 50000], [1, 0], [0, 0]) == pytest.approx(-50.0)
    assert compute_eaf([50000, 50000], [0, 0], [1, 1]) == pytest.approx(100.0)

    with pytest.raises(LengthMismatch):
        compute_eaf([1000, 2000], [1, 0], [1])


def test_compute_afb_matches_loop():
    rng = np.random.default_rng(5)
    for _ in range(ORACLE_INSTANCES):
        size = int(rng.integers(1, 30))
        durations = rng.uniform(1.0, 90000.0, size=size)
        labels = rng.integers(0, 2, size=size)

        assert abs(compute_afb(durations, labels) - afb_by_loop(durations, labels)) <= 1e-9


def test_compute_afb_is_scale_invariant():
    rng = np.random.default_rng(8)
    for _ in range(ORACLE_INSTANCES):
        size = int(rng.integers(1, 30))
        durations = rng.uniform(1.0, 90000.0, size=size)
        labels = rng.integers(0, 2, size=size)
        scale = rng.uniform(1e-3, 1e3)

        assert compute_afb(durations * scale, labels) == pytest.approx(
            compute_afb(durations, labels), abs=1e-9
        )


def test_compute_eaf_is_afb_difference():
    rng = np.random.default_rng(11)
    for _ in range(ORACLE_INSTANCES):
        size = int(rng.integers(1, 30))
        durations = rng.integers(20000, 60000, size=size)
        y = rng.integers(0, 2, size=size)
        y_hat = rng.integers(0, 2, size=size)

        eaf = compute_eaf(durations, y, y_hat)
        assert abs(eaf) <= 100.0
        assert abs(eaf - (afb_by_loop(durations, y_hat) - afb_by_loop(durations, y))) <= 1e-9


def test_total_af_seconds():
    assert total_af_seconds([30000, 70000], [1, 0]) == 30.0


def test_severity_class():
    assert severity_class(25, 0.1) == SeverityClass.NON_AF
    assert severity_class(60, 3.0) == SeverityClass.MILD
    assert severity_class(30, 4.0) == SeverityClass.MODERATE
    assert severity_class(3000, 50.0) == SeverityClass.MODERATE
    assert severity_class(3000, 80.0) == SeverityClass.MODERATE
    assert severity_class(30, 90.0) == SeverityClass.SEVERE
    assert severity_class(29.999, 100.0) == SeverityClass.NON_AF


def test_severity_class_grid():
    seconds = np.concatenate([np.linspace(0.0, 120.0, 97), [29.999, 30.0, 30.001]])
    burdens = np.concatenate([np.linspace(0.0, 100.0, 97), [4.0, 80.0, 80.001]])
    assert seconds.size * burdens.size == 10_000

    for s in seconds:
        for afb in burdens:
            assert severity_class(s, afb) == severity_by_rules(s, afb), (s, afb)


def test_normalize_rr():
    assert normalize_rr(np.array([800.0]))[0] == pytest.approx(0.0)
    assert normalize_rr(np.array([1050.0]))[0] == pytest.approx(1.0)
    # clipped into [200, 3000]
    assert normalize_rr(np.array([100.0]))[0] == pytest.approx((0.2 - 0.8) / 0.25)
    assert normalize_rr(np.array([5000.0]))[0] == pytest.approx((3.0 - 0.8) / 0.25)


# ------------------------------------------------------------------------------
# FIXTURES
# ------------------------------------------------------------------------------


def create_recording(rr, labels, age: int = 60) -> Recording:
    return Recording(
        id="rec-test",
        rr=np.asarray(rr),
        labels=np.asarray(labels),
        age=age,
        sex="F",
        origin="test",
    )


# ------------------------------------------------------------------------------
# HELPER FUNCTIONS
# ------------------------------------------------------------------------------


def afb_by_loop(durations, labels) -> float:
    af_time, total_time = 0.0, 0.0
    for duration, label in zip(durations, labels):
        total_time += float(duration)
        if label == 1:
            af_time += float(duration)
    return 100.0 * af_time / total_time


def severity_by_rules(seconds: float, afb: float) -> SeverityClass:
    non_af = seconds < 30
    classes = {
        SeverityClass.NON_AF: non_af,
        SeverityClass.MILD: not non_af and afb < 4,
        SeverityClass.MODERATE: not non_af and 4 <= afb <= 80,
        SeverityClass.SEVERE: not non_af and afb > 80,
    }
    matching = [k for k, v in classes.items() if v]
    assert len(matching) == 1
    return matching[0]
