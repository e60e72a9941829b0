#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
RR recording domain operations: window segmentation, labelling, AF burden,
burden error and severity stratification.

All functions are pure and safe to call concurrently.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from collections import Counter
from typing import List, Sequence

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import (
    EmptyInput,
    InvalidHyperparam,
    LengthMismatch,
    NonPositiveDuration,
    RecordingTooShort,
)
from rrburden.models.recording import (
    AF_L_LABELS,
    BeatLabel,
    Recording,
    SeverityClass,
    Window,
    as_label_array,
)

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

NON_AF_MAX_SECONDS = 30.0
""" Recordings with less AF_l time than this are Non-AF. """

MILD_MAX_AFB = 4.0
""" Mild AF has a burden strictly below this percentage. """

MODERATE_MAX_AFB = 80.0
""" Moderate AF has a burden up to and including this percentage. """

RR_CLIP_MS = (200.0, 3000.0)
""" RR values are clipped into this range before normalisation. """

RR_SHIFT = 0.8
RR_SCALE = 0.25
""" Fixed affine transform applied to RR values expressed in seconds. """

CATEGORY_TIE_ORDER = (
    BeatLabel.AF,
    BeatLabel.AFL,
    BeatLabel.AT,
    BeatLabel.SVT_OTHER,
    BeatLabel.OTHER,
)
""" Priority used when two categories are equally frequent in a window. """

# ------------------------------------------------------------------------------
# LABELS
# ------------------------------------------------------------------------------


def binarize_label(label: BeatLabel) -> int:
    """Maps a five-way beat label to the binary AF_l target (AF and AFL → 1)."""
    return int(BeatLabel.parse(label) in AF_L_LABELS)


def window_label(labels: Sequence[int]) -> int:
    """Majority binary label of a window. An exact tie resolves to AF_l.

    Args:
        labels (Sequence[int]): binary label per RR interval

    Raises:
        EmptyInput: no labels were supplied

    Returns:
        int: 1 for AF_l, 0 otherwise
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise EmptyInput("Cannot label an empty window")
    return int(2 * int(labels.sum()) >= labels.size)


def window_category(categories: Sequence[int]) -> BeatLabel:
    """Most frequent five-way category in a window."""
    categories = as_label_array(categories)
    if categories.size == 0:
        raise EmptyInput("Cannot categorise an empty window")
    counts = Counter(categories.tolist())
    top = max(counts.values())
    for label in CATEGORY_TIE_ORDER:
        if counts.get(label.value, 0) == top:
            return label
    # unreachable, every code is in CATEGORY_TIE_ORDER
    raise EmptyInput("Cannot categorise window")


def is_mixed_window(categories: Sequence[int]) -> bool:
    """True when the window is labelled non-AF_l yet holds some AF_l beats."""
    binary = np.isin(as_label_array(categories), [x.value for x in AF_L_LABELS])
    return bool(binary.any()) and window_label(binary) == 0


# ------------------------------------------------------------------------------
# SEGMENTATION
# ------------------------------------------------------------------------------


def segment_windows(recording: Recording, w_s: int = 60) -> List[Window]:
    """Splits a recording into consecutive, non-overlapping windows of w_s - 1 RR
    values.

    A trailing remainder holding at least half a window is edge padded (last RR
    repeated) for model input but keeps the duration of its true RR values.
    Shorter remainders are dropped.

    Args:
        recording (Recording): the recording to segment
        w_s (int): window size in beats

    Raises:
        RecordingTooShort: the recording holds fewer than w_s - 1 RR values

    Returns:
        List[Window]: the windows in temporal order
    """
    if w_s < 2:
        raise InvalidHyperparam(f"Window size [{w_s}] must be at least 2 beats")
    n_rr = w_s - 1
    total = len(recording.rr)
    if total < n_rr:
        raise RecordingTooShort(
            f"Recording [{recording.id}] has [{total}] RR values, needs at least [{n_rr}]"
        )

    starts = list(range(0, total - n_rr + 1, n_rr))
    remainder = total - (starts[-1] + n_rr)
    if remainder >= math.ceil(n_rr / 2):
        starts.append(total - remainder)

    binary = recording.binary_labels()
    windows = []
    for index, start in enumerate(starts):
        stop = min(start + n_rr, total)
        rr = recording.rr[start:stop]
        categories = recording.labels[start:stop]
        padded = np.pad(rr, (0, n_rr - len(rr)), mode="edge")
        windows.append(
            Window(
                recording_id=recording.id,
                index=index,
                start_beat=start,
                rr=padded,
                n_rr=len(rr),
                duration_ms=int(rr.sum()),
                ref_label=window_label(binary[start:stop]),
                category=window_category(categories),
                mixed=is_mixed_window(categories),
            )
        )
    return windows


def normalize_rr(rr: np.ndarray) -> np.ndarray:
    """Clips RR values (ms) to a physiological range and applies the fixed
    affine transform used as model input."""
    clipped = np.clip(np.asarray(rr, dtype=np.float64), *RR_CLIP_MS)
    return (clipped / 1000.0 - RR_SHIFT) / RR_SCALE


# ------------------------------------------------------------------------------
# BURDEN
# ------------------------------------------------------------------------------


def compute_afb(durations: Sequence[float], labels: Sequence[int]) -> float:
    """Duration weighted AF burden, in percent.

    Args:
        durations (Sequence[float]): window durations in ms
        labels (Sequence[int]): binary AF_l label per window

    Raises:
        EmptyInput: no windows
        LengthMismatch: durations and labels differ in length
        NonPositiveDuration: a duration is zero or negative

    Returns:
        float: 100 * sum(t_i * I_i) / sum(t_i)
    """
    durations, labels = _check_windows(durations, labels)
    return 100.0 * float(np.dot(durations, labels)) / float(durations.sum())


def compute_eaf(
    durations: Sequence[float], y: Sequence[int], y_hat: Sequence[int]
) -> float:
    """Signed duration weighted burden error (estimated minus reference), in percent."""
    durations, y = _check_windows(durations, y)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y_hat.shape != y.shape:
        raise LengthMismatch(
            f"Reference has [{y.size}] labels but prediction has [{y_hat.size}]"
        )
    return 100.0 * float(np.dot(durations, y_hat - y)) / float(durations.sum())


def total_af_seconds(durations: Sequence[float], labels: Sequence[int]) -> float:
    """Total time spent in AF_l windows, in seconds."""
    durations = np.asarray(durations, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if durations.shape != labels.shape:
        raise LengthMismatch(
            f"Got [{durations.size}] durations but [{labels.size}] labels"
        )
    return float(np.dot(durations, labels)) / 1000.0


def severity_class(total_af_seconds: float, afb: float) -> SeverityClass:
    """Stratifies a recording by time spent in AF_l and burden.

    Boundaries: exactly 4% is Moderate, exactly 80% is Moderate.
    """
    if total_af_seconds < NON_AF_MAX_SECONDS:
        return SeverityClass.NON_AF
    if afb < MILD_MAX_AFB:
        return SeverityClass.MILD
    if afb <= MODERATE_MAX_AFB:
        return SeverityClass.MODERATE
    return SeverityClass.SEVERE


def window_arrays(windows: Sequence[Window]):
    """Stacks window fields into arrays.

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: rr (N, w_s - 1), durations (N,), reference labels (N,)
    """
    if not windows:
        raise EmptyInput("No windows supplied")
    rr = np.stack([w.rr for w in windows]).astype(np.float64)
    durations = np.array([w.duration_ms for w in windows], dtype=np.float64)
    labels = np.array([w.ref_label for w in windows], dtype=np.int64)
    return rr, durations, labels


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _check_windows(durations, labels):
    durations = np.asarray(durations, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if durations.size == 0:
        raise EmptyInput("Cannot compute a burden over zero windows")
    if durations.shape != labels.shape:
        raise LengthMismatch(
            f"Got [{durations.size}] durations but [{labels.size}] labels"
        )
    if np.any(durations <= 0):
        raise NonPositiveDuration("Window durations must be strictly positive")
    return durations, labels
