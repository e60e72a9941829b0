#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Recordings as evaluation sees them: reference window labels rebuilt from the
beat annotations next to the predicted labels and probabilities.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass
from typing import List, Sequence, Tuple

# vendor libraries
import numpy as np
import pandas as pd

# local libraries
from rrburden.evaluation.metrics import ConfusionCounts
from rrburden.exceptions import JoinMismatch
from rrburden.formats.manifest import ManifestEntry
from rrburden.formats.predictions import windows_by_recording
from rrburden.logger import logger
from rrburden.models.recording import Recording, SeverityClass
from rrburden.rr_core import (
    compute_afb,
    compute_eaf,
    is_mixed_window,
    severity_class,
    total_af_seconds,
    window_category,
    window_label,
)

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass(eq=False)
class EvaluatedRecording:
    recording_id: str
    age: int
    sex: str
    origin: str
    window_index: np.ndarray
    durations: np.ndarray
    """ Window durations in ms. """
    y: np.ndarray
    """ Reference binary window labels. """
    y_hat: np.ndarray
    """ Predicted binary window labels. """
    probs: np.ndarray
    """ Final stage probabilities. """
    categories: np.ndarray
    """ Majority five-way rhythm per window. """
    mixed: np.ndarray
    reference_diagnosis: int
    """ Patient level reference: at least 30 s of true AF_l beats. """
    true_af_seconds: float
    """ Beat level AF_l time. """

    @property
    def reference_afb(self) -> float:
        return compute_afb(self.durations, self.y)

    @property
    def estimated_afb(self) -> float:
        return compute_afb(self.durations, self.y_hat)

    @property
    def abs_eaf(self) -> float:
        return abs(compute_eaf(self.durations, self.y, self.y_hat))

    @property
    def severity(self) -> SeverityClass:
        """Severity of the reference window labels."""
        return severity_class(
            total_af_seconds(self.durations, self.y), self.reference_afb
        )

    @property
    def counts(self) -> ConfusionCounts:
        return ConfusionCounts.from_labels(self.y, self.y_hat)


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def evaluated_recording(
    entry: ManifestEntry, recording: Recording, windows: pd.DataFrame
) -> EvaluatedRecording:
    """Pairs a recording's predicted windows with its beat annotations.

    Args:
        entry (ManifestEntry): manifest row of the recording
        recording (Recording): the annotated recording
        windows (pd.DataFrame): its rows of a predictions file

    Raises:
        JoinMismatch: a window does not fit the recording's beats

    Returns:
        EvaluatedRecording: the joined recording
    """
    binary = recording.binary_labels()
    y, categories, mixed = [], [], []
    for row in windows.itertuples(index=False):
        start, stop = int(row.start_beat), int(row.start_beat) + int(row.n_rr)
        if start < 0 or row.n_rr < 1 or stop > len(recording.rr):
            raise JoinMismatch(
                f"Window [{row.window_index}] of recording [{recording.id}] spans beats "
                f"[{start}, {stop}) outside its [{len(recording.rr)}] RR values"
            )
        if int(recording.rr[start:stop].sum()) != int(row.duration_ms):
            raise JoinMismatch(
                f"Window [{row.window_index}] of recording [{recording.id}] lasts "
                f"[{row.duration_ms}] ms but its beats sum to [{int(recording.rr[start:stop].sum())}] ms"
            )
        y.append(window_label(binary[start:stop]))
        categories.append(window_category(recording.labels[start:stop]).value)
        mixed.append(is_mixed_window(recording.labels[start:stop]))

    probs = windows["stage2_prob"].where(windows["stage2_prob"].notna(), windows["stage1_prob"])
    return EvaluatedRecording(
        recording_id=recording.id,
        age=entry.age,
        sex=entry.sex,
        origin=entry.origin,
        window_index=windows["window_index"].to_numpy(dtype=np.int64),
        durations=windows["duration_ms"].to_numpy(dtype=np.float64),
        y=np.asarray(y, dtype=np.int64),
        y_hat=windows["final_label"].to_numpy(dtype=np.int64),
        probs=probs.to_numpy(dtype=np.float64),
        categories=np.asarray(categories, dtype=np.int64),
        mixed=np.asarray(mixed, dtype=bool),
        reference_diagnosis=entry.reference_diagnosis,
        true_af_seconds=total_af_seconds(recording.rr, binary),
    )


def join_cohort(
    predictions: pd.DataFrame, loaded: Sequence[Tuple[ManifestEntry, Recording]]
) -> List[EvaluatedRecording]:
    """Joins a predictions file with a loaded manifest, in manifest order.

    Manifest recordings without predictions (for example skipped as too short)
    are left out with a warning.

    Raises:
        JoinMismatch: a predicted recording is absent from the manifest, or a
            window does not fit its recording
    """
    by_id = {recording.id: (entry, recording) for entry, recording in loaded}
    grouped = windows_by_recording(predictions)
    unknown = [k for k in grouped if k not in by_id]
    if unknown:
        raise JoinMismatch(
            f"Recording [{unknown[0]}] has predictions but is absent from the manifest"
        )
    cohort = []
    for recording_id, (entry, recording) in by_id.items():
        if recording_id not in grouped:
            logger.warning("Recording [%s] has no predictions, leaving it out", recording_id)
            continue
        cohort.append(evaluated_recording(entry, recording, grouped[recording_id]))
    return cohort


def pooled(cohort: Sequence[EvaluatedRecording]):
    """Concatenated window arrays of a cohort.

    Returns:
        Tuple[np.ndarray, ...]: y, y_hat, probs, categories, mixed
    """
    return tuple(
        np.concatenate([getattr(r, name) for r in cohort]) if cohort else np.zeros(0)
        for name in ("y", "y_hat", "probs", "categories", "mixed")
    )
