#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Full-recording inference: stage 1 on every window, routing by the stage-1
burden estimate, stage 2 on each window's history and the final burden.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass
from typing import List, Optional, Sequence

# vendor libraries
import numpy as np

# local libraries
from rrburden.arnet2.stage1 import Stage1Model, stage1_predict
from rrburden.arnet2.stage2 import (
    EmbeddedRecording,
    Stage2Model,
    stage2_features,
    stage2_route,
)
from rrburden.models.recording import Recording, SeverityClass, Window
from rrburden.rr_core import (
    compute_afb,
    segment_windows,
    severity_class,
    total_af_seconds,
    window_arrays,
)

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass
class InferenceResult:
    """Per window and per recording outcome of running both stages."""

    recording_id: str
    windows: List[Window]
    stage1_probs: np.ndarray
    stage2_probs: Optional[np.ndarray]
    """ None when the bundle holds no stage 2. """
    labels: np.ndarray
    """ Final binary window labels. """
    route: SeverityClass
    """ Encoder chosen from the stage-1 burden estimate. """
    estimated_afb: float
    """ Final burden estimate, in percent. """
    estimated_af_seconds: float
    severity: SeverityClass
    """ Severity of the final estimate. """

    @property
    def durations(self) -> np.ndarray:
        return np.array([w.duration_ms for w in self.windows], dtype=np.float64)


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def embed_windows(
    stage1: Stage1Model, recording_id: str, windows: Sequence[Window], batch_size: int = 1024
) -> EmbeddedRecording:
    """Runs stage 1 over a recording's windows."""
    rr, durations, labels = window_arrays(windows)
    probs, embeddings = stage1_predict(stage1, rr, batch_size)
    return EmbeddedRecording(recording_id, durations, labels, probs, embeddings)


def full_inference(
    stage1: Stage1Model,
    stage2: Optional[Stage2Model],
    recording: Recording,
    batch_size: int = 1024,
) -> InferenceResult:
    """Classifies every window of a recording and estimates its AF burden.

    Windows are positive when their probability exceeds the stage threshold.
    Without a stage 2 the stage-1 labels are final.

    Raises:
        RecordingTooShort: the recording does not fill one window

    Returns:
        InferenceResult: the outcome
    """
    windows = segment_windows(recording, stage1.hp.w_s)
    embedded = embed_windows(stage1, recording.id, windows, batch_size)
    durations, p1 = embedded.durations, embedded.probs
    y1 = (p1 > stage1.threshold).astype(np.int64)
    route = stage2_route(compute_afb(durations, y1), total_af_seconds(durations, y1))

    p2 = None
    final_probs, labels = p1, y1
    if stage2 is not None:
        sequences = stage2_features(
            embedded.embeddings,
            p1,
            stage2.hp.h,
            stage1.threshold if stage2.binary_input else None,
        )
        p2 = stage2.predict(route, sequences, batch_size)
        final_probs, labels = p2, (p2 > stage2.threshold).astype(np.int64)

    for window, prob in zip(windows, final_probs):
        window.pred_prob = float(prob)
    afb = compute_afb(durations, labels)
    seconds = total_af_seconds(durations, labels)
    return InferenceResult(
        recording_id=recording.id,
        windows=windows,
        stage1_probs=p1,
        stage2_probs=p2,
        labels=labels,
        route=route,
        estimated_afb=afb,
        estimated_af_seconds=seconds,
        severity=severity_class(seconds, afb),
    )
