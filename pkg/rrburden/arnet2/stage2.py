#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Stage 2: four GRU sequence encoders, one per severity class, that re-classify
each window from its stage-1 features and those of the h windows before it.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass
from typing import Dict, Optional

# vendor libraries
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# local libraries
from rrburden.exceptions import EmptySequence, ShapeMismatch
from rrburden.logger import logger
from rrburden.models.hyperparams import Hyperparams
from rrburden.models.recording import SeverityClass
from rrburden.nn.layers import GRU, Dense, Mode, ReLU, Sigmoid
from rrburden.nn.network import Container, Sequential
from rrburden.rr_core import compute_afb, severity_class, total_af_seconds

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

DENSE_UNITS = 32
""" Width of the dense layer between each GRU and its output unit. """

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class Stage2Model(Container):
    """One GRU → Dense → ReLU → Dense(1) → Sigmoid encoder per severity class,
    all of the same architecture."""

    def __init__(self, hp: Hyperparams, binary_input: bool = False):
        super().__init__()
        hp.check_structure()
        self.hp = hp
        self.binary_input = binary_input
        """ Feed the thresholded stage-1 label instead of its probability. """
        self.threshold: float = 0.5
        """ Decision threshold τ₂, replaced by training. """
        self.w_pos: Dict[SeverityClass, float] = {}
        self.input_width = hp.embedding_width + 1
        self.encoders: Dict[SeverityClass, Sequential] = {
            severity: Sequential(
                [
                    ("gru", GRU(self.input_width, hp.gru_hidden)),
                    ("dense", Dense(hp.gru_hidden, DENSE_UNITS)),
                    ("relu", ReLU()),
                    ("output", Dense(DENSE_UNITS, 1)),
                    ("sigmoid", Sigmoid()),
                ]
            )
            for severity in SeverityClass
        }

    def children(self):
        return [(severity.value, self.encoders[severity]) for severity in SeverityClass]

    @property
    def sequence_length(self) -> int:
        return self.hp.h + 1

    def predict(
        self, severity: SeverityClass, sequences: np.ndarray, batch_size: int = 1024
    ) -> np.ndarray:
        """Probabilities (N,) for sequences (N, h + 1, width) through one encoder."""
        encoder = self.encoders[SeverityClass(severity)]
        probs = [
            encoder.forward(sequences[start : start + batch_size], Mode.INFER)[0][:, 0]
            for start in range(0, len(sequences), batch_size)
        ]
        return np.concatenate(probs) if probs else np.zeros(0)


@dataclass
class EmbeddedRecording:
    """A recording's windows as seen by stage 2."""

    recording_id: str
    durations: np.ndarray
    """ Window durations in ms. """
    labels: np.ndarray
    """ Reference binary window labels. """
    probs: np.ndarray
    """ Stage-1 probabilities. """
    embeddings: np.ndarray
    """ Stage-1 embeddings (windows, n_hu / 4). """

    @property
    def true_severity(self) -> SeverityClass:
        """Severity from the reference window labels."""
        return severity_class(
            total_af_seconds(self.durations, self.labels),
            compute_afb(self.durations, self.labels),
        )


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def build_stage2(hp: Hyperparams, seed: int, binary_input: bool = False) -> Stage2Model:
    """Builds the four stage-2 encoders with freshly initialised parameters."""
    model = Stage2Model(hp, binary_input)
    model.initialise(np.random.default_rng(seed))
    logger.debug("Built stage 2 with [%d] parameters", model.parameter_count())
    return model


def stage2_route(afb: float, total_af_seconds: float) -> SeverityClass:
    """Selects the encoder for a recording. `SeverityClass.index` gives its
    position in the fixed order NonAF, Mild, Moderate, Severe."""
    return severity_class(total_af_seconds, afb)


def stage2_features(
    embeddings: np.ndarray,
    probs: np.ndarray,
    h: int,
    binary_threshold: Optional[float] = None,
) -> np.ndarray:
    """Builds one sequence per window: the features of the h preceding windows
    and of the window itself, earliest first, left padded with zero vectors at
    the start of the recording.

    Args:
        embeddings (np.ndarray): stage-1 embeddings (N, width)
        probs (np.ndarray): stage-1 probabilities (N,)
        h (int): history length
        binary_threshold (Optional[float]): when set, the probability feature is
            replaced by the label thresholded at this value

    Returns:
        np.ndarray: sequences (N, h + 1, width + 1)
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    if len(embeddings) != len(probs):
        raise ShapeMismatch(
            f"Got [{len(embeddings)}] embeddings but [{len(probs)}] probabilities"
        )
    if binary_threshold is not None:
        probs = (probs > binary_threshold).astype(np.float64)
    features = np.concatenate([embeddings, probs[:, None]], axis=1)
    padded = np.concatenate([np.zeros((h, features.shape[1])), features])
    # (N, width, h + 1) → (N, h + 1, width)
    windows = sliding_window_view(padded, h + 1, axis=0)
    return np.ascontiguousarray(windows.transpose(0, 2, 1))


def recording_sequences(model: Stage2Model, recording: EmbeddedRecording, tau1: float):
    """Stage-2 input sequences for every window of a recording."""
    return stage2_features(
        recording.embeddings,
        recording.probs,
        model.hp.h,
        tau1 if model.binary_input else None,
    )


def stage2_infer(model: Stage2Model, severity: SeverityClass, seq: np.ndarray) -> float:
    """Probability that the last window of a feature sequence is AF_l.

    Args:
        model (Stage2Model): the model
        severity (SeverityClass): which encoder to use
        seq (np.ndarray): 1 to h + 1 feature vectors (length, width), earliest first

    Raises:
        EmptySequence: the sequence holds no feature vector
        ShapeMismatch: the sequence is too long or has the wrong width

    Returns:
        float: the probability
    """
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] == 0:
        raise EmptySequence(f"Stage 2 needs at least one feature vector, got [{seq.shape}]")
    length = model.sequence_length
    if seq.shape[0] > length or seq.shape[1] != model.input_width:
        raise ShapeMismatch(
            f"Stage 2 takes up to ({length}, {model.input_width}) features, got [{seq.shape}]"
        )
    padded = np.concatenate([np.zeros((length - seq.shape[0], seq.shape[1])), seq])
    return float(model.predict(severity, padded[None, :, :])[0])
