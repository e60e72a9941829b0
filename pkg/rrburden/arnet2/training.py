#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Training of both model stages: weighted BCE minimised with Adam in shuffled
mini-batches, early stopping on validation AUROC, and F1-maximising decision
thresholds.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

# vendor libraries
import numpy as np
import pandas as pd
from dataclasses_json import dataclass_json

# local libraries
from rrburden.arnet2.stage1 import Stage1Model, as_model_input
from rrburden.arnet2.stage2 import EmbeddedRecording, Stage2Model, recording_sequences
from rrburden.evaluation.metrics import auroc
from rrburden.exceptions import LengthMismatch, NoTrainingData, SingleClassDataset
from rrburden.functions import derive_seed
from rrburden.logger import logger
from rrburden.models.recording import SeverityClass, Window
from rrburden.nn.layers import Mode
from rrburden.nn.losses import weighted_bce
from rrburden.nn.network import Container
from rrburden.nn.optimizers import AdamState, adam_step
from rrburden.rr_core import window_arrays

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass_json
@dataclass
class EpochRecord:
    stage: str
    epoch: int
    """ 0 for the untrained network. """
    loss: float
    """ Mean weighted BCE over the training split. """
    val_auroc: float
    """ NaN when there is no validation split or it holds a single class. """


@dataclass_json
@dataclass
class TrainingHistory:
    """Learning curve of every network trained for a bundle."""

    records: List[EpochRecord] = field(default_factory=list)

    def add(self, stage: str, epoch: int, loss: float, val_auroc: float):
        self.records.append(EpochRecord(stage, epoch, loss, val_auroc))

    def for_stage(self, stage: str) -> List[EpochRecord]:
        return [r for r in self.records if r.stage == stage]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [r.to_dict() for r in self.records],
            columns=["stage", "epoch", "loss", "val_auroc"],
        )


@dataclass
class FitSettings:
    """Optimisation settings shared by every network."""

    lr: float
    batch_size: int
    max_epochs: int
    patience: int = 5


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def select_threshold(probs: Sequence[float], labels: Sequence[int]) -> Tuple[float, float]:
    """Chooses the decision threshold that maximises F1.

    Candidates are the midpoints between adjacent sorted distinct probabilities.
    A window is positive when its probability exceeds the threshold. Ties in
    F1 resolve to the smallest threshold. When every probability is equal the
    threshold is half that probability (all positive), or 0.5 if it is zero.

    Args:
        probs (Sequence[float]): predicted probabilities
        labels (Sequence[int]): binary reference labels

    Raises:
        LengthMismatch: probs and labels differ in length
        SingleClassDataset: the labels hold a single class

    Returns:
        Tuple[float, float]: the threshold and the F1 it achieves
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.shape != labels.shape:
        raise LengthMismatch(f"Got [{probs.size}] probabilities but [{labels.size}] labels")
    require_both_classes(labels, "Threshold selection")

    distinct, inverse = np.unique(probs, return_inverse=True)
    n_pos = int(labels.sum())
    if len(distinct) == 1:
        tau = distinct[0] / 2 if distinct[0] > 0 else 0.5
        predicted = probs > tau
        tp = int(np.sum(predicted & (labels == 1)))
        fp = int(np.sum(predicted & (labels == 0)))
        return float(tau), _f1(tp, fp, n_pos - tp)

    pos_at = np.bincount(inverse, weights=labels, minlength=len(distinct))
    neg_at = np.bincount(inverse, minlength=len(distinct)) - pos_at
    # cut k predicts positive for every distinct value above index k
    tp = np.cumsum(pos_at[::-1])[::-1][1:]
    fp = np.cumsum(neg_at[::-1])[::-1][1:]
    fn = n_pos - tp
    denominator = 2 * tp + fp + fn
    f1 = np.divide(2 * tp, denominator, out=np.zeros_like(tp), where=denominator > 0)
    best = int(np.argmax(f1))
    tau = (distinct[best] + distinct[best + 1]) / 2
    return float(tau), float(f1[best])


def require_both_classes(labels: np.ndarray, what: str):
    """
    Raises:
        SingleClassDataset: the labels are empty or hold a single class
    """
    labels = np.asarray(labels)
    if labels.size == 0 or labels.min() == labels.max():
        raise SingleClassDataset(
            f"{what} needs both AF_l and non-AF_l examples, got classes [{np.unique(labels).tolist()}]"
        )


def positive_weight(labels: np.ndarray) -> float:
    """N_neg / N_pos, or 1 when either class is absent."""
    n_pos = int(np.sum(labels))
    n_neg = int(len(labels) - n_pos)
    return n_neg / n_pos if n_pos and n_neg else 1.0


def split_recordings(
    recording_ids: Sequence[str], fraction: float, seed: int
) -> Set[str]:
    """Picks the recordings held out for validation. Splitting by recording
    keeps windows of one patient on one side.

    Returns:
        Set[str]: validation recording ids, empty when there are fewer than two recordings
    """
    unique = list(dict.fromkeys(recording_ids))
    if len(unique) < 2:
        return set()
    n_val = min(max(1, int(round(fraction * len(unique)))), len(unique) - 1)
    order = np.random.default_rng(seed).permutation(len(unique))
    return {unique[i] for i in order[:n_val]}


def predict(network: Container, x: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    """Inference mode probabilities (N,) of a single-output network."""
    outputs = [
        network.forward(x[start : start + batch_size], Mode.INFER)[0][:, 0]
        for start in range(0, len(x), batch_size)
    ]
    return np.concatenate(outputs) if outputs else np.zeros(0)


def fit(
    network: Container,
    x: np.ndarray,
    y: np.ndarray,
    settings: FitSettings,
    w_pos: float,
    rng: np.random.Generator,
    stage: str,
    history: TrainingHistory,
    x_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
):
    """Trains a single-output network in place and keeps the parameters of its
    best epoch.

    Epochs are scored by validation AUROC. A single class validation split is
    scored by negative validation loss, and a missing one by negative training
    loss. Training stops after `patience` epochs without improvement.
    """
    y = np.asarray(y, dtype=np.float64)
    state = AdamState.create(network.parameters(), settings.lr)
    initial, _ = weighted_bce(predict(network, x, settings.batch_size), y, w_pos)
    history.add(stage, 0, initial, math.nan)

    has_val = x_val is not None and len(x_val) > 0
    val_is_binary = has_val and len(np.unique(y_val)) == 2
    if has_val and not val_is_binary:
        logger.warning(
            "Validation split of [%s] holds a single class. Early stopping on validation loss.",
            stage,
        )

    best_score, best, wait = -math.inf, _snapshot(network), 0
    for epoch in range(1, settings.max_epochs + 1):
        order = rng.permutation(len(x))
        total = 0.0
        for start in range(0, len(x), settings.batch_size):
            batch = order[start : start + settings.batch_size]
            out, cache = network.forward(x[batch], Mode.TRAIN, rng)
            loss, d_p = weighted_bce(out[:, 0], y[batch], w_pos)
            _, grads = network.backward(cache, d_p[:, None])
            params, state = adam_step(network.parameters(), grads, state)
            network.set_parameters(params)
            total += loss * len(batch)
        epoch_loss = total / len(x)

        val_auroc = math.nan
        if not has_val:
            score = -epoch_loss
        else:
            val_probs = predict(network, x_val, settings.batch_size)
            if val_is_binary:
                val_auroc = auroc(val_probs, y_val)
                score = val_auroc
            else:
                score = -weighted_bce(val_probs, y_val, w_pos)[0]
        history.add(stage, epoch, epoch_loss, val_auroc)
        logger.debug(
            "[%s] epoch [%d] loss [%.5f] validation AUROC [%.4f]",
            stage,
            epoch,
            epoch_loss,
            val_auroc,
        )

        if score > best_score:
            best_score, best, wait = score, _snapshot(network), 0
        else:
            wait += 1
            if wait >= settings.patience:
                logger.info(
                    "[%s] stopped early after epoch [%d]; best score [%.5f]",
                    stage,
                    epoch,
                    best_score,
                )
                break
    _restore(network, best)


def train_stage1(
    model: Stage1Model,
    windows: Sequence[Window],
    seed: int,
    validation_fraction: float = 0.1,
    patience: int = 5,
    history: Optional[TrainingHistory] = None,
) -> Tuple[Stage1Model, float]:
    """Trains the window classifier, then sets its threshold τ₁ on the
    training split.

    Args:
        model (Stage1Model): the model to train in place
        windows (Sequence[Window]): labelled training windows
        seed (int): master seed for the split, shuffling and dropout
        validation_fraction (float): share of recordings held out
        patience (int): early stopping patience in epochs
        history (Optional[TrainingHistory]): learning curve to append to

    Raises:
        SingleClassDataset: the windows hold a single class

    Returns:
        Tuple[Stage1Model, float]: the trained model and τ₁
    """
    history = history if history is not None else TrainingHistory()
    hp = model.hp
    rr, _, labels = window_arrays(windows)
    require_both_classes(labels, "Stage 1 training")

    ids = np.array([w.recording_id for w in windows])
    val_ids = split_recordings(ids, validation_fraction, derive_seed(seed, "split"))
    is_val = np.isin(ids, sorted(val_ids))
    x = as_model_input(rr)
    x_train, y_train = x[~is_val], labels[~is_val]
    require_both_classes(y_train, "Stage 1 training split")

    w_pos = positive_weight(y_train)
    logger.info(
        "Training stage 1 on [%d] windows ([%d] validation), positive weight [%.3f]",
        len(x_train),
        int(is_val.sum()),
        w_pos,
    )
    settings = FitSettings(hp.alpha, hp.batch_size, hp.max_epochs, patience)
    fit(
        model,
        x_train,
        y_train,
        settings,
        w_pos,
        np.random.default_rng(derive_seed(seed, "stage1")),
        "stage1",
        history,
        x[is_val],
        labels[is_val],
    )

    tau, f1 = select_threshold(predict(model, x_train, hp.batch_size), y_train)
    model.threshold, model.w_pos = tau, w_pos
    logger.info("Stage 1 threshold [%.4f], training F1 [%.4f]", tau, f1)
    return model, tau


def train_stage2(
    model: Stage2Model,
    recordings: Sequence[EmbeddedRecording],
    tau1: float,
    seed: int,
    validation_fraction: float = 0.1,
    patience: int = 5,
    history: Optional[TrainingHistory] = None,
) -> Tuple[Stage2Model, float]:
    """Trains each encoder on the recordings of its severity class, routed by
    the reference burden, then sets τ₂ on the pooled training outputs.

    Raises:
        NoTrainingData: there are no recordings at all
        SingleClassDataset: the pooled training windows hold a single class

    Returns:
        Tuple[Stage2Model, float]: the trained model and τ₂
    """
    history = history if history is not None else TrainingHistory()
    hp = model.hp
    partitions: Dict[SeverityClass, List[EmbeddedRecording]] = {
        severity: [] for severity in SeverityClass
    }
    for recording in recordings:
        partitions[recording.true_severity].append(recording)
    if not any(partitions.values()):
        raise NoTrainingData("Stage 2 needs at least one recording, got none")

    settings = FitSettings(hp.alpha, hp.batch_size, hp.max_epochs, patience)
    pooled_probs, pooled_labels = [], []
    for severity, members in partitions.items():
        if not members:
            logger.warning(
                "No [%s] recordings to train on. That encoder keeps its initial parameters.",
                severity.value,
            )
            continue
        x = np.concatenate([recording_sequences(model, r, tau1) for r in members])
        y = np.concatenate([r.labels for r in members])
        ids = np.concatenate([[r.recording_id] * len(r.labels) for r in members])
        val_ids = split_recordings(
            [r.recording_id for r in members],
            validation_fraction,
            derive_seed(seed, "stage2", severity.value, "split"),
        )
        is_val = np.isin(ids, sorted(val_ids))
        x_train, y_train = x[~is_val], y[~is_val]

        w_pos = positive_weight(y_train)
        model.w_pos[severity] = w_pos
        logger.info(
            "Training [%s] encoder on [%d] recordings, [%d] windows",
            severity.value,
            len(members),
            len(x_train),
        )
        fit(
            model.encoders[severity],
            x_train,
            y_train,
            settings,
            w_pos,
            np.random.default_rng(derive_seed(seed, "stage2", severity.value)),
            f"stage2-{severity.value}",
            history,
            x[is_val],
            y[is_val],
        )
        pooled_probs.append(model.predict(severity, x_train, hp.batch_size))
        pooled_labels.append(y_train)

    tau, f1 = select_threshold(np.concatenate(pooled_probs), np.concatenate(pooled_labels))
    model.threshold = tau
    logger.info("Stage 2 threshold [%.4f], training F1 [%.4f]", tau, f1)
    return model, tau


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _f1(tp: int, fp: int, fn: int) -> float:
    denominator = 2 * tp + fp + fn
    return 2 * tp / denominator if denominator else 0.0


def _snapshot(network: Container):
    return {
        path: (
            {k: v.copy() for k, v in layer.params.items()},
            {k: v.copy() for k, v in layer.buffers.items()},
        )
        for path, layer in network.named_layers()
    }


def _restore(network: Container, snapshot):
    for path, layer in network.named_layers():
        params, buffers = snapshot[path]
        layer.params = {k: v.copy() for k, v in params.items()}
        layer.buffers = {k: v.copy() for k, v in buffers.items()}
