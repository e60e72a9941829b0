#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Stage 1: residual 1D CNN that classifies single RR windows and exposes the
per-window embedding consumed by stage 2.

Layer stack for n_b blocks:

    block0 ... block{n_b-1}      residual blocks, filters n_f * 2^(i // 2)
    pool{k}, drop{k}             MaxPool(2) and Dropout(d_r1) after every second block
    flatten
    dense0 relu0 dense_drop0     n_hu units
    dense1 relu1 dense_drop1     n_hu / 2 units
    dense2 relu2                 n_hu / 4 units, the embedding
    dense_drop2 output sigmoid   one probability
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Optional, Sequence, Tuple

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import ShapeMismatch
from rrburden.logger import logger
from rrburden.models.hyperparams import Hyperparams
from rrburden.nn.layers import (
    Dense,
    Dropout,
    Flatten,
    MaxPool,
    Mode,
    ReLU,
    Sigmoid,
    Tensor,
)
from rrburden.nn.network import Container, ResidualBlock, Sequential
from rrburden.rr_core import normalize_rr

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class Stage1Model(Container):
    """Window classifier split into a trunk, whose output is the embedding, and
    a head mapping the embedding to a probability."""

    def __init__(self, hp: Hyperparams):
        super().__init__()
        hp.check_structure()
        self.hp = hp
        self.threshold: float = 0.5
        """ Decision threshold τ₁, replaced by training. """
        self.w_pos: Optional[float] = None
        """ Positive class weight used in training. """

        self.trunk = Sequential()
        channels, length = 1, hp.n_rr
        for i, filters in enumerate(hp.block_filters()):
            self.trunk.add(f"block{i}", ResidualBlock(channels, filters, hp.f_l))
            channels = filters
            if i % 2 == 1:
                self.trunk.add(f"pool{i // 2}", MaxPool(2))
                self.trunk.add(f"drop{i // 2}", Dropout(hp.d_r1))
                length //= 2
        self.trunk.add("flatten", Flatten())

        features = length * channels
        widths = [hp.n_hu, hp.n_hu // 2, hp.n_hu // 4]
        for j, width in enumerate(widths):
            self.trunk.add(f"dense{j}", Dense(features, width))
            self.trunk.add(f"relu{j}", ReLU())
            if j < len(widths) - 1:
                self.trunk.add(f"dense_drop{j}", Dropout(hp.d_r2))
            features = width

        self.head = Sequential(
            [
                (f"dense_drop{len(widths) - 1}", Dropout(hp.d_r2)),
                ("output", Dense(features, 1)),
                ("sigmoid", Sigmoid()),
            ]
        )

    def children(self):
        return [("trunk", self.trunk), ("head", self.head)]

    @property
    def embedding_width(self) -> int:
        return self.hp.embedding_width

    def embed(self, x: Tensor, mode=Mode.INFER, rng=None):
        """Runs the model, returning probabilities (batch, 1), embeddings
        (batch, n_hu / 4) and the cache for backward."""
        if x.ndim != 3 or x.shape[1:] != (self.hp.n_rr, 1):
            raise ShapeMismatch(
                f"Stage 1 expects (batch, {self.hp.n_rr}, 1) input, got [{x.shape}]"
            )
        embedding, trunk_cache = self.trunk.forward(x, mode, rng)
        prob, head_cache = self.head.forward(embedding, mode, rng)
        return prob, embedding, {"trunk": trunk_cache, "head": head_cache}

    def forward(self, x, mode=Mode.INFER, rng=None):
        prob, _, cache = self.embed(x, mode, rng)
        return prob, cache

    def backward(self, cache, grad_out):
        d_embedding, head_grads = self.head.backward(cache["head"], grad_out)
        d_x, trunk_grads = self.trunk.backward(cache["trunk"], d_embedding)
        grads = {f"trunk.{k}": v for k, v in trunk_grads.items()}
        grads.update({f"head.{k}": v for k, v in head_grads.items()})
        return d_x, grads

    def shapes(self) -> Sequence[Tuple[str, Tuple[int, ...]]]:
        """Output shape of every trunk layer for a single window."""
        x = np.zeros((1, self.hp.n_rr, 1))
        shapes = []
        for name, layer in self.trunk.layers:
            x, _ = layer.forward(x, Mode.INFER)
            shapes.append((name, x.shape[1:]))
        return shapes


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def build_stage1(hp: Hyperparams, seed: int) -> Stage1Model:
    """Builds a stage-1 model with freshly initialised parameters.

    Args:
        hp (Hyperparams): the architecture
        seed (int): initialisation seed

    Raises:
        InvalidHyperparam: the hyperparameters cannot build a network

    Returns:
        Stage1Model: the model
    """
    model = Stage1Model(hp)
    model.initialise(np.random.default_rng(seed))
    logger.debug(
        "Built stage 1 with [%d] blocks and [%d] parameters",
        hp.n_b,
        model.parameter_count(),
    )
    return model


def as_model_input(rr: np.ndarray) -> Tensor:
    """Normalises raw RR windows (batch, n_rr) in ms into stage-1 input
    (batch, n_rr, 1)."""
    rr = np.asarray(rr, dtype=np.float64)
    if rr.ndim == 1:
        rr = rr[None, :]
    return normalize_rr(rr)[:, :, None]


def stage1_predict(
    model: Stage1Model, rr: np.ndarray, batch_size: int = 1024
) -> Tuple[np.ndarray, np.ndarray]:
    """Batched inference over raw RR windows.

    Args:
        model (Stage1Model): the model
        rr (np.ndarray): raw windows (N, n_rr) in ms
        batch_size (int): windows per forward pass

    Returns:
        Tuple[np.ndarray, np.ndarray]: probabilities (N,) and embeddings (N, n_hu / 4)
    """
    x = as_model_input(rr)
    probs, embeddings = [], []
    for start in range(0, len(x), batch_size):
        prob, embedding, _ = model.embed(x[start : start + batch_size], Mode.INFER)
        probs.append(prob[:, 0])
        embeddings.append(embedding)
    return np.concatenate(probs), np.concatenate(embeddings)


def stage1_infer(model: Stage1Model, window_rr: np.ndarray) -> Tuple[float, np.ndarray]:
    """Classifies one window of raw RR values (ms).

    Raises:
        ShapeMismatch: the window does not hold w_s - 1 values

    Returns:
        Tuple[float, np.ndarray]: the AF_l probability and the embedding
    """
    window_rr = np.asarray(window_rr, dtype=np.float64)
    if window_rr.shape != (model.hp.n_rr,):
        raise ShapeMismatch(
            f"Window holds [{window_rr.shape}] values, expected [{model.hp.n_rr}]"
        )
    probs, embeddings = stage1_predict(model, window_rr[None, :])
    return float(probs[0]), embeddings[0]

