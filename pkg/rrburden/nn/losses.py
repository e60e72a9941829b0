#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Loss functions.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Tuple

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import LengthMismatch

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

PROBABILITY_CLAMP = 1e-7
""" Probabilities are clamped to [clamp, 1 - clamp] before taking logs. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def weighted_bce(
    p: np.ndarray, y: np.ndarray, w_pos: float = 1.0
) -> Tuple[float, np.ndarray]:
    """Weighted binary cross-entropy, positives weighted by `w_pos`.

        loss = -mean(w_pos * y * log p + (1 - y) * log(1 - p))

    Args:
        p (np.ndarray): predicted probabilities
        y (np.ndarray): binary labels, same shape as `p`
        w_pos (float): weight of the positive (AF_l) class

    Raises:
        LengthMismatch: `p` and `y` differ in shape

    Returns:
        Tuple[float, np.ndarray]: the loss and its gradient with respect to `p`
    """
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if p.shape != y.shape:
        raise LengthMismatch(
            f"Got [{p.size}] probabilities but [{y.size}] labels ({p.shape} vs {y.shape})"
        )
    n = p.size
    p = np.clip(p, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    loss = -np.mean(w_pos * y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    grad = -(w_pos * y / p - (1.0 - y) / (1.0 - p)) / n
    return float(loss), grad
