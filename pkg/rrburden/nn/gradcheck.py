#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Central finite-difference gradient checks.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Callable, Dict

# vendor libraries
import numpy as np

# local libraries
from rrburden.nn.layers import Layer, Mode
from rrburden.nn.network import Container

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

FD_EPSILON = 1e-5
""" Step used for central differences. """

ABSOLUTE_FLOOR = 1e-7
""" Largest elementwise gap still read as rounding noise. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """‖a − n‖ / max(‖a‖ + ‖n‖, 1e-12), or the largest elementwise gap when
    that gap is under `ABSOLUTE_FLOOR` and smaller.

    A gradient that is exactly zero, such as the bias of a convolution feeding
    a train-mode BatchNorm, otherwise scores close to 1 against
    central-difference noise of about 1e-10.
    """
    gap = np.abs(np.asarray(analytic) - np.asarray(numeric))
    denominator = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    relative = float(np.linalg.norm(gap) / denominator)
    largest_gap = float(gap.max()) if gap.size else 0.0
    return min(relative, largest_gap) if largest_gap < ABSOLUTE_FLOOR else relative


def numerical_gradient(
    fn: Callable[[], float], array: np.ndarray, eps: float = FD_EPSILON
) -> np.ndarray:
    """Central differences of a scalar function with respect to `array`, which is
    perturbed in place and restored afterwards."""
    grad = np.zeros_like(array)
    for idx in np.ndindex(array.shape):
        original = array[idx]
        array[idx] = original + eps
        plus = fn()
        array[idx] = original - eps
        minus = fn()
        array[idx] = original
        grad[idx] = (plus - minus) / (2 * eps)
    return grad


def gradient_check(
    layer: Layer,
    x: np.ndarray,
    mode: Mode = Mode.TRAIN,
    seed: int = 0,
    eps: float = FD_EPSILON,
) -> Dict[str, float]:
    """Compares a layer's analytic gradients with central differences.

    The scalar objective is sum(output * R) for a fixed random R. Every forward
    call reuses `seed`, so dropout masks are identical across perturbations.

    Returns:
        Dict[str, float]: relative error for `input` and each parameter
    """
    x = np.array(x, dtype=np.float64)
    out, cache = layer.forward(x, mode, np.random.default_rng(seed))
    weights = np.random.default_rng(seed + 1).standard_normal(out.shape)
    grad_in, grads = layer.backward(cache, weights)

    def objective() -> float:
        y, _ = layer.forward(x, mode, np.random.default_rng(seed))
        return float(np.sum(y * weights))

    errors = {"input": relative_error(grad_in, numerical_gradient(objective, x, eps))}
    params = layer.parameters() if isinstance(layer, Container) else layer.params
    for name, array in params.items():
        errors[name] = relative_error(
            grads[name], numerical_gradient(objective, array, eps)
        )
    return errors
