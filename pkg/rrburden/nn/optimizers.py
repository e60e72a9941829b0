#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Adam optimiser.

Parameter updates need exclusive access to the parameter set: a single writer
calls `adam_step` and installs the returned parameters.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass, field
from typing import Dict, Tuple

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import ShapeMismatch

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass
class AdamState:
    """Moment estimates and step counter of an Adam run."""

    lr: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def create(cls, params: Dict[str, np.ndarray], lr: float = 1e-2) -> "AdamState":
        return cls(
            lr=lr,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def adam_step(
    params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamState
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update.

    Parameters without a gradient entry are left unchanged.

    Args:
        params (Dict[str, np.ndarray]): current parameters by name
        grads (Dict[str, np.ndarray]): gradients by name
        state (AdamState): optimiser state

    Raises:
        ShapeMismatch: a gradient or moment shape differs from its parameter

    Returns:
        Tuple[Dict[str, np.ndarray], AdamState]: new parameters and new state
    """
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    new_params, new_m, new_v = {}, dict(state.m), dict(state.v)
    for name, param in params.items():
        grad = grads.get(name)
        if grad is None:
            new_params[name] = param
            continue
        m = state.m.get(name, np.zeros_like(param))
        v = state.v.get(name, np.zeros_like(param))
        if grad.shape != param.shape or m.shape != param.shape:
            raise ShapeMismatch(
                f"Parameter [{name}] has shape [{param.shape}] but gradient [{grad.shape}] / moment [{m.shape}]"
            )
        m = b1 * m + (1.0 - b1) * grad
        v = b2 * v + (1.0 - b2) * grad**2
        m_hat = m / (1.0 - b1**step)
        v_hat = v / (1.0 - b2**step)
        new_params[name] = param - state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
        new_m[name], new_v[name] = m, v

    new_state = AdamState(
        lr=state.lr,
        beta1=b1,
        beta2=b2,
        epsilon=state.epsilon,
        step=step,
        m=new_m,
        v=new_v,
    )
    return new_params, new_state
