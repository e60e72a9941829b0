#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Model hyperparameters and the space they are searched over.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from dataclasses import dataclass
from enum import Enum, unique
from typing import Any, Dict, List, Tuple

# vendor libraries
import numpy as np
from pydantic import BaseModel, ConfigDict

# local libraries
from rrburden.exceptions import EmptySpace, InvalidHyperparam

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class Hyperparams(BaseModel):
    """Architecture and optimisation settings of both model stages."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    w_s: int = 60
    """ Window size in beats. A window holds w_s - 1 RR intervals. """

    n_b: int = 5
    """ Number of residual blocks. """

    n_f: int = 64
    """ Filters in the first residual block. Doubles every two blocks. """

    f_l: int = 10
    """ Convolution filter length. """

    d_r1: float = 0.2
    """ Dropout rate applied after every pair of residual blocks. """

    n_hu: int = 512
    """ Width of the first dense layer. The next two are n_hu/2 and n_hu/4. """

    d_r2: float = 0.5
    """ Dropout rate after each dense layer. """

    alpha: float = 1e-2
    """ Adam learning rate. """

    h: int = 9
    """ Preceding windows fed to the stage-2 GRU alongside the current one. """

    gru_hidden: int = 64
    batch_size: int = 256
    max_epochs: int = 50

    @property
    def n_rr(self) -> int:
        """RR intervals per window."""
        return self.w_s - 1

    @property
    def embedding_width(self) -> int:
        return self.n_hu // 4

    def block_filters(self) -> List[int]:
        """Filter count of each residual block: n_f doubled every two blocks."""
        return [self.n_f * 2 ** (i // 2) for i in range(self.n_b)]

    def pooled_lengths(self) -> List[int]:
        """Temporal length after each MaxPool, which follows every second block."""
        lengths = []
        length = self.n_rr
        for _ in range(self.n_b // 2):
            length //= 2
            lengths.append(length)
        return lengths

    def check_structure(self):
        """Checks constraints without which the network cannot be built.

        Raises:
            InvalidHyperparam: a constraint is violated
        """
        if self.w_s < 4:
            raise InvalidHyperparam(f"Window size [w_s={self.w_s}] must be at least 4")
        for name in ("n_b", "n_f", "f_l", "gru_hidden", "batch_size", "max_epochs"):
            if getattr(self, name) < 1:
                raise InvalidHyperparam(
                    f"Hyperparameter [{name}={getattr(self, name)}] must be at least 1"
                )
        if self.h < 0:
            raise InvalidHyperparam(f"History length [h={self.h}] must not be negative")
        if self.n_hu < 4 or self.n_hu % 4:
            raise InvalidHyperparam(
                f"Dense width [n_hu={self.n_hu}] must be a positive multiple of 4"
            )
        for name in ("d_r1", "d_r2"):
            if not 0 <= getattr(self, name) < 1:
                raise InvalidHyperparam(
                    f"Dropout rate [{name}={getattr(self, name)}] must lie in [0, 1)"
                )
        if not self.alpha > 0:
            raise InvalidHyperparam(f"Learning rate [alpha={self.alpha}] must be positive")
        if any(length < 1 for length in self.pooled_lengths()):
            raise InvalidHyperparam(
                f"[{self.n_b}] blocks pool a [{self.n_rr}] RR window down to nothing"
            )


@unique
class PriorKind(str, Enum):
    CATEGORICAL = "categorical"
    INT_UNIFORM = "int_uniform"
    INT_LOG_UNIFORM = "int_log_uniform"
    UNIFORM = "uniform"
    LOG_UNIFORM = "log_uniform"


@dataclass(frozen=True)
class Prior:
    """Sampling distribution of one hyperparameter."""

    kind: PriorKind
    low: float = 0.0
    high: float = 0.0
    choices: Tuple[Any, ...] = ()
    multiple_of: int = 1
    """ Integer draws are rounded to a multiple of this. """

    def is_empty(self) -> bool:
        if self.kind == PriorKind.CATEGORICAL:
            return not self.choices
        if self.kind in (PriorKind.INT_LOG_UNIFORM, PriorKind.LOG_UNIFORM) and self.low <= 0:
            return True
        return self.low > self.high

    def contains(self, value) -> bool:
        if self.kind == PriorKind.CATEGORICAL:
            return value in self.choices
        return self.low <= value <= self.high

    def sample(self, rng: np.random.Generator):
        if self.kind == PriorKind.CATEGORICAL:
            return self.choices[int(rng.integers(len(self.choices)))]
        if self.kind == PriorKind.UNIFORM:
            return float(rng.uniform(self.low, self.high))
        if self.kind == PriorKind.LOG_UNIFORM:
            return float(math.exp(rng.uniform(math.log(self.low), math.log(self.high))))
        if self.kind == PriorKind.INT_UNIFORM:
            value = float(rng.uniform(self.low - 0.5, self.high + 0.5))
        else:
            value = math.exp(rng.uniform(math.log(self.low), math.log(self.high)))
        step = self.multiple_of
        value = int(round(value / step)) * step
        low = int(math.ceil(self.low / step)) * step
        high = int(math.floor(self.high / step)) * step
        return int(min(max(value, low), high))


@dataclass(frozen=True)
class SearchSpace:
    """Priors keyed by Hyperparams field. Fields without a prior keep their
    defaults when sampling."""

    priors: Dict[str, Prior]

    def check(self):
        """
        Raises:
            EmptySpace: there are no priors or one of them admits no value
        """
        if not self.priors:
            raise EmptySpace("Search space defines no priors")
        for name, prior in self.priors.items():
            if name not in Hyperparams.model_fields:
                raise EmptySpace(f"Search space names unknown hyperparameter [{name}]")
            if prior.is_empty():
                raise EmptySpace(f"Prior for [{name}] admits no value")

    def violations(self, hp: Hyperparams) -> List[str]:
        """Names and values of hyperparameters lying outside their prior."""
        return [
            f"{name}={getattr(hp, name)}"
            for name, prior in self.priors.items()
            if not prior.contains(getattr(hp, name))
        ]

    def sample(self, rng: np.random.Generator, base: Hyperparams = None) -> Hyperparams:
        base = base or Hyperparams()
        values = {name: prior.sample(rng) for name, prior in self.priors.items()}
        return base.model_copy(update=values)


# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

DEFAULT_SEARCH_SPACE = SearchSpace(
    priors={
        "w_s": Prior(PriorKind.CATEGORICAL, choices=tuple(range(60, 121, 10))),
        "n_b": Prior(PriorKind.INT_UNIFORM, 3, 7),
        "n_f": Prior(PriorKind.INT_LOG_UNIFORM, 2**5, 2**7),
        "f_l": Prior(PriorKind.INT_UNIFORM, 3, 10),
        "d_r1": Prior(PriorKind.UNIFORM, 0.0, 0.5),
        "n_hu": Prior(PriorKind.INT_LOG_UNIFORM, 2**6, 2**9, multiple_of=4),
        "d_r2": Prior(PriorKind.UNIFORM, 0.0, 0.8),
        "alpha": Prior(PriorKind.LOG_UNIFORM, 1e-5, 1e-2),
    }
)
""" Ranges the stage-1 hyperparameters are searched over and validated against. """

