#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Which rhythms the detector gets wrong.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from collections import Counter
from typing import Dict, Sequence

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import LengthMismatch, NoAflWindows
from rrburden.models.recording import BeatLabel

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

FP_RHYTHMS = {
    BeatLabel.OTHER: "Other",
    BeatLabel.AT: "AT",
    BeatLabel.SVT_OTHER: "SVTOther",
}
MIXED = "Mixed"
""" Non-AF_l window holding some AF_l beats. Takes precedence over its rhythm. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def afl_miss_rate(categories: Sequence[int], y_hat: Sequence[int]) -> float:
    """Share of AFL-majority windows predicted non-AF_l.

    Raises:
        NoAflWindows: no window has AFL as its majority rhythm
    """
    categories, y_hat = _arrays(categories, y_hat)
    afl = categories == BeatLabel.AFL.value
    if not afl.any():
        raise NoAflWindows("No window has AFL as its majority rhythm")
    return float(np.mean(y_hat[afl] == 0))


def fp_rhythm_breakdown(
    categories: Sequence[int],
    mixed: Sequence[bool],
    y: Sequence[int],
    y_hat: Sequence[int],
) -> Dict[str, float]:
    """Share of false positive windows per true rhythm. Shares are NaN when
    there is no false positive."""
    categories, y = _arrays(categories, y)
    mixed, y_hat = _arrays(np.asarray(mixed, dtype=bool), y_hat)
    fp = (y == 0) & (y_hat == 1)
    n_fp = int(fp.sum())
    # a non-AF_l window whose top rhythm is AF or AFL is always mixed
    counts = Counter(
        MIXED if is_mixed else FP_RHYTHMS.get(BeatLabel(int(c)), MIXED)
        for c, is_mixed in zip(categories[fp], mixed[fp])
    )
    return {
        name: counts[name] / n_fp if n_fp else math.nan
        for name in [*FP_RHYTHMS.values(), MIXED]
    }


def afl_share_of_false_negatives(
    categories: Sequence[int], y: Sequence[int], y_hat: Sequence[int]
) -> float:
    """Share of false negative windows whose majority rhythm is AFL. NaN when
    there is no false negative."""
    categories, y = _arrays(categories, y)
    _, y_hat = _arrays(categories, y_hat)
    fn = (y == 1) & (y_hat == 0)
    if not fn.any():
        return math.nan
    return float(np.mean(categories[fn] == BeatLabel.AFL.value))


def afl_prevalence(categories: Sequence[int], y: Sequence[int]) -> float:
    """Share of AF_l windows whose majority rhythm is AFL. NaN without AF_l windows."""
    categories, y = _arrays(categories, y)
    positive = y == 1
    if not positive.any():
        return math.nan
    return float(np.mean(categories[positive] == BeatLabel.AFL.value))


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _arrays(a, b):
    a, b = np.asarray(a), np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise LengthMismatch(f"Got [{a.size}] windows but [{b.size}] labels")
    return a, b
