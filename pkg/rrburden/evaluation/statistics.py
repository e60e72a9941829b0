#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Significance tests used to compare two models.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from typing import Sequence, Tuple

# vendor libraries
import numpy as np
from scipy.stats import norm, t

# local libraries
from rrburden.exceptions import DegenerateProportions, EmptyInput, LengthMismatch

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def prop_ztest(k1: int, n1: int, k2: int, n2: int) -> Tuple[float, float]:
    """Pooled two-proportion z-test.

    Args:
        k1 (int): successes in the first sample
        n1 (int): size of the first sample
        k2 (int): successes in the second sample
        n2 (int): size of the second sample

    Raises:
        EmptyInput: a sample is empty or a count lies outside [0, n]
        DegenerateProportions: the pooled proportion is 0 or 1

    Returns:
        Tuple[float, float]: z and its two-sided p-value
    """
    if n1 < 1 or n2 < 1 or not 0 <= k1 <= n1 or not 0 <= k2 <= n2:
        raise EmptyInput(
            f"Invalid proportions [{k1}/{n1}] and [{k2}/{n2}]"
        )
    pooled = (k1 + k2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        raise DegenerateProportions(
            f"Pooled proportion of [{k1}/{n1}] and [{k2}/{n2}] is [{pooled}]"
        )
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    z = (k1 / n1 - k2 / n2) / se
    return float(z), float(2.0 * norm.sf(abs(z)))


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """Paired Student t-test on a - b with n - 1 degrees of freedom.

    Zero variance, up to `np.isclose`, follows fixed conventions: all
    differences zero gives t = 0, p = 1; identical non-zero differences give
    t = ±inf, p = 0.

    Raises:
        LengthMismatch: a and b differ in length
        EmptyInput: fewer than two pairs

    Returns:
        Tuple[float, float]: t and its two-sided p-value
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"Got [{a.size}] and [{b.size}] paired values")
    if a.size < 2:
        raise EmptyInput(f"A paired t-test needs at least two pairs, got [{a.size}]")
    d = a - b
    n = d.size
    mean = d.mean()
    sd = d.std(ddof=1)
    if np.isclose(sd, 0.0):
        if np.isclose(mean, 0.0):
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    statistic = mean / (sd / math.sqrt(n))
    return float(statistic), float(2.0 * t.sf(abs(statistic), df=n - 1))
