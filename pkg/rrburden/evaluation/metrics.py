#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Window and patient level performance measures.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

# vendor libraries
import numpy as np
from dataclasses_json import dataclass_json
from scipy.stats import rankdata

# local libraries
from rrburden.exceptions import EmptyInput, LengthMismatch, SingleClassDataset

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass_json
@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.tn + other.tn,
            self.fn + other.fn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_labels(cls, y: Sequence[int], y_hat: Sequence[int]) -> "ConfusionCounts":
        y = np.asarray(y, dtype=bool)
        y_hat = np.asarray(y_hat, dtype=bool)
        if y.shape != y_hat.shape:
            raise LengthMismatch(
                f"Reference has [{y.size}] labels but prediction has [{y_hat.size}]"
            )
        return cls(
            tp=int(np.sum(y & y_hat)),
            fp=int(np.sum(~y & y_hat)),
            tn=int(np.sum(~y & ~y_hat)),
            fn=int(np.sum(y & ~y_hat)),
        )


@dataclass_json
@dataclass(frozen=True)
class MetricSet:
    """Se, Sp, PPV, NPV and F1. A metric whose denominator is zero is NaN and
    named in `undefined`."""

    se: float
    sp: float
    ppv: float
    npv: float
    f1: float
    undefined: Tuple[str, ...] = ()


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def metrics(counts: ConfusionCounts) -> MetricSet:
    """Computes the standard detection measures from confusion counts.

    F1 is 2tp / (2tp + fp + fn), which equals the harmonic mean of Se and PPV
    and is 0 when tp is 0 but some window was misclassified.
    """
    undefined = set()

    def ratio(name: str, numerator: int, denominator: int) -> float:
        if denominator == 0:
            undefined.add(name)
            return math.nan
        return numerator / denominator

    c = counts
    se = ratio("se", c.tp, c.tp + c.fn)
    sp = ratio("sp", c.tn, c.tn + c.fp)
    ppv = ratio("ppv", c.tp, c.tp + c.fp)
    npv = ratio("npv", c.tn, c.tn + c.fn)
    f1 = ratio("f1", 2 * c.tp, 2 * c.tp + c.fp + c.fn)
    return MetricSet(se, sp, ppv, npv, f1, tuple(sorted(undefined)))


def auroc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve as the Mann-Whitney statistic,
    P(score+ > score-) + P(tie) / 2, from average ranks.

    Raises:
        LengthMismatch: scores and labels differ in length
        SingleClassDataset: only one class is present
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"Got [{scores.size}] scores but [{labels.size}] labels")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassDataset(
            f"AUROC needs both classes, got [{n_pos}] positives and [{n_neg}] negatives"
        )
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def eaf_stats(values: Sequence[float]) -> Tuple[float, float, float]:
    """Median, first and third quartile, by linear interpolation between order
    statistics.

    Raises:
        EmptyInput: no values
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("Cannot summarise an empty list of burden errors")
    q1, median, q3 = np.percentile(values, [25, 50, 75], method="linear")
    return float(median), float(q1), float(q3)
