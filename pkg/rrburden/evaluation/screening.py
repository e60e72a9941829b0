#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Patient level screening: a recording is AF positive when its estimated burden
reaches a threshold.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Dict, Optional, Sequence, Tuple

# local libraries
from rrburden.evaluation.metrics import ConfusionCounts, MetricSet, eaf_stats, metrics
from rrburden.exceptions import EmptyCohort

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

PATIENT_AFB_THRESHOLD = 2.0
""" Burden, in percent, from which a patient is screened positive. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def patient_diagnosis(estimated_afb: float, threshold: float = PATIENT_AFB_THRESHOLD) -> int:
    """1 when the estimated burden is at or above the threshold."""
    return int(estimated_afb >= threshold)


def intended_use_report(
    cohort: Sequence, threshold: float = PATIENT_AFB_THRESHOLD
) -> Dict[str, Tuple[ConfusionCounts, MetricSet]]:
    """Patient level counts and measures, overall and per sex.

    Args:
        cohort (Sequence): recordings with `estimated_afb`, `reference_diagnosis` and `sex`
        threshold (float): screening threshold in percent

    Raises:
        EmptyCohort: no recordings

    Returns:
        Dict[str, Tuple[ConfusionCounts, MetricSet]]: keyed `overall`, then each sex present
    """
    if not cohort:
        raise EmptyCohort("Cannot screen an empty cohort")
    groups = {"overall": list(cohort)}
    for sex in sorted({r.sex for r in cohort}):
        groups[sex] = [r for r in cohort if r.sex == sex]

    report = {}
    for name, members in groups.items():
        counts = ConfusionCounts.from_labels(
            [r.reference_diagnosis for r in members],
            [patient_diagnosis(r.estimated_afb, threshold) for r in members],
        )
        report[name] = (counts, metrics(counts))
    return report


def missed_patient_af_seconds(
    cohort: Sequence, threshold: float = PATIENT_AFB_THRESHOLD
) -> Optional[Tuple[float, float, float]]:
    """Median, Q1 and Q3 of the true AF_l seconds of reference positive
    patients screened negative. None when no patient was missed."""
    missed = [
        r.true_af_seconds
        for r in cohort
        if r.reference_diagnosis and not patient_diagnosis(r.estimated_afb, threshold)
    ]
    return eaf_stats(missed) if missed else None
