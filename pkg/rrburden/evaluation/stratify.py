#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Disjoint subgroups of a cohort by origin, sex, age band or severity.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from enum import Enum, unique
from typing import Dict, List, Sequence

# local libraries
from rrburden.evaluation.cohort import EvaluatedRecording
from rrburden.exceptions import MissingMetadata
from rrburden.models.recording import MIN_AGE, Sex, SeverityClass

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

AGE_BANDS = (("≤60", 60), ("60 to 75", 75), (">75", None))
""" (name, inclusive upper age). A boundary age belongs to the younger band. """

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@unique
class GroupKey(str, Enum):
    ORIGIN = "origin"
    SEX = "sex"
    AGE_BAND = "age_band"
    SEVERITY = "severity"


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def age_band(age: int) -> str:
    if age is None:
        raise MissingMetadata("Age is missing")
    if age < MIN_AGE:
        raise MissingMetadata(f"Age [{age}] is below [{MIN_AGE}]")
    for name, upper in AGE_BANDS:
        if upper is None or age <= upper:
            return name


def stratify(
    cohort: Sequence[EvaluatedRecording], key: GroupKey
) -> Dict[str, List[EvaluatedRecording]]:
    """Partitions a cohort. Groups come in a fixed order (age bands youngest
    first, sexes F then M, severities NonAF to Severe, origins sorted) and
    empty groups are omitted.

    Args:
        cohort (Sequence[EvaluatedRecording]): the recordings
        key (GroupKey): the stratification

    Raises:
        MissingMetadata: a recording lacks the metadata the key needs

    Returns:
        Dict[str, List[EvaluatedRecording]]: group name to members
    """
    key = GroupKey(key)
    groups: Dict[str, List[EvaluatedRecording]] = {}
    for recording in cohort:
        groups.setdefault(_group_of(recording, key), []).append(recording)
    return {name: groups[name] for name in _order(key, groups)}


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _group_of(recording: EvaluatedRecording, key: GroupKey) -> str:
    if key == GroupKey.AGE_BAND:
        return age_band(recording.age)
    if key == GroupKey.SEVERITY:
        return recording.severity.value
    value = getattr(recording, key.value)
    if not value:
        raise MissingMetadata(f"Recording [{recording.recording_id}] has no [{key.value}]")
    return str(value)


def _order(key: GroupKey, groups: Dict[str, list]) -> List[str]:
    if key == GroupKey.AGE_BAND:
        fixed = [name for name, _ in AGE_BANDS]
    elif key == GroupKey.SEX:
        fixed = [x.value for x in Sex]
    elif key == GroupKey.SEVERITY:
        fixed = [x.value for x in SeverityClass]
    else:
        fixed = sorted(groups)
    return [name for name in fixed if name in groups]
