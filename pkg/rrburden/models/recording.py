#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Domain records: beat labels, recordings, windows and severity classes.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass, field
from enum import Enum, IntEnum, unique
from typing import Optional, Sequence

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import InvalidLabel, InvalidRecording

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

MIN_AGE = 18
""" Minors are excluded from every cohort. """

MAX_RR_MS = 10000
""" Exclusive upper bound on a single RR interval. """

# ------------------------------------------------------------------------------
# ENUMS
# ------------------------------------------------------------------------------


@unique
class BeatLabel(IntEnum):
    """Five-way rhythm annotation of a beat. The codes are the on-disk values
    and must never change."""

    OTHER = 0
    AF = 1
    AFL = 2
    AT = 3
    SVT_OTHER = 4

    @classmethod
    def parse(cls, code: int) -> "BeatLabel":
        try:
            return cls(int(code))
        except (ValueError, TypeError) as ex:
            raise InvalidLabel(
                f"Invalid beat label code [{code}]. Must be one of {[x.value for x in cls]}."
            ) from ex


AF_L_LABELS = frozenset({BeatLabel.AF, BeatLabel.AFL})
""" Categories grouped under the binary AF_l target. """


@unique
class Sex(str, Enum):
    F = "F"
    M = "M"


@unique
class SeverityClass(str, Enum):
    """AF burden strata. Declaration order is the stage-2 routing order."""

    NON_AF = "NonAF"
    MILD = "Mild"
    MODERATE = "Moderate"
    SEVERE = "Severe"

    @property
    def index(self) -> int:
        return list(SeverityClass).index(self)


# ------------------------------------------------------------------------------
# RECORDS
# ------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Recording:
    """A patient's beat-by-beat RR series with per-beat annotations."""

    id: str
    """ Unique recording identifier. """

    rr: np.ndarray
    """ RR intervals in integer milliseconds. """

    labels: np.ndarray
    """ BeatLabel code per RR interval. """

    age: int
    """ Age in years, at least 18. """

    sex: Sex
    """ Patient sex. """

    origin: str = ""
    """ Free site/ethnic-group tag. """

    def __post_init__(self):
        rr = np.asarray(self.rr)
        labels = np.asarray(self.labels)
        if rr.ndim != 1 or labels.ndim != 1 or len(rr) != len(labels):
            raise InvalidRecording(
                f"Recording [{self.id}] has [{rr.size}] RR values but [{labels.size}] labels"
            )
        if rr.size and not np.all(np.equal(np.mod(rr, 1), 0)):
            raise InvalidRecording(
                f"Recording [{self.id}] RR values must be integer milliseconds"
            )
        rr = rr.astype(np.int64)
        if rr.size and (rr.min() <= 0 or rr.max() >= MAX_RR_MS):
            raise InvalidRecording(
                f"Recording [{self.id}] RR values must lie in (0, {MAX_RR_MS}) ms"
            )
        labels = labels.astype(np.int64)
        bad = set(np.unique(labels).tolist()) - {x.value for x in BeatLabel}
        if bad:
            raise InvalidLabel(
                f"Recording [{self.id}] contains invalid beat label codes [{sorted(bad)}]"
            )
        if self.age is None or self.age < MIN_AGE:
            raise InvalidRecording(
                f"Recording [{self.id}] age [{self.age}] is below [{MIN_AGE}]"
            )
        rr.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "rr", rr)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sex", Sex(self.sex))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return (
            self.id == other.id
            and self.age == other.age
            and self.sex == other.sex
            and self.origin == other.origin
            and np.array_equal(self.rr, other.rr)
            and np.array_equal(self.labels, other.labels)
        )

    def binary_labels(self) -> np.ndarray:
        """Per-beat AF_l indicator (AF and AFL → 1)."""
        return np.isin(self.labels, [x.value for x in AF_L_LABELS]).astype(np.int64)

    @property
    def duration_ms(self) -> int:
        return int(self.rr.sum())


@dataclass(eq=False)
class Window:
    """A fixed-size segment of a recording, the unit of classification."""

    recording_id: str
    index: int
    start_beat: int
    rr: np.ndarray
    """ Exactly w_s - 1 RR values, edge padded when the window is a remainder. """
    n_rr: int
    """ Number of true (unpadded) RR values. """
    duration_ms: int
    """ Sum of the true RR values. """
    ref_label: int
    category: BeatLabel
    """ Majority five-way rhythm of the true beats. """
    mixed: bool = False
    """ Non-AF_l window containing at least one AF_l beat. """
    pred_prob: Optional[float] = field(default=None)

    @property
    def padded(self) -> bool:
        return self.n_rr < len(self.rr)


def as_label_array(labels: Sequence[int]) -> np.ndarray:
    """Validates and converts a sequence of label codes to an int array."""
    array = np.asarray(labels, dtype=np.int64)
    bad = set(np.unique(array).tolist()) - {x.value for x in BeatLabel}
    if bad:
        raise InvalidLabel(f"Invalid beat label codes [{sorted(bad)}]")
    return array
