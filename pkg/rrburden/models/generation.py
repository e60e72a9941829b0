#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Settings of the synthetic Holter generator.

Every default here is a textbook-physiology choice, exposed so that a run can
record exactly which rhythm models produced its data.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from enum import Enum, unique
from typing import Annotated, Any, List

# vendor libraries
from pydantic import BaseModel, ConfigDict, Field, model_validator

# local libraries
from rrburden.exceptions import InvalidParams
from rrburden.models.recording import BeatLabel

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

MIN_AF_CV = 0.2
""" AF must be at least this irregular. """

MAX_AFL_JITTER_RATIO = 0.02
""" AFL jitter standard deviation relative to its RR, at most. """

Percent = Annotated[float, Field(ge=0.0, le=100.0)]

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@unique
class Rhythm(str, Enum):
    """Rhythms the generator can emit, with the beat label each carries."""

    NSR = "NSR"
    AF = "AF"
    AFL = "AFL"
    AT = "AT"

    @property
    def label(self) -> BeatLabel:
        return {
            Rhythm.NSR: BeatLabel.OTHER,
            Rhythm.AF: BeatLabel.AF,
            Rhythm.AFL: BeatLabel.AFL,
            Rhythm.AT: BeatLabel.AT,
        }[self]


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NsrParams(_Params):
    """Sinus rhythm: Gaussian variability plus respiratory sine modulation."""

    mean_rr: float = 850.0
    sdnn: float = 40.0
    resp_amplitude: float = 30.0
    resp_period: float = 4.0
    """ Period of the respiratory modulation, in beats. """


class AfParams(_Params):
    """Atrial fibrillation: serially uncorrelated, irregular RR."""

    mean_rr: float = 600.0
    cv: float = 0.24


class AflParams(_Params):
    """Atrial flutter with fixed 2:1 conduction: fast and nearly constant RR."""

    rr: float = 400.0
    jitter_sd: float = 4.0


class AtParams(_Params):
    """Atrial tachycardia: fast and regular."""

    mean_rr: float = 450.0
    sdnn: float = 15.0


class RhythmParams(_Params):
    nsr: NsrParams = NsrParams()
    af: AfParams = AfParams()
    afl: AflParams = AflParams()
    at: AtParams = AtParams()

    def check(self, rhythm: Rhythm = None):
        """Validates the model of one rhythm, or of all of them.

        Raises:
            InvalidParams: a mean is not positive, a spread is negative, AF is
                too regular or AFL too irregular
        """
        rhythms = [rhythm] if rhythm else list(Rhythm)
        for r in rhythms:
            if r == Rhythm.NSR:
                _positive("nsr.mean_rr", self.nsr.mean_rr)
                _non_negative("nsr.sdnn", self.nsr.sdnn)
                _non_negative("nsr.resp_amplitude", self.nsr.resp_amplitude)
                _positive("nsr.resp_period", self.nsr.resp_period)
            elif r == Rhythm.AF:
                _positive("af.mean_rr", self.af.mean_rr)
                if self.af.cv < MIN_AF_CV:
                    raise InvalidParams(
                        f"AF coefficient of variation [{self.af.cv}] must be at least [{MIN_AF_CV}]"
                    )
            elif r == Rhythm.AFL:
                _positive("afl.rr", self.afl.rr)
                _non_negative("afl.jitter_sd", self.afl.jitter_sd)
                if self.afl.jitter_sd / self.afl.rr > MAX_AFL_JITTER_RATIO:
                    raise InvalidParams(
                        f"AFL jitter [{self.afl.jitter_sd}] exceeds [{MAX_AFL_JITTER_RATIO}] of its RR [{self.afl.rr}]"
                    )
            else:
                _positive("at.mean_rr", self.at.mean_rr)
                _non_negative("at.sdnn", self.at.sdnn)

    def at_rate(self, factor: float) -> "RhythmParams":
        """Copy with every NSR, AF and AT interval scale multiplied by `factor`.

        Coefficients of variation are unchanged. AFL is left alone: its RR is
        set by the flutter cycle and the conduction ratio.
        """
        return self.model_copy(
            update={
                "nsr": self.nsr.model_copy(
                    update={
                        "mean_rr": self.nsr.mean_rr * factor,
                        "sdnn": self.nsr.sdnn * factor,
                        "resp_amplitude": self.nsr.resp_amplitude * factor,
                    }
                ),
                "af": self.af.model_copy(update={"mean_rr": self.af.mean_rr * factor}),
                "at": self.at.model_copy(
                    update={
                        "mean_rr": self.at.mean_rr * factor,
                        "sdnn": self.at.sdnn * factor,
                    }
                ),
            }
        )


class GenConfig(BaseModel):
    """Settings for generating a synthetic cohort."""

    model_config = ConfigDict(extra="forbid")

    n_recordings: int = Field(default=10, ge=1)

    duration_hours: float = Field(default=2.0, ge=10 / 60)
    """ Length of each recording. At least 10 minutes. """

    target_afbs: List[Percent] = Field(default=[0.0], min_length=1)
    """ AF_l burden targets, assigned to recordings round-robin. """

    afl_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    """ Probability that an arrhythmic episode is AFL rather than AF. """

    at_fraction: float = Field(default=0.1, ge=0.0, le=1.0)
    """ Share of non-AF_l time spent in AT rather than NSR. """

    rate_spread: float = Field(default=0.15, ge=0.0, le=0.5)
    """ Log-normal sigma of a per recording factor on NSR, AF and AT intervals.
    0 gives every recording the configured rates. """

    episode_median_minutes: float = Field(default=5.0, gt=0.0)
    episode_sigma: float = Field(default=1.0, ge=0.0)
    """ Log-normal shape of arrhythmic episode lengths. """

    age_min: int = Field(default=18, ge=18)
    age_max: int = Field(default=95, ge=18)

    origins: List[str] = Field(default=["synthetic"], min_length=1)
    """ Origin tags, sampled uniformly per recording. """

    burden_tolerance: float = Field(default=2.0, gt=0.0)
    """ Allowed gap, in percentage points, between realised and target burden. """

    max_attempts: int = Field(default=100, ge=1)

    seed: int = Field(default=0, ge=0)
    """ Master seed. Per recording seeds are derived from it. """

    rhythms: RhythmParams = RhythmParams()

    @model_validator(mode="before")
    @classmethod
    def _single_target(cls, data: Any) -> Any:
        # accept `target_afb: x` as shorthand for `target_afbs: [x]`
        if isinstance(data, dict) and "target_afb" in data:
            data = dict(data)
            if "target_afbs" in data:
                raise ValueError("Set only one of [target_afb] and [target_afbs]")
            data["target_afbs"] = [data.pop("target_afb")]
        return data

    @model_validator(mode="after")
    def _age_range(self) -> "GenConfig":
        if self.age_min > self.age_max:
            raise ValueError(
                f"Age range [{self.age_min}, {self.age_max}] is empty"
            )
        return self

    @property
    def duration_ms(self) -> float:
        return self.duration_hours * 3_600_000.0

    def target_for(self, index: int) -> float:
        return self.target_afbs[index % len(self.target_afbs)]


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _positive(name: str, value: float):
    if not value > 0:
        raise InvalidParams(f"Rhythm parameter [{name}={value}] must be positive")


def _non_negative(name: str, value: float):
    if value < 0:
        raise InvalidParams(f"Rhythm parameter [{name}={value}] must not be negative")
