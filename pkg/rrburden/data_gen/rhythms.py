#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
RR interval models of the rhythms the generator emits.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Tuple

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import InvalidParams
from rrburden.models.generation import Rhythm, RhythmParams
from rrburden.rr_core import RR_CLIP_MS

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def gen_segment(
    rhythm: Rhythm, n_beats: int, params: RhythmParams, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Draws a run of RR intervals of a single rhythm.

    NSR is Gaussian around its mean plus a respiratory sine of random phase.
    AF draws are independent gamma variates with the configured mean and
    coefficient of variation. AFL is a constant RR with small Gaussian jitter
    and AT a fast Gaussian rhythm. Every value is rounded to whole ms and
    clipped to [200, 3000] ms.

    Args:
        rhythm (Rhythm): the rhythm to draw
        n_beats (int): number of RR intervals, at least 1
        params (RhythmParams): the rhythm models
        rng (np.random.Generator): random source

    Raises:
        InvalidParams: n_beats is below 1 or the rhythm model is invalid

    Returns:
        Tuple[np.ndarray, np.ndarray]: RR values (int ms) and their beat label codes
    """
    if n_beats < 1:
        raise InvalidParams(f"Segment length [{n_beats}] must be at least one beat")
    rhythm = Rhythm(rhythm)
    params.check(rhythm)

    if rhythm == Rhythm.NSR:
        p = params.nsr
        phase = rng.uniform(0.0, 2 * np.pi)
        beats = np.arange(n_beats)
        rr = (
            p.mean_rr
            + p.sdnn * rng.standard_normal(n_beats)
            + p.resp_amplitude * np.sin(2 * np.pi * beats / p.resp_period + phase)
        )
    elif rhythm == Rhythm.AF:
        p = params.af
        shape = 1.0 / p.cv**2
        rr = rng.gamma(shape, p.mean_rr / shape, size=n_beats)
    elif rhythm == Rhythm.AFL:
        p = params.afl
        rr = p.rr + p.jitter_sd * rng.standard_normal(n_beats)
    else:
        p = params.at
        rr = p.mean_rr + p.sdnn * rng.standard_normal(n_beats)

    rr = np.clip(np.rint(rr), *RR_CLIP_MS).astype(np.int64)
    labels = np.full(n_beats, rhythm.label.value, dtype=np.int64)
    return rr, labels
