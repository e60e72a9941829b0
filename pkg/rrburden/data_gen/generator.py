#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Synthetic Holter cohorts with a controlled AF_l burden.

Arrhythmic time is scheduled as an alternating renewal process: log-normal
AF or AFL episodes separated by sinus stretches, each sinus stretch holding an
optional run of atrial tachycardia. Realised burden is measured on the beat
labels and the schedule is redrawn until it lands within tolerance.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import io
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Tuple, Union

# vendor libraries
import numpy as np
from ruamel.yaml import YAML

# local libraries
from rrburden.data_gen.rhythms import gen_segment
from rrburden.exceptions import BurdenUnreachable
from rrburden.formats.beat_csv import write_beat_csv
from rrburden.formats.manifest import ManifestEntry, entry_for, reference_afb, write_manifest
from rrburden.functions import atomic_write_text, derive_seed
from rrburden.logger import logger
from rrburden.models.generation import GenConfig, Rhythm, RhythmParams
from rrburden.models.recording import Recording, Sex

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

RECORDINGS_DIR = "recordings"
""" Sub-directory of a dataset holding the beat CSVs. """

MANIFEST_FILE = "manifest.csv"

SETTINGS_FILE = "generation.yml"
""" Copy of the generator settings that produced a dataset. """

Schedule = List[Tuple[Rhythm, float]]

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def recording_id(index: int) -> str:
    return f"rec-{index:04d}"


def gen_recording(
    cfg: GenConfig, index: int, rng: Union[np.random.Generator, int]
) -> Recording:
    """Generates one annotated recording.

    The target burden of the recording is `cfg.target_for(index)`. Targets of
    0 and 100 are met exactly. Otherwise the arrhythmic time is rescaled by
    target / realised after each miss. One log-normal heart rate factor
    (`cfg.rate_spread`) scales the NSR, AF and AT intervals of the whole
    recording.

    Args:
        cfg (GenConfig): generator settings
        index (int): position of the recording in its cohort
        rng (Union[np.random.Generator, int]): random source or seed

    Raises:
        InvalidParams: a rhythm model is invalid
        BurdenUnreachable: no schedule within tolerance after `max_attempts`

    Returns:
        Recording: the recording
    """
    rng = np.random.default_rng(rng)
    cfg.rhythms.check()
    target = cfg.target_for(index)
    total = cfg.duration_ms

    age = int(rng.integers(cfg.age_min, cfg.age_max, endpoint=True))
    sex = Sex.F if rng.random() < 0.5 else Sex.M
    origin = cfg.origins[int(rng.integers(len(cfg.origins)))]
    rhythms = cfg.rhythms.at_rate(float(np.exp(cfg.rate_spread * rng.standard_normal())))

    arrhythmic = target / 100.0 * total
    realised = math.nan
    for attempt in range(1, cfg.max_attempts + 1):
        schedule = _schedule(cfg, arrhythmic, rng)
        rr, labels = _render(schedule, rhythms, rng)
        recording = Recording(recording_id(index), rr, labels, age, sex, origin)
        realised = reference_afb(recording)
        if abs(realised - target) <= cfg.burden_tolerance:
            logger.debug(
                "Recording [%s] burden [%.2f%%] for target [%.2f%%] after [%d] attempts",
                recording.id,
                realised,
                target,
                attempt,
            )
            return recording
        if realised > 0:
            arrhythmic = min(total, arrhythmic * target / realised)

    raise BurdenUnreachable(
        f"Recording [{recording_id(index)}] reached burden [{realised:.2f}%] for target "
        f"[{target}%] after [{cfg.max_attempts}] attempts"
    )


def gen_dataset(
    cfg: GenConfig, out_dir: Path, threads: int = 1
) -> List[Tuple[ManifestEntry, Recording]]:
    """Generates a cohort on disk.

    Writes `recordings/rec-NNNN.csv` per recording, `manifest.csv` and a copy
    of the settings. Recording `i` is drawn from `derive_seed(cfg.seed,
    "recording", i)` alone, so the output does not depend on `threads`.

    Args:
        cfg (GenConfig): generator settings
        out_dir (Path): the dataset directory, created when missing
        threads (int): recordings generated concurrently

    Raises:
        IoError: a file could not be written
        BurdenUnreachable: a recording missed its target

    Returns:
        List[Tuple[ManifestEntry, Recording]]: manifest rows with their recordings
    """
    out_dir = Path(out_dir)

    def generate(index: int) -> Tuple[ManifestEntry, Recording]:
        seed = derive_seed(cfg.seed, "recording", index)
        recording = gen_recording(cfg, index, seed)
        relative = f"{RECORDINGS_DIR}/{recording.id}.csv"
        write_beat_csv(out_dir / relative, recording.rr, recording.labels)
        return entry_for(recording, relative, seed), recording

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        generated = list(executor.map(generate, range(cfg.n_recordings)))

    write_manifest(out_dir / MANIFEST_FILE, [entry for entry, _ in generated])
    yaml = YAML(typ="safe")
    yaml.default_flow_style = False
    stream = io.StringIO()
    yaml.dump(cfg.model_dump(mode="json"), stream)
    atomic_write_text(out_dir / SETTINGS_FILE, stream.getvalue())
    return generated


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _schedule(cfg: GenConfig, arrhythmic_ms: float, rng: np.random.Generator) -> Schedule:
    """Lays out (rhythm, duration ms) segments filling the recording."""
    total = cfg.duration_ms
    arrhythmic_ms = min(max(arrhythmic_ms, 0.0), total)
    if arrhythmic_ms >= total:
        return [(_episode_rhythm(cfg, rng), d) for d in _episodes(cfg, total, rng)]

    episodes = _episodes(cfg, arrhythmic_ms, rng) if arrhythmic_ms > 0 else []
    gaps = rng.dirichlet(np.ones(len(episodes) + 1)) * (total - arrhythmic_ms)
    schedule = []
    for k, gap in enumerate(gaps):
        at = cfg.at_fraction * gap
        schedule.append((Rhythm.NSR, (gap - at) / 2))
        schedule.append((Rhythm.AT, at))
        schedule.append((Rhythm.NSR, (gap - at) / 2))
        if k < len(episodes):
            schedule.append((_episode_rhythm(cfg, rng), episodes[k]))
    return schedule


def _episodes(cfg: GenConfig, arrhythmic_ms: float, rng: np.random.Generator) -> List[float]:
    """Log-normal episode lengths summing to `arrhythmic_ms`, last one trimmed."""
    median = cfg.episode_median_minutes * 60_000.0
    episodes, remaining = [], arrhythmic_ms
    while remaining > 1.0:
        length = min(rng.lognormal(math.log(median), cfg.episode_sigma), remaining)
        episodes.append(length)
        remaining -= length
    return episodes


def _episode_rhythm(cfg: GenConfig, rng: np.random.Generator) -> Rhythm:
    return Rhythm.AFL if rng.random() < cfg.afl_fraction else Rhythm.AF


def _render(
    schedule: Schedule, params: RhythmParams, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Draws the beats of every segment. Empty segments are dropped."""
    mean_rr = {
        Rhythm.NSR: params.nsr.mean_rr,
        Rhythm.AF: params.af.mean_rr,
        Rhythm.AFL: params.afl.rr,
        Rhythm.AT: params.at.mean_rr,
    }
    rr, labels = [], []
    for rhythm, duration in schedule:
        if duration <= 0:
            continue
        segment_rr, segment_labels = gen_segment(
            rhythm, max(1, round(duration / mean_rr[rhythm])), params, rng
        )
        rr.append(segment_rr)
        labels.append(segment_labels)
    return np.concatenate(rr), np.concatenate(labels)
