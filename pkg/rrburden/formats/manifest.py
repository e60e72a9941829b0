#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Dataset manifest: one row per recording with its beat CSV and metadata.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# vendor libraries
import numpy as np
import pandas as pd
from dataclasses_json import dataclass_json

# local libraries
from rrburden.exceptions import InvalidRecording, IoError, MissingMetadata
from rrburden.formats.beat_csv import read_beat_csv
from rrburden.functions import atomic_write_text
from rrburden.logger import logger
from rrburden.models.recording import Recording, SeverityClass, Sex
from rrburden.rr_core import (
    NON_AF_MAX_SECONDS,
    compute_afb,
    severity_class,
    total_af_seconds,
)

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

COLUMNS = [
    "recording_id",
    "beat_csv_path",
    "age",
    "sex",
    "origin",
    "reference_afb",
    "reference_diagnosis",
    "seed",
]
""" Header of every manifest, in order. """

AFB_TOLERANCE = 1e-6
""" Allowed gap between a manifest burden and the one recomputed from beats. """

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass_json
@dataclass
class ManifestEntry:
    recording_id: str
    beat_csv_path: str
    """ Relative to the directory holding the manifest. """
    age: int
    sex: str
    origin: str
    reference_afb: float
    """ Beat level AF_l burden in percent. """
    reference_diagnosis: int
    """ 1 when the recording holds at least 30 s of AF_l. """
    seed: Optional[int] = None
    """ Generator seed, absent for recordings that were not synthesised. """


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def reference_afb(recording: Recording) -> float:
    """Beat level burden: every RR interval weighted by its own duration."""
    return compute_afb(recording.rr, recording.binary_labels())


def reference_diagnosis(recording: Recording) -> int:
    """1 when the true AF_l time reaches 30 s. Shorter events are non-AF."""
    seconds = total_af_seconds(recording.rr, recording.binary_labels())
    return int(seconds >= NON_AF_MAX_SECONDS)


def reference_severity(recording: Recording) -> SeverityClass:
    binary = recording.binary_labels()
    return severity_class(
        total_af_seconds(recording.rr, binary), compute_afb(recording.rr, binary)
    )


def entry_for(
    recording: Recording, beat_csv_path: str, seed: Optional[int] = None
) -> ManifestEntry:
    return ManifestEntry(
        recording_id=recording.id,
        beat_csv_path=beat_csv_path,
        age=int(recording.age),
        sex=recording.sex.value,
        origin=recording.origin,
        reference_afb=reference_afb(recording),
        reference_diagnosis=reference_diagnosis(recording),
        seed=seed,
    )


def dumps_manifest(entries: Sequence[ManifestEntry]) -> str:
    frame = pd.DataFrame([asdict(x) for x in entries], columns=COLUMNS)
    # built directly so blanks do not route seeds through float64
    frame["seed"] = pd.array([x.seed for x in entries], dtype="Int64")
    return frame.to_csv(index=False, lineterminator="\n")


def write_manifest(path: Path, entries: Sequence[ManifestEntry]):
    """Writes a manifest atomically."""
    atomic_write_text(path, dumps_manifest(entries))
    logger.info("Wrote manifest of [%d] recordings to [%s]", len(entries), path)


def read_manifest(path: Path) -> List[ManifestEntry]:
    """Reads a manifest without touching the beat files.

    Raises:
        IoError: the manifest does not exist
        MissingMetadata: a column is missing or holds a blank value
        InvalidRecording: recording ids are not unique
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"Manifest [{path}] does not exist")
    frame = pd.read_csv(
        path,
        dtype={
            "recording_id": str,
            "beat_csv_path": str,
            "sex": str,
            "origin": str,
            "seed": str,
        },
        keep_default_na=False,
        na_values={"seed": [""]},
    )
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise MissingMetadata(f"Manifest [{path}] lacks columns {missing}")
    required = [c for c in COLUMNS if c not in ("origin", "seed")]
    blank = frame[required].isin([""]).any(axis=1) | frame[required].isna().any(axis=1)
    if blank.any():
        row = frame[blank].iloc[0]
        raise MissingMetadata(
            f"Manifest [{path}] has blank metadata for recording [{row['recording_id']}]"
        )
    duplicated = frame["recording_id"][frame["recording_id"].duplicated()]
    if not duplicated.empty:
        raise InvalidRecording(
            f"Manifest [{path}] repeats recording id [{duplicated.iloc[0]}]"
        )

    entries = []
    for row in frame.to_dict(orient="records"):
        if row["sex"] not in {x.value for x in Sex}:
            raise InvalidRecording(
                f"Recording [{row['recording_id']}] has sex [{row['sex']}]. Must be one of {[x.value for x in Sex]}."
            )
        seed = row["seed"]
        entries.append(
            ManifestEntry(
                recording_id=row["recording_id"],
                beat_csv_path=row["beat_csv_path"],
                age=int(row["age"]),
                sex=row["sex"],
                origin=row["origin"],
                reference_afb=float(row["reference_afb"]),
                reference_diagnosis=int(row["reference_diagnosis"]),
                seed=None if pd.isna(seed) else int(seed),
            )
        )
    return entries


def load_recordings(path: Path) -> List[Tuple[ManifestEntry, Recording]]:
    """Reads a manifest and every beat CSV it lists.

    Args:
        path (Path): the manifest

    Raises:
        IoError: the manifest or a beat CSV does not exist
        InvalidRecording: ids repeat, or a reference burden disagrees with
            the one recomputed from its beat CSV
        MissingMetadata: a metadata value is blank

    Returns:
        List[Tuple[ManifestEntry, Recording]]: entries with their recordings, in manifest order
    """
    path = Path(path)
    loaded = []
    for entry in read_manifest(path):
        rr, labels = read_beat_csv(path.parent / entry.beat_csv_path)
        recording = Recording(
            id=entry.recording_id,
            rr=rr,
            labels=labels,
            age=entry.age,
            sex=entry.sex,
            origin=entry.origin,
        )
        recomputed = reference_afb(recording)
        if not np.isclose(recomputed, entry.reference_afb, rtol=0.0, atol=AFB_TOLERANCE):
            raise InvalidRecording(
                f"Recording [{entry.recording_id}] manifest burden [{entry.reference_afb}] "
                f"differs from its beats [{recomputed}]"
            )
        loaded.append((entry, recording))
    logger.debug("Loaded [%d] recordings from [%s]", len(loaded), path)
    return loaded
