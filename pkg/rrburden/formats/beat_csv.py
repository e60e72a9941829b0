#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Beat CSV: one row per RR interval, `beat_index,rr_ms,label`.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path
from typing import Tuple

# vendor libraries
import numpy as np
import pandas as pd

# local libraries
from rrburden.exceptions import InvalidRecording, IoError
from rrburden.functions import atomic_write_text
from rrburden.models.recording import as_label_array

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

COLUMNS = ["beat_index", "rr_ms", "label"]
""" Header of every beat CSV, in order. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def dumps_beat_csv(rr: np.ndarray, labels: np.ndarray) -> str:
    frame = pd.DataFrame(
        {
            "beat_index": np.arange(len(rr), dtype=np.int64),
            "rr_ms": np.asarray(rr, dtype=np.int64),
            "label": np.asarray(labels, dtype=np.int64),
        },
        columns=COLUMNS,
    )
    return frame.to_csv(index=False, lineterminator="\n")


def write_beat_csv(path: Path, rr: np.ndarray, labels: np.ndarray):
    """Writes a beat CSV atomically."""
    atomic_write_text(path, dumps_beat_csv(rr, labels))


def read_beat_csv(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """Reads a beat CSV.

    Args:
        path (Path): the file

    Raises:
        IoError: the file does not exist
        InvalidRecording: the header, indices or values are malformed
        InvalidLabel: a label is not a known code

    Returns:
        Tuple[np.ndarray, np.ndarray]: RR values (int ms) and label codes
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"Beat CSV [{path}] does not exist")
    try:
        frame = pd.read_csv(path, dtype="int64")
    except (ValueError, pd.errors.ParserError) as ex:
        raise InvalidRecording(f"Beat CSV [{path}] is malformed: {ex}") from ex
    if list(frame.columns) != COLUMNS:
        raise InvalidRecording(
            f"Beat CSV [{path}] has header [{','.join(frame.columns)}]. Expected [{','.join(COLUMNS)}]."
        )
    if not np.array_equal(frame["beat_index"].to_numpy(), np.arange(len(frame))):
        raise InvalidRecording(f"Beat CSV [{path}] beat_index must count up from 0")
    return frame["rr_ms"].to_numpy(), as_label_array(frame["label"].to_numpy())
