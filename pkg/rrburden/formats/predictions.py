#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Inference outputs.

    predictions.csv    one row per window
    recordings.csv     one row per recording
    skipped.csv        recordings too short to classify
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path
from typing import Dict, Sequence, Tuple

# vendor libraries
import pandas as pd

# local libraries
from rrburden.arnet2.inference import InferenceResult
from rrburden.evaluation.screening import patient_diagnosis
from rrburden.exceptions import IoError, MissingMetadata
from rrburden.functions import atomic_write_text

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

PREDICTIONS_FILE = "predictions.csv"
RECORDINGS_FILE = "recordings.csv"
SKIPPED_FILE = "skipped.csv"

WINDOW_COLUMNS = [
    "recording_id",
    "window_index",
    "start_beat",
    "n_rr",
    "duration_ms",
    "stage1_prob",
    "stage2_prob",
    "final_label",
]
RECORDING_COLUMNS = ["recording_id", "estimated_afb", "severity", "patient_diagnosis"]
SKIPPED_COLUMNS = ["recording_id", "reason"]

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def window_frame(results: Sequence[InferenceResult]) -> pd.DataFrame:
    """Window rows of every result. `stage2_prob` is blank for stage-1-only bundles."""
    rows = []
    for result in results:
        for k, window in enumerate(result.windows):
            rows.append(
                {
                    "recording_id": result.recording_id,
                    "window_index": window.index,
                    "start_beat": window.start_beat,
                    "n_rr": window.n_rr,
                    "duration_ms": window.duration_ms,
                    "stage1_prob": float(result.stage1_probs[k]),
                    "stage2_prob": (
                        None if result.stage2_probs is None else float(result.stage2_probs[k])
                    ),
                    "final_label": int(result.labels[k]),
                }
            )
    return pd.DataFrame(rows, columns=WINDOW_COLUMNS)


def recording_frame(results: Sequence[InferenceResult]) -> pd.DataFrame:
    rows = [
        {
            "recording_id": r.recording_id,
            "estimated_afb": r.estimated_afb,
            "severity": r.severity.value,
            "patient_diagnosis": patient_diagnosis(r.estimated_afb),
        }
        for r in results
    ]
    return pd.DataFrame(rows, columns=RECORDING_COLUMNS)


def write_predictions(
    out_dir: Path,
    results: Sequence[InferenceResult],
    skipped: Sequence[Tuple[str, str]] = (),
):
    """Writes the three inference files atomically.

    Args:
        out_dir (Path): destination directory
        results (Sequence[InferenceResult]): classified recordings
        skipped (Sequence[Tuple[str, str]]): (recording id, reason) of recordings left out
    """
    out_dir = Path(out_dir)
    atomic_write_text(out_dir / PREDICTIONS_FILE, _to_csv(window_frame(results)))
    atomic_write_text(out_dir / RECORDINGS_FILE, _to_csv(recording_frame(results)))
    atomic_write_text(
        out_dir / SKIPPED_FILE,
        _to_csv(pd.DataFrame(list(skipped), columns=SKIPPED_COLUMNS)),
    )


def read_predictions(path: Path) -> pd.DataFrame:
    """Reads a predictions CSV.

    Raises:
        IoError: the file does not exist
        MissingMetadata: a column is missing
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"Predictions file [{path}] does not exist")
    frame = pd.read_csv(path, dtype={"recording_id": str})
    missing = [c for c in WINDOW_COLUMNS if c not in frame.columns]
    if missing:
        raise MissingMetadata(f"Predictions file [{path}] lacks columns {missing}")
    return frame


def windows_by_recording(frame: pd.DataFrame) -> Dict[str, pd.DataFrame]:
    """Splits window rows per recording, each ordered by window index."""
    return {
        str(recording_id): group.sort_values("window_index").reset_index(drop=True)
        for recording_id, group in frame.groupby("recording_id", sort=False)
    }


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n", float_format="%.10g")
