#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Model bundle: the directory a training run produces and inference consumes.

    stage1.weights.json    stage-1 parameters and BatchNorm statistics
    stage2.weights.json    the four GRU encoders (absent for stage-1-only bundles)
    bundle.yml             thresholds, hyperparameters, normalisation, class weights, seed
    training_curve.csv     loss and validation AUROC per stage and epoch
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

# vendor libraries
import pandas as pd
import pydantic
from ruamel.yaml import YAML

# local libraries
from rrburden.arnet2.stage1 import Stage1Model
from rrburden.arnet2.stage2 import Stage2Model
from rrburden.arnet2.training import EpochRecord, TrainingHistory
from rrburden.exceptions import ConfigValidationError, IoError, WeightsVersionMismatch
from rrburden.functions import atomic_write_text, load_structured_file
from rrburden.logger import logger
from rrburden.models.hyperparams import Hyperparams
from rrburden.models.recording import SeverityClass
from rrburden.nn.weights_file import WEIGHTS_VERSION, load_weights, save_weights
from rrburden.rr_core import RR_CLIP_MS, RR_SCALE, RR_SHIFT

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

STAGE1_FILE = "stage1.weights.json"
STAGE2_FILE = "stage2.weights.json"
MANIFEST_FILE = "bundle.yml"
CURVE_FILE = "training_curve.csv"

NORMALIZATION = {
    "clip_ms": [float(RR_CLIP_MS[0]), float(RR_CLIP_MS[1])],
    "shift": RR_SHIFT,
    "scale": RR_SCALE,
}
""" Input transform every bundle is trained with. """

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass
class ModelBundle:
    stage1: Stage1Model
    stage2: Optional[Stage2Model]
    seed: int
    history: TrainingHistory = field(default_factory=TrainingHistory)

    @property
    def hyperparams(self) -> Hyperparams:
        return self.stage1.hp

    @property
    def stage1_only(self) -> bool:
        return self.stage2 is None

    def manifest(self) -> Dict[str, Any]:
        manifest = {
            "version": WEIGHTS_VERSION,
            "seed": self.seed,
            "stage1_only": self.stage1_only,
            "tau1": float(self.stage1.threshold),
            "hyperparams": self.hyperparams.model_dump(),
            "normalization": NORMALIZATION,
            "w_pos": {"stage1": _optional_float(self.stage1.w_pos)},
        }
        if self.stage2 is not None:
            manifest["tau2"] = float(self.stage2.threshold)
            manifest["stage2_binary_input"] = self.stage2.binary_input
            manifest["w_pos"]["stage2"] = {
                severity.value: float(weight)
                for severity, weight in self.stage2.w_pos.items()
            }
        return manifest


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def save_bundle(bundle: ModelBundle, directory: Path):
    """Writes a bundle directory. Every file is written atomically."""
    directory = Path(directory)
    save_weights(bundle.stage1, directory / STAGE1_FILE)
    if bundle.stage2 is not None:
        save_weights(bundle.stage2, directory / STAGE2_FILE)
    elif (directory / STAGE2_FILE).exists():
        (directory / STAGE2_FILE).unlink()

    yaml = YAML(typ="safe")
    yaml.default_flow_style = False
    stream = io.StringIO()
    yaml.dump(bundle.manifest(), stream)
    atomic_write_text(directory / MANIFEST_FILE, stream.getvalue())
    atomic_write_text(
        directory / CURVE_FILE, bundle.history.to_frame().to_csv(index=False)
    )
    logger.info("Wrote model bundle to [%s]", directory)


def load_bundle(directory: Path) -> ModelBundle:
    """Reads a bundle directory.

    Raises:
        IoError: the directory or one of its files is missing
        WeightsVersionMismatch: the bundle was written by an incompatible version
        ConfigValidationError: the manifest is malformed
        ShapeMismatch: weights do not fit the architecture in the manifest

    Returns:
        ModelBundle: the bundle
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise IoError(f"Model bundle [{directory}] does not exist")
    manifest = load_structured_file(directory / MANIFEST_FILE)

    version = manifest.get("version")
    if version != WEIGHTS_VERSION:
        raise WeightsVersionMismatch(
            f"Bundle [{directory}] has version [{version}]. Expected [{WEIGHTS_VERSION}]."
        )
    if manifest.get("normalization") != NORMALIZATION:
        raise WeightsVersionMismatch(
            f"Bundle [{directory}] uses input normalisation [{manifest.get('normalization')}]. Expected [{NORMALIZATION}]."
        )
    try:
        hp = Hyperparams.model_validate(manifest["hyperparams"])
        tau1 = float(manifest["tau1"])
        stage1_only = bool(manifest["stage1_only"])
    except (KeyError, TypeError, ValueError, pydantic.ValidationError) as ex:
        raise ConfigValidationError(f"Malformed bundle manifest in [{directory}]: {ex}") from ex

    stage1 = Stage1Model(hp)
    load_weights(stage1, directory / STAGE1_FILE)
    stage1.threshold = tau1
    stage1.w_pos = manifest.get("w_pos", {}).get("stage1")

    stage2 = None
    if not stage1_only:
        stage2 = Stage2Model(hp, bool(manifest.get("stage2_binary_input", False)))
        load_weights(stage2, directory / STAGE2_FILE)
        stage2.threshold = float(manifest["tau2"])
        stage2.w_pos = {
            SeverityClass(k): float(v)
            for k, v in manifest.get("w_pos", {}).get("stage2", {}).items()
        }

    history = TrainingHistory()
    curve = directory / CURVE_FILE
    if curve.is_file():
        for row in pd.read_csv(curve).itertuples(index=False):
            history.records.append(
                EpochRecord(str(row.stage), int(row.epoch), float(row.loss), float(row.val_auroc))
            )
    logger.debug("Loaded model bundle [%s]", directory)
    return ModelBundle(stage1, stage2, int(manifest.get("seed", 0)), history)


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _optional_float(value: Optional[float]) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)
