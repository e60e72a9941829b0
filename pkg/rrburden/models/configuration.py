#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Run configuration shared by every subcommand.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path
from typing import Optional

# vendor libraries
import pydantic
from pydantic import BaseModel, ConfigDict, Field

# local libraries
from rrburden.exceptions import ConfigValidationError
from rrburden.functions import load_structured_file
from rrburden.logger import logger
from rrburden.models.generation import GenConfig
from rrburden.models.hyperparams import DEFAULT_SEARCH_SPACE, Hyperparams

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrainSettings(_Section):
    stage1_only: bool = False
    """ Skip stage-2 training. The bundle then classifies with stage 1 alone. """

    validation_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)
    """ Share of recordings held out for early stopping. """

    patience: int = Field(default=5, ge=1)
    """ Epochs without validation improvement before training stops. """

    stage2_binary_input: bool = False
    """ Feed stage 2 the thresholded stage-1 label instead of its probability. """


class SearchSettings(_Section):
    trials: int = Field(default=10, ge=1)
    folds: int = Field(default=5, ge=2)


class InferSettings(_Section):
    batch_size: int = Field(default=1024, ge=1)
    """ Windows per stage-1 forward pass. """


class RunConfig(_Section):
    """Top level of a run configuration file. Unknown keys are rejected."""

    seed: int = Field(default=0, ge=0, lt=2**64)
    """ Master seed every random stream is derived from. """

    hyperparams: Hyperparams = Hyperparams()
    generate: GenConfig = GenConfig()
    train: TrainSettings = TrainSettings()
    search: SearchSettings = SearchSettings()
    infer: InferSettings = InferSettings()


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def load_run_config(
    path: Optional[Path] = None, allow_out_of_range: bool = False
) -> RunConfig:
    """Loads and validates a run configuration.

    Args:
        path (Optional[Path]): YAML or JSON file. Defaults apply when None.
        allow_out_of_range (bool): accept hyperparameters outside the search space

    Raises:
        ConfigValidationError: the file holds unknown keys, invalid values or
            out of range hyperparameters
        InvalidParams: a rhythm model is invalid
        InvalidHyperparam: the hyperparameters cannot build a network

    Returns:
        RunConfig: the validated configuration
    """
    data = load_structured_file(path) if path else {}
    try:
        config = RunConfig.model_validate(data)
    except pydantic.ValidationError as ex:
        raise ConfigValidationError(
            f"Invalid configuration [{path}]:\n{ex}"
        ) from ex
    check_run_config(config, allow_out_of_range)
    logger.debug("Loaded configuration [%s]", path)
    return config


def check_run_config(config: RunConfig, allow_out_of_range: bool = False):
    """Applies the checks pydantic cannot express.

    Raises:
        ConfigValidationError: hyperparameters lie outside the search space
        InvalidParams: a rhythm model is invalid
        InvalidHyperparam: the hyperparameters cannot build a network
    """
    config.generate.rhythms.check()
    config.hyperparams.check_structure()
    violations = DEFAULT_SEARCH_SPACE.violations(config.hyperparams)
    if not violations:
        return
    if allow_out_of_range:
        logger.warning(
            "Using hyperparameters outside the search space %s", violations
        )
        return
    raise ConfigValidationError(
        f"Hyperparameters {violations} lie outside the search space. Use --allow-out-of-range to accept them."
    )
