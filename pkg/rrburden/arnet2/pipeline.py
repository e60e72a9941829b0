#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
End to end training and cohort inference.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

# local libraries
from rrburden.arnet2.bundle import ModelBundle
from rrburden.arnet2.inference import InferenceResult, embed_windows, full_inference
from rrburden.arnet2.stage1 import build_stage1
from rrburden.arnet2.stage2 import build_stage2
from rrburden.arnet2.training import TrainingHistory, train_stage1, train_stage2
from rrburden.exceptions import NoTrainingData, RecordingTooShort
from rrburden.functions import derive_seed, print_subheader
from rrburden.logger import logger
from rrburden.models.configuration import TrainSettings
from rrburden.models.hyperparams import Hyperparams
from rrburden.models.recording import Recording
from rrburden.rr_core import segment_windows

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def train_bundle(
    recordings: Sequence[Recording],
    hp: Hyperparams,
    settings: TrainSettings,
    seed: int,
    batch_size: int = 1024,
) -> ModelBundle:
    """Trains stage 1 and, unless `settings.stage1_only`, stage 2.

    Stage 2 learns from the embeddings of the trained stage 1 over the same
    recordings. Recordings too short for one window are left out.

    Args:
        recordings (Sequence[Recording]): the labelled training cohort
        hp (Hyperparams): the architecture and optimiser settings
        settings (TrainSettings): training options
        seed (int): master seed
        batch_size (int): windows per inference pass when embedding

    Raises:
        NoTrainingData: no recording fills a window
        SingleClassDataset: the training windows hold a single class

    Returns:
        ModelBundle: the trained bundle
    """
    segmented = []
    for recording in recordings:
        try:
            segmented.append((recording, segment_windows(recording, hp.w_s)))
        except RecordingTooShort as ex:
            logger.warning("Leaving out recording: %s", ex)
    if not segmented:
        raise NoTrainingData("No recording is long enough to train on")

    history = TrainingHistory()
    print_subheader("Stage 1")
    stage1 = build_stage1(hp, derive_seed(seed, "stage1", "init"))
    windows = [w for _, recording_windows in segmented for w in recording_windows]
    train_stage1(
        stage1, windows, seed, settings.validation_fraction, settings.patience, history
    )
    if settings.stage1_only:
        return ModelBundle(stage1, None, seed, history)

    print_subheader("Stage 2")
    embedded = [
        embed_windows(stage1, recording.id, recording_windows, batch_size)
        for recording, recording_windows in segmented
    ]
    stage2 = build_stage2(
        hp, derive_seed(seed, "stage2", "init"), settings.stage2_binary_input
    )
    train_stage2(
        stage2,
        embedded,
        stage1.threshold,
        seed,
        settings.validation_fraction,
        settings.patience,
        history,
    )
    return ModelBundle(stage1, stage2, seed, history)


def infer_cohort(
    bundle: ModelBundle,
    recordings: Sequence[Recording],
    threads: int = 1,
    batch_size: int = 1024,
) -> Tuple[List[InferenceResult], List[Tuple[str, str]]]:
    """Runs full inference over every recording.

    Returns:
        Tuple[List[InferenceResult], List[Tuple[str, str]]]: results in input
            order, and (recording id, reason) of recordings too short to classify
    """

    def infer(recording: Recording):
        try:
            return full_inference(bundle.stage1, bundle.stage2, recording, batch_size)
        except RecordingTooShort as ex:
            logger.warning("Skipping recording: %s", ex)
            return (recording.id, str(ex))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        outcomes = list(executor.map(infer, recordings))
    results = [x for x in outcomes if isinstance(x, InferenceResult)]
    skipped = [x for x in outcomes if not isinstance(x, InferenceResult)]
    return results, skipped
