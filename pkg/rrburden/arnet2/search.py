#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Random hyperparameter search scored by k-fold cross-validated stage-1 AUROC.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

# vendor libraries
import numpy as np
import pandas as pd

# local libraries
from rrburden.arnet2.stage1 import build_stage1, stage1_predict
from rrburden.arnet2.training import TrainingHistory, train_stage1
from rrburden.evaluation.metrics import auroc
from rrburden.exceptions import EmptySpace, RecordingTooShort, SingleClassDataset
from rrburden.functions import derive_seed
from rrburden.logger import logger
from rrburden.models.hyperparams import DEFAULT_SEARCH_SPACE, Hyperparams, SearchSpace
from rrburden.models.recording import Recording, Window
from rrburden.rr_core import segment_windows, window_arrays

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass
class SearchResult:
    best: Hyperparams
    best_auroc: float
    table: pd.DataFrame
    """ One row per trial: sampled values, AUROC per fold and their mean. """


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def sample_hyperparams(
    space: SearchSpace, rng: np.random.Generator, base: Hyperparams = None
) -> Hyperparams:
    """Draws one configuration, honouring every prior in the space.

    Raises:
        EmptySpace: the space admits no configuration
    """
    space.check()
    return space.sample(rng, base)


def fold_assignment(recording_ids: Sequence[str], folds: int, seed: int) -> Dict[str, int]:
    """Assigns recordings to folds of near-equal size."""
    order = np.random.default_rng(seed).permutation(len(recording_ids))
    assignment = {}
    for fold, members in enumerate(np.array_split(order, folds)):
        for index in members:
            assignment[recording_ids[index]] = fold
    return assignment


def cross_validate(
    hp: Hyperparams,
    recordings: Sequence[Recording],
    folds: int,
    seed: int,
    patience: int = 5,
) -> List[float]:
    """Validation AUROC of stage 1 on each fold. NaN marks a fold whose held
    out or training windows hold a single class."""
    windows = _segment_all(recordings, hp.w_s)
    assignment = fold_assignment([r.id for r in recordings], folds, derive_seed(seed, "fold"))
    scores = []
    for fold in range(folds):
        train = [w for w in windows if assignment[w.recording_id] != fold]
        held_out = [w for w in windows if assignment[w.recording_id] == fold]
        if not train or not held_out:
            scores.append(math.nan)
            continue
        fold_seed = derive_seed(seed, "fold", fold)
        model = build_stage1(hp, derive_seed(fold_seed, "init"))
        try:
            train_stage1(model, train, fold_seed, patience=patience, history=TrainingHistory())
            rr, _, labels = window_arrays(held_out)
            scores.append(auroc(stage1_predict(model, rr, hp.batch_size)[0], labels))
        except SingleClassDataset as ex:
            logger.warning("Fold [%d] skipped: %s", fold, ex)
            scores.append(math.nan)
    return scores


def hyper_search(
    recordings: Sequence[Recording],
    trials: int,
    folds: int,
    seed: int,
    space: SearchSpace = DEFAULT_SEARCH_SPACE,
    base: Hyperparams = None,
    patience: int = 5,
) -> SearchResult:
    """Random search over a hyperparameter space.

    Each trial samples a configuration, cross-validates stage 1 over `folds`
    recording-level folds and is scored by mean validation AUROC. The best
    scoring trial wins; ties go to the earlier trial.

    Args:
        recordings (Sequence[Recording]): the labelled cohort
        trials (int): configurations to sample, at least 1
        folds (int): cross-validation folds, at least 2
        seed (int): master seed
        space (SearchSpace): the priors
        base (Hyperparams): values of hyperparameters without a prior
        patience (int): early stopping patience

    Raises:
        EmptySpace: the space admits no configuration, or trials or folds are
            out of range

    Returns:
        SearchResult: the best configuration and the table of every trial
    """
    space.check()
    if trials < 1:
        raise EmptySpace(f"Search needs at least one trial, got [{trials}]")
    if folds < 2 or folds > len(recordings):
        raise EmptySpace(
            f"Cannot split [{len(recordings)}] recordings into [{folds}] folds"
        )

    rows = []
    best, best_score = None, -math.inf
    for trial in range(trials):
        hp = sample_hyperparams(space, np.random.default_rng(derive_seed(seed, "search", trial)), base)
        logger.info("Trial [%d/%d]: %s", trial + 1, trials, _describe(hp, space))
        scores = cross_validate(hp, recordings, folds, derive_seed(seed, "search", trial, "cv"), patience)
        mean = float(np.nanmean(scores)) if not all(math.isnan(s) for s in scores) else math.nan
        row = {"trial": trial, **{k: getattr(hp, k) for k in space.priors}}
        row.update({f"fold{k}_auroc": s for k, s in enumerate(scores)})
        row["mean_auroc"] = mean
        rows.append(row)
        if best is None or (not math.isnan(mean) and mean > best_score):
            best = hp
            best_score = mean if not math.isnan(mean) else best_score
    if math.isinf(best_score):
        best_score = math.nan
    return SearchResult(best, best_score, pd.DataFrame(rows))


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _segment_all(recordings: Sequence[Recording], w_s: int) -> List[Window]:
    windows = []
    for recording in recordings:
        try:
            windows.extend(segment_windows(recording, w_s))
        except RecordingTooShort as ex:
            logger.warning("Skipping recording: %s", ex)
    return windows


def _describe(hp: Hyperparams, space: SearchSpace) -> str:
    return ", ".join(f"{k}={getattr(hp, k)}" for k in space.priors)
