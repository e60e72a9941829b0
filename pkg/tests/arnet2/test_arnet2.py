#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Unit tests for the two-stage burden network: architecture, thresholds,
feature sequences, training, bundles and search.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path

# vendor libraries
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

# local libraries
from rrburden.arnet2.bundle import MANIFEST_FILE, STAGE2_FILE, load_bundle, save_bundle
from rrburden.arnet2.inference import full_inference
from rrburden.arnet2.pipeline import infer_cohort, train_bundle
from rrburden.arnet2.search import fold_assignment, hyper_search
from rrburden.arnet2.stage1 import Stage1Model, build_stage1, stage1_infer
from rrburden.arnet2.stage2 import (
    Stage2Model,
    build_stage2,
    stage2_features,
    stage2_infer,
    stage2_route,
)
from rrburden.arnet2.training import (
    positive_weight,
    select_threshold,
    split_recordings,
)
from rrburden.cli_builder import create_cli
from rrburden.data_gen.generator import MANIFEST_FILE as DATASET_MANIFEST_FILE
from rrburden.data_gen.generator import gen_dataset, gen_recording
from rrburden.data_gen.rhythms import gen_segment
from rrburden.evaluation.error_analysis import afl_miss_rate
from rrburden.evaluation.metrics import ConfusionCounts, eaf_stats, metrics
from rrburden.exceptions import (
    EmptySequence,
    EmptySpace,
    IoError,
    ShapeMismatch,
    SingleClassDataset,
    WeightsVersionMismatch,
)
from rrburden.formats.predictions import RECORDINGS_FILE
from rrburden.functions import derive_seed
from rrburden.models.configuration import TrainSettings
from rrburden.models.generation import AfParams, GenConfig, Rhythm, RhythmParams
from rrburden.models.hyperparams import Hyperparams, Prior, PriorKind, SearchSpace
from rrburden.models.recording import BeatLabel, Recording, SeverityClass
from rrburden.rr_core import compute_eaf

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

TINY = Hyperparams(
    w_s=12,
    n_b=2,
    n_f=2,
    f_l=3,
    n_hu=8,
    d_r1=0.2,
    d_r2=0.3,
    h=2,
    gru_hidden=4,
    batch_size=64,
    max_epochs=2,
)
""" Smallest useful network: 11 RR values per window, embedding width 2. """

ACCEPTANCE_HP = Hyperparams(
    n_b=4, n_f=16, n_hu=64, gru_hidden=16, batch_size=128, max_epochs=15
)
""" Large enough to separate irregular from regular windows, small enough for CI. """

# ------------------------------------------------------------------------------
# TESTS
# ------------------------------------------------------------------------------


class Test_Architecture:
    def test_default_stage1_shapes(self):
        shapes = dict(build_stage1(Hyperparams(), seed=0).shapes())

        assert shapes["block0"] == (59, 64)
        assert shapes["pool0"] == (29, 64)
        assert shapes["pool1"] == (14, 128)
        assert shapes["block4"] == (14, 256)
        assert shapes["flatten"] == (14 * 256,)
        assert shapes["relu2"] == (128,)

    def test_default_stage2_encoders(self):
        model = Stage2Model(Hyperparams())

        assert set(model.encoders) == set(SeverityClass)
        assert model.input_width == 129
        assert model.sequence_length == 10

    def test_stage1_infer(self):
        model = build_stage1(TINY, seed=1)
        prob, embedding = stage1_infer(model, np.full(TINY.n_rr, 800))

        assert 0.0 < prob < 1.0
        assert embedding.shape == (TINY.embedding_width,)
        assert (embedding >= 0).all()

    def test_stage1_infer_wrong_length(self):
        with pytest.raises(ShapeMismatch):
            stage1_infer(build_stage1(TINY, seed=1), np.full(TINY.n_rr + 1, 800))

    def test_same_seed_same_initialisation(self):
        first = build_stage1(TINY, seed=4).parameters()
        second = build_stage1(TINY, seed=4).parameters()

        assert first.keys() == second.keys()
        assert all(np.array_equal(first[k], second[k]) for k in first)


class Test_Threshold:
    def test_separable(self):
        assert select_threshold([0.1, 0.9], [0, 1]) == (0.5, 1.0)

    def test_matches_exhaustive_search(self):
        probs = [0.2, 0.4, 0.6, 0.8]
        labels = [0, 1, 0, 1]
        tau, f1 = select_threshold(probs, labels)

        assert tau == pytest.approx(0.3)
        assert f1 == pytest.approx(0.8)
        assert f1 == pytest.approx(max(f1_at(probs, labels, t) for t in (0.3, 0.5, 0.7)))

    def test_random_scores_match_exhaustive_search(self):
        rng = np.random.default_rng(2)
        probs = np.round(rng.random(60), 2)
        labels = rng.integers(0, 2, size=60)
        _, f1 = select_threshold(probs, labels)

        distinct = np.unique(probs)
        midpoints = (distinct[1:] + distinct[:-1]) / 2
        assert f1 == pytest.approx(max(f1_at(probs, labels, t) for t in midpoints))

    def test_equal_probabilities(self):
        tau, f1 = select_threshold([0.6, 0.6], [0, 1])

        assert tau == pytest.approx(0.3)
        assert f1 == pytest.approx(2 / 3)

    def test_single_class(self):
        with pytest.raises(SingleClassDataset):
            select_threshold([0.1, 0.2], [1, 1])

    def test_positive_weight(self):
        assert positive_weight(np.array([1, 0, 0, 0])) == 3.0
        assert positive_weight(np.array([1, 1])) == 1.0

    def test_split_by_recording(self):
        ids = [f"rec-{i}" for i in range(10)]
        held_out = split_recordings(ids, 0.2, seed=5)

        assert len(held_out) == 2
        assert held_out <= set(ids)
        assert held_out == split_recordings(ids, 0.2, seed=5)
        assert split_recordings(["rec-0"], 0.5, seed=5) == set()


class Test_Stage2:
    def test_route(self):
        assert stage2_route(1.0, 20.0) == SeverityClass.NON_AF
        assert stage2_route(3.0, 100.0) == SeverityClass.MILD
        assert stage2_route(50.0, 1000.0) == SeverityClass.MODERATE
        assert stage2_route(90.0, 1000.0) == SeverityClass.SEVERE

    def test_features_are_left_padded(self):
        embeddings = np.arange(6, dtype=np.float64).reshape(3, 2)
        sequences = stage2_features(embeddings, [0.1, 0.2, 0.3], h=2)

        assert sequences.shape == (3, 3, 3)
        assert (sequences[0, :2] == 0).all()
        assert sequences[0, 2].tolist() == [0.0, 1.0, 0.1]
        assert sequences[2].tolist() == [[0.0, 1.0, 0.1], [2.0, 3.0, 0.2], [4.0, 5.0, 0.3]]

    def test_binary_features(self):
        sequences = stage2_features(np.zeros((3, 2)), [0.1, 0.2, 0.3], h=1, binary_threshold=0.15)
        assert sequences[:, -1, -1].tolist() == [0.0, 1.0, 1.0]

    def test_feature_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            stage2_features(np.zeros((3, 2)), [0.1, 0.2], h=1)

    def test_short_sequence_is_padded(self):
        model = build_stage2(TINY, seed=3)
        seq = np.random.default_rng(0).random((2, model.input_width))
        padded = np.vstack([np.zeros((1, model.input_width)), seq])

        assert stage2_infer(model, SeverityClass.MILD, seq) == stage2_infer(
            model, SeverityClass.MILD, padded
        )

    def test_timestep_order_matters(self):
        model = build_stage2(TINY, seed=4)
        rng = np.random.default_rng(9)
        for severity in SeverityClass:
            seq = rng.normal(size=(model.sequence_length, model.input_width))

            assert stage2_infer(model, severity, seq) != stage2_infer(model, severity, seq[::-1])

    def test_invalid_sequences(self):
        model = build_stage2(TINY, seed=3)
        with pytest.raises(EmptySequence):
            stage2_infer(model, SeverityClass.MILD, np.zeros((0, model.input_width)))
        with pytest.raises(ShapeMismatch):
            stage2_infer(model, SeverityClass.MILD, np.zeros((4, model.input_width)))
        with pytest.raises(ShapeMismatch):
            stage2_infer(model, SeverityClass.MILD, np.zeros((2, model.input_width + 1)))


class Test_Training:
    def test_train_and_infer(self, cohort):
        bundle = train_bundle(cohort, TINY, TrainSettings(), seed=11, batch_size=32)

        assert bundle.stage2 is not None
        assert 0.0 < bundle.stage1.threshold < 1.0
        assert bundle.stage1.w_pos in (pytest.approx(2 / 3), pytest.approx(3 / 2))
        assert {r.stage for r in bundle.history.records} >= {
            "stage1",
            "stage2-NonAF",
            "stage2-Severe",
        }

        result = full_inference(bundle.stage1, bundle.stage2, cohort[0])
        assert len(result.labels) == 20
        assert result.stage2_probs.shape == (20,)
        assert 0.0 <= result.estimated_afb <= 100.0
        assert result.windows[0].pred_prob == pytest.approx(result.stage2_probs[0])

        again = full_inference(bundle.stage1, bundle.stage2, cohort[0])
        assert np.array_equal(result.stage2_probs, again.stage2_probs)

    def test_same_seed_same_bundle(self, cohort):
        first = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=2)
        second = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=2)

        a, b = first.stage1.parameters(), second.stage1.parameters()
        assert all(np.array_equal(a[k], b[k]) for k in a)
        assert first.stage1.threshold == second.stage1.threshold

    def test_stage1_only(self, cohort):
        bundle = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=2)
        result = full_inference(bundle.stage1, None, cohort[0])

        assert bundle.stage1_only
        assert result.stage2_probs is None
        assert np.array_equal(result.labels, (result.stage1_probs > bundle.stage1.threshold).astype(int))

    def test_infer_cohort_skips_short_recordings(self, cohort):
        bundle = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=2)
        short = create_recording("short", np.full(5, 800), BeatLabel.OTHER)

        results, skipped = infer_cohort(bundle, [cohort[0], short, cohort[1]], threads=2)
        assert [r.recording_id for r in results] == ["rec-0", "rec-1"]
        assert [recording_id for recording_id, _ in skipped] == ["short"]


class Test_Bundle:
    def test_round_trip(self, cohort, tmp_path):
        settings = TrainSettings(stage2_binary_input=True)
        bundle = train_bundle(cohort, TINY, settings, seed=7)
        save_bundle(bundle, tmp_path)
        loaded = load_bundle(tmp_path)

        assert loaded.seed == 7
        assert loaded.hyperparams == TINY
        assert loaded.stage2.binary_input
        assert loaded.stage1.threshold == bundle.stage1.threshold
        assert loaded.stage2.threshold == bundle.stage2.threshold
        assert len(loaded.history.records) == len(bundle.history.records)

        before = full_inference(bundle.stage1, bundle.stage2, cohort[3])
        after = full_inference(loaded.stage1, loaded.stage2, cohort[3])
        assert np.array_equal(before.stage2_probs, after.stage2_probs)
        assert before.estimated_afb == after.estimated_afb

    def test_stage1_only_round_trip(self, cohort, tmp_path):
        bundle = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=7)
        save_bundle(bundle, tmp_path)

        assert not (tmp_path / STAGE2_FILE).exists()
        assert load_bundle(tmp_path).stage2 is None

    def test_version_mismatch(self, cohort, tmp_path):
        bundle = train_bundle(cohort, TINY, TrainSettings(stage1_only=True), seed=7)
        save_bundle(bundle, tmp_path)
        manifest = tmp_path / MANIFEST_FILE
        manifest.write_text(
            manifest.read_text(encoding="utf-8").replace("weights-v1", "weights-v0"),
            encoding="utf-8",
        )

        with pytest.raises(WeightsVersionMismatch):
            load_bundle(tmp_path)

    def test_missing_bundle(self, tmp_path):
        with pytest.raises(IoError):
            load_bundle(tmp_path / "absent")


class Test_Search:
    def test_fold_assignment(self):
        assignment = fold_assignment([f"rec-{i}" for i in range(7)], 3, seed=0)
        sizes = sorted(np.bincount(list(assignment.values())).tolist())

        assert sizes == [2, 2, 3]

    def test_single_trial(self, cohort):
        space = SearchSpace(priors={"alpha": Prior(PriorKind.LOG_UNIFORM, 1e-3, 1e-2)})
        result = hyper_search(cohort, trials=1, folds=2, seed=0, space=space, base=TINY)

        assert result.best.w_s == TINY.w_s
        assert 1e-3 <= result.best.alpha <= 1e-2
        assert list(result.table.columns) == [
            "trial",
            "alpha",
            "fold0_auroc",
            "fold1_auroc",
            "mean_auroc",
        ]

    def test_too_many_folds(self, cohort):
        with pytest.raises(EmptySpace):
            hyper_search(cohort, trials=1, folds=len(cohort) + 1, seed=0, base=TINY)


@pytest.mark.slow
class Test_Acceptance:
    """Trains on a synthetic cohort with every severity class and checks the
    held out behaviour expected of a working model."""

    def test_held_out_window_f1(self, trained):
        bundle, results, _ = trained
        y = np.concatenate([window_labels(r) for r in results])
        stage1 = np.concatenate([r.stage1_probs > bundle.stage1.threshold for r in results])
        final = np.concatenate([r.labels for r in results])

        stage1_f1 = metrics(ConfusionCounts.from_labels(y, stage1)).f1
        assert stage1_f1 >= 0.90
        assert metrics(ConfusionCounts.from_labels(y, final)).f1 >= stage1_f1 - 0.02

    def test_held_out_burden_error(self, trained):
        _, results, _ = trained
        errors = [abs(compute_eaf(r.durations, window_labels(r), r.labels)) for r in results]

        median, _, _ = eaf_stats(errors)
        assert median <= 2.0

    def test_flutter_is_mostly_missed(self, trained):
        _, _, flutter = trained
        categories = np.concatenate([[w.category for w in r.windows] for r in flutter])
        y_hat = np.concatenate([r.labels for r in flutter])

        assert afl_miss_rate(categories, y_hat) >= 0.5

    def test_irregular_window_is_flagged(self, trained):
        bundle, _, _ = trained
        params = RhythmParams(af=AfParams(cv=0.25))
        rr, _ = gen_segment(Rhythm.AF, 200 * bundle.stage1.hp.n_rr, params, np.random.default_rng(2))
        windows = rr.reshape(200, bundle.stage1.hp.n_rr)

        probs = np.array([stage1_infer(bundle.stage1, w)[0] for w in windows])
        assert np.mean(probs > bundle.stage1.threshold) >= 0.9

    def test_extreme_recordings(self, trained):
        bundle, _, _ = trained
        sinus = gen_recording(acceptance_config(target_afbs=[0], at_fraction=0.0), 900, 31)
        persistent = gen_recording(acceptance_config(target_afbs=[100]), 901, 32)

        assert full_inference(bundle.stage1, bundle.stage2, sinus).estimated_afb < 2.0
        assert full_inference(bundle.stage1, bundle.stage2, persistent).estimated_afb > 95.0

    def test_sinus_cohort_screens_negative(self, trained, tmp_path):
        bundle, _, _ = trained
        save_bundle(bundle, tmp_path / "bundle")
        cfg = acceptance_config(n_recordings=3, target_afbs=[0], at_fraction=0.0, seed=41)
        gen_dataset(cfg, tmp_path / "data")

        result = CliRunner().invoke(
            create_cli(),
            [
                "infer",
                str(tmp_path / "bundle"),
                str(tmp_path / "data" / DATASET_MANIFEST_FILE),
                "-o",
                str(tmp_path / "predictions"),
            ],
        )
        assert result.exit_code == 0, result.output
        recordings = pd.read_csv(tmp_path / "predictions" / RECORDINGS_FILE)
        assert recordings["patient_diagnosis"].tolist() == [0, 0, 0]


# ------------------------------------------------------------------------------
# FIXTURES
# ------------------------------------------------------------------------------


@pytest.fixture
def cohort():
    """Three irregular AF recordings and three regular sinus recordings of
    20 windows each."""
    rng = np.random.default_rng(0)
    recordings = []
    for i in range(6):
        if i % 2 == 0:
            rr = rng.integers(350, 1000, size=220)
            label = BeatLabel.AF
        else:
            rr = 800 + rng.integers(-20, 21, size=220)
            label = BeatLabel.OTHER
        recordings.append(create_recording(f"rec-{i}", rr, label))
    return recordings


@pytest.fixture(scope="module")
def trained():
    """A bundle trained on 48 one hour recordings, with its results on 16 held
    out recordings and on 8 flutter recordings."""
    train = generate_cohort(acceptance_config(n_recordings=48, seed=1))
    held_out = generate_cohort(acceptance_config(n_recordings=16, seed=2))
    flutter = generate_cohort(
        acceptance_config(n_recordings=8, target_afbs=[40, 95], afl_fraction=1.0, seed=3)
    )

    bundle = train_bundle(train, ACCEPTANCE_HP, TrainSettings(patience=3), seed=0)
    results, _ = infer_cohort(bundle, held_out)
    flutter_results, _ = infer_cohort(bundle, flutter)
    return bundle, results, flutter_results


# ------------------------------------------------------------------------------
# HELPER FUNCTIONS
# ------------------------------------------------------------------------------


def create_recording(recording_id: str, rr, label: BeatLabel) -> Recording:
    return Recording(
        id=recording_id,
        rr=np.asarray(rr),
        labels=np.full(len(rr), label.value),
        age=60,
        sex="F",
    )


def f1_at(probs, labels, tau: float) -> float:
    predicted = np.asarray(probs) > tau
    labels = np.asarray(labels) == 1
    tp = int(np.sum(predicted & labels))
    fp = int(np.sum(predicted & ~labels))
    fn = int(np.sum(~predicted & labels))
    return 2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 0.0


def acceptance_config(**overrides) -> GenConfig:
    settings = {
        "n_recordings": 1,
        "duration_hours": 1.0,
        "target_afbs": [0, 2, 40, 95],
        "afl_fraction": 0.0,
    }
    settings.update(overrides)
    return GenConfig(**settings)


def generate_cohort(cfg: GenConfig):
    return [
        gen_recording(cfg, i, derive_seed(cfg.seed, "recording", i))
        for i in range(cfg.n_recordings)
    ]


def window_labels(result) -> np.ndarray:
    return np.array([w.ref_label for w in result.windows], dtype=np.int64)
