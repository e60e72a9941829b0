#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Unit tests for Hyperparams, SearchSpace and RunConfig.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import json
from pathlib import Path

# vendor libraries
import numpy as np
import pytest

# local libraries
from rrburden.commands.run_options import with_seed
from rrburden.exceptions import (
    ConfigValidationError,
    EmptySpace,
    InvalidHyperparam,
    InvalidParams,
    IoError,
)
from rrburden.models.generation import AfParams, AflParams, Rhythm, RhythmParams
from rrburden.models.hyperparams import (
    DEFAULT_SEARCH_SPACE,
    Hyperparams,
    Prior,
    PriorKind,
    SearchSpace,
)
from rrburden.models.configuration import RunConfig, load_run_config

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

SEARCH_SAMPLES = 10_000

# ------------------------------------------------------------------------------
# TESTS
# ------------------------------------------------------------------------------


class Test_Hyperparams:
    def test_defaults(self):
        hp = Hyperparams()

        assert hp.n_rr == 59
        assert hp.embedding_width == 128
        assert hp.block_filters() == [64, 64, 128, 128, 256]
        assert hp.pooled_lengths() == [29, 14]
        assert DEFAULT_SEARCH_SPACE.violations(hp) == []

    def test_filter_doubling(self):
        assert Hyperparams(n_b=3, n_f=32).block_filters() == [32, 32, 64]
        assert Hyperparams(n_b=7, n_f=8).block_filters() == [8, 8, 16, 16, 32, 32, 64]

    def test_structure_errors(self):
        with pytest.raises(InvalidHyperparam):
            Hyperparams(f_l=0).check_structure()
        with pytest.raises(InvalidHyperparam):
            Hyperparams(n_hu=10).check_structure()
        with pytest.raises(InvalidHyperparam):
            Hyperparams(d_r1=1.0).check_structure()
        with pytest.raises(InvalidHyperparam):
            Hyperparams(alpha=0.0).check_structure()
        with pytest.raises(InvalidHyperparam):
            # 8 blocks pool a 9 RR window below one sample
            Hyperparams(w_s=10, n_b=8).check_structure()

    def test_unknown_field_rejected(self):
        with pytest.raises(Exception):
            Hyperparams(window=60)


class Test_SearchSpace:
    def test_samples_honour_priors(self, samples):
        for hp in samples:
            assert DEFAULT_SEARCH_SPACE.violations(hp) == []
            assert hp.n_hu % 4 == 0
            assert hp.w_s in range(60, 121, 10)

    def test_log_uniform_marginals(self, samples):
        # 5% of the range in log space
        log_alpha = np.log10([hp.alpha for hp in samples])
        assert np.median(log_alpha) == pytest.approx(-3.5, abs=0.05 * 3)
        assert np.quantile(log_alpha, 0.25) == pytest.approx(-4.25, abs=0.05 * 3)
        assert np.quantile(log_alpha, 0.75) == pytest.approx(-2.75, abs=0.05 * 3)

        # geometric midpoints: 2**6 for n_f, 2**7.5 for n_hu
        assert np.mean([hp.n_f < 64 for hp in samples]) == pytest.approx(0.5, abs=0.05)
        assert np.mean([hp.n_hu < 2**7.5 for hp in samples]) == pytest.approx(0.5, abs=0.05)

    def test_uniform_marginals(self, samples):
        assert np.mean([hp.d_r1 for hp in samples]) == pytest.approx(0.25, abs=0.01)
        assert np.mean([hp.d_r2 for hp in samples]) == pytest.approx(0.4, abs=0.01)

        n_b = np.bincount([hp.n_b for hp in samples], minlength=8)[3:]
        assert n_b / len(samples) == pytest.approx(np.full(5, 0.2), abs=0.02)
        w_s = [sum(hp.w_s == w for hp in samples) for w in range(60, 121, 10)]
        assert np.array(w_s) / len(samples) == pytest.approx(np.full(7, 1 / 7), abs=0.02)

    def test_unsampled_fields_keep_base(self):
        base = Hyperparams(h=3, gru_hidden=16)
        hp = DEFAULT_SEARCH_SPACE.sample(np.random.default_rng(1), base)

        assert hp.h == 3
        assert hp.gru_hidden == 16

    def test_empty_spaces(self):
        with pytest.raises(EmptySpace):
            SearchSpace(priors={}).check()
        with pytest.raises(EmptySpace):
            SearchSpace(priors={"n_b": Prior(PriorKind.INT_UNIFORM, 5, 3)}).check()
        with pytest.raises(EmptySpace):
            SearchSpace(priors={"n_b": Prior(PriorKind.CATEGORICAL)}).check()
        with pytest.raises(EmptySpace):
            SearchSpace(priors={"unknown": Prior(PriorKind.UNIFORM, 0, 1)}).check()

    def test_log_uniform_bounds(self):
        prior = Prior(PriorKind.LOG_UNIFORM, 1e-5, 1e-2)
        rng = np.random.default_rng(2)
        draws = [prior.sample(rng) for _ in range(500)]

        assert min(draws) >= 1e-5
        assert max(draws) <= 1e-2


class Test_RhythmParams:
    def test_defaults_are_valid(self):
        RhythmParams().check()

    def test_af_must_be_irregular(self):
        with pytest.raises(InvalidParams):
            RhythmParams(af=AfParams(cv=0.1)).check(Rhythm.AF)

    def test_afl_must_be_regular(self):
        with pytest.raises(InvalidParams):
            RhythmParams(afl=AflParams(rr=400, jitter_sd=10)).check(Rhythm.AFL)


class Test_RunConfig:
    def test_defaults(self):
        config = load_run_config()
        assert config == RunConfig()

    def test_yaml_file(self, tmp_path):
        path = write_file(
            tmp_path / "run.yml",
            "seed: 7\ngenerate:\n  n_recordings: 3\n  target_afb: 30\n",
        )
        config = load_run_config(path)

        assert config.seed == 7
        assert config.generate.n_recordings == 3
        assert config.generate.target_afbs == [30.0]

    def test_json_file(self, tmp_path):
        path = write_file(
            tmp_path / "run.json", json.dumps({"train": {"patience": 2}})
        )
        assert load_run_config(path).train.patience == 2

    def test_target_out_of_range(self, tmp_path):
        path = write_file(tmp_path / "run.yml", "generate:\n  target_afb: 150\n")
        with pytest.raises(ConfigValidationError):
            load_run_config(path)

    def test_unknown_keys(self, tmp_path):
        path = write_file(tmp_path / "run.yml", "generate:\n  recordings: 3\n")
        with pytest.raises(ConfigValidationError):
            load_run_config(path)

        path = write_file(tmp_path / "top.yml", "dataset: here\n")
        with pytest.raises(ConfigValidationError):
            load_run_config(path)

    def test_out_of_range_hyperparams(self, tmp_path):
        path = write_file(tmp_path / "run.yml", "hyperparams:\n  n_b: 2\n  w_s: 20\n")
        with pytest.raises(ConfigValidationError):
            load_run_config(path)

        config = load_run_config(path, allow_out_of_range=True)
        assert config.hyperparams.n_b == 2

    def test_unsupported_suffix(self, tmp_path):
        path = write_file(tmp_path / "run.toml", "seed = 1\n")
        with pytest.raises(ConfigValidationError):
            load_run_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_run_config(tmp_path / "absent.yml")

    def test_seed_precedence(self, tmp_path):
        only_generate = load_run_config(
            write_file(tmp_path / "a.yml", "generate:\n  seed: 5\n")
        )
        assert with_seed(only_generate).seed == 5

        both = load_run_config(
            write_file(tmp_path / "b.yml", "seed: 3\ngenerate:\n  seed: 5\n")
        )
        assert with_seed(both).seed == 3
        assert with_seed(both).generate.seed == 3

        overridden = with_seed(both, 11)
        assert overridden.seed == 11
        assert overridden.generate.seed == 11


# ------------------------------------------------------------------------------
# FIXTURES
# ------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def samples():
    rng = np.random.default_rng(0)
    return [DEFAULT_SEARCH_SPACE.sample(rng) for _ in range(SEARCH_SAMPLES)]


# ------------------------------------------------------------------------------
# HELPER FUNCTIONS
# ------------------------------------------------------------------------------


def write_file(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path
