#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Unit tests for the neural network runtime.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import json
import math

# vendor libraries
import numpy as np
import pytest

# local libraries
from rrburden.arnet2.stage1 import Stage1Model
from rrburden.arnet2.training import FitSettings, TrainingHistory, fit, predict
from rrburden.exceptions import (
    InvalidHyperparam,
    MissingCache,
    ShapeMismatch,
    WeightsVersionMismatch,
)
from rrburden.models.hyperparams import Hyperparams
from rrburden.nn.gradcheck import gradient_check, relative_error
from rrburden.nn.layers import (
    GRU,
    BatchNorm,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    LayerKind,
    LayerSpec,
    MaxPool,
    Mode,
    ReLU,
    Sigmoid,
    as_tensor,
    backward,
    build_layer,
    forward,
)
from rrburden.nn.losses import weighted_bce
from rrburden.nn.network import ResidualBlock, Sequential
from rrburden.nn.optimizers import AdamState, adam_step
from rrburden.nn.weights_file import dumps_weights, loads_weights, save_weights, load_weights

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

MAX_RELATIVE_ERROR = 1e-4

# ------------------------------------------------------------------------------
# TESTS
# ------------------------------------------------------------------------------


class Test_Layers:
    def test_conv1d_delta_filter_is_identity(self):
        conv = Conv1D(1, 1, 3)
        conv.params["W"][1, 0, 0] = 1.0
        x = random_input((2, 7, 1))

        out, _ = forward(conv, x)
        assert np.allclose(out, x)

    def test_conv1d_even_filter_keeps_length(self):
        conv = initialised(Conv1D(2, 3, 4))
        out, _ = forward(conv, random_input((2, 9, 2)))
        assert out.shape == (2, 9, 3)

    def test_dense_zero_weights_outputs_bias(self):
        dense = Dense(4, 3)
        dense.params["b"] = np.array([1.0, -2.0, 0.5])

        out, _ = forward(dense, random_input((5, 4)))
        assert np.array_equal(out, np.tile([1.0, -2.0, 0.5], (5, 1)))

    def test_gru_zero_weights_keeps_zero_state(self):
        gru = GRU(3, 4, return_sequences=True)

        out, _ = forward(gru, random_input((2, 6, 3)))
        assert np.array_equal(out, np.zeros((2, 6, 4)))

    def test_maxpool_floors_odd_length(self):
        x = np.arange(7, dtype=np.float64).reshape(1, 7, 1)

        out, _ = forward(MaxPool(2), x)
        assert out[0, :, 0].tolist() == [1.0, 3.0, 5.0]

    def test_batchnorm_infer_uses_running_statistics(self):
        bn = BatchNorm(2)
        bn.buffers["running_var"] = np.full(2, 1.0 - bn.epsilon)
        x = random_input((3, 4, 2))

        out, _ = forward(bn, x, Mode.INFER)
        assert np.allclose(out, x)

    def test_batchnorm_train_updates_running_statistics(self):
        bn = BatchNorm(1)
        x = np.full((4, 5, 1), 2.0)

        forward(bn, x, Mode.TRAIN)
        assert bn.buffers["running_mean"][0] == pytest.approx(0.2)
        assert bn.buffers["running_var"][0] == pytest.approx(0.9)

    def test_dropout_infer_is_identity(self):
        x = random_input((10, 8))
        out, _ = forward(Dropout(0.5), x, Mode.INFER)
        assert np.array_equal(out, x)

    def test_dropout_train_preserves_expectation(self):
        x = np.ones((100_000, 1))
        out, _ = forward(Dropout(0.2), x, Mode.TRAIN, rng_seed=5)
        assert abs(out.mean() - 1.0) < 0.01

    def test_forward_is_deterministic(self):
        layer = initialised(Sequential([("dense", Dense(4, 3)), ("drop", Dropout(0.3))]))
        x = random_input((6, 4))

        first, _ = forward(layer, x, Mode.TRAIN, rng_seed=9)
        second, _ = forward(layer, x, Mode.TRAIN, rng_seed=9)
        assert np.array_equal(first, second)

    def test_shape_errors(self):
        with pytest.raises(ShapeMismatch):
            forward(Dense(4, 3), random_input((2, 5)))
        with pytest.raises(ShapeMismatch):
            forward(Conv1D(2, 3, 3), random_input((2, 5, 1)))
        with pytest.raises(ShapeMismatch):
            forward(MaxPool(2), random_input((2, 1, 1)))
        with pytest.raises(ShapeMismatch):
            as_tensor(np.zeros((0, 3)))

    def test_backward_needs_cache(self):
        with pytest.raises(MissingCache):
            backward(Dense(2, 2), None, np.zeros((1, 2)))
        with pytest.raises(MissingCache):
            backward(Sequential([("relu", ReLU())]), {}, np.zeros((1, 2)))

    def test_backward_rejects_wrong_gradient_shape(self):
        dense = initialised(Dense(3, 2))
        _, cache = forward(dense, random_input((4, 3)))
        with pytest.raises(ShapeMismatch):
            backward(dense, cache, np.zeros((4, 3)))

    def test_invalid_layer_specs(self):
        with pytest.raises(InvalidHyperparam):
            build_layer(LayerSpec(LayerKind.CONV1D, {"in_channels": 1, "filters": 2, "filter_length": 0}))
        with pytest.raises(InvalidHyperparam):
            build_layer(LayerSpec(LayerKind.DROPOUT, {"rate": 1.0}))
        with pytest.raises(InvalidHyperparam):
            build_layer(LayerSpec(LayerKind.MAX_POOL, {"size": 1}))

    def test_build_layer_from_spec(self):
        layer = build_layer(Conv1D(2, 4, 5).spec)
        assert isinstance(layer, Conv1D)
        assert layer.config() == {"in_channels": 2, "filters": 4, "filter_length": 5}


class Test_GradientCheck:
    @pytest.mark.parametrize(
        "layer, shape",
        [
            (Conv1D(2, 3, 3), (2, 6, 2)),
            (Conv1D(1, 2, 4), (2, 5, 1)),
            (Conv1D(2, 3, 1), (3, 4, 2)),
            (Dense(4, 3), (5, 4)),
            (GRU(3, 4), (2, 5, 3)),
            (GRU(2, 3, return_sequences=True), (2, 4, 2)),
        ],
    )
    def test_parametric_layers(self, layer, shape):
        assert_gradients(initialised(layer), random_input(shape))

    @pytest.mark.parametrize(
        "layer, shape",
        [
            (ReLU(), (3, 4)),
            (Sigmoid(), (3, 4)),
            (MaxPool(2), (2, 7, 3)),
            (Flatten(), (2, 3, 4)),
            (Dropout(0.5), (4, 6)),
        ],
    )
    def test_parameter_free_layers(self, layer, shape):
        assert_gradients(layer, random_input(shape))

    @pytest.mark.parametrize("mode", [Mode.TRAIN, Mode.INFER])
    def test_batchnorm(self, mode):
        bn = BatchNorm(3)
        bn.params["gamma"] = np.array([0.5, 1.5, -1.0])
        bn.params["beta"] = np.array([0.1, 0.0, -0.3])
        bn.buffers["running_mean"] = np.array([0.2, -0.1, 0.0])
        bn.buffers["running_var"] = np.array([1.3, 0.7, 2.0])
        assert_gradients(bn, random_input((4, 5, 3)), mode)

    def test_convolution_into_train_batchnorm(self):
        # batch statistics cancel the conv bias, its true gradient is exactly 0
        model = initialised(Sequential([("conv", Conv1D(2, 3, 3)), ("bn", BatchNorm(3))]))
        errors = assert_gradients(model, random_input((3, 6, 2)))

        assert {"conv.W", "conv.b", "bn.gamma", "bn.beta"} <= set(errors)

    def test_zero_gradient_against_rounding_noise(self):
        assert relative_error(np.zeros(2), np.array([-1.8e-10, 0.0])) == pytest.approx(1.8e-10)
        assert relative_error(np.zeros(2), np.array([1e-3, 0.0])) == pytest.approx(1.0)
        assert relative_error(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0

    def test_residual_block_identity_shortcut(self):
        assert_gradients(initialised(ResidualBlock(2, 2, 3)), random_input((3, 6, 2)))

    def test_residual_block_projection_shortcut(self):
        block = initialised(ResidualBlock(1, 3, 3))
        errors = assert_gradients(block, random_input((3, 6, 1)))
        assert "shortcut.W" in errors

    def test_stage1_model(self):
        hp = Hyperparams(w_s=12, n_b=2, n_f=2, f_l=3, n_hu=8, d_r1=0.2, d_r2=0.3)
        model = initialised(Stage1Model(hp))
        assert_gradients(model, random_input((4, 11, 1)))


class Test_Loss:
    def test_half_probability(self):
        loss, _ = weighted_bce(np.full(6, 0.5), np.array([0, 1, 0, 1, 1, 0]))
        assert loss == pytest.approx(math.log(2))

    def test_positive_weight(self):
        loss, _ = weighted_bce(np.array([0.5]), np.array([1]), w_pos=3.0)
        assert loss == pytest.approx(3 * math.log(2))

    def test_perfect_prediction(self):
        loss, _ = weighted_bce(np.array([1.0, 0.0]), np.array([1, 0]), w_pos=2.0)
        assert 0 <= loss <= -2.0 * math.log(1 - 1e-7) + 1e-12

    def test_gradient_matches_finite_differences(self):
        p = np.array([0.2, 0.7, 0.9, 0.4])
        y = np.array([0, 1, 1, 0])
        _, grad = weighted_bce(p, y, w_pos=2.5)

        eps = 1e-6
        for i in range(len(p)):
            plus, minus = p.copy(), p.copy()
            plus[i] += eps
            minus[i] -= eps
            numeric = (weighted_bce(plus, y, 2.5)[0] - weighted_bce(minus, y, 2.5)[0]) / (2 * eps)
            assert grad[i] == pytest.approx(numeric, rel=1e-5)


class Test_Adam:
    def test_zero_gradient_leaves_parameters(self):
        params = {"x": np.array([1.0, -2.0])}
        new, state = adam_step(params, {"x": np.zeros(2)}, AdamState.create(params))

        assert np.array_equal(new["x"], params["x"])
        assert state.step == 1

    def test_first_step_moves_by_learning_rate(self):
        params = {"x": np.array([1.0])}
        state = AdamState.create(params, lr=0.01)

        new, _ = adam_step(params, {"x": np.array([-3.0])}, state)
        assert new["x"][0] - 1.0 == pytest.approx(0.01, rel=1e-6)

    def test_descends_on_square(self):
        params = {"x": np.array([1.0])}
        state = AdamState.create(params, lr=0.01)

        previous = 1.0
        for _ in range(3):
            params, state = adam_step(params, {"x": 2 * params["x"]}, state)
            assert params["x"][0] < previous
            previous = params["x"][0]

    def test_shape_mismatch(self):
        params = {"x": np.zeros(2)}
        with pytest.raises(ShapeMismatch):
            adam_step(params, {"x": np.zeros(3)}, AdamState.create(params))


class Test_Fit:
    def test_training_lowers_loss(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((200, 2))
        y = (x[:, 0] + x[:, 1] > 0).astype(np.float64)
        network = initialised(Sequential([("dense", Dense(2, 1)), ("sigmoid", Sigmoid())]))
        history = TrainingHistory()

        fit(
            network,
            x,
            y,
            FitSettings(lr=0.05, batch_size=16, max_epochs=20),
            1.0,
            np.random.default_rng(1),
            "toy",
            history,
        )

        records = history.for_stage("toy")
        assert records[0].epoch == 0
        assert len(records) >= 2
        final, _ = weighted_bce(predict(network, x), y)
        assert final < records[0].loss


class Test_WeightsFile:
    def test_round_trip(self, tmp_path):
        source = initialised(ResidualBlock(1, 2, 3), seed=1)
        source.children()[0][1].buffers["running_mean"] = np.array([0.25])
        target = initialised(ResidualBlock(1, 2, 3), seed=2)

        save_weights(source, tmp_path / "block.weights.json")
        load_weights(target, tmp_path / "block.weights.json")

        for name, value in source.parameters().items():
            assert np.array_equal(target.parameters()[name], value)
        assert target.children()[0][1].buffers["running_mean"][0] == 0.25

    def test_version_mismatch(self):
        block = initialised(ResidualBlock(1, 2, 3))
        document = json.loads(dumps_weights(block))
        document["version"] = "rrburden-weights-v0"

        with pytest.raises(WeightsVersionMismatch):
            loads_weights(block, json.dumps(document))

    def test_architecture_mismatch(self):
        text = dumps_weights(initialised(ResidualBlock(1, 2, 3)))
        with pytest.raises(ShapeMismatch):
            loads_weights(initialised(ResidualBlock(1, 4, 3)), text)


# ------------------------------------------------------------------------------
# HELPER FUNCTIONS
# ------------------------------------------------------------------------------


def random_input(shape, seed: int = 42) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(shape)


def initialised(layer, seed: int = 7):
    layer.initialise(np.random.default_rng(seed))
    return layer


def assert_gradients(layer, x, mode: Mode = Mode.TRAIN):
    errors = gradient_check(layer, x, mode)
    for name, error in errors.items():
        assert error < MAX_RELATIVE_ERROR, f"[{name}] relative error [{error}]"
    return errors
