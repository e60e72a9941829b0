#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Dense-tensor neural network layers with exact manual backpropagation.

Every layer exposes the same contract:

    output, cache = layer.forward(input, mode, rng)
    grad_input, param_grads = layer.backward(cache, grad_output)

Tensors are 64-bit numpy arrays. Sequence layers use the (batch, length,
channels) layout. Forward is deterministic given parameters, input, mode and
the random generator state; the cache holds everything backward needs.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Any, Dict, Optional, Tuple

# vendor libraries
import numpy as np
from dataclasses_json import dataclass_json
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

# local libraries
from rrburden.exceptions import InvalidHyperparam, MissingCache, ShapeMismatch

# ------------------------------------------------------------------------------
# TYPES
# ------------------------------------------------------------------------------

Tensor = np.ndarray
""" Dense 64-bit array. product(shape) == size and every dimension is positive. """

Cache = Dict[str, Any]
Grads = Dict[str, np.ndarray]


@unique
class Mode(str, Enum):
    """Selects BatchNorm statistics source and Dropout activity."""

    TRAIN = "train"
    INFER = "infer"


@unique
class LayerKind(str, Enum):
    CONV1D = "Conv1D"
    BATCH_NORM = "BatchNorm"
    RELU = "ReLU"
    MAX_POOL = "MaxPool"
    DENSE = "Dense"
    DROPOUT = "Dropout"
    FLATTEN = "Flatten"
    GRU = "GRU"
    SIGMOID = "Sigmoid"


@dataclass_json
@dataclass(frozen=True)
class LayerSpec:
    """Kind plus kind-specific configuration of a primitive layer."""

    kind: LayerKind
    config: Dict[str, Any] = field(default_factory=dict)

    def validate(self):
        """Checks kind-specific constraints.

        Raises:
            InvalidHyperparam: a constraint is violated
        """
        config = self.config
        if self.kind == LayerKind.CONV1D and config.get("filter_length", 0) < 1:
            raise InvalidHyperparam(
                f"Conv1D filter length [{config.get('filter_length')}] must be at least 1"
            )
        if self.kind == LayerKind.DROPOUT and not 0 <= config.get("rate", -1) < 1:
            raise InvalidHyperparam(
                f"Dropout rate [{config.get('rate')}] must lie in [0, 1)"
            )
        if self.kind == LayerKind.MAX_POOL and config.get("size", 0) < 2:
            raise InvalidHyperparam(
                f"MaxPool size [{config.get('size')}] must be at least 2"
            )
        for key in ("in_channels", "filters", "units", "in_features", "channels"):
            if key in config and config[key] < 1:
                raise InvalidHyperparam(
                    f"{self.kind.value} [{key}] must be positive, got [{config[key]}]"
                )


# ------------------------------------------------------------------------------
# FUNCTIONS
# ------------------------------------------------------------------------------


def as_tensor(x) -> Tensor:
    """Converts to a contiguous float64 array with strictly positive dims."""
    tensor = np.ascontiguousarray(x, dtype=np.float64)
    if tensor.ndim == 0 or any(d <= 0 for d in tensor.shape):
        raise ShapeMismatch(f"Tensor shape [{tensor.shape}] must have positive dims")
    return tensor


def forward(
    layer: "Layer", x: Tensor, mode: Mode = Mode.INFER, rng_seed: int = 0
) -> Tuple[Tensor, Cache]:
    """Runs a layer forward with a generator seeded from `rng_seed`."""
    return layer.forward(as_tensor(x), Mode(mode), np.random.default_rng(rng_seed))


def backward(layer: "Layer", cache: Cache, grad_out: Tensor) -> Tuple[Tensor, Grads]:
    """Backpropagates through a layer using the cache of a matching forward call."""
    return layer.backward(cache, np.asarray(grad_out, dtype=np.float64))


def build_layer(spec: LayerSpec) -> "Layer":
    """Instantiates an (uninitialised) primitive layer from its spec."""
    spec.validate()
    return LAYER_TYPES[LayerKind(spec.kind)](**spec.config)


def he_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def orthogonal(rng: np.random.Generator, size: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((size, size)))
    # diag(r) signs folded into q
    return q * np.sign(np.diag(r))


# ------------------------------------------------------------------------------
# BASE CLASS
# ------------------------------------------------------------------------------


class Layer:
    """Base class for primitive layers."""

    kind: LayerKind = None

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        """ Trainable parameters. """
        self.buffers: Dict[str, np.ndarray] = {}
        """ Non-trainable state (BatchNorm running statistics). """

    @property
    def spec(self) -> LayerSpec:
        return LayerSpec(kind=self.kind, config=self.config())

    def config(self) -> Dict[str, Any]:
        return {}

    def initialise(self, rng: np.random.Generator):
        """Draws fresh parameter values. No-op for parameter-free layers."""

    def forward(
        self, x: Tensor, mode: Mode = Mode.INFER, rng: np.random.Generator = None
    ) -> Tuple[Tensor, Cache]:
        raise NotImplementedError

    def backward(self, cache: Cache, grad_out: Tensor) -> Tuple[Tensor, Grads]:
        raise NotImplementedError

    def _check_cache(self, cache: Optional[Cache], grad_out: Tensor, shape):
        if not cache:
            raise MissingCache(
                f"{self.kind.value} backward needs the cache of a forward call"
            )
        if grad_out.shape != tuple(shape):
            raise ShapeMismatch(
                f"{self.kind.value} gradient shape [{grad_out.shape}] does not match output shape [{tuple(shape)}]"
            )

    def __repr__(self):
        return f"{self.kind.value}({self.config()})"


# ------------------------------------------------------------------------------
# LAYERS
# ------------------------------------------------------------------------------


class Conv1D(Layer):
    """Stride 1 convolution with "same" zero padding over (batch, length, channels)."""

    kind = LayerKind.CONV1D

    def __init__(self, in_channels: int, filters: int, filter_length: int):
        super().__init__()
        self.in_channels = in_channels
        self.filters = filters
        self.filter_length = filter_length
        self.spec.validate()
        self.params = {
            "W": np.zeros((filter_length, in_channels, filters)),
            "b": np.zeros(filters),
        }

    def config(self):
        return {
            "in_channels": self.in_channels,
            "filters": self.filters,
            "filter_length": self.filter_length,
        }

    def initialise(self, rng):
        fan_in = self.filter_length * self.in_channels
        self.params["W"] = he_uniform(rng, self.params["W"].shape, fan_in)
        self.params["b"] = np.zeros(self.filters)

    @property
    def _padding(self) -> Tuple[int, int]:
        left = (self.filter_length - 1) // 2
        return left, self.filter_length - 1 - left

    def forward(self, x, mode=Mode.INFER, rng=None):
        if x.ndim != 3 or x.shape[2] != self.in_channels:
            raise ShapeMismatch(
                f"Conv1D expects (batch, length, {self.in_channels}) input, got [{x.shape}]"
            )
        xp = np.pad(x, ((0, 0), self._padding, (0, 0)))
        # (batch, length, channels, filter_length)
        cols = sliding_window_view(xp, self.filter_length, axis=1)
        kernel = self.params["W"].transpose(1, 0, 2)
        out = np.tensordot(cols, kernel, axes=([2, 3], [0, 1])) + self.params["b"]
        return out, {"cols": cols, "x_shape": x.shape}

    def backward(self, cache, grad_out):
        x_shape = cache["x_shape"] if cache else None
        out_shape = (*x_shape[:2], self.filters) if x_shape else None
        self._check_cache(cache, grad_out, out_shape)
        cols = cache["cols"]
        batch, length, _ = x_shape
        kernel = self.params["W"].transpose(1, 0, 2)

        d_kernel = np.tensordot(cols, grad_out, axes=([0, 1], [0, 1]))
        grads = {"W": d_kernel.transpose(1, 0, 2), "b": grad_out.sum(axis=(0, 1))}

        d_cols = np.tensordot(grad_out, kernel, axes=([2], [2]))
        d_xp = np.zeros((batch, length + self.filter_length - 1, self.in_channels))
        for k in range(self.filter_length):
            d_xp[:, k : k + length, :] += d_cols[..., k]
        left, _ = self._padding
        return d_xp[:, left : left + length, :], grads


class BatchNorm(Layer):
    """Per-channel normalisation over every axis but the last.

    Train mode normalises with batch statistics and refreshes the running
    statistics buffers (momentum 0.9, biased variance). Infer mode only reads
    the running statistics.
    """

    kind = LayerKind.BATCH_NORM

    def __init__(self, channels: int, momentum: float = 0.9, epsilon: float = 1e-5):
        super().__init__()
        self.channels = channels
        self.momentum = momentum
        self.epsilon = epsilon
        self.spec.validate()
        self.params = {"gamma": np.ones(channels), "beta": np.zeros(channels)}
        self.buffers = {
            "running_mean": np.zeros(channels),
            "running_var": np.ones(channels),
        }

    def config(self):
        return {
            "channels": self.channels,
            "momentum": self.momentum,
            "epsilon": self.epsilon,
        }

    def initialise(self, rng):
        self.params = {
            "gamma": np.ones(self.channels),
            "beta": np.zeros(self.channels),
        }
        self.buffers = {
            "running_mean": np.zeros(self.channels),
            "running_var": np.ones(self.channels),
        }

    def forward(self, x, mode=Mode.INFER, rng=None):
        if x.shape[-1] != self.channels:
            raise ShapeMismatch(
                f"BatchNorm expects [{self.channels}] channels, got input [{x.shape}]"
            )
        axes = tuple(range(x.ndim - 1))
        if mode == Mode.TRAIN:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            m = self.momentum
            self.buffers["running_mean"] = m * self.buffers["running_mean"] + (1 - m) * mean
            self.buffers["running_var"] = m * self.buffers["running_var"] + (1 - m) * var
        else:
            mean = self.buffers["running_mean"]
            var = self.buffers["running_var"]
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        x_hat = (x - mean) * inv_std
        out = self.params["gamma"] * x_hat + self.params["beta"]
        return out, {"x_hat": x_hat, "inv_std": inv_std, "mode": mode}

    def backward(self, cache, grad_out):
        self._check_cache(cache, grad_out, cache["x_hat"].shape if cache else None)
        x_hat, inv_std = cache["x_hat"], cache["inv_std"]
        axes = tuple(range(x_hat.ndim - 1))
        grads = {
            "gamma": (grad_out * x_hat).sum(axis=axes),
            "beta": grad_out.sum(axis=axes),
        }
        d_x_hat = grad_out * self.params["gamma"]
        if cache["mode"] == Mode.INFER:
            return d_x_hat * inv_std, grads

        n = x_hat.size // self.channels
        d_x = (
            inv_std
            / n
            * (
                n * d_x_hat
                - d_x_hat.sum(axis=axes)
                - x_hat * (d_x_hat * x_hat).sum(axis=axes)
            )
        )
        return d_x, grads


class ReLU(Layer):
    kind = LayerKind.RELU

    def forward(self, x, mode=Mode.INFER, rng=None):
        mask = x > 0
        return x * mask, {"mask": mask}

    def backward(self, cache, grad_out):
        self._check_cache(cache, grad_out, cache["mask"].shape if cache else None)
        return grad_out * cache["mask"], {}


class Sigmoid(Layer):
    kind = LayerKind.SIGMOID

    def forward(self, x, mode=Mode.INFER, rng=None):
        out = expit(x)
        return out, {"out": out}

    def backward(self, cache, grad_out):
        self._check_cache(cache, grad_out, cache["out"].shape if cache else None)
        out = cache["out"]
        return grad_out * out * (1.0 - out), {}


class MaxPool(Layer):
    """Non-overlapping temporal max pooling with floor semantics."""

    kind = LayerKind.MAX_POOL

    def __init__(self, size: int = 2):
        super().__init__()
        self.size = size
        self.spec.validate()

    def config(self):
        return {"size": self.size}

    def forward(self, x, mode=Mode.INFER, rng=None):
        if x.ndim != 3 or x.shape[1] < self.size:
            raise ShapeMismatch(
                f"MaxPool({self.size}) needs (batch, length >= {self.size}, channels) input, got [{x.shape}]"
            )
        batch, length, channels = x.shape
        out_length = length // self.size
        windows = x[:, : out_length * self.size, :].reshape(
            batch, out_length, self.size, channels
        )
        argmax = windows.argmax(axis=2)
        out = np.take_along_axis(windows, argmax[:, :, None, :], axis=2)[:, :, 0, :]
        return out, {"argmax": argmax, "x_shape": x.shape}

    def backward(self, cache, grad_out):
        x_shape = cache["x_shape"] if cache else None
        out_shape = cache["argmax"].shape if cache else None
        self._check_cache(cache, grad_out, out_shape)
        batch, length, channels = x_shape
        out_length = length // self.size
        d_windows = np.zeros((batch, out_length, self.size, channels))
        np.put_along_axis(
            d_windows, cache["argmax"][:, :, None, :], grad_out[:, :, None, :], axis=2
        )
        d_x = np.zeros(x_shape)
        d_x[:, : out_length * self.size, :] = d_windows.reshape(
            batch, out_length * self.size, channels
        )
        return d_x, {}


class Dropout(Layer):
    """Inverted dropout: scaled at train time, identity at inference."""

    kind = LayerKind.DROPOUT

    def __init__(self, rate: float = 0.0):
        super().__init__()
        self.rate = rate
        self.spec.validate()

    def config(self):
        return {"rate": self.rate}

    def forward(self, x, mode=Mode.INFER, rng=None):
        if mode == Mode.INFER or self.rate == 0:
            return x, {"mask": None, "shape": x.shape}
        if rng is None:
            rng = np.random.default_rng(0)
        mask = (rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        return x * mask, {"mask": mask, "shape": x.shape}

    def backward(self, cache, grad_out):
        self._check_cache(cache, grad_out, cache["shape"] if cache else None)
        if cache["mask"] is None:
            return grad_out, {}
        return grad_out * cache["mask"], {}


class Flatten(Layer):
    kind = LayerKind.FLATTEN

    def forward(self, x, mode=Mode.INFER, rng=None):
        return x.reshape(x.shape[0], -1), {"x_shape": x.shape}

    def backward(self, cache, grad_out):
        x_shape = cache["x_shape"] if cache else None
        out_shape = (x_shape[0], int(np.prod(x_shape[1:]))) if x_shape else None
        self._check_cache(cache, grad_out, out_shape)
        return grad_out.reshape(x_shape), {}


class Dense(Layer):
    """Affine map y = xW + b over (batch, features)."""

    kind = LayerKind.DENSE

    def __init__(self, in_features: int, units: int):
        super().__init__()
        self.in_features = in_features
        self.units = units
        self.spec.validate()
        self.params = {"W": np.zeros((in_features, units)), "b": np.zeros(units)}

    def config(self):
        return {"in_features": self.in_features, "units": self.units}

    def initialise(self, rng):
        self.params["W"] = he_uniform(rng, self.params["W"].shape, self.in_features)
        self.params["b"] = np.zeros(self.units)

    def forward(self, x, mode=Mode.INFER, rng=None):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatch(
                f"Dense expects (batch, {self.in_features}) input, got [{x.shape}]"
            )
        return x @ self.params["W"] + self.params["b"], {"x": x}

    def backward(self, cache, grad_out):
        x = cache["x"] if cache else None
        self._check_cache(
            cache, grad_out, (x.shape[0], self.units) if x is not None else None
        )
        grads = {"W": x.T @ grad_out, "b": grad_out.sum(axis=0)}
        return grad_out @ self.params["W"].T, grads


class GRU(Layer):
    """Gated recurrent unit over (batch, time, features), zero initial state.

    Gates are stacked in the order [update z, reset r, candidate c]:

        z = σ(x Wz + h Uz + bz)
        r = σ(x Wr + h Ur + br)
        c = tanh(x Wc + r ⊙ (h Uc) + bc)
        h' = z ⊙ h + (1 - z) ⊙ c

    Returns the final hidden state, or every hidden state when
    `return_sequences` is set.
    """

    kind = LayerKind.GRU

    def __init__(self, input_size: int, units: int, return_sequences: bool = False):
        super().__init__()
        self.input_size = input_size
        self.units = units
        self.return_sequences = return_sequences
        self.spec.validate()
        self.params = {
            "W": np.zeros((input_size, 3 * units)),
            "U": np.zeros((units, 3 * units)),
            "b": np.zeros(3 * units),
        }

    def config(self):
        return {
            "input_size": self.input_size,
            "units": self.units,
            "return_sequences": self.return_sequences,
        }

    def initialise(self, rng):
        h = self.units
        self.params["W"] = glorot_uniform(
            rng, (self.input_size, 3 * h), self.input_size, h
        )
        self.params["U"] = np.concatenate([orthogonal(rng, h) for _ in range(3)], axis=1)
        self.params["b"] = np.zeros(3 * h)

    def forward(self, x, mode=Mode.INFER, rng=None):
        if x.ndim != 3 or x.shape[2] != self.input_size:
            raise ShapeMismatch(
                f"GRU expects (batch, time, {self.input_size}) input, got [{x.shape}]"
            )
        batch, steps, _ = x.shape
        h_units = self.units
        W, U = self.params["W"], self.params["U"]
        xw = x @ W + self.params["b"]

        h = np.zeros((batch, h_units))
        hs, steps_cache = [], []
        for t in range(steps):
            hu = h @ U
            z = expit(xw[:, t, :h_units] + hu[:, :h_units])
            r = expit(xw[:, t, h_units : 2 * h_units] + hu[:, h_units : 2 * h_units])
            hu_c = hu[:, 2 * h_units :]
            c = np.tanh(xw[:, t, 2 * h_units :] + r * hu_c)
            steps_cache.append((h, z, r, c, hu_c))
            h = z * h + (1.0 - z) * c
            hs.append(h)

        out = np.stack(hs, axis=1) if self.return_sequences else h
        return out, {"x": x, "steps": steps_cache, "out_shape": out.shape}

    def backward(self, cache, grad_out):
        self._check_cache(cache, grad_out, cache["out_shape"] if cache else None)
        x, steps_cache = cache["x"], cache["steps"]
        batch, steps, _ = x.shape
        U = self.params["U"]
        h_units = self.units

        d_U = np.zeros_like(U)
        d_xw = np.zeros((batch, steps, 3 * h_units))
        d_h_next = np.zeros((batch, h_units))
        for t in reversed(range(steps)):
            h_prev, z, r, c, hu_c = steps_cache[t]
            if self.return_sequences:
                d_h = d_h_next + grad_out[:, t, :]
            else:
                d_h = d_h_next + (grad_out if t == steps - 1 else 0.0)

            d_z = d_h * (h_prev - c)
            d_c = d_h * (1.0 - z)
            d_a_c = d_c * (1.0 - c**2)
            d_r = d_a_c * hu_c
            d_a_z = d_z * z * (1.0 - z)
            d_a_r = d_r * r * (1.0 - r)

            d_xw[:, t, :] = np.concatenate([d_a_z, d_a_r, d_a_c], axis=1)
            d_hu = np.concatenate([d_a_z, d_a_r, d_a_c * r], axis=1)
            d_U += h_prev.T @ d_hu
            d_h_next = d_h * z + d_hu @ U.T

        grads = {
            "W": np.tensordot(x, d_xw, axes=([0, 1], [0, 1])),
            "U": d_U,
            "b": d_xw.sum(axis=(0, 1)),
        }
        return d_xw @ self.params["W"].T, grads


LAYER_TYPES = {
    LayerKind.CONV1D: Conv1D,
    LayerKind.BATCH_NORM: BatchNorm,
    LayerKind.RELU: ReLU,
    LayerKind.MAX_POOL: MaxPool,
    LayerKind.DENSE: Dense,
    LayerKind.DROPOUT: Dropout,
    LayerKind.FLATTEN: Flatten,
    LayerKind.GRU: GRU,
    LayerKind.SIGMOID: Sigmoid,
}
""" Primitive layer class per kind. """
