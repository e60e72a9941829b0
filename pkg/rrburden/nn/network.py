#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Layer containers: an ordered sequential stack and the residual block.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

# vendor libraries
import numpy as np

# local libraries
from rrburden.exceptions import MissingCache, ShapeMismatch
from rrburden.nn.layers import (
    BatchNorm,
    Cache,
    Conv1D,
    Grads,
    Layer,
    Mode,
    ReLU,
    Tensor,
)

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class Container(Layer):
    """A layer made of named child layers. Parameter names are dotted paths
    such as `block0.conv1.W`."""

    def children(self) -> Sequence[Tuple[str, Layer]]:
        raise NotImplementedError

    def named_layers(self, prefix: str = "") -> Iterator[Tuple[str, Layer]]:
        """Yields every primitive layer with its dotted path, depth first."""
        for name, child in self.children():
            path = f"{prefix}{name}"
            if isinstance(child, Container):
                yield from child.named_layers(f"{path}.")
            else:
                yield path, child

    def parameters(self) -> Dict[str, np.ndarray]:
        return {
            f"{path}.{key}": value
            for path, layer in self.named_layers()
            for key, value in layer.params.items()
        }

    def set_parameters(self, values: Dict[str, np.ndarray]):
        """Replaces parameter arrays by dotted name; shapes must match."""
        layers = dict(self.named_layers())
        for name, value in values.items():
            path, key = name.rsplit(".", 1)
            current = layers[path].params[key]
            if current.shape != value.shape:
                raise ShapeMismatch(
                    f"Parameter [{name}] has shape [{current.shape}], got [{value.shape}]"
                )
            layers[path].params[key] = np.array(value, dtype=np.float64)

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters().values()))

    def initialise(self, rng: np.random.Generator):
        for _, layer in self.named_layers():
            layer.initialise(rng)

    def config(self):
        return {}

    def __repr__(self):
        return "\n".join(f"{path}: {layer!r}" for path, layer in self.named_layers())


class Sequential(Container):
    """Processes input through each child layer in order."""

    def __init__(self, layers: Optional[List[Tuple[str, Layer]]] = None):
        super().__init__()
        self.layers: List[Tuple[str, Layer]] = list(layers or [])

    def add(self, name: str, layer: Layer) -> "Sequential":
        self.layers.append((name, layer))
        return self

    def children(self):
        return self.layers

    def __getitem__(self, name: str) -> Layer:
        return dict(self.layers)[name]

    def forward(self, x, mode=Mode.INFER, rng=None) -> Tuple[Tensor, Cache]:
        caches = []
        for _, layer in self.layers:
            x, cache = layer.forward(x, mode, rng)
            caches.append(cache)
        return x, {"layers": caches}

    def backward(self, cache, grad_out) -> Tuple[Tensor, Grads]:
        if not cache or len(cache.get("layers", [])) != len(self.layers):
            raise MissingCache("Sequential backward needs the cache of a forward call")
        grads: Grads = {}
        for (name, layer), layer_cache in zip(
            reversed(self.layers), reversed(cache["layers"])
        ):
            grad_out, layer_grads = layer.backward(layer_cache, grad_out)
            for key, value in layer_grads.items():
                grads[f"{name}.{key}"] = value
        return grad_out, grads


class ResidualBlock(Container):
    """Pre-activation residual block:

        BN → ReLU → Conv1D → BN → ReLU → Conv1D, plus a shortcut

    The shortcut is the identity when channel counts match and a 1x1
    convolution projection otherwise.
    """

    def __init__(self, in_channels: int, filters: int, filter_length: int):
        super().__init__()
        self.in_channels = in_channels
        self.filters = filters
        self.main = Sequential(
            [
                ("bn1", BatchNorm(in_channels)),
                ("relu1", ReLU()),
                ("conv1", Conv1D(in_channels, filters, filter_length)),
                ("bn2", BatchNorm(filters)),
                ("relu2", ReLU()),
                ("conv2", Conv1D(filters, filters, filter_length)),
            ]
        )
        self.shortcut = (
            Conv1D(in_channels, filters, 1) if in_channels != filters else None
        )

    def children(self):
        children = list(self.main.children())
        if self.shortcut is not None:
            children.append(("shortcut", self.shortcut))
        return children

    def forward(self, x, mode=Mode.INFER, rng=None):
        y, main_cache = self.main.forward(x, mode, rng)
        if self.shortcut is None:
            return y + x, {"main": main_cache, "shortcut": None}
        s, shortcut_cache = self.shortcut.forward(x, mode, rng)
        return y + s, {"main": main_cache, "shortcut": shortcut_cache}

    def backward(self, cache, grad_out):
        if not cache:
            raise MissingCache("ResidualBlock backward needs the cache of a forward call")
        d_x, grads = self.main.backward(cache["main"], grad_out)
        if self.shortcut is None:
            return d_x + grad_out, grads
        d_s, shortcut_grads = self.shortcut.backward(cache["shortcut"], grad_out)
        grads.update({f"shortcut.{k}": v for k, v in shortcut_grads.items()})
        return d_x + d_s, grads
