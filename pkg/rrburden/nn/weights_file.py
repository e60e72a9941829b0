#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Serialises layer parameters to the self-describing "rrburden-weights-v1" text
format and back.

The document is JSON: a version field plus, per primitive layer, its dotted
name, kind, configuration and row-major parameter/buffer values. Floats are
written with their shortest round-trip representation so that
dump(load(dump(x))) is byte identical to dump(x).
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import json
from pathlib import Path
from typing import Any, Dict

# vendor libraries
import jsonschema
import numpy as np

# local libraries
from rrburden.exceptions import IoError, ShapeMismatch, WeightsVersionMismatch
from rrburden.functions import atomic_write_text
from rrburden.logger import logger
from rrburden.nn.network import Container

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

WEIGHTS_VERSION = "rrburden-weights-v1"
""" Version tag written to, and required from, every weights file. """

ARRAY_SCHEMA = {
    "type": "object",
    "required": ["shape", "values"],
    "additionalProperties": False,
    "properties": {
        "shape": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "values": {"type": "array", "items": {"type": "number"}},
    },
}

WEIGHTS_SCHEMA = {
    "type": "object",
    "required": ["version", "layers"],
    "properties": {
        "version": {"type": "string"},
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind", "config", "params", "buffers"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"type": "string"},
                    "config": {"type": "object"},
                    "params": {"type": "object", "additionalProperties": ARRAY_SCHEMA},
                    "buffers": {"type": "object", "additionalProperties": ARRAY_SCHEMA},
                },
            },
        },
    },
}
""" JSON schema every weights document must satisfy. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def dumps_weights(network: Container) -> str:
    """Renders a container's parameters and buffers as a weights document."""
    layers = []
    for name, layer in network.named_layers():
        layers.append(
            {
                "name": name,
                "kind": layer.kind.value,
                "config": layer.config(),
                "params": {k: _encode(v) for k, v in layer.params.items()},
                "buffers": {k: _encode(v) for k, v in layer.buffers.items()},
            }
        )
    document = {"version": WEIGHTS_VERSION, "layers": layers}
    return json.dumps(document, indent=1) + "\n"


def loads_weights(network: Container, text: str):
    """Installs parameters and buffers from a weights document into a container
    with the same architecture.

    Raises:
        WeightsVersionMismatch: the document is not "rrburden-weights-v1"
        ShapeMismatch: layer names, kinds or shapes differ from the container
    """
    try:
        document = json.loads(text)
        jsonschema.validate(document, WEIGHTS_SCHEMA)
    except (json.JSONDecodeError, jsonschema.ValidationError) as ex:
        raise ShapeMismatch(f"Malformed weights document: {ex}") from ex

    version = document["version"]
    if version != WEIGHTS_VERSION:
        raise WeightsVersionMismatch(
            f"Weights version [{version}] is not supported. Expected [{WEIGHTS_VERSION}]."
        )

    layers = dict(network.named_layers())
    entries = document["layers"]
    if [e["name"] for e in entries] != list(layers):
        raise ShapeMismatch(
            f"Weights layers [{[e['name'] for e in entries]}] do not match network layers [{list(layers)}]"
        )
    for entry in entries:
        layer = layers[entry["name"]]
        if entry["kind"] != layer.kind.value or entry["config"] != layer.config():
            raise ShapeMismatch(
                f"Layer [{entry['name']}] is [{entry['kind']} {entry['config']}] in weights but [{layer!r}] in network"
            )
        layer.params = _decode_all(entry["name"], entry["params"], layer.params)
        layer.buffers = _decode_all(entry["name"], entry["buffers"], layer.buffers)


def save_weights(network: Container, path: Path):
    atomic_write_text(Path(path), dumps_weights(network))
    logger.debug("Saved [%d] parameters to [%s]", network.parameter_count(), path)


def load_weights(network: Container, path: Path):
    path = Path(path)
    if not path.is_file():
        raise IoError(f"Weights file [{path}] does not exist")
    loads_weights(network, path.read_text(encoding="utf-8"))
    logger.debug("Loaded weights from [%s]", path)


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _encode(array: np.ndarray) -> Dict[str, Any]:
    array = np.asarray(array, dtype=np.float64)
    return {"shape": list(array.shape), "values": array.ravel().tolist()}


def _decode_all(name: str, encoded: Dict[str, Any], current: Dict[str, np.ndarray]):
    if set(encoded) != set(current):
        raise ShapeMismatch(
            f"Layer [{name}] holds [{sorted(encoded)}] in weights but [{sorted(current)}] in network"
        )
    decoded = {}
    for key, value in encoded.items():
        shape = tuple(value["shape"])
        if shape != current[key].shape or len(value["values"]) != int(np.prod(shape)):
            raise ShapeMismatch(
                f"[{name}.{key}] has shape [{shape}] in weights but [{current[key].shape}] in network"
            )
        decoded[key] = np.array(value["values"], dtype=np.float64).reshape(shape)
    return decoded
