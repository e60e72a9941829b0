#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Common functions.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

# vendor libraries
import ruamel.yaml

# local libraries
from rrburden.exceptions import ConfigValidationError, IoError
from rrburden.logger import logger

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

EXIT_OK = 0
""" Exit code on success. """

EXIT_VALIDATION_ERROR = 2
""" Exit code when inputs or configuration are invalid. """

EXIT_RUNTIME_ERROR = 3
""" Exit code when valid inputs could not be processed. """

YAML_LOADER = ruamel.yaml.YAML(typ="safe")
FILETYPE_LOADERS = {
    ".json": json.load,
    ".jsn": json.load,
    ".yaml": YAML_LOADER.load,
    ".yml": YAML_LOADER.load,
}
""" The supported filetypes for configuration files. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def error_and_exit(message: str, exit_code: int = EXIT_RUNTIME_ERROR):
    """Exit with an error message

    Args:
        message (str): the message to log before exiting
        exit_code (int): the process exit code
    """
    logger.error(message)
    # Raise a SystemExit exception with another exception with the error message
    # as the code so we can capture it externally.
    raise SystemExit(exit_code) from SystemExit(message)


def print_header(title):
    logger.info(
        f"""
{"=" *60}
%s
{"=" *60}""",
        title.upper(),
    )


def print_subheader(title):
    logger.info(
        f"""
{"=" *40}
%s
{"=" *40}""",
        title.upper(),
    )


def derive_seed(master: int, *components: Union[str, int]) -> int:
    """Derives a child seed from a master seed and a path of components.

    The derivation is the first 8 bytes (big endian) of the SHA-256 digest of
    `"<master>/<component>/..."`, masked to 63 bits so it is a valid numpy seed.

    Args:
        master (int): the master seed
        components (Union[str, int]): names/indices identifying the consumer

    Returns:
        int: the derived seed
    """
    key = "/".join(str(x) for x in (master, *components))
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFF_FFFF_FFFF_FFFF


def atomic_write_text(path: Path, text: str):
    """Writes text to a file by writing a sibling temporary file then renaming it.

    Args:
        path (Path): the destination file
        text (str): the content to write
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as tmp_file:
            tmp_file.write(text)
        os.replace(tmp_name, path)
    except OSError as ex:
        raise IoError(f"Could not write [{path}]: {ex}") from ex
    logger.debug("Wrote [%s]", path)


def load_structured_file(path: Path) -> Dict[str, Any]:
    """Loads a YAML or JSON file into a dict, choosing the loader by suffix.

    Args:
        path (Path): the file to load

    Raises:
        IoError: the file does not exist or cannot be read
        ConfigValidationError: the suffix is unsupported or content is not a mapping

    Returns:
        Dict[str, Any]: the parsed content
    """
    path = Path(path)
    loader = FILETYPE_LOADERS.get(path.suffix)
    if loader is None:
        raise ConfigValidationError(
            f"Unsupported file type [{path.suffix}] for [{path}]. Must be one of {list(FILETYPE_LOADERS)}."
        )
    if not path.is_file():
        raise IoError(f"File [{path}] does not exist")
    with path.open("r", encoding="utf-8") as input_file:
        data = loader(input_file)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigValidationError(f"Content of [{path}] must be a mapping")
    return data
