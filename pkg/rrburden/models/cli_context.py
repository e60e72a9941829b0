#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Outlines the CLI context.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path
from typing import NamedTuple, Optional

# local libraries
from rrburden.models.configuration import RunConfig

# ------------------------------------------------------------------------------
# PUBLIC CLASSES
# ------------------------------------------------------------------------------


class CliContext(NamedTuple):
    """Shared context from a run of the CLI."""

    config: RunConfig
    """ Validated run configuration, with command line overrides applied. """

    config_file: Optional[Path]
    """ File the configuration was read from. None when defaults are used. """

    output_dir: Path
    """ Directory outputs are written to. """

    threads: int
    """ Worker threads for per-recording parallelism. """

    debug: bool
    """ True to enable debug level logging. """

    @property
    def seed(self) -> int:
        return self.config.seed
