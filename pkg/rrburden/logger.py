#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
The `rrburden` logger, and tabular summaries written through it.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import logging
from typing import Any, Iterable

# vendor libraries
import coloredlogs
from tabulate import tabulate

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

LOGGER_NAME = "rrburden"

LOGGER_FORMAT = "%(asctime)s %(levelname)s: %(message)s"

LOGGER_DATE_FORMAT = "%Y-%m-%dT%H:%M:%S%z"
""" ISO-8601 with offset. """

MISSING_VALUE = "n/a"
""" Rendered in tables for None cells, such as undefined metrics. """

# ------------------------------------------------------------------------------
# LOGGING
# ------------------------------------------------------------------------------

logger = logging.getLogger(LOGGER_NAME)
logger.propagate = False


def configure_default_logging():
    _install(logging.INFO)


def enable_debug_logging():
    _install(logging.DEBUG)
    logger.debug("Enabled debug logging")


def log_table(title: str, rows: Iterable[Iterable[Any]], **options):
    """Logs rows at INFO as an aligned table under a title.

    Args:
        title (str): heading line, without trailing colon
        rows (Iterable[Iterable[Any]]): table body
        **options: passed to `tabulate`, e.g. `headers` or `floatfmt`
    """
    options.setdefault("missingval", MISSING_VALUE)
    logger.info("%s:\n\n%s\n", title, tabulate(rows, **options))


def _install(level: int):
    coloredlogs.install(
        logger=logger, fmt=LOGGER_FORMAT, level=level, datefmt=LOGGER_DATE_FORMAT
    )


configure_default_logging()
