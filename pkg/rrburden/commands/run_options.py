#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Options every subcommand takes, and the context built from them.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path
from typing import Optional

# vendor libraries
import click

# local libraries
from rrburden.logger import log_table
from rrburden.models.cli_context import CliContext
from rrburden.models.configuration import RunConfig, load_run_config

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def run_options(default_out: str):
    """Adds `--config`, `--seed`, `--out`, `--threads` and
    `--allow-out-of-range` to a command."""

    def decorator(func):
        options = [
            click.option(
                "--config",
                "-c",
                "config_file",
                help="Run configuration file (YAML or JSON).",
                type=click.Path(dir_okay=False, path_type=Path),
            ),
            click.option(
                "--seed",
                help="Master seed. Overrides the seed in the configuration file.",
                type=click.IntRange(0, 2**64 - 1),
            ),
            click.option(
                "--out",
                "-o",
                "output_dir",
                help=f"Output directory. Defaults to `{default_out}`.",
                type=click.Path(file_okay=False, path_type=Path),
                default=default_out,
            ),
            click.option(
                "--threads",
                help="Recordings processed concurrently.",
                type=click.IntRange(min=1),
                default=1,
            ),
            click.option(
                "--allow-out-of-range",
                help="Accept hyperparameters outside the search space.",
                is_flag=True,
            ),
        ]
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


def create_cli_context(
    ctx: click.Context,
    config_file: Optional[Path],
    seed: Optional[int],
    output_dir: Path,
    threads: int,
    allow_out_of_range: bool,
) -> CliContext:
    """Loads the configuration and applies command line overrides.

    The master seed is `--seed` when given, else the top level `seed` of the
    configuration file when set, else `generate.seed`. Whichever wins is
    written to both places so every stage derives from one value.
    """
    config = load_run_config(config_file, allow_out_of_range)
    config = with_seed(config, seed)
    cli_context = CliContext(
        config=config,
        config_file=config_file,
        output_dir=output_dir,
        threads=threads,
        debug=bool((ctx.obj or {}).get("debug", False)),
    )
    log_table(
        "Run context",
        [
            ["Configuration", config_file or "(defaults)"],
            ["Seed", cli_context.seed],
            ["Output directory", output_dir],
            ["Threads", threads],
        ],
        colalign=("right",),
    )
    return cli_context


def with_seed(config: RunConfig, seed: Optional[int] = None) -> RunConfig:
    if seed is None:
        seed = config.seed if "seed" in config.model_fields_set else config.generate.seed
    return config.model_copy(
        update={"seed": seed, "generate": config.generate.model_copy(update={"seed": seed})}
    )
