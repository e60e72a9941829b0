#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Random hyperparameter search with recording level cross-validation.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import io
from pathlib import Path

# vendor libraries
import click
from ruamel.yaml import YAML

# local libraries
from rrburden.arnet2.search import hyper_search
from rrburden.commands.run_options import create_cli_context, run_options
from rrburden.formats.manifest import load_recordings
from rrburden.functions import atomic_write_text, print_header
from rrburden.logger import log_table
from rrburden.models.cli_context import CliContext

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

TRIALS_FILE = "trials.csv"
""" One row per sampled configuration with its fold scores. """

BEST_FILE = "best.yml"
""" The winning configuration, usable as the `hyperparams` section of a run configuration. """

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class SearchCli:
    # --------------------------------------------------------------------------
    # CONSTRUCTOR
    # --------------------------------------------------------------------------

    def __init__(self):
        @click.command(
            help="Sample hyperparameters and score each configuration by cross-validated stage-1 AUROC."
        )
        @click.argument("manifest", type=click.Path(dir_okay=False, path_type=Path))
        @click.option("--trials", help="Configurations to sample.", type=click.IntRange(min=1))
        @click.option("--folds", help="Cross-validation folds.", type=click.IntRange(min=2))
        @run_options(default_out="search")
        @click.pass_context
        def search(
            ctx,
            manifest,
            trials,
            folds,
            config_file,
            seed,
            output_dir,
            threads,
            allow_out_of_range,
        ):
            cli_context: CliContext = create_cli_context(
                ctx, config_file, seed, output_dir, threads, allow_out_of_range
            )
            config = cli_context.config
            trials = trials or config.search.trials
            folds = folds or config.search.folds

            print_header("Hyperparameter search")
            recordings = [recording for _, recording in load_recordings(manifest)]
            result = hyper_search(
                recordings,
                trials,
                folds,
                cli_context.seed,
                base=config.hyperparams,
                patience=config.train.patience,
            )

            out_dir = cli_context.output_dir
            atomic_write_text(
                out_dir / TRIALS_FILE,
                result.table.to_csv(index=False, lineterminator="\n", float_format="%.10g"),
            )
            yaml = YAML(typ="safe")
            yaml.default_flow_style = False
            stream = io.StringIO()
            yaml.dump({"hyperparams": result.best.model_dump()}, stream)
            atomic_write_text(out_dir / BEST_FILE, stream.getvalue())

            log_table(
                f"Best configuration, mean AUROC [{result.best_auroc:.4f}]",
                sorted(result.best.model_dump().items()),
                colalign=("right",),
            )

        # expose the CLI command
        self.commands = {"search": search}
