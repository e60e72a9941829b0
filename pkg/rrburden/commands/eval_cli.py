#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Evaluates a predictions file against the reference annotations of a manifest.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path

# vendor libraries
import click

# local libraries
from rrburden.commands.run_options import create_cli_context, run_options
from rrburden.evaluation.cohort import join_cohort
from rrburden.evaluation.report import build_report, misclassified_rows, render_report, write_report
from rrburden.formats.manifest import load_recordings
from rrburden.formats.predictions import read_predictions
from rrburden.functions import print_header
from rrburden.logger import logger
from rrburden.models.cli_context import CliContext

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class EvalCli:
    # --------------------------------------------------------------------------
    # CONSTRUCTOR
    # --------------------------------------------------------------------------

    def __init__(self):
        @click.command(
            name="eval",
            help="Report window and patient level performance of a predictions file.",
        )
        @click.argument("predictions", type=click.Path(dir_okay=False, path_type=Path))
        @click.argument("manifest", type=click.Path(dir_okay=False, path_type=Path))
        @click.option(
            "--compare",
            help="A second predictions file of the same recordings to test against.",
            type=click.Path(dir_okay=False, path_type=Path),
        )
        @run_options(default_out="report")
        @click.pass_context
        def evaluate(
            ctx,
            predictions,
            manifest,
            compare,
            config_file,
            seed,
            output_dir,
            threads,
            allow_out_of_range,
        ):
            cli_context: CliContext = create_cli_context(
                ctx, config_file, seed, output_dir, threads, allow_out_of_range
            )
            print_header("Evaluation")
            loaded = load_recordings(manifest)
            cohort = join_cohort(read_predictions(predictions), loaded)
            other = join_cohort(read_predictions(compare), loaded) if compare else None

            report = build_report(cohort, other)
            write_report(report, misclassified_rows(cohort), cli_context.output_dir)
            logger.info("Evaluation of [%s]:\n\n%s", predictions, render_report(report))

        # expose the CLI command
        self.commands = {"eval": evaluate}
