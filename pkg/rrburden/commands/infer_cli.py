#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Classifies the windows of every recording in a manifest with a model bundle.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path

# vendor libraries
import click

# local libraries
from rrburden.arnet2.bundle import load_bundle
from rrburden.arnet2.pipeline import infer_cohort
from rrburden.commands.run_options import create_cli_context, run_options
from rrburden.formats.manifest import load_recordings
from rrburden.formats.predictions import write_predictions
from rrburden.functions import print_header
from rrburden.logger import logger
from rrburden.models.cli_context import CliContext

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class InferCli:
    # --------------------------------------------------------------------------
    # CONSTRUCTOR
    # --------------------------------------------------------------------------

    def __init__(self):
        @click.command(
            help="Write per window and per recording predictions for a manifest."
        )
        @click.argument("bundle", type=click.Path(file_okay=False, path_type=Path))
        @click.argument("manifest", type=click.Path(dir_okay=False, path_type=Path))
        @run_options(default_out="predictions")
        @click.pass_context
        def infer(
            ctx,
            bundle,
            manifest,
            config_file,
            seed,
            output_dir,
            threads,
            allow_out_of_range,
        ):
            cli_context: CliContext = create_cli_context(
                ctx, config_file, seed, output_dir, threads, allow_out_of_range
            )
            print_header("Inference")
            model = load_bundle(bundle)
            recordings = [recording for _, recording in load_recordings(manifest)]
            results, skipped = infer_cohort(
                model,
                recordings,
                cli_context.threads,
                cli_context.config.infer.batch_size,
            )
            write_predictions(cli_context.output_dir, results, skipped)
            logger.info(
                "Classified [%d] recordings, skipped [%d]. Predictions written to [%s]",
                len(results),
                len(skipped),
                cli_context.output_dir,
            )

        # expose the CLI command
        self.commands = {"infer": infer}
