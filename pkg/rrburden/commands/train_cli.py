#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Trains a model bundle on the recordings of a manifest.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from pathlib import Path

# vendor libraries
import click

# local libraries
from rrburden.arnet2.bundle import save_bundle
from rrburden.arnet2.pipeline import train_bundle
from rrburden.commands.run_options import create_cli_context, run_options
from rrburden.formats.manifest import load_recordings
from rrburden.functions import print_header
from rrburden.logger import log_table
from rrburden.models.cli_context import CliContext

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class TrainCli:
    # --------------------------------------------------------------------------
    # CONSTRUCTOR
    # --------------------------------------------------------------------------

    def __init__(self):
        @click.command(help="Train stage 1 and stage 2 and write a model bundle.")
        @click.argument("manifest", type=click.Path(dir_okay=False, path_type=Path))
        @click.option(
            "--stage1-only",
            help="Skip stage 2. The bundle then classifies with stage 1 alone.",
            is_flag=True,
        )
        @run_options(default_out="bundle")
        @click.pass_context
        def train(
            ctx,
            manifest,
            stage1_only,
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
            settings = config.train
            if stage1_only:
                settings = settings.model_copy(update={"stage1_only": True})

            print_header("Training")
            recordings = [recording for _, recording in load_recordings(manifest)]
            bundle = train_bundle(
                recordings,
                config.hyperparams,
                settings,
                cli_context.seed,
                config.infer.batch_size,
            )
            save_bundle(bundle, cli_context.output_dir)

            table = [["Stage 1 threshold", bundle.stage1.threshold]]
            if bundle.stage2 is not None:
                table.append(["Stage 2 threshold", bundle.stage2.threshold])
            for stage in ("stage1", "stage2"):
                records = bundle.history.for_stage(stage)
                if records:
                    table.append([f"{stage} epochs", len(records) - 1])
                    table.append([f"{stage} final loss", records[-1].loss])
            log_table("Training summary", table, colalign=("right",), floatfmt=".4f")

        # expose the CLI command
        self.commands = {"train": train}
