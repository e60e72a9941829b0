#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Generates a synthetic cohort of annotated recordings.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
from collections import Counter

# vendor libraries
import click

# local libraries
from rrburden.commands.run_options import create_cli_context, run_options
from rrburden.data_gen.generator import gen_dataset
from rrburden.formats.manifest import reference_severity
from rrburden.functions import print_header
from rrburden.logger import log_table, logger
from rrburden.models.cli_context import CliContext
from rrburden.models.recording import SeverityClass

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


class GenerateCli:
    # --------------------------------------------------------------------------
    # CONSTRUCTOR
    # --------------------------------------------------------------------------

    def __init__(self):
        @click.command(
            help="Generate synthetic recordings and their manifest from the `generate` section of the configuration."
        )
        @run_options(default_out="data")
        @click.pass_context
        def generate(ctx, config_file, seed, output_dir, threads, allow_out_of_range):
            cli_context: CliContext = create_cli_context(
                ctx, config_file, seed, output_dir, threads, allow_out_of_range
            )
            cfg = cli_context.config.generate
            print_header("Generating cohort")
            generated = gen_dataset(cfg, cli_context.output_dir, cli_context.threads)

            rows, severities = [], Counter()
            for index, (entry, recording) in enumerate(generated):
                severity = reference_severity(recording)
                severities[severity] += 1
                rows.append(
                    [
                        entry.recording_id,
                        cfg.target_for(index),
                        entry.reference_afb,
                        severity.value,
                        entry.reference_diagnosis,
                    ]
                )
            log_table(
                "Realised burden",
                rows,
                headers=["Recording", "Target AFB", "Realised AFB", "Severity", "Diagnosis"],
                floatfmt=".2f",
            )
            logger.info(
                "Severity mix: %s",
                ", ".join(f"{s.value}=[{severities[s]}]" for s in SeverityClass),
            )

        # expose the CLI command
        self.commands = {"generate": generate}
