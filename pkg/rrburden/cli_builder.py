#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Builds the `rrburden` command line.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import sys

# vendor libraries
import click
import pyfiglet

# local libraries
from rrburden.commands.eval_cli import EvalCli
from rrburden.commands.generate_cli import GenerateCli
from rrburden.commands.infer_cli import InferCli
from rrburden.commands.search_cli import SearchCli
from rrburden.commands.train_cli import TrainCli
from rrburden.exceptions import RuntimeFailure, ValidationError
from rrburden.functions import EXIT_RUNTIME_ERROR, EXIT_VALIDATION_ERROR, error_and_exit
from rrburden.logger import enable_debug_logging, logger

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

APP_NAME = "rrburden"

ENVVAR_PREFIX = "RRBURDEN_CLI"
""" Every option may also be given as `RRBURDEN_CLI_<COMMAND>_<OPTION>`. """

# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def create_cli() -> click.Group:
    """Build the CLI group with every subcommand attached."""

    default_commands = {}
    for cli_class in (GenerateCli, TrainCli, InferCli, EvalCli, SearchCli):
        default_commands.update(**cli_class().commands)

    @click.group(
        cls=ExitCodeGroup,
        invoke_without_command=True,
        help="AF burden estimation from RR intervals.",
    )
    @click.option("--debug", help="Enables debug level logging.", is_flag=True)
    @click.pass_context
    def cli(ctx, debug):
        title = pyfiglet.figlet_format(APP_NAME, font="slant")
        logger.info(f"\n{title}")

        if debug:
            logger.info("Enabling debug logging")
            enable_debug_logging()

        ctx.obj = {"debug": debug}

        if ctx.invoked_subcommand is None:
            click.echo(ctx.get_help())
            sys.exit(1)

    for command in default_commands.values():
        cli.add_command(command)

    return cli


def main():
    """Run the entry-point click CLI command"""
    create_cli()(  # pylint: disable=no-value-for-parameter,unexpected-keyword-arg
        prog_name=APP_NAME,
        auto_envvar_prefix=ENVVAR_PREFIX,
    )


# ------------------------------------------------------------------------------
# PRIVATE CLASSES
# ------------------------------------------------------------------------------


class ExitCodeGroup(click.Group):
    """Maps errors escaping a subcommand to the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super(ExitCodeGroup, self).invoke(ctx)
        except ValidationError as ex:
            error_and_exit(f"Invalid input: {ex}", EXIT_VALIDATION_ERROR)
        except (RuntimeFailure, OSError) as ex:
            error_and_exit(f"Failed: {ex}", EXIT_RUNTIME_ERROR)
