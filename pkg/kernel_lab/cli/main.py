"""
Main CLI entry point for kernel-lab

Provides the main command-line interface using Click framework.
"""

import logging
from pathlib import Path
from typing import Optional

import click
from rich.logging import RichHandler

from .. import __version__
from ..core.config import load_config_file
from ..core.exceptions import EXIT_CODES, ConfigError, KernelLabError
from .common import err_console

logger = logging.getLogger("kernel_lab")

OS_ERROR_EXIT = 3
UNEXPECTED_EXIT = 1

EXIT_CODE_HELP = "\b\nExit codes:\n" + "\n".join(
    f"  {code:>2}  {name}" for name, code in sorted(EXIT_CODES.items(), key=lambda item: item[1])
) + "\n   1  any other error"


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, KernelLabError):
        return error.exit_code
    if isinstance(error, OSError):
        return OS_ERROR_EXIT
    if isinstance(error, ValueError):
        # precondition violations of library calls are configuration problems
        return ConfigError.exit_code
    return UNEXPECTED_EXIT


class LabGroup(click.Group):
    """Click group that turns library errors into documented exit codes"""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except Exception as e:
            code = exit_code_for(e)
            logger.debug("Traceback of the failing command", exc_info=True)
            err_console.print(f"[red]❌ Error ({type(e).__name__}): {e}[/red]")
            ctx.exit(code)


def setup_logging(verbose: int, log_file: Optional[Path]):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    handlers = [RichHandler(console=err_console, show_path=verbose > 1, rich_tracebacks=True)]
    if log_file is not None:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        handlers.append(file_handler)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=handlers, force=True)


@click.group(cls=LabGroup, epilog=EXIT_CODE_HELP)
@click.version_option(version=__version__)
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG")
@click.option("--log-file", type=click.Path(dir_okay=False, path_type=Path), help="Also write logs to this file")
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads (default: logical CPUs)")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="YAML file of option values; command-line flags override it")
@click.pass_context
def cli(ctx, verbose: int, log_file: Optional[Path], threads: Optional[int], config_path: Optional[Path]):
    """🧪 kernel-lab - Spectral algorithms and smoothness estimation for kernel classifiers

    Estimates the relative smoothness of a Bayes classifier from projection
    coefficients, runs excess-risk rate studies with spectral-algorithm
    classifiers, and builds the hard instances behind the minimax lower bound.
    """
    setup_logging(verbose, log_file)
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads
    ctx.obj["file_values"] = load_config_file(config_path) if config_path else {}
    if config_path:
        logger.info(f"Loaded configuration from {config_path}")


# Import and register commands
from .smoothness import estimate_smoothness_command
from .rate_study import rate_study_command
from .fit_predict import fit_predict_command
from .kernel_check import kernel_check_command
from .hard_instance import hard_instance_command

cli.add_command(estimate_smoothness_command, name="estimate-smoothness")
cli.add_command(rate_study_command, name="rate-study")
cli.add_command(fit_predict_command, name="fit-predict")
cli.add_command(kernel_check_command, name="kernel-check")
cli.add_command(hard_instance_command, name="hard-instance")

if __name__ == "__main__":
    cli()
