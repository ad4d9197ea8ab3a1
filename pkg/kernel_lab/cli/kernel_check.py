"""
Kernel check CLI command
"""

import click

from .common import kernel_options, make_config, output_options, run_and_emit


@click.command()
@kernel_options
@click.option("--n", "-n", type=int, help="Sample points [default: 2000]")
@click.option("--d", type=int, help="Sphere dimension for the NTK [default: 3]")
@output_options
@click.pass_context
def kernel_check_command(ctx, **params):
    """Check diagonal, symmetry and positive semidefiniteness of a Gram matrix"""
    config = make_config(ctx, "kernel-check", params)
    result = run_and_emit(config, "Checking kernel")
    if not result.summary.get("passed", False):
        raise click.exceptions.Exit(1)
