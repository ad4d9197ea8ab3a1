"""
Hard instance CLI command
"""

import click

from .common import make_config, output_options, run_and_emit


@click.command()
@click.option("--q", type=int, help="Grid resolution (default: derived from --n and --sr)")
@click.option("--d", type=int, help="Dimension [default: 1]")
@click.option("--sr", type=float, help="Product of smoothness s and Sobolev order r [default: 1]")
@click.option("--c-psi", type=float, help="Bump amplitude constant in (0, 1] [default: 1]")
@click.option("--n", "-n", type=int, help="Points sampled from the first instance [default: 1000]")
@click.option("--n-test", type=int, help="Monte Carlo points for the separation [default: 2000]")
@output_options
@click.pass_context
def hard_instance_command(ctx, **params):
    """Build a Varshamov-Gilbert hard family and sample one of its members"""
    config = make_config(ctx, "hard-instance", params)
    run_and_emit(config, "Building hard instance")
