"""
Rate study CLI command
"""

import click

from .common import kernel_options, make_config, output_options, parse_int_list, run_and_emit
from .fit_predict import filter_options


@click.command()
@kernel_options
@filter_options
@click.option("--model", "-m", help="Synthetic model: cos2pix, zero, one, hard, sphere-linear")
@click.option("--d", type=int, help="Sphere dimension for sphere models")
@click.option("--s", type=float, help="Relative smoothness used by the nu rule")
@click.option("--beta", type=float, help="Eigenvalue decay rate")
@click.option("--nu-constant", type=float, help="Constant C in nu = C n^(beta/(s beta + 1)) [default: 1]")
@click.option("--n-grid", callback=parse_int_list, help="Comma separated sample sizes (at least 3)")
@click.option("--reps", "-r", type=int, help="Replicates per size")
@click.option("--quadrature-points", type=int, help="Quadrature nodes on [0, 1] [default: 10001]")
@click.option("--n-test", type=int, help="Monte Carlo points for non-interval models [default: 2000]")
@output_options
@click.pass_context
def rate_study_command(ctx, **params):
    """Mean excess risk against n and its log-log slope versus the theoretical rate"""
    config = make_config(ctx, "rate-study", params)
    run_and_emit(config, "Running rate study")
