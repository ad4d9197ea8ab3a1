"""
Fit and predict CLI command
"""

import click

from .common import kernel_options, make_config, output_options, run_and_emit


def filter_options(func):
    func = click.option("--tikhonov-m", type=int, help="Iterations of iterated Tikhonov [default: 2]")(func)
    func = click.option("--filter", type=click.Choice(["gradient-flow", "ridge", "cutoff", "iterated-tikhonov"]),
                        help="Spectral filter [default: gradient-flow]")(func)
    return func


@click.command()
@kernel_options
@filter_options
@click.option("--model", "-m", help="Synthetic model: cos2pix, zero, one, hard, sphere-linear")
@click.option("--d", type=int, help="Sphere dimension for sphere models")
@click.option("--n", "-n", type=int, help="Training sample size")
@click.option("--nu", type=float, help="Fixed regularization parameter")
@click.option("--s", type=float, help="Relative smoothness for the nu rule (with --beta)")
@click.option("--beta", type=float, help="Eigenvalue decay rate for the nu rule")
@click.option("--nu-constant", type=float, help="Constant of the nu rule [default: 1]")
@click.option("--n-test", type=int, help="Held-out sample size [default: 2000]")
@click.option("--quadrature-points", type=int, help="Quadrature nodes for the excess risk [default: 10001]")
@output_options
@click.pass_context
def fit_predict_command(ctx, **params):
    """Fit one spectral-algorithm classifier and score it on held-out data"""
    config = make_config(ctx, "fit-predict", params)
    run_and_emit(config, "Fitting classifier")
