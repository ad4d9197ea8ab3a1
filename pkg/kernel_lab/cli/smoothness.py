"""
Smoothness estimation CLI command
"""

from pathlib import Path

import click

from .common import kernel_options, make_config, output_options, parse_int_list, run_and_emit

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)


@click.command()
@kernel_options
@click.option("--model", "-m", help="Synthetic model: cos2pix, zero, one, hard, sphere-linear")
@click.option("--dataset", type=click.Choice(["mnist", "fashion-mnist", "cifar10"]), help="Image dataset (1-vs-7 pair)")
@click.option("--images", type=existing_file, help="IDX image file (mnist, fashion-mnist)")
@click.option("--labels", type=existing_file, help="IDX label file (mnist, fashion-mnist)")
@click.option("--cifar-batch", "cifar_batches", type=existing_file, multiple=True, help="CIFAR-10 binary batch (repeatable)")
@click.option("--d", type=int, help="Sphere dimension for sphere models")
@click.option("--sigma", type=float, help="Gaussian noise level (0 for noiseless); switches to regression sampling")
@click.option("--design", type=click.Choice(["random", "grid"]), help="Input placement (default: grid for interval models)")
@click.option("--n", "-n", type=int, help="Sample size")
@click.option("--n-grid", callback=parse_int_list, help="Comma separated sizes; runs a sample-size sweep")
@click.option("--truncation", "-t", type=int, help="Truncation point [default: 100]")
@click.option("--naive", is_flag=True, help="Fit over the whole spectrum instead of the first --truncation terms")
@click.option("--beta", type=float, help="Eigenvalue decay rate (default: 2 for min, d/(d-1) for ntk)")
@click.option("--reps", "-r", type=int, help="Replicates [default: 50]")
@output_options
@click.pass_context
def estimate_smoothness_command(ctx, **params):
    """Estimate the relative smoothness s of the Bayes classifier by Truncation Estimation"""
    config = make_config(ctx, "estimate-smoothness", params)
    run_and_emit(config, "Estimating smoothness")
