"""
Shared CLI helpers - consoles, option groups, config assembly and output
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from click.core import ParameterSource
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from rich import box

from ..core.config import ExperimentConfig, build_config
from ..core.models import ExperimentResult
from ..experiments.runner import ExperimentRunner
from ..exporters.csv_exporter import CSVExporter, format_value
from ..exporters.json_exporter import JSONExporter

logger = logging.getLogger(__name__)

err_console = Console(stderr=True)


def parse_int_list(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    """Click callback for comma separated integers"""
    if value is None:
        return None
    try:
        sizes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got '{value}'")
    if not sizes:
        raise click.BadParameter("at least one size is required")
    return sizes


def kernel_options(func):
    func = click.option("--depth", type=int, help="NTK hidden layers [default: 1]")(func)
    func = click.option("--kernel", "-k", type=click.Choice(["min", "ntk"]), help="Kernel family [default: min]")(func)
    return func


def output_options(func):
    func = click.option("--format", "-f", type=click.Choice(["csv", "json"]), help="Output format [default: csv]")(func)
    func = click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Output file (default: stdout)")(func)
    func = click.option("--seed", type=int, help="Base seed; replicate r uses seed + r [default: 0]")(func)
    return func


def explicit_values(ctx: click.Context, params: Dict[str, Any]) -> Dict[str, Any]:
    """Keep only the parameters the user actually passed"""
    values = {}
    for name, value in params.items():
        source = ctx.get_parameter_source(name)
        if source in (ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP, None):
            continue
        if isinstance(value, tuple):
            if not value:
                continue
            value = list(value)
        values[name] = value
    return values


def make_config(ctx: click.Context, command: str, params: Dict[str, Any]) -> ExperimentConfig:
    """File values from the group's --config, overridden by explicit flags"""
    obj = ctx.find_object(dict) or {}
    flags = explicit_values(ctx, params)
    if obj.get("threads") is not None:
        flags.setdefault("threads", obj["threads"])
    return build_config(command, obj.get("file_values"), flags)


def run_and_emit(config: ExperimentConfig, title: str) -> ExperimentResult:
    """Run the configured experiment with a progress bar, write its output, print a summary"""
    runner = ExperimentRunner()
    experiment = runner.create(config)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=err_console,
        transient=True,
    ) as progress:
        task = progress.add_task(title, total=experiment.total_steps())
        experiment.progress = lambda: progress.advance(task)
        result = experiment.execute()

    if not result.success:
        # re-raise the original error so the group maps it to an exit code
        raise experiment.error

    if config.format == "json":
        text = JSONExporter().export_result(result)
    else:
        text = CSVExporter().export_result(result)

    if config.out is not None:
        with open(config.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {len(result.rows)} rows to {config.out}")
    else:
        click.echo(text, nl=False)

    print_summary(result)
    return result


def print_summary(result: ExperimentResult):
    """Summary table on stderr so stdout stays machine readable"""
    if not result.summary:
        return
    table = Table(title=f"📊 {result.experiment_name}", box=box.SIMPLE_HEAD)
    table.add_column("Key", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in result.summary.items():
        table.add_row(key, format_value(value))
    err_console.print(table)
    err_console.print(f"[dim]Completed in {result.duration:.2f}s[/dim]")
