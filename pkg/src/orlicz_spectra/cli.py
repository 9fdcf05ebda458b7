"""CLI interface using Typer."""

import logging
from pathlib import Path

import typer
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn

from orlicz_spectra.config import TASKS, Config, parse_override
from orlicz_spectra.errors import ConfigError, OrliczSpectraError
from orlicz_spectra.reporters.json_formats import (
    JUnitReporter,
    SolveReporter,
    SweepReporter,
    ValidationReporter,
)
from orlicz_spectra.reporters.terminal import TerminalReporter
from orlicz_spectra.runner import SolveResult, SpectrumRunner, SweepResult, ValidationResult

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format="%(levelname)s: %(message)s",
)
logger = logging.getLogger(__name__)

app = typer.Typer(
    name="orlicz-spectra",
    help="Galerkin eigensolver for the fractional m-Laplacian on an interval",
    add_completion=False,
)

console = Console()

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

# Unknown --dotted.key=value options are collected as overrides.
OVERRIDES = {"allow_extra_args": True, "ignore_unknown_options": True}

CONFIG_OPTION = typer.Option(None, "--config", "-c", help="JSON or TOML run configuration")
SEED_OPTION = typer.Option(None, "--seed", help="Override solver.rng_seed")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Result file (default orlicz-spectra-<task>.json)")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable debug logging")
NO_COLOR_OPTION = typer.Option(False, "--no-color", help="Disable colored output")


def parse_overrides(args: list[str]) -> list[tuple[str, object]]:
    """Turn ``--a.b=v`` and ``--a.b v`` pairs into (key, value) overrides.

    Raises:
        ConfigError: On a stray argument or a key without a value
    """
    overrides = []
    pending = list(args)
    while pending:
        arg = pending.pop(0)
        if not arg.startswith("--") or len(arg) == 2:
            raise ConfigError(f"unexpected argument {arg!r}")
        key, sep, text = arg[2:].partition("=")
        if not sep:
            if not pending:
                raise ConfigError("missing value", key=key)
            text = pending.pop(0)
        overrides.append((key, parse_override(text)))
    return overrides


def default_output(task: str) -> Path:
    suffix = ".csv" if task == "sweep" else ".json"
    return Path(f"orlicz-spectra-{task}{suffix}")


def _load(task: str, config_file: Path | None, seed: int | None, out: Path | None, extra: list[str]) -> Config:
    config = Config(config_file)
    for key, value in parse_overrides(extra):
        config.set(key, value)
    config.set("task", task)
    if seed is not None:
        config.set("solver.rng_seed", seed)
    if out is not None:
        config.set("output", str(out))
    return config


def _report(
    result: SolveResult | SweepResult | ValidationResult,
    output: Path,
    junit: Path | None,
    terminal: TerminalReporter,
) -> int:
    """Write result files, print the summary and return the exit code."""
    if isinstance(result, SweepResult):
        SweepReporter().generate_report(result, output)
        terminal.print_sweep(result)
        console.print(f"[green]Table saved to: {output}[/green]")
        console.print(f"[green]Verdicts saved to: {SweepReporter.verdicts_path(output)}[/green]")
    elif isinstance(result, ValidationResult):
        ValidationReporter().generate_report(result, output)
        terminal.print_battery(result)
        console.print(f"[green]Report saved to: {output}[/green]")
        if junit is not None:
            JUnitReporter().generate_report(result, junit)
            console.print(f"[green]JUnit report saved to: {junit}[/green]")
    else:
        SolveReporter().generate_report(result, output)
        terminal.print_eigenpairs(result)
        console.print(f"[green]Result saved to: {output}[/green]")
    return EXIT_OK if result.ok else EXIT_NUMERICAL


def _run_with_progress(runner: SpectrumRunner, task: str) -> SolveResult | SweepResult | ValidationResult:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        transient=True,
    ) as progress:
        bar = progress.add_task(f"[green]Running {task}...", total=runner.total_steps())

        def advance(description: str, count: int) -> None:
            progress.update(bar, advance=count, description=f"[green]{task}: {description}")

        runner.on_step = advance
        return runner.run()


def _execute(
    ctx: typer.Context,
    task: str,
    config_file: Path | None,
    seed: int | None,
    out: Path | None,
    verbose: bool,
    no_color: bool,
    junit: Path | None = None,
) -> None:
    if verbose:
        logging.getLogger("orlicz_spectra").setLevel(logging.DEBUG)

    try:
        config = _load(task, config_file, seed, out, ctx.args)
        run_config = config.run_config()
    except ConfigError as e:
        console.print(f"[red]Error: {e.anchored()}[/red]")
        raise typer.Exit(EXIT_CONFIG)

    output = Path(run_config.output) if run_config.output else default_output(task)
    try:
        result = _run_with_progress(SpectrumRunner(run_config), task)
        code = _report(result, output, junit, TerminalReporter(color=not no_color, console=console))
    except ConfigError as e:
        console.print(f"[red]Error: {config.anchor(e).anchored()}[/red]")
        raise typer.Exit(EXIT_CONFIG)
    except OrliczSpectraError as e:
        if verbose:
            logger.exception(f"{task} failed")
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_NUMERICAL)
    except OSError as e:
        console.print(f"[red]Error writing results: {e}[/red]")
        raise typer.Exit(EXIT_CONFIG)

    if code != EXIT_OK:
        console.print(f"[red]{task} finished with failures[/red]")
    raise typer.Exit(code)


@app.command(context_settings=OVERRIDES)
def solve(
    ctx: typer.Context,
    config_file: Path = CONFIG_OPTION,
    seed: int = SEED_OPTION,
    out: Path = OUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
    no_color: bool = NO_COLOR_OPTION,
) -> None:
    """Compute the configured minimax levels at one mesh size."""
    _execute(ctx, "solve", config_file, seed, out, verbose, no_color)


@app.command(context_settings=OVERRIDES)
def sweep(
    ctx: typer.Context,
    config_file: Path = CONFIG_OPTION,
    seed: int = SEED_OPTION,
    out: Path = OUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
    no_color: bool = NO_COLOR_OPTION,
) -> None:
    """Tabulate levels over sweep.k and sweep.s as CSV, with trend verdicts."""
    _execute(ctx, "sweep", config_file, seed, out, verbose, no_color)


@app.command(context_settings=OVERRIDES)
def validate(
    ctx: typer.Context,
    config_file: Path = CONFIG_OPTION,
    seed: int = SEED_OPTION,
    out: Path = OUT_OPTION,
    junit: Path = typer.Option(None, "--junit", help="Also write a JUnit XML report"),
    verbose: bool = VERBOSE_OPTION,
    no_color: bool = NO_COLOR_OPTION,
) -> None:
    """Run the property battery, translation estimates and linear oracle."""
    _execute(ctx, "validate", config_file, seed, out, verbose, no_color, junit=junit)


@app.command(context_settings=OVERRIDES)
def run(
    ctx: typer.Context,
    task: str = typer.Option(None, "--task", "-t", help=f"One of {', '.join(TASKS)}; default from config"),
    config_file: Path = CONFIG_OPTION,
    seed: int = SEED_OPTION,
    out: Path = OUT_OPTION,
    verbose: bool = VERBOSE_OPTION,
    no_color: bool = NO_COLOR_OPTION,
) -> None:
    """Run whichever task the configuration names."""
    if task is None:
        try:
            task = str(Config(config_file).get("task", "solve"))
        except ConfigError as e:
            console.print(f"[red]Error: {e.anchored()}[/red]")
            raise typer.Exit(EXIT_CONFIG)
    if task not in TASKS:
        console.print(f"[red]Error: task: must be one of {', '.join(TASKS)}[/red]")
        raise typer.Exit(EXIT_CONFIG)
    _execute(ctx, task, config_file, seed, out, verbose, no_color)


@app.command()
def version() -> None:
    """Show version information."""

    from orlicz_spectra import __version__

    console.print(f"[bold]Orlicz Spectra[/bold] v{__version__}")
    console.print("\n[dim]Features:[/dim]")
    console.print("  • Power, exponential and tabulated Young functions")
    console.print("  • Graded pair quadrature with exterior tail")
    console.print("  • Minimax eigenpairs with KKT refinement")
    console.print("  • Property battery with dense p=2 oracle")


if __name__ == "__main__":
    app()
