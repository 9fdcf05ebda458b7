"""Terminal reporter using Rich library."""

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from orlicz_spectra.runner import SolveResult, SweepResult, ValidationResult


def _fmt(value: float | None, spec: str = ".10g") -> str:
    return "-" if value is None else format(value, spec)


class TerminalReporter:
    """Generates terminal output using Rich."""

    def __init__(self, color: bool = True, console: Console | None = None) -> None:
        """Initialize terminal reporter.

        Args:
            color: If True, use colored output
            console: Console to print to, a new one by default
        """
        self.console = console or Console(color_system="auto" if color else None)

    def print_eigenpairs(self, result: SolveResult) -> None:
        """Print one row per requested level."""
        table = Table(title="Eigenpairs", show_header=True, header_style="bold cyan")
        table.add_column("i", justify="right")
        table.add_column("k", justify="right")
        table.add_column("lambda", justify="right")
        table.add_column("c = G(u)", justify="right")
        table.add_column("residual", justify="right")
        table.add_column("iterations", justify="right")
        table.add_column("certificate", justify="center")

        for outcome in result.outcomes:
            pair = outcome.pair
            if pair is None:
                table.add_row(str(outcome.level), str(outcome.dim), "[red]failed[/red]", "-", "-", "-", outcome.error_kind or "")
                continue
            verdict = "[green]ok[/green]" if outcome.certificate and outcome.certificate.ok else "[red]fail[/red]"
            table.add_row(
                str(pair.level),
                str(pair.dim),
                _fmt(pair.eigenvalue),
                _fmt(pair.c_value),
                _fmt(pair.residual, ".2e"),
                str(pair.iterations),
                verdict,
            )
        self.console.print(table)
        for outcome in result.outcomes:
            if outcome.error:
                self.console.print(f"  [red]level {outcome.level}:[/red] {outcome.error}", style="dim")

    def print_sweep(self, result: SweepResult) -> None:
        """Print the sweep table followed by its trend verdicts."""
        table = Table(title="Sweep", show_header=True, header_style="bold cyan")
        for name in ("k", "s", "i", "lambda", "c_value", "residual"):
            table.add_column(name, justify="right")
        for row in result.rows:
            pair = row.pair
            table.add_row(
                str(row.k),
                f"{row.s:g}",
                str(row.level),
                _fmt(pair.eigenvalue if pair else None),
                _fmt(pair.c_value if pair else None),
                _fmt(pair.residual if pair else None, ".2e"),
            )
        self.console.print(table)
        for verdict in result.verdicts:
            mark = "[green]holds[/green]" if verdict.holds else "[yellow]violated[/yellow]"
            fixed = ", ".join(f"{k}={v}" for k, v in verdict.fixed.items())
            self.console.print(f"  {verdict.name} ({fixed}): {mark}")

    def print_battery(self, result: ValidationResult) -> None:
        """Print the sub-test table and a summary panel."""
        battery = result.battery
        table = Table(title="Validation battery", show_header=True, header_style="bold cyan")
        table.add_column("Sub-test", style="bold")
        table.add_column("Trials", justify="right")
        table.add_column("Failures", justify="right")
        table.add_column("Worst margin", justify="right")
        table.add_column("Property")
        for subtest in battery.subtests:
            failures = f"[red]{subtest.failures}[/red]" if subtest.failures else "0"
            table.add_row(subtest.name, str(subtest.trials), failures, _fmt(subtest.worst_margin, ".3e"), subtest.anchor)
        self.console.print(table)

        color = "green" if battery.ok else "red"
        summary = Panel(
            f"[{color}]{battery.total_failures} failures[/{color}] in {battery.total_trials} trials "
            f"(seed {battery.seed})",
            title="Summary",
            border_style=color,
        )
        self.console.print(summary)
        for subtest in battery.failed():
            for detail in subtest.details:
                self.console.print(f"  [red]{subtest.name}:[/red] {detail}", style="dim")
