"""Reusable console components: messages, loading() and result tables.

Messages and spinners go to stderr; rendered result tables go to stdout.
"""

import math
from collections.abc import Iterable
from contextlib import contextmanager
from fractions import Fraction

from rich.console import Console
from rich.live import Live
from rich.spinner import Spinner
from rich.table import Table
from rich.theme import Theme

from models.models import ClassificationReport, PlanarityReport, TableReport

# Catppuccin Mocha Theme
CATPPUCCIN_MOCHA = Theme(
    {
        "table.title": "bold #cba6f7",  # Purple header
        "table.text": "#cdd6f4",  # Light text
        "table.muted": "#6c7086",  # Muted gray
        "info": "#89dceb",  # Sky blue for info
        "success": "#a6e3a1",  # Green for success
        "warning": "#f9e2af",  # Yellow for warnings
        "error": "#f38ba8",  # Red for errors
    }
)

# Global consoles with theme: diagnostics on stderr, rendered results on stdout
console = Console(theme=CATPPUCCIN_MOCHA, stderr=True)
output_console = Console(theme=CATPPUCCIN_MOCHA)


def info(msg: str) -> None:
    console.print(f"[info]{msg}[/info]")


def success(msg: str) -> None:
    console.print(f"[success]{msg}[/success]")


def warning(msg: str) -> None:
    console.print(f"[warning]{msg}[/warning]")


def error(msg: str) -> None:
    console.print(f"[error]Error:[/error] {msg}")


@contextmanager
def loading(msg: str = "Computing..."):
    """Context manager for displaying a spinner during long computations.

    Usage:
        with loading("Classifying gates..."):
            report = build_table()
    """
    with Live(
        Spinner("arc", text=msg),
        console=console,
        refresh_per_second=12.5,
        transient=True,  # Spinner disappears after completion
    ):
        yield


def _pi_multiple(value: float) -> str:
    ratio = Fraction(value / math.pi).limit_denominator(12)
    if abs(float(ratio) * math.pi - value) > 1e-9:
        return f"{value:.6f}"
    if ratio == 0:
        return "0"
    num = "" if ratio.numerator == 1 else str(ratio.numerator)
    return f"{num}pi" if ratio.denominator == 1 else f"{num}pi/{ratio.denominator}"


def gate_time_table(report: TableReport) -> Table:
    """Minimal gate time table with values shown as multiples of pi."""
    table = Table(
        title=f"Minimal gate times at Omega_max = {report.omega_max:g}",
        title_style="table.title",
        header_style="table.title",
    )
    table.add_column("Gates", style="table.text")
    table.add_column("delta phi*", justify="right")
    table.add_column("T*", justify="right")
    table.add_column("Geometry")
    table.add_column("Check", justify="center")

    for row in report.rows:
        check = "[success]ok[/success]" if row.matches else f"[error]{', '.join(row.mismatches)}[/error]"
        table.add_row(
            ", ".join(row.gates),
            _pi_multiple(row.delta_phi_star),
            _pi_multiple(row.t_star),
            row.geometry,
            check,
        )
    return table


def classification_table(reports: Iterable[ClassificationReport]) -> Table:
    table = Table(header_style="table.title")
    for column in ("Gate", "delta phi*", "T*", "Geometry", "Certifier"):
        table.add_column(column)
    for r in reports:
        table.add_row(r.gate, _pi_multiple(r.delta_phi_star), _pi_multiple(r.t_star), r.geometry, r.bottleneck_certifier)
    return table


def planarity_summary(report: PlanarityReport) -> None:
    eta = "undefined" if report.eta_lower is None else f"{report.eta_lower:.6g}"
    console.print(
        f"[table.title]{report.gate}[/table.title] bottleneck {report.bottleneck_label} "
        f"(closure {report.bottleneck_closure_dim}), eta_lower {eta}"
    )
    if report.overhead:
        warning("Bottleneck curve is not planar: the planar bound is not attainable")


def render_table(table: Table) -> None:
    output_console.print(table)
