"""Minimal gate time table command handler.

This module handles:
- Recomputing every table row from the gate matrices
- Rendering it as JSON, CSV or a rich table (exit 1 on any mismatch)
"""

from models.models import CliConfig, ExitCode, TableReport
from services.gate_library import build_table
from ui.components import error, gate_time_table, loading, render_table
from utils.persistence import dumps_csv, dumps_json, emit

TABLE_CSV_HEADER = ["gates", "delta_phi_star", "t_star", "geometry", "matches"]


def table_csv(report: TableReport) -> str:
    rows = [
        (" ".join(row.gates), row.delta_phi_star, row.t_star, row.geometry, row.matches)
        for row in report.rows
    ]
    return dumps_csv(TABLE_CSV_HEADER, rows)


def table(config: CliConfig) -> ExitCode:
    with loading("Classifying gates..."):
        report = build_table(config.omega_max)

    if config.format == "text":
        render_table(gate_time_table(report))
    elif config.format == "csv":
        emit(table_csv(report), config.out)
    else:
        emit(dumps_json(report), config.out)

    if not report.all_match:
        bad = [", ".join(row.gates) for row in report.rows if not row.matches]
        error(f"Rows disagree with the reference values: {'; '.join(bad)}")
        return ExitCode.FAILED
    return ExitCode.OK
