"""Gate classification command handler.

This module handles:
- Speed limit and bottleneck Pauli-certifier geometry of one gate
"""

from models.models import CliConfig, ExitCode
from services.gate_library import classify_gate, resolve_gate
from ui.components import classification_table, render_table
from utils.persistence import dumps_json, emit


def classify(config: CliConfig) -> ExitCode:
    gate = resolve_gate(config.gate)
    report = classify_gate(gate, config.omega_max)
    if config.format == "text":
        render_table(classification_table([report]))
    else:
        emit(dumps_json(report), config.out)
    return ExitCode.OK
