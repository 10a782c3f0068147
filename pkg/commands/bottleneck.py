"""Bottleneck diagnostic command handler.

This module handles:
- Per-observable lower bounds over Pauli or eigenbasis certifiers
- The planarity/overhead summary of the bottleneck observables
"""

from commands.certify import gate_certifier_set
from models.models import CliConfig, ExitCode
from services.certifiers import bottleneck_report, planarity_diagnostic
from services.gate_library import resolve_gate
from ui.components import planarity_summary
from utils.persistence import dumps_json, emit


def bottleneck(config: CliConfig) -> ExitCode:
    gate = resolve_gate(config.gate)
    s = gate_certifier_set(gate, config.certifiers)
    report = bottleneck_report(gate.unitary, s, config.omega_max, gate.name)
    planarity_summary(planarity_diagnostic(gate.unitary, s, config.omega_max, gate.name, report=report))
    emit(dumps_json(report), config.out)
    return ExitCode.OK
