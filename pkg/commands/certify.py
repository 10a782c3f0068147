"""Certifying-set command handler.

This module handles:
- Loading operator lists (Pauli words, Pauli payloads or dense payloads)
- Building canonical or gate-derived certifying sets
- Printing the common-commutant report (exit 1 when the set does not certify)
"""

from pathlib import Path

from pydantic import ValidationError

from models.models import CliConfig, ExitCode, OperatorPayload, PauliPayload
from services.certifiers import (
    CertifyingSet,
    canonical_two_op_set,
    common_commutant_dim,
    pauli_certifier_set,
    pq_certifier_set,
)
from services.gate_library import NamedGate, resolve_gate
from services.operator_algebra import HermitianOperator, PauliString, qubits_for_dim
from ui.components import warning
from utils.exceptions import ConfigError
from utils.persistence import JSONStore, dumps_json, emit


def _parse_operator(item) -> tuple[HermitianOperator, str]:
    if isinstance(item, str):
        pauli = PauliString.parse(item)
        return pauli.to_operator(), pauli.label
    if isinstance(item, dict) and "word" in item:
        pauli = PauliString.from_payload(PauliPayload.model_validate(item))
        return pauli.to_operator(), pauli.label
    payload = OperatorPayload.model_validate(item)
    return HermitianOperator(payload.to_matrix()), ""


def load_operator_set(path: Path) -> CertifyingSet:
    """Certifying set from a JSON list of operators.

    Raises:
        ConfigError: If the file is not a list of valid operator entries
    """
    data = JSONStore(path).read()
    if not isinstance(data, list) or not data:
        raise ConfigError(f"{path} must hold a non-empty JSON list of operators")
    operators, labels = [], []
    for k, item in enumerate(data):
        try:
            operator, label = _parse_operator(item)
        except (ValidationError, ValueError) as e:
            raise ConfigError(f"Entry {k} of {path} is not an operator: {e}") from e
        operators.append(operator)
        labels.append(label or f"O{k + 1}")
    return CertifyingSet(operators=tuple(operators), label=Path(path).stem, labels=tuple(labels))


def gate_certifier_set(gate: NamedGate, family: str) -> CertifyingSet:
    """Pauli, eigenbasis P/Q or P-only certifiers for a gate."""
    if family == "pauli":
        return pauli_certifier_set(qubits_for_dim(gate.dim))
    eigen = pq_certifier_set(gate.unitary)
    return eigen.p_only() if family == "p-only" else eigen


def certify(config: CliConfig) -> ExitCode:
    """Print the CommutantReport of the configured set."""
    if config.operators is not None:
        s = load_operator_set(config.operators)
    elif config.canonical is not None:
        s = canonical_two_op_set(config.canonical)
    else:
        s = gate_certifier_set(resolve_gate(config.gate), config.certifiers)

    report = common_commutant_dim(s)
    emit(dumps_json(report), config.out)
    if not report.certifies:
        warning(f"Set {s.label!r} does not certify (commutant dimension {report.dimension})")
        return ExitCode.FAILED
    return ExitCode.OK
