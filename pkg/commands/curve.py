"""Space curve export command handler.

This module handles:
- Evolving a Pauli observable under the gate's optimal generator over [0, T-star]
- Writing tangent and base curve samples as CSV or JSON
"""

from models.config import settings
from models.models import CliConfig, CurveMetadata, ExitCode
from services.gate_library import resolve_gate
from services.operator_algebra import PauliString, commutator, hs_norm
from services.qsl_core import optimal_generator
from services.scqc_geometry import HamiltonianSchedule, SpaceCurve, tangent_curve
from ui.components import warning
from utils.exceptions import ConfigError
from utils.persistence import dumps_csv, dumps_json, emit


def render_curve(curve: SpaceCurve, metadata: CurveMetadata, fmt: str) -> str:
    if fmt == "csv":
        return dumps_csv(curve.column_labels(), curve.rows())
    return dumps_json(
        {
            "metadata": metadata,
            "columns": curve.column_labels(),
            "rows": curve.rows().tolist(),
        }
    )


def curve(config: CliConfig) -> ExitCode:
    """Write the space curve of --observable under the optimal generator of --gate."""
    gate = resolve_gate(config.gate)
    observable = PauliString.parse(config.observable)
    if observable.dim != gate.dim:
        raise ConfigError(
            f"Observable {observable.label} has {observable.qubits} qubit(s), "
            f"{gate.name} has dimension {gate.dim}"
        )

    generator = optimal_generator(gate.unitary, config.omega_max)
    o = observable.to_operator()
    if hs_norm(commutator(generator.h_star, o)) <= settings.rank_tol * config.omega_max:
        warning(f"{observable.label} commutes with the generator of {gate.name}; the curve is a straight line")

    schedule = HamiltonianSchedule.constant(generator.h_star, generator.t_star)
    sampled = tangent_curve(schedule, o, steps=config.steps)
    metadata = CurveMetadata(
        gate=gate.name,
        observable=observable.label,
        omega_max=config.omega_max,
        steps=sampled.steps,
        t_star=generator.t_star,
        basis=sampled.basis_label,
    )
    emit(render_curve(sampled, metadata, config.format), config.out)
    return ExitCode.OK
