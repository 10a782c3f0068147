"""Speed limit command handler.

This module handles:
- Resolving a library gate or gate file
- Printing the exact spectral-width speed limit as JSON
"""

from models.models import CliConfig, ExitCode
from services.gate_library import resolve_gate
from services.qsl_core import eigenphases, minimal_spread
from utils.persistence import dumps_json, emit


def qsl(config: CliConfig) -> ExitCode:
    """Print the SpeedLimitResult of the configured gate."""
    gate = resolve_gate(config.gate)
    result = minimal_spread(eigenphases(gate.unitary), config.omega_max).labelled(gate.name)
    emit(dumps_json(result), config.out)
    return ExitCode.OK
