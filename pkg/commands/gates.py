"""Gate registry dump command handler."""

from models.models import CliConfig, ExitCode
from services.gate_library import gate_registry_dump
from utils.persistence import dumps_json, emit


def gates(config: CliConfig) -> ExitCode:
    emit(dumps_json(gate_registry_dump()), config.out)
    return ExitCode.OK
