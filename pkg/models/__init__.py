"""Data models and configuration.

Pydantic models and configuration:
- models: JSON payloads, reports and the validated CLI configuration
- config: Centralized configuration (Pydantic Settings)
"""

from models.config import settings
from models.models import CliConfig, ExitCode, GeometryClass, SpeedLimitResult

__all__ = [
    "CliConfig",
    "ExitCode",
    "GeometryClass",
    "SpeedLimitResult",
    "settings",
]
