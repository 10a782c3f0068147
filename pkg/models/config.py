"""Application configuration using Pydantic v2.

Centralized settings for qslkit including:
- Rank / termination tolerance (also via the plain QSLKIT_TOL variable)
- Numerical tolerances of the operator invariants
- Curve sampling defaults
- Output formatting
- Log file location

Configuration can be overridden via environment variables:
    QSLKIT_TOL=1e-10
    QSLKIT__CURVE__DEFAULT_STEPS=4096
    QSLKIT__LOGGING__LOG_FILE=/tmp/qslkit.log
"""

from pathlib import Path

from pydantic import AliasChoices, BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

VERSION = "0.1.0"


class NumericsSettings(BaseModel):
    """Tolerances of the operator invariants."""

    hermitian_rtol: float = Field(
        1e-12,
        gt=0,
        description="Relative Hermiticity tolerance, scaled by 1 + max|entries|",
    )
    unitary_atol: float = Field(
        1e-10,
        gt=0,
        description="Absolute tolerance on max|U^dagger U - I|",
    )
    trace_atol: float = Field(
        1e-10,
        gt=0,
        description="Tracelessness tolerance, scaled by the dimension",
    )
    basis_atol: float = Field(
        1e-10,
        gt=0,
        description="Orthonormality tolerance of operator bases",
    )
    cluster_tol: float = Field(
        1e-8,
        gt=0,
        lt=1e-2,
        description="Circular distance below which eigenphases are one cluster",
    )
    max_qubits: int = Field(
        4,
        ge=1,
        le=4,
        description="Largest qubit count for dense Pauli bases (n <= 16)",
    )


class CurveSettings(BaseModel):
    """Space-curve sampling configuration."""

    default_steps: int = Field(
        2048,
        ge=16,
        description="Uniform sampling intervals over [0, T]",
    )
    min_steps: int = Field(
        16,
        ge=2,
        description="Smallest accepted number of sampling intervals",
    )
    rate_step: float = Field(
        1e-5,
        gt=0,
        description="Central-difference step of the matrix-element rate check",
    )
    rate_slack: float = Field(
        1e-6,
        ge=0,
        description="Slack added to w/2 before the rate check fails",
    )


class OutputSettings(BaseModel):
    """Number formatting and provenance of emitted files."""

    csv_digits: int = Field(
        12,
        ge=6,
        le=17,
        description="Significant digits of floats written to CSV",
    )
    generated_by: str = Field(
        f"qslkit {VERSION}",
        min_length=1,
        description="Provenance string stored in curve metadata",
    )


class LoggingSettings(BaseModel):
    """Loguru sinks."""

    log_file: Path | None = Field(
        None,
        description="Rotating log file; file logging is off when unset",
    )
    rotation: str = Field("50 MB", description="Rotate when the file reaches this size")
    retention: int = Field(10, ge=1, description="Rotated files to keep")


class AppSettings(BaseSettings):
    """Root application settings with environment variable support.

    Environment variables use the prefix QSLKIT__ with nested delimiters:
    - QSLKIT__NUMERICS__CLUSTER_TOL=1e-9
    - QSLKIT__OUTPUT__CSV_DIGITS=10

    The rank tolerance is read from QSLKIT_TOL (single underscore).
    Can also be configured via .env file in project root.
    """

    model_config = SettingsConfigDict(
        env_nested_delimiter="__",
        env_prefix="QSLKIT__",
        case_sensitive=False,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    rank_tol: float = Field(
        1e-9,
        gt=0,
        lt=1e-3,
        validation_alias=AliasChoices("QSLKIT_TOL", "rank_tol"),
        description="Relative threshold for ranks, nullities and Frenet termination",
    )
    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    curve: CurveSettings = Field(default_factory=CurveSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


# Singleton instance - import and use throughout the app
settings = AppSettings()
