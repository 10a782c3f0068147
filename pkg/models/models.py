"""Pydantic data models for structured data transfer.

Defines DTOs (Data Transfer Objects) for:
- OperatorPayload / PauliPayload: JSON forms of operators and Pauli strings
- SpeedLimitResult: exact speed limit of a target gate
- HamiltonianNorms / RateCheckReport: generator diagnostics
- CommutantReport / BottleneckReport / PlanarityReport: certifier outputs
- ClassificationReport / TableReport / NamedGateRecord: gate library outputs
- CurveMetadata: provenance of exported space curves
- CliConfig: validated command-line configuration
"""

import math
import re
from enum import Enum, IntEnum
from pathlib import Path
from typing import Literal, TypeAlias

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.config import settings

# Type aliases for common patterns
RealMatrix: TypeAlias = list[list[float]]
PauliWord: TypeAlias = str
Command: TypeAlias = Literal["qsl", "curve", "classify", "certify", "bottleneck", "table", "gates"]

_PAULI_WORD = re.compile(r"^[+-]?[IXYZ]+$")


class ExitCode(IntEnum):
    """Stable process exit codes of the CLI."""

    OK = 0
    FAILED = 1
    USAGE = 2
    NOT_UNITARY = 3


class GeometryClass(str, Enum):
    """Space-curve geometry of a bottleneck certifier."""

    ARC = "arc"
    HELIX3 = "helix3"
    HELIX4 = "helix4"

    @classmethod
    def from_closure_dim(cls, closure_dim: int) -> "GeometryClass":
        mapping = {2: cls.ARC, 3: cls.HELIX3, 4: cls.HELIX4}
        if closure_dim not in mapping:
            raise ValueError(f"No geometry class for closure dimension {closure_dim}")
        return mapping[closure_dim]


def geometry_label(closure_dim: int) -> str:
    """Geometry name for any closure dimension ('static' for 1, 'helixN' beyond 4)."""
    if closure_dim <= 1:
        return "static"
    if closure_dim <= 4:
        return GeometryClass.from_closure_dim(closure_dim).value
    return f"helix{closure_dim}"


class OperatorPayload(BaseModel):
    """Row-major JSON form of a dense complex operator.

    Attributes:
        dim: Hilbert-space dimension n
        re: Real parts, n x n
        im: Imaginary parts, n x n (zeros when omitted)
    """

    dim: int = Field(..., ge=2, le=16, description="Hilbert-space dimension")
    re: RealMatrix = Field(..., description="Real part, row-major")
    im: RealMatrix | None = Field(None, description="Imaginary part, row-major")

    @model_validator(mode="after")
    def validate_shape(self) -> "OperatorPayload":
        """Both parts must be dim x dim."""
        for name in ("re", "im"):
            rows = getattr(self, name)
            if rows is None:
                continue
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"'{name}' must be a {self.dim}x{self.dim} matrix")
        return self

    def to_matrix(self) -> np.ndarray:
        real = np.asarray(self.re, dtype=np.float64)
        imag = np.zeros_like(real) if self.im is None else np.asarray(self.im, dtype=np.float64)
        return real + 1j * imag

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "OperatorPayload":
        matrix = np.asarray(matrix)
        return cls(dim=matrix.shape[0], re=matrix.real.tolist(), im=matrix.imag.tolist())


class PauliPayload(BaseModel):
    """JSON form of a signed Pauli string."""

    word: PauliWord = Field(..., min_length=1, description="Word over I, X, Y, Z")
    sign: Literal[1, -1] = Field(1, description="Real sign")

    @field_validator("word")
    @classmethod
    def validate_word(cls, v: str) -> str:
        v = v.upper()
        if not re.fullmatch(r"[IXYZ]+", v):
            raise ValueError(f"Pauli word must use only I, X, Y, Z, got: {v}")
        return v


class SpeedLimitResult(BaseModel):
    """Exact spectral-width speed limit of a gate.

    Attributes:
        gate: Gate label
        delta_phi_star: Minimal eigenphase spread (radians)
        t_star: delta_phi_star / omega_max
        omega_max: Spectral-width budget
        phases: Eigenphases in (-pi, pi], ascending
        shifts: 2*pi multiples applied to each phase
        bottleneck_pair: Indices of the extreme shifted phases

    Validation:
        - t_star equals delta_phi_star / omega_max
        - 0 <= delta_phi_star < 2*pi
    """

    model_config = ConfigDict(frozen=True)

    gate: str | None = Field(None, description="Gate label")
    delta_phi_star: float = Field(..., ge=0.0, lt=2 * math.pi, description="Minimal spread")
    t_star: float = Field(..., ge=0.0, description="Minimal gate time")
    omega_max: float = Field(..., gt=0.0, description="Spectral-width budget")
    phases: list[float] = Field(..., description="Unshifted eigenphases")
    shifts: list[int] = Field(..., description="2*pi shifts per eigenphase")
    bottleneck_pair: tuple[int, int] = Field(..., exclude=True)

    @model_validator(mode="after")
    def validate_time(self) -> "SpeedLimitResult":
        if self.t_star != self.delta_phi_star / self.omega_max:
            raise ValueError("t_star must equal delta_phi_star / omega_max")
        if len(self.phases) != len(self.shifts):
            raise ValueError(f"{len(self.phases)} phases vs {len(self.shifts)} shifts")
        return self

    @classmethod
    def build(
        cls,
        delta_phi_star: float,
        omega_max: float,
        phases: list[float],
        shifts: list[int],
        bottleneck_pair: tuple[int, int],
        gate: str | None = None,
    ) -> "SpeedLimitResult":
        return cls(
            gate=gate,
            delta_phi_star=delta_phi_star,
            t_star=delta_phi_star / omega_max,
            omega_max=omega_max,
            phases=phases,
            shifts=shifts,
            bottleneck_pair=bottleneck_pair,
        )

    @property
    def shifted_phases(self) -> list[float]:
        return [phi + 2 * math.pi * s for phi, s in zip(self.phases, self.shifts, strict=True)]

    def labelled(self, gate: str) -> "SpeedLimitResult":
        return self.model_copy(update={"gate": gate})


class HamiltonianNorms(BaseModel):
    """Normalized HS norm next to the spectral width of a generator."""

    dim: int = Field(..., ge=2)
    hs_norm: float = Field(..., ge=0.0)
    spectral_width: float = Field(..., ge=0.0)
    centered_operator_norm: float = Field(..., ge=0.0, description="w/2")


class RateCheckReport(BaseModel):
    """Largest finite-difference rate of the centered evolution's matrix elements."""

    max_rate: float = Field(..., ge=0.0)
    bound: float = Field(..., ge=0.0, description="w(h)/2")
    samples: int = Field(..., ge=1)
    t_max: float = Field(..., gt=0.0)
    passed: bool


class CommutantReport(BaseModel):
    """Dimension of the common commutant of a set of operators.

    Validation:
        - certifies is True exactly when the dimension is 1
    """

    label: str = Field("", description="Certifying-set label")
    size: int = Field(0, ge=0, description="Number of operators tested")
    dimension: int = Field(..., ge=1)
    certifies: bool

    @model_validator(mode="after")
    def validate_certifies(self) -> "CommutantReport":
        if self.certifies != (self.dimension == 1):
            raise ValueError("certifies must be True exactly when dimension == 1")
        return self


class BottleneckEntry(BaseModel):
    """Per-observable planar bound."""

    observable: str = Field(..., min_length=1)
    theta: float = Field(..., ge=0.0, le=math.pi, description="Endpoint angle")
    t2d: float = Field(..., ge=0.0, description="theta / omega_max")
    closure_dim: int = Field(..., ge=1, description="Closure dimension under H-star")
    exact: bool = Field(False, description="Bound is the exact time for this observable")
    bound: float = Field(..., ge=0.0, description="Lower bound contributed by this entry")


class BottleneckReport(BaseModel):
    """Bottleneck lower bound over a certifying set.

    Validation:
        - t_lower is the max of the entry bounds (0 for an empty set)
    """

    gate: str = Field(..., description="Gate label")
    certifier_set: str = Field(..., description="Certifying-set label")
    omega_max: float = Field(..., gt=0.0)
    entries: list[BottleneckEntry] = Field(default_factory=list)
    t_lower: float = Field(..., ge=0.0)
    bottleneck_label: str = Field("", description="First observable attaining t_lower")
    bottlenecks: list[str] = Field(default_factory=list, description="All observables tied at t_lower")
    eta_lower: float | None = Field(None, ge=0.0, description="T-star / t_lower")
    certifies: bool | None = Field(None, description="Whether the set was verified to certify")

    @model_validator(mode="after")
    def validate_max(self) -> "BottleneckReport":
        expected = max((entry.bound for entry in self.entries), default=0.0)
        if self.t_lower != expected:
            raise ValueError(f"t_lower {self.t_lower} is not the max entry bound {expected}")
        return self


class PlanarityReport(BaseModel):
    """Planarity / overhead diagnostic of the bottleneck observables."""

    gate: str
    certifier_set: str
    omega_max: float = Field(..., gt=0.0)
    t_star: float = Field(..., ge=0.0)
    t_lower: float = Field(..., ge=0.0)
    eta_lower: float | None = Field(None, ge=0.0, description="T-star / t_lower, unset when t_lower is 0")
    bottleneck_label: str
    bottlenecks: list[str] = Field(default_factory=list)
    bottleneck_closure_dim: int = Field(..., ge=1)
    closure_dims: dict[str, int] = Field(default_factory=dict)
    overhead: bool = Field(..., description="Bottleneck curve cannot stay in a plane")


class GateExpectation(BaseModel):
    """Reference values of a library gate."""

    delta_phi_star: float = Field(..., ge=0.0, lt=2 * math.pi)
    geometry: GeometryClass


class NamedGateRecord(BaseModel):
    """Registry dump entry."""

    name: str = Field(..., min_length=1)
    qubits: int = Field(..., ge=1)
    unitary: OperatorPayload
    expected: GateExpectation | None = None
    frame: str | None = Field(None, description="Formula of the diagonal frame generator")
    notes: str = ""


class ClassificationReport(BaseModel):
    """Speed limit and curve geometry of a gate."""

    gate: str
    delta_phi_star: float = Field(..., ge=0.0)
    t_star: float = Field(..., ge=0.0)
    omega_max: float = Field(..., gt=0.0)
    geometry: str
    bottleneck_certifier: str
    closure_dim: int = Field(..., ge=1)


class TableRow(BaseModel):
    """One row of the minimal gate time table (gates sharing the same values)."""

    gates: list[str] = Field(..., min_length=1)
    delta_phi_star: float = Field(..., ge=0.0)
    t_star: float = Field(..., ge=0.0)
    geometry: str
    matches: bool
    mismatches: list[str] = Field(default_factory=list, description="Gates that disagree")


class TableReport(BaseModel):
    """Recomputed minimal gate time table."""

    omega_max: float = Field(..., gt=0.0)
    rows: list[TableRow]

    @property
    def all_match(self) -> bool:
        return all(row.matches for row in self.rows)


class CurveMetadata(BaseModel):
    """Provenance of an exported space curve (no timestamps)."""

    gate: str
    observable: str
    omega_max: float = Field(..., gt=0.0)
    steps: int = Field(..., ge=1)
    t_star: float = Field(..., ge=0.0)
    basis: str
    generated_by: str = Field(default_factory=lambda: settings.output.generated_by)


class CliConfig(BaseModel):
    """Validated command-line configuration.

    Validation:
        - omega_max > 0 and steps >= 16
        - observable is a Pauli word (qubit count is checked against the gate later)
        - curve needs an observable; gate-driven commands need a gate
    """

    model_config = ConfigDict(extra="ignore")

    command: Command
    gate: str | None = Field(None, description="Library gate name or JSON file path")
    omega_max: float = Field(1.0, gt=0.0, description="Spectral-width budget")
    observable: str | None = Field(None, description="Pauli word for curve export")
    steps: int = Field(default_factory=lambda: settings.curve.default_steps, ge=16)
    out: Path | None = Field(None, description="Output path (stdout when unset)")
    format: Literal["json", "csv", "text"] = "json"
    certifiers: Literal["pauli", "eigen", "p-only"] = "pauli"
    operators: Path | None = Field(None, description="JSON list of operators for certify")
    canonical: int | None = Field(None, ge=2, le=16, description="Canonical pair dimension")
    debug: bool = False

    @field_validator("observable")
    @classmethod
    def validate_observable(cls, v: str | None) -> str | None:
        if v is None:
            return v
        v = v.strip().upper()
        if not _PAULI_WORD.match(v):
            raise ValueError(f"Observable must be a Pauli word, got: {v}")
        if set(v.lstrip("+-")) == {"I"}:
            raise ValueError("Observable must not be the identity string")
        return v

    @model_validator(mode="after")
    def validate_command_inputs(self) -> "CliConfig":
        if self.command in ("qsl", "curve", "classify", "bottleneck") and not self.gate:
            raise ValueError(f"'{self.command}' needs --gate")
        if self.command == "curve" and self.observable is None:
            raise ValueError("'curve' needs --observable")
        if self.command == "certify":
            sources = [self.operators is not None, self.canonical is not None, bool(self.gate)]
            if sum(sources) != 1:
                raise ValueError("'certify' needs exactly one of --operators, --canonical, --gate")
        return self
