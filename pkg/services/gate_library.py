"""Named gates, their optimal diagonal generators and curve geometry.

Contents:
- standard_gate() / load_standard_gates(): library gates with reference values
- optimal_diagonal_generator() / cnot_generator(): width-saturating generators
- lambda_closure() / three_qubit_blocks(): closed-form closure data of
  diagonal generators
- bottleneck_plane_certifiers(): worked (A, B, rate) rotation planes
- geometry_class() / diagonal_frame_generator() / frame_generator() / classify_gate()
- spectrally_equivalent() / operator_schmidt_rank() / makhlin_invariants()
- resolve_gate() / gate_registry_dump() / build_table()
"""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.optimize
from pydantic import ValidationError

from models.models import (
    ClassificationReport,
    GateExpectation,
    GeometryClass,
    NamedGateRecord,
    OperatorPayload,
    TableReport,
    TableRow,
    geometry_label,
)
from services.operator_algebra import (
    DenseOperator,
    HermitianOperator,
    PauliString,
    UnitaryOperator,
    commutator,
    hs_norm,
    pauli_words,
    qubits_for_dim,
    spectral_decomposition,
    spectral_width,
)
from services.qsl_core import eigenphases, evolve_constant, minimal_spread, optimal_generator
from services.repository import GateRegistry
from services.scqc_geometry import frenet_frame
from utils.exceptions import DegenerateError, DimensionError, NotFoundError, PersistenceError
from utils.logging import get_logger
from utils.persistence import JSONStore

logger = get_logger(__name__)

_REL_TOL = 1e-9


def _pauli_sum(terms: dict[str, float], scale: float = 1.0) -> np.ndarray:
    return scale * sum(coef * PauliString(word).to_operator().matrix for word, coef in terms.items())


def _expm_pauli(terms: dict[str, float], angle: complex) -> np.ndarray:
    return scipy.linalg.expm(angle * _pauli_sum(terms))


def _permutation(dim: int, swaps: list[tuple[int, int]]) -> np.ndarray:
    m = np.eye(dim, dtype=np.complex128)
    for i, j in swaps:
        m[[i, j]] = m[[j, i]]
    return m


_ISWAP = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)

_MATRICES: dict[str, Callable[[], np.ndarray]] = {
    "X": lambda: _pauli_sum({"X": 1.0}),
    "Hadamard": lambda: _pauli_sum({"X": 1.0, "Z": 1.0}, 1 / np.sqrt(2)),
    "U_H": lambda: _expm_pauli({"X": 1.0, "Z": 1.0}, 1j * np.pi / (2 * np.sqrt(2))),
    "U_ZX": lambda: _expm_pauli({"ZX": 1.0}, -1j * np.pi / 4),
    "CNOT": lambda: _permutation(4, [(2, 3)]),
    "CZ": lambda: np.diag([1, 1, 1, -1]).astype(np.complex128),
    "SWAP": lambda: _permutation(4, [(1, 2)]),
    "iSWAP": lambda: _ISWAP.copy(),
    "U_4d": lambda: _expm_pauli({"ZI": 2.0, "IZ": 1.0}, 1j * np.pi / 4),
    "U_GHZ": lambda: _expm_pauli({"XXX": 1.0, "ZII": 1.0}, 1j * np.pi / (2 * np.sqrt(2))),
    "U_W": lambda: _expm_pauli({"XYZ": 1.0, "YZX": 1.0, "ZXY": 1.0}, 1j * np.pi / (2 * np.sqrt(3))),
    "Toffoli": lambda: _permutation(8, [(6, 7)]),
    "CCZ": lambda: np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(np.complex128),
}


@dataclass(frozen=True)
class DiagonalFamily:
    """Diagonal generator (Omega/2) * sum_w c_w w and the gates it serves."""

    label: str
    terms: dict[str, float]
    formula: str

    def at(self, omega: float) -> HermitianOperator:
        return HermitianOperator._trusted(_pauli_sum(self.terms, omega / 2))

    @property
    def width_factor(self) -> float:
        return spectral_width(self.at(1.0))


_SINGLE = DiagonalFamily("single", {"Z": 1.0}, "(Omega/2) Z")
_ZZ = DiagonalFamily("zz", {"ZZ": 1.0}, "(Omega/2) ZZ")
_CZ = DiagonalFamily("cz", {"ZI": -1.0, "IZ": -1.0, "ZZ": 1.0}, "(Omega/2)(-ZI - IZ + ZZ)")
_ISWAP_FRAME = DiagonalFamily("iswap", {"ZI": 0.5, "IZ": 0.5}, "(Omega/4)(ZI + IZ)")
_FOUR_D = DiagonalFamily("4d", {"ZI": 2.0, "IZ": 1.0}, "(Omega/2)(2ZI + IZ)")
_GHZ = DiagonalFamily("ghz", {"ZII": 1.0}, "(Omega/2) ZII")
_CCZ = DiagonalFamily(
    "ccz",
    {"ZII": -1.0, "IZI": -1.0, "IIZ": -1.0, "ZZI": 1.0, "ZIZ": 1.0, "IZZ": 1.0, "ZZZ": -1.0},
    "(Omega/2)(-ZII - IZI - IIZ + ZZI + ZIZ + IZZ - ZZZ)",
)

_S = 1 / np.sqrt(2)

# name -> (delta_phi_star, geometry, diagonal family, plane certifier A, notes)
_CATALOG: dict[str, tuple[float, GeometryClass, DiagonalFamily, dict[str, float], str]] = {
    "X": (np.pi, GeometryClass.ARC, _SINGLE, {"X": 1.0}, "Single-qubit frame of Z"),
    "Hadamard": (np.pi, GeometryClass.ARC, _SINGLE, {"X": 1.0}, "Single-qubit frame of Z"),
    "U_H": (np.pi, GeometryClass.ARC, _SINGLE, {"X": 1.0}, "exp[i pi/(2 sqrt 2)(X + Z)]"),
    "U_ZX": (np.pi / 2, GeometryClass.ARC, _ZZ, {"YI": _S, "YZ": _S}, "exp(-i (pi/4) ZX), locally equivalent to CNOT"),
    "CNOT": (np.pi, GeometryClass.HELIX3, _CZ, {"IX": _S, "ZX": -_S}, "Diagonal frame of CZ"),
    "CZ": (np.pi, GeometryClass.HELIX3, _CZ, {"IX": _S, "ZX": -_S}, ""),
    "SWAP": (np.pi, GeometryClass.HELIX3, _CZ, {"IX": _S, "ZX": -_S}, "Same spectrum as CZ"),
    "iSWAP": (
        np.pi,
        GeometryClass.HELIX3,
        _ISWAP_FRAME,
        {"XX": _S, "YY": -_S},
        "Diagonal generator chosen with the iSWAP spectrum {1, 1, i, -i}",
    ),
    "U_4d": (3 * np.pi / 2, GeometryClass.HELIX4, _FOUR_D, {"XX": _S, "YY": -_S}, "exp[i (pi/4)(2ZI + IZ)]"),
    "U_GHZ": (np.pi, GeometryClass.ARC, _GHZ, {"XII": _S, "YII": _S}, "exp[i pi/(2 sqrt 2)(XXX + ZII)]"),
    "U_W": (np.pi, GeometryClass.ARC, _GHZ, {"XII": _S, "YII": _S}, "exp[i pi/(2 sqrt 3)(XYZ + YZX + ZXY)]"),
    "Toffoli": (
        np.pi,
        GeometryClass.HELIX3,
        _CCZ,
        {"IIX": 0.5, "ZIX": -0.5, "IZX": -0.5, "ZZX": 0.5},
        "Diagonal frame of CCZ; Toffoli = (I I H) CCZ (I I H)",
    ),
    "CCZ": (
        np.pi,
        GeometryClass.HELIX3,
        _CCZ,
        {"IIX": 0.5, "ZIX": -0.5, "IZX": -0.5, "ZZX": 0.5},
        "",
    ),
}

STANDARD_GATE_NAMES: tuple[str, ...] = tuple(_CATALOG)

TABLE_ROWS: tuple[tuple[str, ...], ...] = (
    ("U_ZX",),
    ("U_H", "U_GHZ", "U_W"),
    ("CNOT", "CZ", "SWAP", "iSWAP"),
    ("Toffoli",),
    ("U_4d",),
)


@dataclass(frozen=True, eq=False)
class NamedGate:
    """Gate with optional reference values.

    family is the diagonal generator family of library gates, None for gates
    read from files.
    """

    name: str
    unitary: UnitaryOperator
    qubits: int | None = None
    expected: GateExpectation | None = None
    family: DiagonalFamily | None = field(default=None, repr=False)
    notes: str = ""

    @property
    def dim(self) -> int:
        return self.unitary.dim

    def to_record(self) -> NamedGateRecord:
        return NamedGateRecord(
            name=self.name,
            qubits=self.qubits if self.qubits is not None else qubits_for_dim(self.dim),
            unitary=self.unitary.to_payload(),
            expected=self.expected,
            frame=self.family.formula if self.family else None,
            notes=self.notes,
        )


@dataclass(frozen=True)
class DiagonalTwoQubitGenerator:
    """(1/2)(a1 ZI + a2 IZ + a3 ZZ)."""

    a1: float
    a2: float
    a3: float

    def to_operator(self) -> HermitianOperator:
        return HermitianOperator._trusted(_pauli_sum({"ZI": self.a1, "IZ": self.a2, "ZZ": self.a3}, 0.5))

    def closure(self) -> int:
        return lambda_closure(self.a1, self.a2, self.a3)


class PlaneCertifier(NamedTuple):
    """Orthonormal A, B with U^dagger A U = cos(rate t) A + sin(rate t) B."""

    a: HermitianOperator
    b: HermitianOperator
    rate: float


@dataclass(frozen=True)
class BlockFrequencies:
    """Plane frequencies of the invariant block with X/Y support on `support` (1-based qubits)."""

    support: tuple[int, ...]
    signs: tuple[tuple[int, int, int], ...]
    frequencies: tuple[float, ...]


@dataclass(frozen=True)
class GeometryWitness:
    """Largest Pauli closure dimension under a generator and the first string attaining it."""

    closure_dim: int
    certifier: str

    @property
    def geometry(self) -> str:
        return geometry_label(self.closure_dim)


class MakhlinInvariants(NamedTuple):
    g1: complex
    g2: float


def _catalog_entry(name: str):
    if name in _CATALOG:
        return name, _CATALOG[name]
    for key, entry in _CATALOG.items():
        if key.casefold() == name.casefold():
            return key, entry
    raise NotFoundError(f"Unknown gate {name!r}; known gates: {', '.join(STANDARD_GATE_NAMES)}")


def standard_gate(name: str) -> NamedGate:
    """Library gate with its reference speed limit and geometry.

    Raises:
        NotFoundError: If name is not a library gate
    """
    key, (delta, geometry, family, _, notes) = _catalog_entry(name)
    matrix = _MATRICES[key]()
    return NamedGate(
        name=key,
        unitary=UnitaryOperator(matrix),
        qubits=qubits_for_dim(matrix.shape[0]),
        expected=GateExpectation(delta_phi_star=delta, geometry=geometry),
        family=family,
        notes=notes,
    )


def load_standard_gates(registry: GateRegistry | None = None) -> GateRegistry:
    """Register every library gate (idempotent)."""
    registry = GateRegistry() if registry is None else registry
    for name in STANDARD_GATE_NAMES:
        if name not in registry:
            registry.register(standard_gate(name))
    logger.debug(f"{len(registry)} gates registered")
    return registry


def optimal_diagonal_generator(name: str, omega: float = 1.0) -> HermitianOperator:
    """Diagonal width-saturating generator of a library gate at coupling omega.

    Raises:
        NotFoundError: If name is not a library gate
    """
    _, (_, _, family, _, _) = _catalog_entry(name)
    return family.at(omega)


def saturating_omega(name: str, omega_max: float) -> float:
    """Coupling omega at which the library generator has width omega_max."""
    _, (_, _, family, _, _) = _catalog_entry(name)
    return omega_max / family.width_factor


def cnot_generator(omega: float = 1.0) -> HermitianOperator:
    """(Omega/2)(ZI + IX - ZX): reaches CNOT itself at T-star = pi / (2 Omega)."""
    return HermitianOperator._trusted(_pauli_sum({"ZI": 1.0, "IX": 1.0, "ZX": -1.0}, omega / 2))


def _pair_closure(a: float, b: float, scale: float) -> int:
    a_on = abs(a) > _REL_TOL * scale
    b_on = abs(b) > _REL_TOL * scale
    if a_on and b_on:
        return 3 if abs(abs(a) - abs(b)) <= _REL_TOL * scale else 4
    if a_on or b_on:
        return 2
    return 0


def lambda_closure(a1: float, a2: float, a3: float) -> int:
    """Largest Pauli closure dimension under (1/2)(a1 ZI + a2 IZ + a3 ZZ).

    Raises:
        DegenerateError: If all coefficients vanish
    """
    scale = max(abs(a1), abs(a2), abs(a3))
    if scale == 0:
        raise DegenerateError("Diagonal generator is zero; no Pauli string moves")
    return max(_pair_closure(a, b, scale) for a, b in ((a1, a2), (a1, a3), (a2, a3)))


# Coefficient order a1..a7 and the qubits of the Z string each multiplies
_THREE_QUBIT_TERMS: tuple[tuple[int, ...], ...] = ((1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3))
_THREE_QUBIT_WORDS = ("ZII", "IZI", "IIZ", "ZZI", "ZIZ", "IZZ", "ZZZ")


def three_qubit_generator(coefficients) -> HermitianOperator:
    """(1/2)(a1 ZII + a2 IZI + a3 IIZ + a4 ZZI + a5 ZIZ + a6 IZZ + a7 ZZZ)."""
    a = np.asarray(coefficients, dtype=np.float64)
    if a.shape != (7,):
        raise DimensionError(f"Expected seven coefficients, got shape {a.shape}")
    return HermitianOperator._trusted(_pauli_sum(dict(zip(_THREE_QUBIT_WORDS, a, strict=True)), 0.5))


def three_qubit_blocks(coefficients) -> list[BlockFrequencies]:
    """Signed plane frequencies of the seven invariant blocks of a diagonal 3-qubit generator.

    A block is labelled by the qubits S carrying X/Y. Its four frequencies are
    sum over Z-strings T with |T & S| odd of a_T * prod_{i in T} sign_i, one per
    sign pattern with the first qubit of S fixed to +1.
    """
    a = np.asarray(coefficients, dtype=np.float64)
    if a.shape != (7,):
        raise DimensionError(f"Expected seven coefficients, got shape {a.shape}")

    blocks = []
    for size in (1, 2, 3):
        for support in itertools.combinations((1, 2, 3), size):
            signs, frequencies = [], []
            for pattern in itertools.product((1, -1), repeat=3):
                if pattern[support[0] - 1] != 1:
                    continue
                kappa = sum(
                    coef * np.prod([pattern[i - 1] for i in term])
                    for coef, term in zip(a, _THREE_QUBIT_TERMS, strict=True)
                    if len(set(term) & set(support)) % 2 == 1
                )
                signs.append(pattern)
                frequencies.append(float(kappa))
            blocks.append(BlockFrequencies(support=support, signs=tuple(signs), frequencies=tuple(frequencies)))
    return blocks


def bottleneck_plane_certifiers(name: str, omega: float = 1.0) -> list[PlaneCertifier]:
    """Worked rotation plane of a library gate under its diagonal generator.

    B = i[H, A] / rate with rate the generator's spectral width.

    Raises:
        NotFoundError: If name is not a library gate
    """
    _, (_, _, family, a_terms, _) = _catalog_entry(name)
    h = family.at(omega)
    rate = spectral_width(h)
    a = HermitianOperator._trusted(_pauli_sum(a_terms))
    b = commutator(h, a) / rate
    return [PlaneCertifier(a=a, b=b, rate=rate)]


def geometry_class(generator: HermitianOperator, tol: float | None = None) -> GeometryWitness:
    """Largest closure dimension over Pauli strings that do not commute with the generator.

    The certifier is the first such string in I < X < Y < Z order attaining it.
    """
    q = qubits_for_dim(generator.dim)
    best = GeometryWitness(closure_dim=1, certifier="")
    for word in pauli_words(q):
        observable = PauliString(word).to_operator()
        if hs_norm(commutator(generator, observable)) <= 1e-12 * (1.0 + spectral_width(generator)):
            continue
        closure = frenet_frame(generator, observable, tol).closure_dim
        if closure > best.closure_dim:
            best = GeometryWitness(closure_dim=closure, certifier=word)
    return best


def diagonal_frame_generator(g: DenseOperator, omega_max: float = 1.0) -> HermitianOperator:
    """Diagonal matrix of the optimal generator's eigenvalues in ascending order.

    Raises:
        DimensionError: If the dimension is not a power of two
        DegenerateGateError: If g is the identity up to phase
    """
    qubits_for_dim(g.dim)
    energies, _ = spectral_decomposition(optimal_generator(g, omega_max).h_star)
    return HermitianOperator.diagonal(energies)


def frame_generator(gate: NamedGate, omega_max: float = 1.0) -> HermitianOperator | None:
    """Diagonal generator of width omega_max that reaches the gate, up to local frame, at T-star.

    The stored family is used only when its evolution at T-star has the gate's
    spectrum; otherwise the frame is rebuilt from the gate matrix. None for
    gates that are the identity up to phase.
    """
    speed = minimal_spread(eigenphases(gate.unitary), omega_max)
    if speed.t_star == 0:
        return None
    if gate.family is not None:
        frame = gate.family.at(omega_max / gate.family.width_factor)
        if spectrally_equivalent(evolve_constant(frame, speed.t_star), gate.unitary):
            return frame
        logger.warning(f"{gate.name}: stored frame {gate.family.formula} does not reach the gate; using its spectrum")
    return diagonal_frame_generator(gate.unitary, omega_max)


def classify_gate(gate: NamedGate, omega_max: float = 1.0) -> ClassificationReport:
    """Speed limit and space-curve geometry of a gate's bottleneck Pauli certifier."""
    speed = minimal_spread(eigenphases(gate.unitary), omega_max)
    generator = frame_generator(gate, omega_max)
    witness = GeometryWitness(closure_dim=1, certifier="") if generator is None else geometry_class(generator)
    logger.debug(f"{gate.name}: closure {witness.closure_dim} via {witness.certifier or 'none'}")
    return ClassificationReport(
        gate=gate.name,
        delta_phi_star=speed.delta_phi_star,
        t_star=speed.t_star,
        omega_max=omega_max,
        geometry=witness.geometry,
        bottleneck_certifier=witness.certifier,
        closure_dim=witness.closure_dim,
    )


def spectrally_equivalent(a: DenseOperator, b: DenseOperator, atol: float = 1e-9) -> bool:
    """True when the eigenvalue multisets agree up to one global phase."""
    if a.dim != b.dim:
        return False
    ea = np.linalg.eigvals(a.matrix)
    eb = np.linalg.eigvals(b.matrix)
    if np.max(np.abs(ea)) == 0:
        return bool(np.max(np.abs(eb)) <= atol)
    anchor = int(np.argmax(np.abs(ea)))
    for target in eb:
        if abs(target) == 0:
            continue
        phase = target / ea[anchor]
        phase /= abs(phase)
        cost = np.abs((phase * ea)[:, np.newaxis] - eb[np.newaxis, :])
        rows, cols = scipy.optimize.linear_sum_assignment(cost)
        if np.max(cost[rows, cols]) <= atol:
            return True
    return False


def operator_schmidt_rank(u: DenseOperator, split: tuple[int, int] | None = None, tol: float = 1e-9) -> int:
    """Operator Schmidt rank across a bipartition (two equal halves of qubits by default)."""
    n = u.dim
    if split is None:
        q = qubits_for_dim(n)
        if q < 2:
            raise DimensionError("Operator Schmidt rank needs at least two qubits")
        split = (2 ** (q // 2), 2 ** (q - q // 2))
    da, db = split
    if da * db != n:
        raise DimensionError(f"Split {split} does not factor dimension {n}")
    realigned = u.matrix.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    singular = scipy.linalg.svdvals(realigned)
    return int(np.sum(singular > tol * singular[0]))


_MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=np.complex128) / np.sqrt(2)


def makhlin_invariants(u: DenseOperator) -> MakhlinInvariants:
    """Local invariants (G1, G2) of a two-qubit gate from the magic basis.

    Gates with equal invariants differ only by single-qubit operations.
    """
    if u.dim != 4:
        raise DimensionError(f"Makhlin invariants need a two-qubit gate, got dim {u.dim}")
    ub = _MAGIC.conj().T @ u.matrix @ _MAGIC
    m = ub.T @ ub
    det = np.linalg.det(u.matrix)
    tr = np.trace(m)
    g1 = tr**2 / (16 * det)
    g2 = (tr**2 - np.trace(m @ m)) / (4 * det)
    return MakhlinInvariants(g1=complex(g1), g2=float(np.real(g2)))


def resolve_gate(name_or_path: str) -> NamedGate:
    """Library gate by name, or a gate read from an OperatorPayload JSON file.

    Raises:
        NotFoundError: If name_or_path is neither a gate name nor an existing file
        PersistenceError: If the file is not a valid operator payload
        UnitarityError: If the file's matrix is not unitary
        DimensionError: If the file's dimension is not a power of two
    """
    registry = load_standard_gates()
    try:
        return registry.get(name_or_path)
    except NotFoundError:
        path = Path(name_or_path)
        if not path.is_file():
            raise

    try:
        payload = OperatorPayload.model_validate(JSONStore(path).read())
    except ValidationError as e:
        raise PersistenceError(f"{path} is not an operator payload: {e.errors()[0]['msg']}") from e
    unitary = UnitaryOperator(payload.to_matrix())
    dim = unitary.dim
    qubits = qubits_for_dim(dim)
    logger.info(f"Loaded {dim}x{dim} gate from {path}")
    return NamedGate(name=path.stem, unitary=unitary, qubits=qubits)


def gate_registry_dump() -> list[NamedGateRecord]:
    """Every registered gate with its matrix and reference values."""
    registry = load_standard_gates()
    return [registry.get(name).to_record() for name in registry.names()]


def build_table(omega_max: float = 1.0) -> TableReport:
    """Recompute minimal gate times and geometry for the reference table rows.

    Gates are read from the registry, so registered replacements are checked
    against their own expectations.
    """
    registry = load_standard_gates()
    rows = []
    for names in TABLE_ROWS:
        gates = [registry.get(name) for name in names]
        reports = [classify_gate(gate, omega_max) for gate in gates]
        first = reports[0]
        mismatches = []
        for gate, report in zip(gates, reports, strict=True):
            expected = gate.expected
            if expected is None:
                continue
            if (
                abs(report.delta_phi_star - expected.delta_phi_star) > _REL_TOL
                or report.geometry != expected.geometry.value
            ):
                mismatches.append(gate.name)
        if mismatches:
            logger.warning(f"Table row {', '.join(names)} disagrees for {', '.join(mismatches)}")
        rows.append(
            TableRow(
                gates=list(names),
                delta_phi_star=first.delta_phi_star,
                t_star=first.t_star,
                geometry=first.geometry,
                matches=not mismatches,
                mismatches=mismatches,
            )
        )
    return TableReport(omega_max=omega_max, rows=rows)


def local_factor(*factors: DenseOperator) -> UnitaryOperator:
    """Tensor product of single-qubit unitaries."""
    return UnitaryOperator(reduce(np.kron, (f.matrix for f in factors)))
