"""Dense operator algebra over the traceless-Hermitian operator space.

Everything here works with the normalized Hilbert-Schmidt inner product
<a, b> = (1/n) Re Tr(a^dagger b), so every Pauli string has unit norm.

Value types (all immutable, arrays are read-only):
- DenseOperator: square complex matrix, n >= 2
- HermitianOperator: Hamiltonians and observables
- UnitaryOperator: evolutions and target gates
- PauliString: signed word over {I, X, Y, Z}
- OperatorBasis: orthonormal traceless basis of su(n)
- CoordinateVector: real coordinates in an OperatorBasis
"""

from __future__ import annotations

import itertools
import numbers
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np
from numpy.typing import NDArray

from models.config import settings
from models.models import HamiltonianNorms, OperatorPayload, PauliPayload
from utils.exceptions import (
    DimensionError,
    HermiticityError,
    NormError,
    NumericalError,
    RangeError,
    TraceError,
    UnitarityError,
)
from utils.logging import get_logger

logger = get_logger(__name__)

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]

PAULI_LETTERS = "IXYZ"

_PAULI_MATRICES: dict[str, ComplexMatrix] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _frozen(matrix) -> np.ndarray:
    arr = np.array(matrix, copy=True)
    arr.setflags(write=False)
    return arr


def _is_real_scalar(value) -> bool:
    return isinstance(value, numbers.Real) or (
        isinstance(value, numbers.Complex) and complex(value).imag == 0.0
    )


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Square complex matrix acting on an n-dimensional Hilbert space (n >= 2)."""

    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        arr = np.asarray(self.matrix, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"Operator must be a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise DimensionError(f"Operator dimension must be >= 2, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("Operator has non-finite entries")
        object.__setattr__(self, "matrix", _frozen(arr))

    @classmethod
    def _trusted(cls, matrix):
        """Build without validation, for results that hold the invariant by construction."""
        op = object.__new__(cls)
        object.__setattr__(op, "matrix", _frozen(np.asarray(matrix, dtype=np.complex128)))
        return op

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def allclose(self, other: DenseOperator, atol: float = 1e-9) -> bool:
        """Entrywise comparison within an absolute tolerance."""
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0))

    def to_payload(self) -> OperatorPayload:
        return OperatorPayload.from_matrix(self.matrix)

    def _like(self, matrix, other: DenseOperator | None = None) -> DenseOperator:
        both_hermitian = isinstance(self, HermitianOperator) and (
            other is None or isinstance(other, HermitianOperator)
        )
        if both_hermitian:
            return HermitianOperator._trusted(matrix)
        return DenseOperator(matrix)

    def __add__(self, other: DenseOperator) -> DenseOperator:
        _check_dims(self, other)
        return self._like(self.matrix + other.matrix, other)

    def __sub__(self, other: DenseOperator) -> DenseOperator:
        _check_dims(self, other)
        return self._like(self.matrix - other.matrix, other)

    def __neg__(self) -> DenseOperator:
        return self._like(-self.matrix)

    def __mul__(self, scalar) -> DenseOperator:
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        if _is_real_scalar(scalar):
            return self._like(float(np.real(scalar)) * self.matrix)
        return DenseOperator(scalar * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> DenseOperator:
        return self * (1.0 / scalar)

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        _check_dims(self, other)
        product = self.matrix @ other.matrix
        if isinstance(self, UnitaryOperator) and isinstance(other, UnitaryOperator):
            return UnitaryOperator(product)
        return DenseOperator(product)


@dataclass(frozen=True, eq=False)
class HermitianOperator(DenseOperator):
    """Hermitian matrix; inputs within tolerance are symmetrized, others rejected."""

    def __post_init__(self) -> None:
        super().__post_init__()
        m = self.matrix
        scale = 1.0 + float(np.max(np.abs(m)))
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation > settings.numerics.hermitian_rtol * scale:
            raise HermiticityError(f"Matrix is not Hermitian (deviation {deviation:.3e})")
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2))

    @classmethod
    def _trusted(cls, matrix):
        m = np.asarray(matrix, dtype=np.complex128)
        return super()._trusted((m + m.conj().T) / 2)

    @classmethod
    def zeros(cls, dim: int) -> HermitianOperator:
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def identity(cls, dim: int) -> HermitianOperator:
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def diagonal(cls, values) -> HermitianOperator:
        return cls(np.diag(np.asarray(values, dtype=np.float64)))

    def is_traceless(self, atol: float | None = None) -> bool:
        atol = settings.numerics.trace_atol if atol is None else atol
        return abs(self.trace()) <= atol * self.dim


@dataclass(frozen=True, eq=False)
class UnitaryOperator(DenseOperator):
    """Unitary matrix: max |U^dagger U - I| within the unitarity tolerance."""

    def __post_init__(self) -> None:
        super().__post_init__()
        m = self.matrix
        error = float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))
        if error > settings.numerics.unitary_atol:
            raise UnitarityError(f"Matrix is not unitary (max |U^dagger U - I| = {error:.3e})")

    @classmethod
    def identity(cls, dim: int) -> UnitaryOperator:
        return cls._trusted(np.eye(dim, dtype=np.complex128))

    def dag(self) -> UnitaryOperator:
        return UnitaryOperator._trusted(self.matrix.conj().T)

    def heisenberg(self, o: HermitianOperator) -> HermitianOperator:
        """Return U^dagger o U."""
        _check_dims(self, o)
        return HermitianOperator._trusted(self.matrix.conj().T @ o.matrix @ self.matrix)


@dataclass(frozen=True)
class PauliString:
    """Signed tensor word over {I, X, Y, Z}; most-significant qubit first."""

    word: str
    sign: int = 1

    def __post_init__(self) -> None:
        word = self.word.upper()
        if not word or any(letter not in PAULI_LETTERS for letter in word):
            raise ValueError(f"Invalid Pauli word: {self.word!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"Pauli sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "word", word)

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse 'ZX', '+ZX' or '-ZX'."""
        text = text.strip()
        sign = 1
        if text and text[0] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text, sign)

    @classmethod
    def from_payload(cls, payload: PauliPayload) -> PauliString:
        return cls(payload.word, payload.sign)

    @property
    def qubits(self) -> int:
        return len(self.word)

    @property
    def dim(self) -> int:
        return 2**self.qubits

    @property
    def label(self) -> str:
        return self.word if self.sign == 1 else f"-{self.word}"

    @property
    def is_identity(self) -> bool:
        return set(self.word) == {"I"}

    def to_operator(self) -> HermitianOperator:
        matrix = reduce(np.kron, (_PAULI_MATRICES[letter] for letter in self.word))
        return HermitianOperator._trusted(self.sign * matrix)

    def to_payload(self) -> PauliPayload:
        return PauliPayload(word=self.word, sign=self.sign)


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Orthonormal, traceless basis of su(n) with n^2 - 1 elements."""

    elements: tuple[HermitianOperator, ...]
    label: str
    element_labels: tuple[str, ...] = ()
    stack: ComplexMatrix = field(init=False, repr=False)

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        if not elements:
            raise DimensionError("Operator basis must not be empty")
        n = elements[0].dim
        if any(element.dim != n for element in elements):
            raise DimensionError("Basis elements have mixed dimensions")
        if len(elements) != n * n - 1:
            raise DimensionError(f"A basis of su({n}) needs {n * n - 1} elements, got {len(elements)}")
        labels = tuple(self.element_labels) or tuple(f"O{k + 1}" for k in range(len(elements)))
        if len(labels) != len(elements):
            raise DimensionError("element_labels must match the number of elements")

        stack = np.stack([element.matrix for element in elements])
        traces = np.abs(np.einsum("kii->k", stack))
        if np.max(traces) > settings.numerics.trace_atol * n:
            raise TraceError(f"Basis {self.label!r} has an element with nonzero trace")
        flat = stack.reshape(len(elements), -1)
        gram = (flat.conj() @ flat.T).real / n
        deviation = float(np.max(np.abs(gram - np.eye(len(elements)))))
        if deviation > settings.numerics.basis_atol:
            raise NormError(f"Basis {self.label!r} is not orthonormal (deviation {deviation:.3e})")

        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "element_labels", labels)
        object.__setattr__(self, "stack", _frozen(stack))

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, label: str) -> int:
        return self.element_labels.index(label)


@dataclass(frozen=True, eq=False)
class CoordinateVector:
    """Real coordinates of a traceless Hermitian operator in a named basis."""

    coords: RealVector
    basis_label: str

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 1:
            raise DimensionError("Coordinates must be a 1-D vector")
        object.__setattr__(self, "coords", _frozen(coords))

    def __len__(self) -> int:
        return len(self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def _check_dims(a: DenseOperator, b: DenseOperator) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def hs_inner(a: DenseOperator, b: DenseOperator) -> float:
    """Normalized Hilbert-Schmidt inner product (1/n) Re Tr(a^dagger b).

    Raises:
        DimensionError: If the operators act on different spaces
    """
    _check_dims(a, b)
    return float(np.vdot(a.matrix, b.matrix).real) / a.dim


def hs_norm(a: DenseOperator) -> float:
    return float(np.sqrt(max(hs_inner(a, a), 0.0)))


def phase_fidelity(a: DenseOperator, b: DenseOperator) -> float:
    """Global-phase-invariant overlap |Tr(a^dagger b)| / n."""
    _check_dims(a, b)
    return float(abs(np.vdot(a.matrix, b.matrix))) / a.dim


def commutator(h: HermitianOperator, o: HermitianOperator) -> HermitianOperator:
    """Return i[h, o], which is Hermitian for Hermitian arguments."""
    _check_dims(h, o)
    return HermitianOperator._trusted(1j * (h.matrix @ o.matrix - o.matrix @ h.matrix))


def spectral_decomposition(h: HermitianOperator) -> tuple[RealVector, ComplexMatrix]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of h.

    Raises:
        NumericalError: If the eigensolver does not converge
    """
    try:
        energies, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Hermitian eigensolver failed: {e}") from e
    return energies, vectors


def _eigenvalues(h: HermitianOperator) -> RealVector:
    try:
        return np.linalg.eigvalsh(h.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Hermitian eigensolver failed: {e}") from e


def spectral_width(h: HermitianOperator) -> float:
    """E_max - E_min of the spectrum; invariant under h -> h + c*I."""
    energies = _eigenvalues(h)
    return float(energies[-1] - energies[0])


def center_hamiltonian(h: HermitianOperator) -> HermitianOperator:
    """Shift h by a multiple of I so that E_max = -E_min = w(h)/2."""
    energies = _eigenvalues(h)
    shift = (energies[-1] + energies[0]) / 2
    return HermitianOperator._trusted(h.matrix - shift * np.eye(h.dim))


def hamiltonian_norms(h: HermitianOperator) -> HamiltonianNorms:
    """Report the normalized HS norm next to the spectral width.

    The width is the resource bounded by Omega_max; the HS norm is not.
    For eps * (Z (x) I) the width is 2 eps while the normalized norm is eps.
    """
    width = spectral_width(h)
    return HamiltonianNorms(
        dim=h.dim,
        hs_norm=hs_norm(h),
        spectral_width=width,
        centered_operator_norm=width / 2,
    )


def qubits_for_dim(n: int) -> int:
    """Number of qubits q with 2**q == n.

    Raises:
        DimensionError: If n is not a power of two
    """
    q = int(round(np.log2(n))) if n > 0 else 0
    if q < 1 or 2**q != n:
        raise DimensionError(f"Dimension {n} is not a power of two")
    return q


def pauli_words(q: int) -> list[str]:
    """All non-identity Pauli words of length q in I < X < Y < Z order."""
    return ["".join(letters) for letters in itertools.product(PAULI_LETTERS, repeat=q)][1:]


@lru_cache(maxsize=None)
def pauli_basis(q: int) -> OperatorBasis:
    """Orthonormal basis of the 4^q - 1 non-identity Pauli strings.

    Raises:
        RangeError: If q is outside 1..max_qubits
    """
    if not 1 <= q <= settings.numerics.max_qubits:
        raise RangeError(f"Pauli basis supports 1..{settings.numerics.max_qubits} qubits, got {q}")
    words = pauli_words(q)
    logger.debug(f"Building {len(words)}-element Pauli basis for {q} qubit(s)")
    return OperatorBasis(
        elements=tuple(PauliString(word).to_operator() for word in words),
        label=f"pauli-{q}",
        element_labels=tuple(words),
    )


def project_matrices(matrices: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Coordinates of a stack of operators, shape (m, n, n) -> (m, n^2 - 1)."""
    matrices = np.asarray(matrices)
    if matrices.shape[-1] != basis.dim:
        raise DimensionError(f"Operators of dim {matrices.shape[-1]} vs basis dim {basis.dim}")
    flat = matrices.reshape(matrices.shape[0], -1)
    flat_basis = basis.stack.reshape(len(basis), -1)
    return (flat @ flat_basis.conj().T).real / basis.dim


def coordinates(a: HermitianOperator, basis: OperatorBasis) -> CoordinateVector:
    """Coordinates coords_k = <basis_k, a>.

    Raises:
        DimensionError: If a and the basis act on different spaces
        TraceError: If a is not traceless
    """
    if a.dim != basis.dim:
        raise DimensionError(f"Operator dim {a.dim} vs basis dim {basis.dim}")
    if not a.is_traceless():
        raise TraceError(f"Operator has trace {a.trace():.3e}; coordinates need a traceless operator")
    return CoordinateVector(project_matrices(a.matrix[np.newaxis], basis)[0], basis.label)


def reconstruct(coords: CoordinateVector | np.ndarray, basis: OperatorBasis) -> HermitianOperator:
    """Inverse of coordinates(): sum_k coords_k * basis_k."""
    values = coords.coords if isinstance(coords, CoordinateVector) else np.asarray(coords)
    if len(values) != len(basis):
        raise DimensionError(f"{len(values)} coordinates for a basis of {len(basis)}")
    return HermitianOperator._trusted(np.tensordot(values, basis.stack, axes=1))


def random_hermitian(
    n: int, rng: np.random.Generator, scale: float = 1.0, traceless: bool = False
) -> HermitianOperator:
    """Gaussian random Hermitian matrix."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = scale * (a + a.conj().T) / 2
    if traceless:
        h = h - np.trace(h).real / n * np.eye(n)
    return HermitianOperator(h)


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-distributed unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return UnitaryOperator(q * (d / np.abs(d)))
