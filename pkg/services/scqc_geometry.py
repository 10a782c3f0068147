"""Space curves of observables under unitary evolution.

The tangent of an observable's curve is its Heisenberg-picture operator
U^dagger(t) O U(t) in coordinates of an orthonormal operator basis; the
base curve integrates the tangent, so arc length equals evolution time.

Contents:
- HamiltonianSchedule / ScheduleSegment: piecewise-constant generators
- tangent_curve(), curvature_profile(): sampled curves and rotation rates
- frenet_frame(), frenet_dynamics(): generalized curvatures and closure dimension
- adjoint_generator(), plane_decomposition(): i*ad_H as a real antisymmetric
  matrix and its canonical rotation planes
- decompose_observable(), closed_form_curve(): analytic helix form of a curve
- eigenframe_certifiers(), planar_witness(): closure-2 observables of a generator
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.integrate
import scipy.linalg
from numpy.typing import NDArray

from models.config import settings
from services.operator_algebra import (
    ComplexMatrix,
    HermitianOperator,
    OperatorBasis,
    RealVector,
    coordinates,
    hs_norm,
    pauli_basis,
    project_matrices,
    qubits_for_dim,
    spectral_decomposition,
    spectral_width,
)
from services.qsl_core import propagators
from utils.exceptions import (
    DegenerateError,
    DimensionError,
    NormError,
    NumericalError,
    RangeError,
    TraceError,
)
from utils.logging import get_logger

logger = get_logger(__name__)

RealMatrix = NDArray[np.float64]

_UNIT_SPEED_TOL = 1e-9
_NEAR_THRESHOLD_FACTOR = 10.0


def _freeze(arr) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _default_basis(dim: int) -> OperatorBasis:
    return pauli_basis(qubits_for_dim(dim))


def _check_observable(o: HermitianOperator) -> None:
    norm = hs_norm(o)
    if abs(norm - 1.0) > _UNIT_SPEED_TOL:
        raise NormError(f"Observable must be unit-norm, got norm {norm:.12g}")
    if not o.is_traceless():
        raise TraceError("Observable must be traceless")


@dataclass(frozen=True, eq=False)
class ScheduleSegment:
    """Constant Hamiltonian applied for a positive duration."""

    hamiltonian: HermitianOperator
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise RangeError(f"Segment duration must be positive, got {self.duration}")


@dataclass(frozen=True, eq=False)
class HamiltonianSchedule:
    """Piecewise-constant Hamiltonian H(t), right-continuous at segment boundaries."""

    segments: tuple[ScheduleSegment, ...]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise RangeError("A schedule needs at least one segment")
        dims = {segment.hamiltonian.dim for segment in segments}
        if len(dims) != 1:
            raise DimensionError(f"Schedule segments have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "segments", segments)

    @classmethod
    def constant(cls, h: HermitianOperator, duration: float) -> HamiltonianSchedule:
        return cls((ScheduleSegment(h, duration),))

    @property
    def dim(self) -> int:
        return self.segments[0].hamiltonian.dim

    @property
    def starts(self) -> RealVector:
        durations = np.array([segment.duration for segment in self.segments])
        return np.concatenate([[0.0], np.cumsum(durations)[:-1]])

    @property
    def total_time(self) -> float:
        return float(sum(segment.duration for segment in self.segments))

    def segment_index(self, times) -> NDArray[np.int64]:
        index = np.searchsorted(self.starts, np.asarray(times), side="right") - 1
        return np.clip(index, 0, len(self.segments) - 1)

    def hamiltonian_at(self, t: float) -> HermitianOperator:
        return self.segments[int(self.segment_index([t])[0])].hamiltonian

    def max_width(self) -> float:
        return max(spectral_width(segment.hamiltonian) for segment in self.segments)

    def propagators(self, times) -> np.ndarray:
        """U(t) for sorted times, multiplying the constant-segment exponentials."""
        times = np.asarray(times, dtype=np.float64)
        out = np.empty((len(times), self.dim, self.dim), dtype=np.complex128)
        index = self.segment_index(times)
        start_unitary = np.eye(self.dim, dtype=np.complex128)
        for k, (segment, start) in enumerate(zip(self.segments, self.starts, strict=True)):
            mask = index == k
            if np.any(mask):
                out[mask] = propagators(segment.hamiltonian, times[mask] - start) @ start_unitary
            start_unitary = propagators(segment.hamiltonian, [segment.duration])[0] @ start_unitary
        return out


@dataclass(frozen=True, eq=False)
class SpaceCurve:
    """Sampled tangent and base curve of an observable.

    Rows of tangent/base are coordinates at each sample time.
    """

    times: RealVector
    tangent: RealMatrix
    base: RealMatrix
    observable: HermitianOperator
    basis_label: str
    element_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or len(times) < 2:
            raise RangeError("A space curve needs at least two samples")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise RangeError("Sample times must start at 0 and increase strictly")
        shape = (len(times), len(self.element_labels))
        if np.shape(self.tangent) != shape or np.shape(self.base) != shape:
            raise DimensionError(f"Curve samples must have shape {shape}")
        speeds = np.linalg.norm(self.tangent, axis=1)
        if np.max(np.abs(speeds - 1.0)) > _UNIT_SPEED_TOL:
            raise NormError("Tangent samples are not unit speed")
        object.__setattr__(self, "times", _freeze(times))
        object.__setattr__(self, "tangent", _freeze(self.tangent))
        object.__setattr__(self, "base", _freeze(self.base))

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def speeds(self) -> RealVector:
        return np.linalg.norm(self.tangent, axis=1)

    def arc_length(self) -> float:
        """Polygonal length of the sampled base curve."""
        return float(np.sum(np.linalg.norm(np.diff(self.base, axis=0), axis=1)))

    def column_labels(self) -> list[str]:
        return (
            ["t"]
            + [f"tangent_{label}" for label in self.element_labels]
            + [f"base_{label}" for label in self.element_labels]
        )

    def rows(self) -> RealMatrix:
        return np.hstack([self.times[:, np.newaxis], self.tangent, self.base])


@dataclass(frozen=True, eq=False)
class FrenetData:
    """Frenet-Serret frame F_1..F_l of an observable under a constant generator.

    curvatures[j] couples frame[j] and frame[j + 1]; closure_dim is l.
    near_threshold marks a curvature within 10x of the termination tolerance.
    """

    frame: tuple[HermitianOperator, ...]
    curvatures: RealVector
    closure_dim: int
    near_threshold: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "curvatures", _freeze(np.asarray(self.curvatures, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class AdjointGenerator:
    """Matrix of i*ad_H in an orthonormal basis: d r/dt = matrix @ r."""

    matrix: RealMatrix
    basis_label: str

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"Adjoint generator must be square, got {m.shape}")
        asymmetry = float(np.max(np.abs(m + m.T))) if m.size else 0.0
        if asymmetry > 1e-10 * max(1.0, float(np.max(np.abs(m)))):
            raise NumericalError(f"Adjoint generator is not antisymmetric ({asymmetry:.3e})")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class RotationPlane:
    """Orthonormal pair with matrix @ a = curvature * b and matrix @ b = -curvature * a."""

    curvature: float
    a: RealVector
    b: RealVector


@dataclass(frozen=True, eq=False)
class PlaneDecomposition:
    """Canonical form of a real antisymmetric matrix: rotation planes plus kernel."""

    planes: tuple[RotationPlane, ...]
    kernel: RealMatrix
    size: int

    @property
    def kernel_dim(self) -> int:
        return self.kernel.shape[1]

    @property
    def curvatures(self) -> RealVector:
        return np.array([plane.curvature for plane in self.planes])

    def reconstruct(self) -> RealMatrix:
        m = np.zeros((self.size, self.size))
        for plane in self.planes:
            m += plane.curvature * (np.outer(plane.b, plane.a) - np.outer(plane.a, plane.b))
        return m


@dataclass(frozen=True, eq=False)
class PlaneComponent:
    """Projection of an observable onto one rotation plane.

    The tangent contribution is cos(k t) a + sin(k t) b.
    """

    curvature: float
    a: RealVector
    b: RealVector


@dataclass(frozen=True, eq=False)
class ObservableDecomposition:
    """Invariant part plus rotating plane components of an observable's coordinates."""

    parallel: RealVector
    components: tuple[PlaneComponent, ...]
    basis_label: str
    element_labels: tuple[str, ...]


class EigenframePair(NamedTuple):
    """Unit-norm pair built on two eigenvectors of a generator, with their gap."""

    x: HermitianOperator
    y: HermitianOperator
    gap: float


def tangent_curve(
    schedule: HamiltonianSchedule,
    o: HermitianOperator,
    basis: OperatorBasis | None = None,
    steps: int | None = None,
) -> SpaceCurve:
    """Sample the tangent coordinates of U^dagger o U and integrate the base curve.

    Args:
        schedule: Piecewise-constant generator over [0, T]
        o: Unit-norm traceless observable
        basis: Operator basis (Pauli basis of matching size by default)
        steps: Uniform sampling intervals (default from settings)

    Raises:
        NormError: If o is not unit-norm
        TraceError: If o is not traceless
        DimensionError: If dimensions disagree
    """
    _check_observable(o)
    basis = _default_basis(o.dim) if basis is None else basis
    steps = settings.curve.default_steps if steps is None else steps
    if steps < 1:
        raise RangeError(f"steps must be positive, got {steps}")
    if not schedule.dim == o.dim == basis.dim:
        raise DimensionError(f"Schedule dim {schedule.dim}, observable dim {o.dim}, basis dim {basis.dim}")

    times = np.linspace(0.0, schedule.total_time, steps + 1)
    u = schedule.propagators(times)
    heisenberg = u.conj().transpose(0, 2, 1) @ o.matrix @ u
    tangent = project_matrices(heisenberg, basis)
    base = scipy.integrate.cumulative_trapezoid(tangent, times, axis=0, initial=0)

    return SpaceCurve(
        times=times,
        tangent=tangent,
        base=base,
        observable=o,
        basis_label=basis.label,
        element_labels=basis.element_labels,
    )


def curvature_profile(
    schedule: HamiltonianSchedule, o: HermitianOperator, steps: int | None = None
) -> RealVector:
    """||i[H(t_i), o]|| on the uniform sampling grid of the schedule."""
    steps = settings.curve.default_steps if steps is None else steps
    if schedule.dim != o.dim:
        raise DimensionError(f"Schedule dim {schedule.dim} vs observable dim {o.dim}")
    rates = np.array(
        [
            np.sqrt(np.vdot(c, c).real / o.dim)
            for c in (
                1j * (segment.hamiltonian.matrix @ o.matrix - o.matrix @ segment.hamiltonian.matrix)
                for segment in schedule.segments
            )
        ]
    )
    times = np.linspace(0.0, schedule.total_time, steps + 1)
    return rates[schedule.segment_index(times)]


def frenet_frame(h: HermitianOperator, o: HermitianOperator, tol: float | None = None) -> FrenetData:
    """Frenet-Serret frame of o under the constant generator h.

    F~_{j+1} = i[h, F_j] + k_{j-1} F_{j-1}, k_j = ||F~_{j+1}||, with full
    reorthogonalization against the frame built so far. Terminates when the
    next curvature is at most tol * w(h).

    Raises:
        DegenerateError: If h is a multiple of the identity
        NormError: If o is not unit-norm
    """
    if h.dim != o.dim:
        raise DimensionError(f"Hamiltonian dim {h.dim} vs observable dim {o.dim}")
    width = spectral_width(h)
    if width <= 1e-14 * (1.0 + float(np.max(np.abs(h.matrix)))):
        raise DegenerateError("Frenet frame needs a non-scalar Hamiltonian")
    _check_observable(o)

    tol = settings.rank_tol if tol is None else tol
    threshold = tol * width
    n = o.dim
    hm = h.matrix
    frame = [np.array(o.matrix)]
    curvatures: list[float] = []
    near_threshold = False

    while len(frame) < n * n - 1:
        current = frame[-1]
        candidate = 1j * (hm @ current - current @ hm)
        if curvatures:
            candidate = candidate + curvatures[-1] * frame[-2]
        for previous in frame:
            candidate = candidate - (np.vdot(previous, candidate).real / n) * previous
        kappa = float(np.sqrt(max(np.vdot(candidate, candidate).real / n, 0.0)))
        if threshold / _NEAR_THRESHOLD_FACTOR < kappa <= threshold * _NEAR_THRESHOLD_FACTOR:
            near_threshold = True
            logger.warning(f"Curvature {kappa:.3e} is within 10x of the termination threshold {threshold:.3e}")
        if kappa <= threshold:
            break
        curvatures.append(kappa)
        frame.append(candidate / kappa)

    logger.debug(f"Frenet recursion closed at dimension {len(frame)}")
    return FrenetData(
        frame=tuple(HermitianOperator._trusted(f) for f in frame),
        curvatures=np.array(curvatures),
        closure_dim=len(frame),
        near_threshold=near_threshold,
    )


def frenet_dynamics(frenet: FrenetData) -> RealMatrix:
    """Tridiagonal K with d/dt F_j(t) = sum_l K[j, l] F_l(t) for the rotated frame."""
    size = frenet.closure_dim
    k = np.zeros((size, size))
    for j, kappa in enumerate(frenet.curvatures):
        k[j, j + 1] = kappa
        k[j + 1, j] = -kappa
    return k


def adjoint_generator(h: HermitianOperator, basis: OperatorBasis | None = None) -> AdjointGenerator:
    """Real antisymmetric A with A[l, j] = <O_l, i[h, O_j]>, so that d r/dt = A r.

    Raises:
        DimensionError: If h and the basis act on different spaces
    """
    basis = _default_basis(h.dim) if basis is None else basis
    if h.dim != basis.dim:
        raise DimensionError(f"Hamiltonian dim {h.dim} vs basis dim {basis.dim}")
    hm = h.matrix
    images = 1j * (hm @ basis.stack - basis.stack @ hm)
    matrix = project_matrices(images, basis).T
    asymmetry = float(np.max(np.abs(matrix + matrix.T)))
    if asymmetry > 1e-10 * max(1.0, float(np.max(np.abs(matrix)))):
        raise NumericalError(f"Adjoint generator is not antisymmetric ({asymmetry:.3e})")
    return AdjointGenerator(matrix=(matrix - matrix.T) / 2, basis_label=basis.label)


def _orthogonalize(vector: np.ndarray, against: list[np.ndarray]) -> np.ndarray:
    for other in against:
        vector = vector - (other @ vector) * other
    return vector / np.linalg.norm(vector)


def _fix_in_plane_phase(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate (a, b) in their plane so a's first nonzero coordinate is positive and b's is 0."""
    support = np.flatnonzero(np.hypot(a, b) > 1e-8)
    i = int(support[0])
    theta = np.arctan2(b[i], a[i])
    c, s = np.cos(theta), np.sin(theta)
    return c * a + s * b, -s * a + c * b


def plane_decomposition(a: AdjointGenerator, tol: float | None = None) -> PlaneDecomposition:
    """Rotation planes of an antisymmetric matrix.

    Curvatures are the positive imaginary parts of its eigenvalues; each plane
    comes from the real and imaginary parts of an eigenvector, orthonormalized
    by modified Gram-Schmidt. Curvatures at most tol * (largest curvature)
    count as zero.

    Raises:
        NumericalError: If the eigensolver fails
    """
    tol = settings.rank_tol if tol is None else tol
    size = a.size
    try:
        eigenvalues, vectors = np.linalg.eigh(1j * a.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Eigensolver failed on the adjoint generator: {e}") from e

    scale = float(np.max(np.abs(eigenvalues))) if size else 0.0
    # (iA) v = -k v  <=>  A v = i k v; ascending order gives descending curvature
    active = [k for k in range(size) if scale > 0 and eigenvalues[k] < -tol * scale]

    ortho: list[np.ndarray] = []
    planes = []
    for k in active:
        v = vectors[:, k]
        pa = _orthogonalize(np.sqrt(2) * v.real, ortho)
        ortho.append(pa)
        pb = _orthogonalize(-np.sqrt(2) * v.imag, ortho)
        ortho.append(pb)
        pa, pb = _fix_in_plane_phase(pa, pb)
        planes.append(RotationPlane(curvature=float(-eigenvalues[k]), a=_freeze(pa), b=_freeze(pb)))

    if ortho:
        kernel = scipy.linalg.null_space(np.array(ortho))
    else:
        kernel = np.eye(size)
    logger.debug(f"{len(planes)} rotation plane(s), kernel dimension {kernel.shape[1]}")
    return PlaneDecomposition(planes=tuple(planes), kernel=_freeze(kernel), size=size)


def decompose_observable(
    h: HermitianOperator, o: HermitianOperator, basis: OperatorBasis | None = None
) -> ObservableDecomposition:
    """Split o into its part commuting with h and its rotating plane components."""
    basis = _default_basis(o.dim) if basis is None else basis
    x = coordinates(o, basis).coords
    decomposition = plane_decomposition(adjoint_generator(h, basis))

    parallel = np.array(x)
    components = []
    for plane in decomposition.planes:
        alpha, beta = plane.a @ x, plane.b @ x
        start = alpha * plane.a + beta * plane.b
        parallel -= start
        if np.linalg.norm(start) > 0:
            components.append(
                PlaneComponent(
                    curvature=plane.curvature,
                    a=_freeze(start),
                    b=_freeze(alpha * plane.b - beta * plane.a),
                )
            )
    return ObservableDecomposition(
        parallel=_freeze(parallel),
        components=tuple(components),
        basis_label=basis.label,
        element_labels=basis.element_labels,
    )


def closed_form_curve(
    h: HermitianOperator,
    o: HermitianOperator,
    t_grid,
    basis: OperatorBasis | None = None,
) -> SpaceCurve:
    """Analytic tangent and base curve of o under the constant generator h.

    tangent(t) = O_par + sum_p [cos(k_p t) A_p + sin(k_p t) B_p]
    base(t)    = t O_par + sum_p [sin(k_p t)/k_p A_p + (1 - cos(k_p t))/k_p B_p]
    """
    _check_observable(o)
    decomposition = decompose_observable(h, o, basis)
    t = np.asarray(t_grid, dtype=np.float64)

    tangent = np.tile(decomposition.parallel, (len(t), 1))
    base = np.outer(t, decomposition.parallel)
    for component in decomposition.components:
        kt = component.curvature * t
        cos_kt, sin_kt = np.cos(kt)[:, np.newaxis], np.sin(kt)[:, np.newaxis]
        tangent += cos_kt * component.a + sin_kt * component.b
        base += (sin_kt * component.a + (1 - cos_kt) * component.b) / component.curvature

    return SpaceCurve(
        times=t,
        tangent=tangent,
        base=base,
        observable=o,
        basis_label=decomposition.basis_label,
        element_labels=decomposition.element_labels,
    )


def eigenframe_certifiers(h: HermitianOperator) -> list[EigenframePair]:
    """Unit-norm X_ab, Y_ab on every eigenvector pair a < b of h, with gap |E_a - E_b|.

    i[h, X_ab] = (E_b - E_a) Y_ab, so the pair spans a plane rotating at the gap.
    """
    energies, vectors = spectral_decomposition(h)
    n = h.dim
    scale = np.sqrt(n / 2)
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            outer = np.outer(vectors[:, a], vectors[:, b].conj())
            pairs.append(
                EigenframePair(
                    x=HermitianOperator._trusted(scale * (outer + outer.conj().T)),
                    y=HermitianOperator._trusted(-1j * scale * (outer - outer.conj().T)),
                    gap=float(abs(energies[a] - energies[b])),
                )
            )
    return pairs


def planar_witness(h: HermitianOperator) -> HermitianOperator:
    """Observable with closure dimension 2 rotating at rate w(h).

    Raises:
        DegenerateError: If h is a multiple of the identity
    """
    pairs = eigenframe_certifiers(h)
    widest = max(pairs, key=lambda pair: pair.gap)
    if widest.gap <= 1e-14 * (1.0 + float(np.max(np.abs(h.matrix)))):
        raise DegenerateError("A scalar Hamiltonian moves no observable")
    return widest.x
