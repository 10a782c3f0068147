"""Exact spectral-width speed limit of a target gate.

- eigenphases(): clustered eigenphases of a unitary (Schur form, orthonormal in clusters)
- minimal_spread(): smallest 2*pi-shifted phase spread and T-star = spread / omega_max
- optimal_generator(): constant Hamiltonian of width omega_max reaching the gate at T-star
- evolve_constant() / propagators(): exp(-i t h) by spectral decomposition
- matrix_element_rate_check(): finite-difference rates of the centered evolution
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from models.config import settings
from models.models import RateCheckReport, SpeedLimitResult
from services.operator_algebra import (
    ComplexMatrix,
    DenseOperator,
    HermitianOperator,
    RealVector,
    UnitaryOperator,
    center_hamiltonian,
    phase_fidelity,
    spectral_decomposition,
    spectral_width,
)
from utils.exceptions import DegenerateGateError, NumericalError, RangeError
from utils.logging import get_logger

logger = get_logger(__name__)

TWO_PI = 2 * np.pi

# Phases this close to -pi are reported on the +pi side of the branch cut
_BRANCH_EDGE = 1e-12
# Gaps this close to the largest one are ties
_GAP_TIE = 1e-12


def wrap_phase(phi):
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=np.float64), TWO_PI)


def _representative(phis: np.ndarray) -> float:
    phase = float(wrap_phase(np.angle(np.mean(np.exp(1j * phis)))))
    return np.pi if phase < -np.pi + _BRANCH_EDGE else phase


@dataclass(frozen=True, eq=False)
class PhaseCluster:
    """Eigenphases within the cluster tolerance of each other, with their projector."""

    phase: float
    rank: int
    projector: HermitianOperator
    members: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class EigenphaseSet:
    """Eigenphases of a unitary, ascending in (-pi, pi], and their 2*pi shifts.

    eigenvectors holds one orthonormal column per phase.
    """

    phases: RealVector
    shifts: NDArray[np.int64]
    clusters: tuple[PhaseCluster, ...]
    eigenvectors: ComplexMatrix

    @property
    def dim(self) -> int:
        return len(self.phases)

    @property
    def projectors(self) -> list[tuple[float, int, HermitianOperator]]:
        return [(c.phase, c.rank, c.projector) for c in self.clusters]

    @property
    def shifted_phases(self) -> RealVector:
        return self.phases + TWO_PI * self.shifts

    def with_shifts(self, shifts) -> EigenphaseSet:
        return dataclasses.replace(self, shifts=np.asarray(shifts, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class OptimalGenerator:
    """Width-saturating constant generator of a gate."""

    h_star: HermitianOperator
    t_star: float
    centered: HermitianOperator
    speed_limit: SpeedLimitResult

    def reproduces(self, g: DenseOperator) -> float:
        """Phase-invariant fidelity of exp(-i t_star h_star) with g."""
        return phase_fidelity(g, evolve_constant(self.h_star, self.t_star))


def _cluster_indices(phases: np.ndarray, tol: float) -> list[list[int]]:
    groups = [[0]]
    for k in range(1, len(phases)):
        if phases[k] - phases[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    # Phases on both sides of the branch cut belong together
    if len(groups) > 1 and phases[0] + TWO_PI - phases[-1] <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def eigenphases(g: DenseOperator, cluster_tol: float | None = None) -> EigenphaseSet:
    """Eigenphases of g clustered into spectral projectors.

    Args:
        g: Target gate (validated as unitary)
        cluster_tol: Circular distance merging phases (default from settings)

    Returns:
        EigenphaseSet with zero shifts and clusters in ascending phase order

    Raises:
        UnitarityError: If g is not unitary
        NumericalError: If the Schur decomposition fails
    """
    if not isinstance(g, UnitaryOperator):
        g = UnitaryOperator(g.matrix)
    tol = settings.numerics.cluster_tol if cluster_tol is None else cluster_tol

    try:
        triangular, vectors = scipy.linalg.schur(g.matrix, output="complex")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Schur decomposition failed: {e}") from e

    phases = wrap_phase(np.angle(np.diagonal(triangular)))
    phases = np.where(phases < -np.pi + _BRANCH_EDGE, np.pi, phases)
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = vectors[:, order]

    clusters = []
    for members in _cluster_indices(phases, tol):
        block = vectors[:, members]
        clusters.append(
            PhaseCluster(
                phase=_representative(phases[members]),
                rank=len(members),
                projector=HermitianOperator._trusted(block @ block.conj().T),
                members=tuple(members),
            )
        )
    clusters.sort(key=lambda c: c.phase)
    logger.debug(f"{g.dim} eigenphases in {len(clusters)} cluster(s)")

    return EigenphaseSet(
        phases=phases,
        shifts=np.zeros(len(phases), dtype=np.int64),
        clusters=tuple(clusters),
        eigenvectors=vectors,
    )


def _cluster_shifts(e: EigenphaseSet) -> np.ndarray:
    """2*pi shift per cluster placing all clusters on the shortest contiguous arc."""
    reps = np.array([c.phase for c in e.clusters])
    m = len(reps)
    if m == 1:
        return np.zeros(1, dtype=np.int64)

    gaps = np.append(np.diff(reps), reps[0] + TWO_PI - reps[-1])
    ccw_endpoints = np.roll(reps, -1)
    ties = np.flatnonzero(gaps >= gaps.max() - _GAP_TIE)
    chosen = min(ties, key=lambda i: ccw_endpoints[i])
    start = (chosen + 1) % m
    logger.debug(f"Largest circular gap {gaps[chosen]:.6f} ends at phase {reps[start]:.6f}")
    return (np.arange(m) < start).astype(np.int64)


def minimal_spread(e: EigenphaseSet, omega_max: float = 1.0) -> SpeedLimitResult:
    """Smallest spread of the eigenphases over all 2*pi shifts.

    The spread is 2*pi minus the largest circular gap between distinct phases;
    the shifts realize it as a contiguous arc.

    Args:
        e: Eigenphases of the gate
        omega_max: Spectral-width budget (> 0)

    Returns:
        SpeedLimitResult with T-star = spread / omega_max
    """
    if omega_max <= 0:
        raise RangeError(f"omega_max must be positive, got {omega_max}")

    cluster_shifts = _cluster_shifts(e)
    shifted_reps = np.array([c.phase for c in e.clusters]) + TWO_PI * cluster_shifts

    shifts = np.zeros(e.dim, dtype=np.int64)
    for cluster, target in zip(e.clusters, shifted_reps, strict=True):
        for k in cluster.members:
            shifts[k] = int(np.rint((target - e.phases[k]) / TWO_PI))

    low = int(np.argmin(shifted_reps))
    high = int(np.argmax(shifted_reps))
    delta = float(shifted_reps[high] - shifted_reps[low])

    return SpeedLimitResult.build(
        delta_phi_star=delta,
        omega_max=float(omega_max),
        phases=[float(phi) for phi in e.phases],
        shifts=[int(s) for s in shifts],
        bottleneck_pair=(e.clusters[low].members[0], e.clusters[high].members[0]),
    )


def optimal_generator(g: DenseOperator, omega_max: float = 1.0) -> OptimalGenerator:
    """Constant Hamiltonian of width omega_max with exp(-i T-star H) = g up to phase.

    Built from spectral projectors with the minimal-spread shifted phases,
    so it does not depend on the eigenbasis chosen inside degenerate clusters.

    Raises:
        DegenerateGateError: If g is the identity up to a global phase
    """
    e = eigenphases(g)
    if len(e.clusters) == 1:
        raise DegenerateGateError("Gate is the identity up to phase; T-star is 0 and no generator is needed")

    speed_limit = minimal_spread(e, omega_max)
    shifted_reps = np.array([c.phase for c in e.clusters]) + TWO_PI * _cluster_shifts(e)
    t_star = speed_limit.t_star

    h = np.zeros((e.dim, e.dim), dtype=np.complex128)
    for cluster, phase in zip(e.clusters, shifted_reps, strict=True):
        h -= (phase / t_star) * cluster.projector.matrix
    h_star = HermitianOperator._trusted(h)

    return OptimalGenerator(
        h_star=h_star,
        t_star=t_star,
        centered=center_hamiltonian(h_star),
        speed_limit=speed_limit,
    )


def propagators(h: HermitianOperator, times) -> np.ndarray:
    """Stack of exp(-i t h) for every t, shape (len(times), n, n)."""
    energies, vectors = spectral_decomposition(h)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=np.float64), energies))
    return np.einsum("ik,mk,jk->mij", vectors, phases, vectors.conj())


def evolve_constant(h: HermitianOperator, t: float) -> UnitaryOperator:
    """exp(-i t h) via the spectral decomposition of h.

    Raises:
        NumericalError: If the eigensolver fails
    """
    return UnitaryOperator(propagators(h, [t])[0])


def matrix_element_rate_check(
    h: HermitianOperator,
    samples: int,
    t_max: float | None = None,
    step: float | None = None,
) -> RateCheckReport:
    """Largest |d/dt <a|U~(t)|b>| of the centered evolution against w(h)/2.

    Derivatives are central differences on a uniform grid over [0, t_max];
    the default window 4*pi/w covers a full period of the extreme levels.
    """
    if samples < 1:
        raise RangeError(f"samples must be positive, got {samples}")
    step = settings.curve.rate_step if step is None else step
    width = spectral_width(h)
    if t_max is None:
        t_max = 4 * np.pi / width if width > 0 else 1.0

    centered = center_hamiltonian(h)
    times = np.linspace(0.0, t_max, samples)
    forward = propagators(centered, times + step)
    backward = propagators(centered, times - step)
    max_rate = float(np.max(np.abs(forward - backward)) / (2 * step))

    bound = width / 2
    passed = max_rate <= bound + settings.curve.rate_slack
    if not passed:
        logger.warning(f"Matrix-element rate {max_rate:.6g} exceeds w/2 = {bound:.6g}")
    return RateCheckReport(max_rate=max_rate, bound=bound, samples=samples, t_max=t_max, passed=passed)
