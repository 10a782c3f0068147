"""Certifying sets and the bottleneck lower bound on gate time.

A set of traceless observables certifies a gate when matching its action
on every observable pins the gate down up to a global phase, which holds
exactly when the set's common commutant is one-dimensional. The minimal
gate time is then at least the slowest single-observable transfer time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from models.config import settings
from models.models import BottleneckEntry, BottleneckReport, CommutantReport, PlanarityReport
from services.operator_algebra import (
    DenseOperator,
    HermitianOperator,
    PauliString,
    RealVector,
    UnitaryOperator,
    hs_inner,
    hs_norm,
    pauli_words,
)
from services.qsl_core import eigenphases, minimal_spread, optimal_generator
from services.scqc_geometry import frenet_frame
from utils.exceptions import DegenerateGateError, DimensionError, NormError, RangeError, TraceError
from utils.logging import get_logger

logger = get_logger(__name__)

# Observables whose bounds agree this closely are all reported as bottlenecks
_TIE_TOL = 1e-9
_NORM_TOL = 1e-9

PairIndex = tuple[int, int]


@dataclass(frozen=True, eq=False)
class CertifyingSet:
    """Candidate certifying set of traceless Hermitian operators.

    Sets built on a gate's eigenbasis also carry that gate, the eigenvector
    pair behind each operator and the minimal-spread shifted phases, which
    make their bounds exact.
    """

    operators: tuple[HermitianOperator, ...]
    label: str
    labels: tuple[str, ...] = ()
    source: UnitaryOperator | None = None
    pairs: tuple[PairIndex | None, ...] = ()
    shifted_phases: RealVector | None = None

    def __post_init__(self) -> None:
        operators = tuple(self.operators)
        if not operators:
            raise RangeError("A certifying set needs at least one operator")
        dims = {o.dim for o in operators}
        if len(dims) != 1:
            raise DimensionError(f"Certifying set {self.label!r} mixes dimensions {sorted(dims)}")
        for k, o in enumerate(operators):
            if not o.is_traceless():
                raise TraceError(f"Operator {k} of {self.label!r} is not traceless")

        labels = tuple(self.labels) or tuple(f"O{k + 1}" for k in range(len(operators)))
        pairs = tuple(self.pairs) or (None,) * len(operators)
        if len(labels) != len(operators) or len(pairs) != len(operators):
            raise DimensionError("labels and pairs must match the number of operators")

        object.__setattr__(self, "operators", operators)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pairs", pairs)

    @property
    def dim(self) -> int:
        return self.operators[0].dim

    def __len__(self) -> int:
        return len(self.operators)

    def p_only(self) -> CertifyingSet:
        """Symmetric P_jk members of an eigenbasis set."""
        keep = [k for k, label in enumerate(self.labels) if label.startswith("P_")]
        if not keep:
            raise RangeError(f"Certifying set {self.label!r} has no P_jk operators")
        return CertifyingSet(
            operators=tuple(self.operators[k] for k in keep),
            label=self.label.replace("PQ-", "P-", 1),
            labels=tuple(self.labels[k] for k in keep),
            source=self.source,
            pairs=tuple(self.pairs[k] for k in keep),
            shifted_phases=self.shifted_phases,
        )

    def extend(self, operators, labels=None) -> CertifyingSet:
        """New set with extra operators appended (eigenbasis metadata kept for the originals)."""
        operators = tuple(operators)
        labels = tuple(labels) if labels is not None else tuple(
            f"O{len(self) + k + 1}" for k in range(len(operators))
        )
        return CertifyingSet(
            operators=self.operators + operators,
            label=self.label,
            labels=self.labels + labels,
            source=self.source,
            pairs=self.pairs + (None,) * len(operators),
            shifted_phases=self.shifted_phases,
        )


def pauli_certifier_set(q: int) -> CertifyingSet:
    """All 4^q - 1 non-identity Pauli strings on q qubits."""
    words = pauli_words(q)
    return CertifyingSet(
        operators=tuple(PauliString(word).to_operator() for word in words),
        label="pauli-all",
        labels=tuple(words),
    )


def common_commutant_dim(s: CertifyingSet, tol: float | None = None) -> CommutantReport:
    """Dimension of {W : [W, O] = 0 for all O in s} over all complex n x n matrices.

    The nullity of the stacked maps vec(W) -> vec(WO - OW) is counted from
    singular values above tol times the largest one.
    """
    tol = settings.rank_tol if tol is None else tol
    n = s.dim
    identity = np.eye(n)
    # row-major vec: vec(W O) = (I kron O^T) vec(W), vec(O W) = (O kron I) vec(W)
    stacked = np.vstack([np.kron(identity, o.matrix.T) - np.kron(o.matrix, identity) for o in s.operators])
    singular = scipy.linalg.svdvals(stacked)
    rank = int(np.sum(singular > tol * singular[0])) if singular[0] > 0 else 0
    dimension = n * n - rank
    logger.debug(f"Commutant of {s.label!r} ({len(s)} operators, n={n}) has dimension {dimension}")
    return CommutantReport(label=s.label, size=len(s), dimension=dimension, certifies=dimension == 1)


def canonical_two_op_set(n: int) -> CertifyingSet:
    """Two-operator certifying set diag(1..n) - (n+1)/2 and the nearest-neighbour hopping.

    Raises:
        RangeError: If n < 2
    """
    if n < 2:
        raise RangeError(f"Canonical pair needs n >= 2, got {n}")
    ladder = np.diag(np.arange(1, n + 1, dtype=np.float64)) - (n + 1) / 2 * np.eye(n)
    hopping = np.eye(n, k=1) + np.eye(n, k=-1)
    return CertifyingSet(
        operators=(HermitianOperator(ladder), HermitianOperator(hopping)),
        label="two-op-canonical",
        labels=("ladder", "hopping"),
    )


def pq_certifier_set(g: DenseOperator) -> CertifyingSet:
    """Unit-norm P_jk, Q_jk (j < k) on the Schur eigenbasis of g.

    G^dagger P_jk G = cos(phi_j - phi_k) P_jk + sin(phi_j - phi_k) Q_jk, so each
    pair rotates in its own plane by the eigenphase difference.

    Raises:
        UnitarityError: If g is not unitary
    """
    g = g if isinstance(g, UnitaryOperator) else UnitaryOperator(g.matrix)
    spectrum = eigenphases(g)
    shifted = np.asarray(minimal_spread(spectrum).shifted_phases)
    vectors = spectrum.eigenvectors
    n = g.dim
    scale = np.sqrt(n / 2)

    operators, labels, pairs = [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            outer = np.outer(vectors[:, j], vectors[:, k].conj())
            operators.append(HermitianOperator._trusted(scale * (outer + outer.conj().T)))
            operators.append(HermitianOperator._trusted(-1j * scale * (outer - outer.conj().T)))
            labels += [f"P_{j + 1}_{k + 1}", f"Q_{j + 1}_{k + 1}"]
            pairs += [(j, k), (j, k)]

    return CertifyingSet(
        operators=tuple(operators),
        label="PQ-eigenbasis",
        labels=tuple(labels),
        source=g,
        pairs=tuple(pairs),
        shifted_phases=shifted,
    )


def endpoint_angle(o: HermitianOperator, g: DenseOperator) -> float:
    """Angle between o and G^dagger o G, in [0, pi].

    Raises:
        NormError: If o is not unit-norm
    """
    norm = hs_norm(o)
    if abs(norm - 1.0) > _NORM_TOL:
        raise NormError(f"Observable must be unit-norm, got norm {norm:.12g}")
    if o.dim != g.dim:
        raise DimensionError(f"Observable dim {o.dim} vs gate dim {g.dim}")
    image = g.matrix.conj().T @ o.matrix @ g.matrix
    cosine = hs_inner(o, HermitianOperator._trusted(image))
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def _closure_generator(g: UnitaryOperator, omega_max: float) -> HermitianOperator | None:
    try:
        return optimal_generator(g, omega_max).h_star
    except DegenerateGateError:
        return None


def _ratio(t_star: float, t_lower: float) -> float | None:
    if t_lower > 0:
        return t_star / t_lower
    return 1.0 if t_star == 0 else None


def bottleneck_report(
    g: DenseOperator,
    s: CertifyingSet,
    omega_max: float = 1.0,
    gate_label: str = "custom",
) -> BottleneckReport:
    """Per-observable lower bounds and their maximum.

    Each bound is the planar time theta / omega_max. Eigenbasis sets of g
    itself are exact instead, with |psi_j - psi_k| / omega_max from the
    minimal-spread phases. Closure dimensions are taken under the optimal
    generator H-star.
    """
    if omega_max <= 0:
        raise RangeError(f"omega_max must be positive, got {omega_max}")
    g = g if isinstance(g, UnitaryOperator) else UnitaryOperator(g.matrix)
    if s.dim != g.dim:
        raise DimensionError(f"Certifying set dim {s.dim} vs gate dim {g.dim}")

    commutant = common_commutant_dim(s)
    if not commutant.certifies:
        logger.warning(f"Set {s.label!r} does not certify (commutant dimension {commutant.dimension})")

    h_star = _closure_generator(g, omega_max)
    exact_source = s.source is not None and s.shifted_phases is not None and s.source.allclose(g)

    entries = []
    for o, label, pair in zip(s.operators, s.labels, s.pairs, strict=True):
        norm = hs_norm(o)
        if norm <= _NORM_TOL:
            raise NormError(f"Operator {label!r} of {s.label!r} is zero and has no direction")
        unit = o / norm
        theta = endpoint_angle(unit, g)
        t2d = theta / omega_max
        closure = 1 if h_star is None else frenet_frame(h_star, unit).closure_dim
        exact = exact_source and pair is not None
        if exact:
            j, k = pair
            bound = float(abs(s.shifted_phases[j] - s.shifted_phases[k])) / omega_max
        else:
            bound = t2d
        entries.append(
            BottleneckEntry(observable=label, theta=theta, t2d=t2d, closure_dim=closure, exact=exact, bound=bound)
        )

    t_lower = max(entry.bound for entry in entries)
    bottlenecks = [entry.observable for entry in entries if entry.bound >= t_lower - _TIE_TOL]
    t_star = minimal_spread(eigenphases(g), omega_max).t_star

    return BottleneckReport(
        gate=gate_label,
        certifier_set=s.label,
        omega_max=omega_max,
        entries=entries,
        t_lower=t_lower,
        bottleneck_label=bottlenecks[0],
        bottlenecks=bottlenecks,
        eta_lower=_ratio(t_star, t_lower),
        certifies=commutant.certifies,
    )


def planarity_diagnostic(
    g: DenseOperator,
    s: CertifyingSet,
    omega_max: float = 1.0,
    gate_label: str = "custom",
    report: BottleneckReport | None = None,
) -> PlanarityReport:
    """Closure dimension of the bottleneck observables and the overhead ratio.

    A bottleneck whose curve under H-star leaves every plane (closure > 2)
    cannot reach its planar bound, so the gate pays an overhead. A report
    already computed for the same arguments can be passed in.
    """
    report = bottleneck_report(g, s, omega_max, gate_label) if report is None else report
    t_star = minimal_spread(eigenphases(g), omega_max).t_star
    closure_dims = {entry.observable: entry.closure_dim for entry in report.entries}
    bottleneck_closure = max(closure_dims[label] for label in report.bottlenecks)
    overhead = bottleneck_closure > 2
    if overhead:
        logger.info(f"{gate_label}: bottleneck curve closes in dimension {bottleneck_closure}, not planar")

    return PlanarityReport(
        gate=gate_label,
        certifier_set=s.label,
        omega_max=omega_max,
        t_star=t_star,
        t_lower=report.t_lower,
        eta_lower=_ratio(t_star, report.t_lower),
        bottleneck_label=report.bottleneck_label,
        bottlenecks=report.bottlenecks,
        bottleneck_closure_dim=bottleneck_closure,
        closure_dims=closure_dims,
        overhead=overhead,
    )
