"""Tests for certifying sets, the common commutant and bottleneck bounds."""

import numpy as np
import pytest

from services.certifiers import (
    CertifyingSet,
    bottleneck_report,
    canonical_two_op_set,
    common_commutant_dim,
    endpoint_angle,
    pauli_certifier_set,
    planarity_diagnostic,
    pq_certifier_set,
)
from services.gate_library import standard_gate
from services.operator_algebra import (
    HermitianOperator,
    PauliString,
    UnitaryOperator,
    hs_norm,
    random_unitary,
)
from services.qsl_core import eigenphases, minimal_spread, wrap_phase
from utils.exceptions import DimensionError, NormError, RangeError, TraceError


def gate(name: str) -> UnitaryOperator:
    return standard_gate(name).unitary


CERTIFYING_SETS = [lambda: canonical_two_op_set(4), lambda: pauli_certifier_set(2)]


@pytest.mark.unit
class TestCertifyingSet:
    def test_rejects_empty_set(self):
        with pytest.raises(RangeError):
            CertifyingSet(operators=(), label="empty")

    def test_rejects_mixed_dimensions(self):
        ops = (PauliString("X").to_operator(), PauliString("XX").to_operator())
        with pytest.raises(DimensionError):
            CertifyingSet(operators=ops, label="mixed")

    def test_rejects_traced_operator(self):
        with pytest.raises(TraceError):
            CertifyingSet(operators=(HermitianOperator.identity(2),), label="identity")

    def test_default_labels(self):
        s = CertifyingSet(operators=(PauliString("X").to_operator(),), label="one")
        assert s.labels == ("O1",)
        assert s.pairs == (None,)
        assert len(s.extend([PauliString("Z").to_operator()])) == 2

    def test_pauli_set_labels(self):
        s = pauli_certifier_set(2)
        assert len(s) == 15
        assert s.label == "pauli-all"
        assert s.labels[0] == "IX"


@pytest.mark.unit
class TestCommonCommutant:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_canonical_pair_certifies(self, n):
        report = common_commutant_dim(canonical_two_op_set(n))
        assert report.dimension == 1
        assert report.certifies
        assert report.size == 2

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_ladder_alone_does_not_certify(self, n):
        ladder = canonical_two_op_set(n).operators[0]
        report = common_commutant_dim(CertifyingSet(operators=(ladder,), label="ladder"))
        assert report.dimension == n
        assert not report.certifies

    def test_canonical_pair_needs_two_levels(self):
        with pytest.raises(RangeError):
            canonical_two_op_set(1)

    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_pauli_set_certifies(self, q):
        assert common_commutant_dim(pauli_certifier_set(q)).certifies

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_eigenbasis_set_certifies(self, n, unitary_factory):
        s = pq_certifier_set(unitary_factory(n))
        assert len(s) == n * (n - 1)
        assert common_commutant_dim(s).certifies

    @pytest.mark.parametrize("n", [3, 4, 8])
    def test_symmetric_half_certifies_from_three_levels(self, n, unitary_factory):
        s = pq_certifier_set(unitary_factory(n)).p_only()
        assert s.label == "P-eigenbasis"
        assert all(label.startswith("P_") for label in s.labels)
        assert common_commutant_dim(s).certifies

    def test_symmetric_half_fails_for_a_qubit(self, unitary_factory):
        s = pq_certifier_set(unitary_factory(2)).p_only()
        assert len(s) == 1
        report = common_commutant_dim(s)
        assert report.dimension == 2
        assert not report.certifies

    def test_eigenbasis_operators_are_unit_norm(self, unitary_factory):
        for o in pq_certifier_set(unitary_factory(4)).operators:
            assert hs_norm(o) == pytest.approx(1.0)


@pytest.mark.unit
class TestEndpointAngle:
    def test_flipped_observable(self):
        x = UnitaryOperator(PauliString("X").to_operator().matrix)
        assert endpoint_angle(PauliString("Z").to_operator(), x) == pytest.approx(np.pi)

    def test_cnot_moves_zz_to_iz(self):
        assert endpoint_angle(PauliString("ZZ").to_operator(), gate("CNOT")) == pytest.approx(np.pi / 2)

    def test_eigenbasis_pair_angle_is_phase_difference(self, unitary_factory):
        for _ in range(5):
            g = unitary_factory(4)
            s = pq_certifier_set(g)
            phases = eigenphases(g).phases
            for o, (j, k) in zip(s.operators, s.pairs, strict=True):
                expected = abs(float(wrap_phase(phases[j] - phases[k])))
                assert endpoint_angle(o, g) == pytest.approx(expected, abs=1e-9)

    def test_rejects_non_unit_observable(self):
        with pytest.raises(NormError):
            endpoint_angle(PauliString("Z").to_operator() * 2, gate("X"))


@pytest.mark.unit
class TestBottleneck:
    def test_cnot_eigenbasis_bound_is_exact(self):
        report = bottleneck_report(gate("CNOT"), pq_certifier_set(gate("CNOT")), gate_label="CNOT")
        assert report.t_lower == pytest.approx(np.pi)
        assert report.eta_lower == pytest.approx(1.0)
        assert report.certifies
        assert all(entry.exact for entry in report.entries)

    def test_cnot_pauli_bound_has_overhead(self):
        report = bottleneck_report(gate("CNOT"), pauli_certifier_set(2), gate_label="CNOT")
        assert report.t_lower == pytest.approx(np.pi / 2)
        assert report.eta_lower == pytest.approx(2.0)
        assert "ZZ" in report.bottlenecks
        assert report.bottleneck_label == report.bottlenecks[0]
        entries = {entry.observable: entry for entry in report.entries}
        assert entries["ZZ"].closure_dim == 3
        assert not entries["ZZ"].exact

    def test_bound_scales_with_budget(self):
        report = bottleneck_report(gate("CNOT"), pauli_certifier_set(2), omega_max=2.0)
        assert report.t_lower == pytest.approx(np.pi / 4)
        assert report.eta_lower == pytest.approx(2.0)

    def test_uzx_pauli_bound_is_tight(self):
        report = bottleneck_report(gate("U_ZX"), pauli_certifier_set(2), gate_label="U_ZX")
        assert report.t_lower == pytest.approx(np.pi / 2)
        assert report.eta_lower == pytest.approx(1.0)

    def test_identity_has_zero_bound(self):
        report = bottleneck_report(UnitaryOperator.identity(4), pauli_certifier_set(2))
        assert report.t_lower == pytest.approx(0.0)
        assert report.eta_lower == 1.0
        assert all(entry.closure_dim == 1 for entry in report.entries)

    @pytest.mark.parametrize("n", [2, 4])
    def test_bounds_are_sound(self, n, unitary_factory):
        for _ in range(10):
            g = unitary_factory(n)
            t_star = minimal_spread(eigenphases(g)).t_star
            pauli = bottleneck_report(g, pauli_certifier_set(n.bit_length() - 1))
            assert pauli.t_lower <= t_star + 1e-9
            exact = bottleneck_report(g, pq_certifier_set(g))
            assert exact.t_lower == pytest.approx(t_star, abs=1e-9)

    def test_adding_operators_never_lowers_the_bound(self, unitary_factory):
        g = unitary_factory(4)
        base = pauli_certifier_set(2)
        extended = base.extend(pq_certifier_set(g).operators[:4])
        assert bottleneck_report(g, extended).t_lower >= bottleneck_report(g, base).t_lower - 1e-12

    def test_eigenbasis_of_another_gate_is_not_exact(self, unitary_factory):
        other = pq_certifier_set(unitary_factory(4))
        report = bottleneck_report(gate("CNOT"), other)
        assert not any(entry.exact for entry in report.entries)
        assert report.t_lower <= np.pi + 1e-9

    def test_non_certifying_set_still_reports(self):
        s = CertifyingSet(operators=(PauliString("ZZ").to_operator(),), label="zz")
        report = bottleneck_report(gate("CNOT"), s)
        assert report.certifies is False
        assert report.t_lower == pytest.approx(np.pi / 2)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            bottleneck_report(gate("CNOT"), pauli_certifier_set(1))

    def test_rejects_non_positive_budget(self):
        with pytest.raises(RangeError):
            bottleneck_report(gate("CNOT"), pauli_certifier_set(2), omega_max=0.0)

    def test_zero_operator_has_no_direction(self):
        s = CertifyingSet(
            operators=(HermitianOperator.zeros(4), PauliString("ZZ").to_operator()),
            label="with-zero",
        )
        with pytest.raises(NormError):
            bottleneck_report(gate("CNOT"), s)


@pytest.mark.unit
class TestPlanarity:
    def test_cnot_bottleneck_is_not_planar(self):
        report = planarity_diagnostic(gate("CNOT"), pauli_certifier_set(2), gate_label="CNOT")
        assert report.bottleneck_closure_dim == 3
        assert report.overhead
        assert report.t_star == pytest.approx(np.pi)
        assert report.eta_lower == pytest.approx(2.0)

    def test_toffoli_bottleneck_is_not_planar(self):
        report = planarity_diagnostic(gate("Toffoli"), pauli_certifier_set(3), gate_label="Toffoli")
        assert report.bottleneck_closure_dim == 3
        assert report.overhead

    def test_uzx_bottleneck_is_planar(self):
        report = planarity_diagnostic(gate("U_ZX"), pauli_certifier_set(2))
        assert report.bottleneck_closure_dim == 2
        assert not report.overhead

    def test_reuses_a_computed_report(self):
        g, s = gate("CNOT"), pauli_certifier_set(2)
        computed = bottleneck_report(g, s, gate_label="CNOT")
        report = planarity_diagnostic(g, s, gate_label="CNOT", report=computed)
        assert report.t_lower == computed.t_lower
        assert report.bottlenecks == computed.bottlenecks

    def test_cnot_bottleneck_midpoint_leaves_the_orbit(self):
        zz = PauliString("ZZ").to_operator()
        image = gate("CNOT").heisenberg(zz)
        assert image.allclose(PauliString("IZ").to_operator())
        for a, b in [(1 / np.sqrt(2), 1 / np.sqrt(2)), (0.6, 0.8)]:
            m = a * zz.matrix + b * image.matrix
            deviation = HermitianOperator(m @ m - np.eye(4))
            assert hs_norm(deviation) == pytest.approx(2 * abs(a * b), abs=1e-12)


@pytest.mark.unit
class TestCertificationSoundness:
    @pytest.mark.parametrize("make_set", CERTIFYING_SETS, ids=["two-op", "pauli"])
    def test_distinct_gates_move_some_operator_differently(self, make_set, rng):
        s = make_set()
        for _ in range(100):
            u, v = random_unitary(4, rng), random_unitary(4, rng)
            gaps = [np.linalg.norm(u.heisenberg(o).matrix - v.heisenberg(o).matrix) for o in s.operators]
            assert max(gaps) > 1e-6

    @pytest.mark.parametrize("make_set", CERTIFYING_SETS, ids=["two-op", "pauli"])
    def test_global_phase_is_invisible(self, make_set, rng):
        s = make_set()
        for alpha in rng.uniform(-np.pi, np.pi, size=10):
            u = random_unitary(4, rng)
            v = UnitaryOperator(np.exp(1j * alpha) * u.matrix)
            for o in s.operators:
                assert np.linalg.norm(u.heisenberg(o).matrix - v.heisenberg(o).matrix) < 1e-9
