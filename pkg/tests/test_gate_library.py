"""Tests for the named gate library, diagonal generators and gate comparisons."""

import json

import numpy as np
import pytest

from models.models import GeometryClass
from services.gate_library import (
    STANDARD_GATE_NAMES,
    DiagonalTwoQubitGenerator,
    NamedGate,
    bottleneck_plane_certifiers,
    build_table,
    classify_gate,
    cnot_generator,
    diagonal_frame_generator,
    frame_generator,
    gate_registry_dump,
    geometry_class,
    lambda_closure,
    load_standard_gates,
    local_factor,
    makhlin_invariants,
    operator_schmidt_rank,
    optimal_diagonal_generator,
    resolve_gate,
    saturating_omega,
    spectrally_equivalent,
    standard_gate,
    three_qubit_blocks,
    three_qubit_generator,
)
from services.operator_algebra import (
    UnitaryOperator,
    hs_inner,
    hs_norm,
    phase_fidelity,
    spectral_width,
)
from services.qsl_core import eigenphases, evolve_constant, minimal_spread
from services.repository import GateRegistry
from services.scqc_geometry import adjoint_generator, plane_decomposition
from utils.exceptions import DegenerateError, DimensionError, NotFoundError, PersistenceError

HADAMARD = UnitaryOperator(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


@pytest.mark.unit
class TestStandardGates:
    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_gates_are_unitary_with_expectations(self, name):
        gate = standard_gate(name)
        assert gate.name == name
        assert gate.expected is not None
        assert gate.family is not None
        assert 2 ** gate.qubits == gate.dim

    def test_lookup_is_case_insensitive(self):
        assert standard_gate("cnot").name == "CNOT"

    def test_unknown_gate(self):
        with pytest.raises(NotFoundError):
            standard_gate("Fredkin")

    def test_toffoli_is_conjugated_ccz(self):
        h3 = local_factor(UnitaryOperator.identity(2), UnitaryOperator.identity(2), HADAMARD)
        conjugated = h3 @ standard_gate("CCZ").unitary @ h3
        assert conjugated.allclose(standard_gate("Toffoli").unitary)


@pytest.mark.unit
class TestDiagonalGenerators:
    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_saturating_generator_reaches_the_spectrum(self, name):
        gate = standard_gate(name)
        h = optimal_diagonal_generator(name, saturating_omega(name, 1.0))
        assert spectral_width(h) == pytest.approx(1.0)
        evolved = evolve_constant(h, gate.expected.delta_phi_star)
        assert spectrally_equivalent(evolved, gate.unitary)

    def test_cnot_generator_reaches_cnot(self):
        omega = 1.3
        h = cnot_generator(omega)
        assert spectral_width(h) == pytest.approx(2 * omega)
        evolved = evolve_constant(h, np.pi / (2 * omega))
        assert phase_fidelity(evolved, standard_gate("CNOT").unitary) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize(
        ("coefficients", "expected"),
        [
            ((0, 0, 1), 2),
            ((1, 0, 0), 2),
            ((-1, -1, 1), 3),
            ((0.5, 0.5, 0), 3),
            ((2, 1, 0), 4),
            ((1, 0, 2), 4),
        ],
    )
    def test_closure_rule(self, coefficients, expected):
        assert lambda_closure(*coefficients) == expected

    def test_zero_generator_is_degenerate(self):
        with pytest.raises(DegenerateError):
            lambda_closure(0, 0, 0)

    @pytest.mark.slow
    def test_closure_rule_matches_pauli_search(self, rng):
        values = np.array([-2.0, -1.0, 0.0, 1.0, 2.0, 0.7])
        checked = 0
        while checked < 500:
            coefficients = rng.choice(values, size=3)
            if not np.any(coefficients):
                continue
            generator = DiagonalTwoQubitGenerator(*coefficients)
            assert geometry_class(generator.to_operator()).closure_dim == generator.closure()
            checked += 1


@pytest.mark.unit
class TestThreeQubitBlocks:
    def test_seven_blocks_of_four(self):
        blocks = three_qubit_blocks(np.ones(7))
        assert len(blocks) == 7
        assert all(len(block.frequencies) == 4 for block in blocks)
        assert all(block.signs[0][block.support[0] - 1] == 1 for block in blocks)

    def test_single_qubit_generator(self):
        blocks = three_qubit_blocks([1, 0, 0, 0, 0, 0, 0])
        for block in blocks:
            expected = 1.0 if 1 in block.support else 0.0
            assert np.allclose(np.abs(block.frequencies), expected)

    def test_ccz_has_one_frequency_per_block(self):
        coefficients = [-1, -1, -1, 1, 1, 1, -1]
        for block in three_qubit_blocks(coefficients):
            assert sorted(np.abs(block.frequencies)) == pytest.approx([0, 0, 0, 4])

    def test_frequencies_match_rotation_planes(self, rng):
        for _ in range(10):
            coefficients = rng.normal(size=7)
            frequencies = sorted(
                abs(kappa) for block in three_qubit_blocks(coefficients) for kappa in block.frequencies
            )
            planes = plane_decomposition(adjoint_generator(three_qubit_generator(coefficients)))
            assert np.allclose(sorted(planes.curvatures), frequencies, atol=1e-9)

    def test_rejects_wrong_length(self):
        with pytest.raises(DimensionError):
            three_qubit_blocks(np.ones(6))


@pytest.mark.unit
class TestPlaneCertifiers:
    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_plane_rotates_at_the_width(self, name):
        (certifier,) = bottleneck_plane_certifiers(name)
        h = optimal_diagonal_generator(name)
        assert certifier.rate == pytest.approx(spectral_width(h))
        assert hs_norm(certifier.a) == pytest.approx(1.0)
        assert hs_norm(certifier.b) == pytest.approx(1.0)
        assert hs_inner(certifier.a, certifier.b) == pytest.approx(0.0, abs=1e-12)
        for t in np.linspace(0, 2 * np.pi / certifier.rate, 32):
            rotated = evolve_constant(h, t).heisenberg(certifier.a)
            expected = certifier.a * np.cos(certifier.rate * t) + certifier.b * np.sin(certifier.rate * t)
            assert rotated.allclose(expected, atol=1e-9)

    @pytest.mark.parametrize(
        ("name", "sign", "partner"),
        [("CZ", -1, "a"), ("U_4d", -1, "b"), ("CCZ", -1, "a")],
    )
    def test_endpoint_at_minimal_time(self, name, sign, partner):
        (certifier,) = bottleneck_plane_certifiers(name)
        h = optimal_diagonal_generator(name)
        t_star = standard_gate(name).expected.delta_phi_star / spectral_width(h)
        endpoint = evolve_constant(h, t_star).heisenberg(certifier.a)
        assert endpoint.allclose(getattr(certifier, partner) * sign, atol=1e-9)


@pytest.mark.unit
class TestClassification:
    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_library_geometry(self, name):
        gate = standard_gate(name)
        report = classify_gate(gate)
        assert report.geometry == gate.expected.geometry.value
        assert report.delta_phi_star == pytest.approx(gate.expected.delta_phi_star)

    def test_four_level_certifier(self):
        witness = geometry_class(optimal_diagonal_generator("U_4d"))
        assert witness.closure_dim == 4
        assert witness.certifier == "XX"
        assert witness.geometry == GeometryClass.HELIX4.value

    def test_cz_certifier(self):
        witness = geometry_class(optimal_diagonal_generator("CZ"))
        assert witness.closure_dim == 3
        assert witness.certifier == "IX"

    def test_diagonal_frame_of_cnot(self):
        h = diagonal_frame_generator(standard_gate("CNOT").unitary)
        assert np.allclose(h.matrix, np.diag([-1.0, 0.0, 0.0, 0.0]))

    def test_gate_without_family_uses_its_frame(self):
        gate = NamedGate(name="file", unitary=standard_gate("CNOT").unitary, qubits=2)
        report = classify_gate(gate, omega_max=2.0)
        assert report.geometry == "helix3"
        assert report.t_star == pytest.approx(np.pi / 2)

    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_frame_reaches_the_gate(self, name):
        gate = standard_gate(name)
        frame = frame_generator(gate)
        t_star = minimal_spread(eigenphases(gate.unitary)).t_star
        assert frame is not None
        assert spectral_width(frame) == pytest.approx(1.0)
        assert spectrally_equivalent(evolve_constant(frame, t_star), gate.unitary)

    @pytest.mark.parametrize("name", STANDARD_GATE_NAMES)
    def test_geometry_does_not_depend_on_stored_frame(self, name):
        gate = standard_gate(name)
        bare = NamedGate(name=name, unitary=gate.unitary, qubits=gate.qubits)
        assert classify_gate(bare).geometry == classify_gate(gate).geometry

    def test_mismatched_frame_is_replaced(self):
        cz_family = standard_gate("CZ").family
        gate = NamedGate(
            name="U_4d",
            unitary=standard_gate("U_4d").unitary,
            qubits=2,
            family=cz_family,
        )
        frame = frame_generator(gate)
        assert not frame.allclose(cz_family.at(saturating_omega("CZ", 1.0)))
        report = classify_gate(gate)
        assert report.geometry == "helix4"
        assert report.closure_dim == 4

    def test_identity_has_no_frame(self):
        gate = NamedGate(name="id", unitary=UnitaryOperator.identity(4), qubits=2)
        assert frame_generator(gate) is None
        assert classify_gate(gate).geometry == "static"


@pytest.mark.unit
class TestGateComparisons:
    def test_spectral_frames(self):
        cz = standard_gate("CZ").unitary
        assert spectrally_equivalent(cz, standard_gate("CNOT").unitary)
        assert spectrally_equivalent(cz, standard_gate("SWAP").unitary)
        assert not spectrally_equivalent(cz, standard_gate("iSWAP").unitary)
        assert not spectrally_equivalent(cz, standard_gate("X").unitary)

    def test_conjugation_preserves_spectrum(self, unitary_factory):
        u, v = unitary_factory(4), unitary_factory(4)
        assert spectrally_equivalent(u, v.dag() @ u @ v)
        assert spectrally_equivalent(u, UnitaryOperator(np.exp(1.1j) * u.matrix))

    @pytest.mark.parametrize(
        ("name", "rank"),
        [("CNOT", 2), ("CZ", 2), ("U_ZX", 2), ("SWAP", 4), ("iSWAP", 4)],
    )
    def test_schmidt_ranks(self, name, rank):
        assert operator_schmidt_rank(standard_gate(name).unitary) == rank

    def test_local_gate_has_rank_one(self):
        assert operator_schmidt_rank(local_factor(HADAMARD, HADAMARD)) == 1

    def test_schmidt_rank_needs_two_qubits(self):
        with pytest.raises(DimensionError):
            operator_schmidt_rank(standard_gate("X").unitary)

    def test_cnot_and_uzx_are_locally_equivalent(self):
        cnot = makhlin_invariants(standard_gate("CNOT").unitary)
        uzx = makhlin_invariants(standard_gate("U_ZX").unitary)
        assert cnot.g1 == pytest.approx(0.0, abs=1e-12)
        assert cnot.g2 == pytest.approx(1.0)
        assert uzx.g1 == pytest.approx(cnot.g1, abs=1e-12)
        assert uzx.g2 == pytest.approx(cnot.g2)

    def test_identity_invariants(self):
        invariants = makhlin_invariants(UnitaryOperator.identity(4))
        assert invariants.g1 == pytest.approx(1.0)
        assert invariants.g2 == pytest.approx(3.0)

    def test_local_dressing_keeps_invariants(self):
        dressed = local_factor(HADAMARD, HADAMARD) @ standard_gate("CZ").unitary
        assert makhlin_invariants(dressed).g2 == pytest.approx(makhlin_invariants(standard_gate("CZ").unitary).g2)


@pytest.mark.unit
class TestRegistry:
    def test_load_is_idempotent(self):
        registry = load_standard_gates()
        load_standard_gates()
        assert len(registry) == len(STANDARD_GATE_NAMES)
        assert registry is GateRegistry()

    def test_dump_contains_every_gate(self):
        records = gate_registry_dump()
        assert [record.name for record in records] == list(STANDARD_GATE_NAMES)
        cnot = records[STANDARD_GATE_NAMES.index("CNOT")]
        assert cnot.qubits == 2
        assert cnot.frame is not None

    def test_resolve_by_name(self):
        assert resolve_gate("swap").name == "SWAP"

    def test_resolve_from_file(self, tmp_path):
        path = tmp_path / "flip.json"
        path.write_text(json.dumps({"dim": 2, "re": [[0, 1], [1, 0]]}))
        gate = resolve_gate(str(path))
        assert gate.name == "flip"
        assert gate.qubits == 1
        assert gate.family is None

    def test_resolve_rejects_bad_payload(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 2, "re": [[1, 0]]}))
        with pytest.raises(PersistenceError):
            resolve_gate(str(path))

    def test_resolve_rejects_non_qubit_dimension(self, tmp_path):
        path = tmp_path / "cycle.json"
        path.write_text(json.dumps({"dim": 3, "re": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]}))
        with pytest.raises(DimensionError):
            resolve_gate(str(path))

    def test_resolve_unknown(self):
        with pytest.raises(NotFoundError):
            resolve_gate("no-such-gate")


@pytest.mark.integration
class TestTable:
    def test_reference_table(self):
        report = build_table()
        assert report.all_match
        rows = {tuple(row.gates): row for row in report.rows}
        assert rows[("U_ZX",)].delta_phi_star == pytest.approx(np.pi / 2)
        assert rows[("U_ZX",)].geometry == "arc"
        assert rows[("U_4d",)].t_star == pytest.approx(3 * np.pi / 2)
        assert rows[("U_4d",)].geometry == "helix4"
        assert rows[("CNOT", "CZ", "SWAP", "iSWAP")].geometry == "helix3"

    def test_budget_halves_times(self):
        report = build_table(omega_max=2.0)
        assert report.all_match
        for row in report.rows:
            assert row.t_star == pytest.approx(row.delta_phi_star / 2)

    def test_replaced_gate_is_flagged(self):
        registry = load_standard_gates()
        original = registry.get("CZ")
        registry.register(
            NamedGate(
                name="CZ",
                unitary=UnitaryOperator.identity(4),
                qubits=2,
                expected=original.expected,
                family=original.family,
            )
        )
        report = build_table()
        assert not report.all_match
        row = next(row for row in report.rows if "CZ" in row.gates)
        assert row.mismatches == ["CZ"]
