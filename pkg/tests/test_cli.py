"""End-to-end tests of the qslkit command line."""

import csv
import json

import numpy as np
import pytest

from main import build_parser, cli
from models.models import ExitCode
from services.gate_library import NamedGate, load_standard_gates
from services.operator_algebra import UnitaryOperator


def run_json(argv: list[str], tmp_path, name: str = "out.json") -> tuple[int, object]:
    out = tmp_path / name
    code = cli([*argv, "--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def write_json(path, data) -> str:
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.e2e
class TestUsage:
    def test_no_command_prints_help(self, capsys):
        assert cli([]) == ExitCode.USAGE
        assert "qslkit" in capsys.readouterr().err

    def test_version(self):
        assert cli(["--version"]) == 0

    def test_bad_choice_is_a_usage_error(self):
        assert cli(["qsl", "--gate", "CNOT", "--format", "xml"]) == ExitCode.USAGE

    def test_missing_gate(self):
        assert cli(["qsl"]) == ExitCode.USAGE

    def test_unknown_gate(self):
        assert cli(["qsl", "--gate", "Fredkin"]) == ExitCode.USAGE

    def test_non_positive_budget(self):
        assert cli(["qsl", "--gate", "CNOT", "--omega-max", "0"]) == ExitCode.USAGE

    def test_parser_lists_every_command(self):
        help_text = build_parser().format_help()
        for command in ("qsl", "curve", "classify", "certify", "bottleneck", "table", "gates"):
            assert command in help_text


@pytest.mark.e2e
class TestQsl:
    def test_library_gate(self, tmp_path):
        code, data = run_json(["qsl", "--gate", "CNOT", "--omega-max", "2"], tmp_path)
        assert code == ExitCode.OK
        assert data["gate"] == "CNOT"
        assert data["delta_phi_star"] == pytest.approx(np.pi)
        assert data["t_star"] == pytest.approx(np.pi / 2)

    def test_stdout_is_json(self, capsys):
        assert cli(["qsl", "--gate", "U_4d"]) == ExitCode.OK
        data = json.loads(capsys.readouterr().out)
        assert data["delta_phi_star"] == pytest.approx(3 * np.pi / 2)

    def test_identity_file(self, tmp_path):
        gate = write_json(tmp_path / "identity.json", {"dim": 2, "re": [[1, 0], [0, 1]]})
        code, data = run_json(["qsl", "--gate", gate], tmp_path)
        assert code == ExitCode.OK
        assert data["delta_phi_star"] == pytest.approx(0.0)
        assert data["t_star"] == pytest.approx(0.0)

    def test_non_unitary_file(self, tmp_path):
        gate = write_json(tmp_path / "bad.json", {"dim": 2, "re": [[1, 0], [0, 2]]})
        assert cli(["qsl", "--gate", gate]) == ExitCode.NOT_UNITARY

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert cli(["qsl", "--gate", str(path)]) == ExitCode.USAGE

    def test_non_qubit_dimension_file(self, tmp_path):
        gate = write_json(tmp_path / "cycle.json", {"dim": 3, "re": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]})
        assert cli(["qsl", "--gate", gate]) == ExitCode.USAGE


@pytest.mark.e2e
class TestCurve:
    @pytest.mark.parametrize(
        ("gate", "observable", "rank"),
        [("CNOT", "ZZ", 3), ("U_ZX", "XI", 2), ("U_4d", "XX", 4)],
    )
    def test_tangent_rank_is_closure_dimension(self, gate, observable, rank, tmp_path):
        argv = ["curve", "--gate", gate, "--observable", observable, "--steps", "64"]
        code, data = run_json(argv, tmp_path)
        assert code == ExitCode.OK
        rows = np.array(data["rows"])
        assert rows.shape == (65, 31)
        tangent = rows[:, 1:16]
        assert np.linalg.matrix_rank(tangent, tol=1e-6) == rank
        assert data["metadata"]["observable"] == observable
        assert data["metadata"]["steps"] == 64
        assert data["columns"][0] == "t"

    def test_csv_output(self, tmp_path):
        out = tmp_path / "curve.csv"
        argv = ["curve", "-g", "X", "--observable", "Z", "--steps", "16", "-f", "csv", "-o", str(out)]
        assert cli(argv) == ExitCode.OK
        lines = out.read_text().splitlines()
        assert lines[0] == "t,tangent_X,tangent_Y,tangent_Z,base_X,base_Y,base_Z"
        assert len(lines) == 18

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_repeated_runs_are_byte_identical(self, fmt, tmp_path):
        outputs = []
        for run in range(2):
            out = tmp_path / f"curve{run}.{fmt}"
            argv = ["curve", "-g", "U_4d", "--observable", "XX", "--steps", "64"]
            argv += ["-f", fmt, "-o", str(out)]
            assert cli(argv) == ExitCode.OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_observable_must_match_gate(self):
        argv = ["curve", "--gate", "CNOT", "--observable", "Z", "--steps", "16"]
        assert cli(argv) == ExitCode.USAGE

    def test_identity_observable_is_rejected(self):
        argv = ["curve", "--gate", "CNOT", "--observable", "II", "--steps", "16"]
        assert cli(argv) == ExitCode.USAGE

    def test_steps_floor(self):
        argv = ["curve", "--gate", "CNOT", "--observable", "ZZ", "--steps", "4"]
        assert cli(argv) == ExitCode.USAGE


@pytest.mark.e2e
class TestCertify:
    def test_canonical_pair(self, tmp_path):
        code, data = run_json(["certify", "--canonical", "5"], tmp_path)
        assert code == ExitCode.OK
        assert data["dimension"] == 1
        assert data["certifies"] is True

    def test_single_operator_fails(self, tmp_path):
        operators = write_json(tmp_path / "ops.json", ["ZZ"])
        code, data = run_json(["certify", "--operators", operators], tmp_path)
        assert code == ExitCode.FAILED
        assert data["certifies"] is False

    def test_mixed_operator_entries(self, tmp_path):
        entries = [
            {"word": "X"},
            "-Z",
            {"dim": 2, "re": [[0, 0], [0, 0]], "im": [[0, -1], [1, 0]]},
        ]
        operators = write_json(tmp_path / "ops.json", entries)
        code, data = run_json(["certify", "--operators", operators], tmp_path)
        assert code == ExitCode.OK
        assert data["size"] == 3

    def test_invalid_operator_entry(self, tmp_path):
        operators = write_json(tmp_path / "ops.json", ["ZQ"])
        assert cli(["certify", "--operators", operators]) == ExitCode.USAGE

    @pytest.mark.parametrize(("gate", "expected"), [("CNOT", ExitCode.OK), ("X", ExitCode.FAILED)])
    def test_symmetric_eigenbasis_set(self, gate, expected):
        assert cli(["certify", "--gate", gate, "--certifiers", "p-only"]) == expected

    def test_needs_exactly_one_source(self):
        assert cli(["certify", "--canonical", "3", "--gate", "CNOT"]) == ExitCode.USAGE


@pytest.mark.e2e
class TestReports:
    def test_classify_json(self, tmp_path):
        code, data = run_json(["classify", "--gate", "U_4d"], tmp_path)
        assert code == ExitCode.OK
        assert data["geometry"] == "helix4"
        assert data["bottleneck_certifier"] == "XX"

    def test_classify_text(self, capsys):
        assert cli(["classify", "--gate", "CZ", "--format", "text"]) == ExitCode.OK
        assert "helix3" in capsys.readouterr().out

    def test_bottleneck(self, tmp_path):
        code, data = run_json(["bottleneck", "--gate", "CNOT"], tmp_path)
        assert code == ExitCode.OK
        assert data["t_lower"] == pytest.approx(np.pi / 2)
        assert data["eta_lower"] == pytest.approx(2.0)
        assert "ZZ" in data["bottlenecks"]

    def test_bottleneck_eigenbasis(self, tmp_path):
        code, data = run_json(["bottleneck", "--gate", "CNOT", "--certifiers", "eigen"], tmp_path)
        assert code == ExitCode.OK
        assert data["eta_lower"] == pytest.approx(1.0)

    def test_gates(self, tmp_path):
        code, data = run_json(["gates"], tmp_path)
        assert code == ExitCode.OK
        assert len(data) == 13
        assert {record["name"] for record in data} >= {"CNOT", "Toffoli", "U_4d"}


@pytest.mark.e2e
@pytest.mark.slow
class TestTableCommand:
    def test_table(self, tmp_path):
        code, data = run_json(["table", "--omega-max", "2"], tmp_path)
        assert code == ExitCode.OK
        assert len(data["rows"]) == 5
        assert all(row["matches"] for row in data["rows"])
        assert all(row["t_star"] == pytest.approx(row["delta_phi_star"] / 2) for row in data["rows"])

    def test_csv_agrees_with_json(self, tmp_path):
        out = tmp_path / "table.csv"
        assert cli(["table", "-f", "csv", "-o", str(out)]) == ExitCode.OK
        _, data = run_json(["table"], tmp_path)
        with out.open(newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == len(data["rows"])
        for row, expected in zip(rows, data["rows"], strict=True):
            assert row["gates"].split(" ") == expected["gates"]
            assert float(row["delta_phi_star"]) == pytest.approx(expected["delta_phi_star"], rel=1e-11)
            assert float(row["t_star"]) == pytest.approx(expected["t_star"], rel=1e-11)
            assert row["geometry"] == expected["geometry"]
            assert row["matches"] == "true"

    def test_repeated_runs_are_byte_identical(self, tmp_path):
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert cli(["table", "-o", str(first)]) == ExitCode.OK
        assert cli(["table", "-o", str(second)]) == ExitCode.OK
        assert first.read_bytes() == second.read_bytes()

    def test_replaced_gate_fails(self, tmp_path):
        registry = load_standard_gates()
        original = registry.get("U_ZX")
        registry.register(
            NamedGate(
                name="U_ZX",
                unitary=UnitaryOperator(np.eye(4)),
                qubits=2,
                expected=original.expected,
                family=original.family,
            )
        )
        code, data = run_json(["table"], tmp_path)
        assert code == ExitCode.FAILED
        assert data["rows"][0]["mismatches"] == ["U_ZX"]
