import json

import pytest
from click.testing import CliRunner

from app.cli import cli
from app.cli import string_constants as sc

from ..conf import constants
from ..test_utils import instance_payload, write_json

BUDGET = str(constants["BUDGET"])


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def run(runner: CliRunner, *args: str):
    return runner.invoke(cli, [str(arg) for arg in args])


##################
#  SOLVE         #
##################


def test_solve_text_report(runner, e1_file):
    result = run(runner, sc.SOLVE_COMMAND, e1_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    assert "route: DualPath" in result.output
    assert "value: -4.0" in result.output
    assert "multiplier mu=-1.0" in result.output
    assert "seed: 0" in result.output


def test_solve_json_report(runner, e1_file):
    result = run(runner, sc.SOLVE_COMMAND, e1_file, sc.BUDGET_OPTION, BUDGET, sc.JSON_OPTION)
    assert result.exit_code == sc.EXIT_OK
    data = json.loads(result.output)
    assert data["route"] == "DualPath"
    assert data["seed"] == 0


def test_solve_exception_case_reports_gap(runner, e2_file):
    result = run(runner, sc.SOLVE_COMMAND, e2_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    assert "route: BZeroPath" in result.output
    assert "gap: duality gap is +infinity" in result.output


def test_solve_infeasible(runner, infeasible_file):
    result = run(runner, sc.SOLVE_COMMAND, infeasible_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    assert "value: inf" in result.output
    assert "infeasible primal" in result.output


def test_solve_output_is_deterministic(runner, e1_file):
    args = (sc.SOLVE_COMMAND, e1_file, sc.SEED_OPTION, "3", sc.BUDGET_OPTION, BUDGET)
    assert run(runner, *args).output == run(runner, *args).output


def test_solve_rejects_negative_seed(runner, e1_file):
    result = run(runner, sc.SOLVE_COMMAND, e1_file, sc.SEED_OPTION, "-1")
    assert result.exit_code == 2


##################
#  BAD INPUT     #
##################


def test_missing_field(runner, tmp_path, e1):
    payload = instance_payload(e1)
    payload.pop("beta")
    path = write_json(tmp_path / "broken.json", payload)
    result = run(runner, sc.SOLVE_COMMAND, path)
    assert result.exit_code == sc.EXIT_PARSE_ERROR
    assert 'field "beta"' in result.output


def test_missing_file(runner, tmp_path):
    result = run(runner, sc.SOLVE_COMMAND, tmp_path / "absent.json")
    assert result.exit_code == sc.EXIT_PARSE_ERROR
    assert "<file>" in result.output


##################
#  SLEMMA        #
##################


def test_slemma_exception_case(runner, e2_file):
    result = run(runner, sc.SLEMMA_COMMAND, e2_file)
    assert result.exit_code == sc.EXIT_OK
    assert result.output.startswith("ExceptionHolds nu=")
    nu = float(result.output.split()[1].removeprefix("nu="))
    assert nu == pytest.approx(0.375, abs=1e-6)
    assert "case: exception" in result.output


def test_slemma_json(runner, e2_file):
    result = run(runner, sc.SLEMMA_COMMAND, e2_file, sc.JSON_OPTION)
    data = json.loads(result.output)
    assert data["verdict"] == "ExceptionHolds"
    assert data["certificate"]["kind"] == "exception_nu"
    assert data["certificate"]["nu"] == pytest.approx(0.375, abs=1e-6)


def test_slemma_needs_finite_band(runner, tmp_path, unbounded):
    path = write_json(tmp_path / "unbounded.json", instance_payload(unbounded))
    result = run(runner, sc.SLEMMA_COMMAND, path, sc.KIND_OPTION, "interval")
    assert result.exit_code == sc.EXIT_PRECONDITION
    assert "Precondition violated" in result.output


def test_slemma_unknown_kind(runner, e1_file):
    result = run(runner, sc.SLEMMA_COMMAND, e1_file, sc.KIND_OPTION, "product")
    assert result.exit_code == 2


##################
#  ASSUMPTIONS   #
##################


def test_assumptions(runner, e1_file):
    result = run(runner, sc.ASSUMPTIONS_COMMAND, e1_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    assert "item3 (RICQ): holds" in result.output
    assert "item5 (dual feasible): holds" in result.output


def test_assumptions_exception_case(runner, e2_file):
    result = run(runner, sc.ASSUMPTIONS_COMMAND, e2_file, sc.BUDGET_OPTION, BUDGET)
    assert "item1 (B != 0): fails" in result.output


##################
#  ORACLE        #
##################


def test_oracle_compare(runner, e1_file):
    result = run(runner, sc.ORACLE_COMPARE_COMMAND, e1_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    lines = result.output.splitlines()
    assert lines[0] == "solver vs oracle"
    assert lines[1].split() == ["solver", "-4.0"]
    assert lines[2].split()[0] == "oracle"


def test_oracle_compare_infeasible(runner, infeasible_file):
    result = run(runner, sc.ORACLE_COMPARE_COMMAND, infeasible_file, sc.BUDGET_OPTION, BUDGET)
    assert result.exit_code == sc.EXIT_OK
    assert "no feasible start found" in result.output


##################
#  CERTIFY       #
##################

certify_test_ids = ("valid", "level_too_high")
certify_cases = (
    ({"kind": "multiplier", "mu": -1.0, "level": -4.0}, sc.EXIT_OK, "valid"),
    ({"kind": "multiplier", "mu": -1.0, "level": 0.0}, sc.EXIT_CERTIFICATE_REJECTED, "rejected"),
)


@pytest.mark.parametrize("payload, code, word", certify_cases, ids=certify_test_ids)
def test_certify(runner, tmp_path, e1_file, payload, code, word):
    path = write_json(tmp_path / "cert.json", payload)
    result = run(runner, sc.CERTIFY_COMMAND, e1_file, path)
    assert result.exit_code == code
    assert result.output.strip() == f"certificate multiplier: {word}"


def test_certify_bad_kind(runner, tmp_path, e1_file):
    path = write_json(tmp_path / "cert.json", {"kind": "hint"})
    result = run(runner, sc.CERTIFY_COMMAND, e1_file, path)
    assert result.exit_code == sc.EXIT_PARSE_ERROR
    assert 'field "kind"' in result.output
