import json

import pytest
from click.testing import CliRunner

from app.cli import cli
from app.schemas.certificates import Report


@pytest.fixture
def runner():
    return CliRunner()


def invoke_json(runner, *args):
    result = runner.invoke(cli, ["--format", "json", *args])
    return result, json.loads(result.output)


@pytest.fixture
def non_reduced_file(tmp_path):
    path = tmp_path / "non_reduced.toml"
    path.write_text(
        'name = "non-reduced"\np = 2\nvars = ["X", "Y"]\n'
        'ideal = ["X^2"]\norientation = "p - Y"\n'
    )
    return str(path)


def test_delta_command(runner, corpus_dir):
    result, report = invoke_json(
        runner, "delta", str(corpus_dir / "pathological.toml"), "--poly", "X + 2"
    )
    assert result.exit_code == 0
    assert report["outputs"]["delta"] == "-2*X"
    assert report["outputs"]["phi"] == "X^2 + 2"
    assert report["verdicts"]["phi_identity"] is True


def test_delta_unknown_variable(runner, corpus_dir):
    result, payload = invoke_json(
        runner, "delta", str(corpus_dir / "pathological.toml"), "--poly", "X + Q"
    )
    assert result.exit_code == 2
    assert payload["error"]["error_code"]


def test_stabilize_fermat(runner, corpus_dir):
    result, report = invoke_json(runner, "stabilize", str(corpus_dir / "fermat345.toml"))
    assert result.exit_code == 0
    fermat = report["outputs"]["fermat"]
    assert fermat["initial_agrees"] is True
    assert fermat["reduced_mod_p"] is True
    assert fermat["predicted_reduced"] is True
    assert report["verdicts"]["delta_stable"] is True


def test_stabilize_not_stabilized_exit_code(runner, corpus_dir):
    result, payload = invoke_json(
        runner, "--max-iter", "0", "stabilize", str(corpus_dir / "fermat345.toml")
    )
    assert result.exit_code == 3
    assert "error" in payload


def test_reruns_are_identical(runner, corpus_dir):
    args = ["--format", "json", "stabilize", str(corpus_dir / "pathological.toml")]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.output == second.output


def test_json_report_is_byte_stable(runner, corpus_dir):
    result = runner.invoke(
        cli,
        ["--format", "json", "--levels", "1", "check-prism", str(corpus_dir / "squarefree.toml")],
    )
    assert result.exit_code == 0
    report = Report.model_validate_json(result.stdout)
    assert report.model_dump_json(indent=2) + "\n" == result.stdout


def test_check_prism_passes(runner, corpus_dir):
    result, report = invoke_json(
        runner, "--levels", "1", "check-prism", str(corpus_dir / "squarefree.toml")
    )
    assert result.exit_code == 0
    assert report["verdicts"]["hypotheses"]["overall"] is True
    assert report["outputs"]["generic_degree"]["deg_phi"] == 8


def test_check_prism_failure_exit_code(runner, non_reduced_file):
    result, report = invoke_json(runner, "--levels", "1", "check-prism", non_reduced_file)
    assert result.exit_code == 1
    assert report["verdicts"]["hypotheses"]["overall"] is False


def test_check_prism_text_output(runner, corpus_dir):
    result = runner.invoke(
        cli, ["--levels", "1", "check-prism", str(corpus_dir / "q_de_rham.toml")]
    )
    assert result.exit_code == 0
    assert result.output.startswith("check-prism")
    assert "exit_code: 0" in result.output


def test_tower_command(runner, corpus_dir):
    result, report = invoke_json(
        runner,
        "--levels",
        "2",
        "tower",
        str(corpus_dir / "roots_of_p.toml"),
        "--fractional",
        "--pillars",
        "--tilt",
    )
    assert result.exit_code == 0
    outputs = report["outputs"]
    assert [level["relations"] for level in outputs["levels"]] == [
        ["-T + 2"],
        ["-T^2 + 2"],
        ["-T^4 + 2"],
    ]
    assert len(outputs["fractional"]) == 3
    assert outputs["pillars"]["identity_verified"] is True
    assert outputs["tilt"]["completion"] == "T"


def test_tower_refuses_failed_hypotheses(runner, non_reduced_file):
    result, payload = invoke_json(runner, "--levels", "1", "tower", non_reduced_file)
    assert result.exit_code == 1
    assert payload["error"]["error_code"] == "HYP_ROOT_CLOSED"


def test_tower_force_tags_report(runner, non_reduced_file):
    result, report = invoke_json(
        runner, "--levels", "1", "tower", non_reduced_file, "--force", "--axioms"
    )
    assert result.exit_code == 1
    assert any("root_closed" in tag for tag in report["outputs"]["tags"])
    assert report["verdicts"]["hypotheses"] is False


def test_toric_from_matrix(runner):
    result, report = invoke_json(runner, "toric", "--matrix", "2; 3", "--prime", "2")
    assert result.exit_code == 0
    assert report["outputs"]["rank"] == 1
    assert report["outputs"]["generic_degree"]["deg_phi"] == 2
    assert report["verdicts"] == {"delta_stable": True, "vanishes": True}


def test_toric_from_file(runner, corpus_dir):
    result, report = invoke_json(runner, "toric", str(corpus_dir / "semigroup_quartic.toml"))
    assert result.exit_code == 0
    assert report["outputs"]["generic_degree"]["deg_phi"] == 9


def test_toric_needs_input(runner):
    result = runner.invoke(cli, ["toric"])
    assert result.exit_code == 2


def test_roots_of_unity(runner, corpus_dir):
    result, report = invoke_json(
        runner,
        "--levels",
        "1",
        "roots",
        str(corpus_dir / "crystalline_line.toml"),
        "--kind",
        "unity",
    )
    assert result.exit_code == 0
    assert report["outputs"]["base_change"]["orientation"] == "q^2 + q + 1"
    assert all(report["verdicts"].values())


def test_missing_spec_file(runner, tmp_path):
    result, payload = invoke_json(runner, "stabilize", str(tmp_path / "absent.toml"))
    assert result.exit_code == 2
    assert "error" in payload


def test_invalid_settings(runner, corpus_dir):
    result, payload = invoke_json(
        runner, "--levels", "-1", "check-prism", str(corpus_dir / "squarefree.toml")
    )
    assert result.exit_code == 2
    assert "levels" in payload["error"]["message"]


@pytest.mark.slow
def test_corpus_command(runner, corpus_dir):
    result, summary = invoke_json(runner, "--levels", "1", "corpus", str(corpus_dir))
    assert set(summary["corpus"]) == {p.name for p in corpus_dir.glob("*.toml")}
    assert summary["exit_code"] == max(summary["corpus"].values())
    assert result.exit_code == summary["exit_code"]
