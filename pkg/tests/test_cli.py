import json
import logging

import numpy as np
import pytest

from app.cli import EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, main
from core.algebra import P, builtin_structure
from core.cohomology import CocyclePair, second_cohomology
from core.diagram import builtin_diagram, move_fixtures
from utils import io_utils


@pytest.fixture
def cli(isolated_config):
    """Опции, уводящие логи и пресеты во временную папку."""
    options = ["--log-dir", str(isolated_config / "logs"), "--settings-dir", str(isolated_config / "presets")]
    yield options
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_structure_list(capsys, cli, isolated_config):
    code, data = run(capsys, ["structure", "list", *cli])
    assert code == EXIT_OK
    assert "P_qs-q_qq-s" in data["structures"]
    assert (isolated_config / "logs" / "qualgebra_lab.log").exists()


def test_structure_show(capsys, cli, isolated_config):
    xlsx = isolated_config / "p.xlsx"
    code, data = run(capsys, ["structure", "show", "P_qs-q_qq-s", "--xlsx", str(xlsx), *cli])
    assert code == EXIT_OK
    assert data["kind"] == "qualgebra"
    assert data["n"] == 4
    assert data["properties"]["commutative"] is True
    assert xlsx.exists()


def test_color_counts(capsys, cli):
    code, data = run(capsys, ["color", "--structure", "builtin:P_qs-q_qq-s", "--diagram", "builtin:cuff_st", *cli])
    assert code == EXIT_OK
    assert data == {"mode": "qualgebra", "count": 18}


def test_color_list(capsys, cli):
    code, data = run(capsys, ["color", "--structure", "builtin:P_qs-q_qq-s", "--diagram", "builtin:unknot",
                              "--list", *cli])
    assert code == EXIT_OK
    assert data["count"] == 4
    assert data["colorings"][1] == {"assignment": {}, "loops": ["q"]}


def test_color_mode_mismatch(capsys, cli):
    code, data = run(capsys, ["color", "--structure", "builtin:dihedral3", "--diagram", "builtin:trefoil",
                              "--mode", "qualgebra", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "mode_mismatch"


def test_cohomology(capsys, cli):
    code, data = run(capsys, ["cohomology", "--structure", "builtin:P_qs-q_qq-s", "--representatives", *cli])
    assert code == EXIT_OK
    assert data["coeff"] == "z"
    assert data["h2"] == {"free_rank": 4, "torsion": [2]}
    assert len(data["representatives"]) == 5


def test_cohomology_unknown_coefficients(capsys, cli):
    code, data = run(capsys, ["cohomology", "--structure", "builtin:P_qs-q_qq-s", "--coeff", "z1", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "unknown_name"


def test_invariant(capsys, cli, isolated_config, p_qualgebra):
    _, cocycle = second_cohomology(p_qualgebra).representatives[0]
    path = io_utils.save_cocycle(cocycle, str(isolated_config / "cocycle.json"))
    base = ["invariant", "--structure", "builtin:P_qs-q_qq-s", "--diagram", "builtin:cuff_hopf", "--cocycle", path]
    code, data = run(capsys, [*base, *cli])
    assert code == EXIT_OK
    assert data["total"] == 14

    code, data = run(capsys, [*base, "--polynomial", *cli])
    assert code == EXIT_OK
    assert set(data) == {"polynomial"}


def test_invariant_modulo_two(capsys, cli, isolated_config):
    chi = np.zeros((4, 4), dtype=int)
    chi[P, P] = 2
    cocycle = CocyclePair("qualgebra", chi, np.zeros((4, 4), dtype=int))
    path = io_utils.save_cocycle(cocycle, str(isolated_config / "mod2.json"))
    base = ["invariant", "--structure", "builtin:P_qs-q_qq-s", "--diagram", "builtin:cuff_hopf", "--cocycle", path]
    code, data = run(capsys, [*base, *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "not_a_cocycle"

    code, data = run(capsys, [*base, "--coeff", "z2", *cli])
    assert code == EXIT_OK
    assert data["coeff"] == "z2"
    assert data["weights"] == {"0": 14}

    code, data = run(capsys, ["moves", "--structure", "builtin:P_qs-q_qq-s", "--cocycle", path, "--coeff", "z2", *cli])
    assert code == EXIT_OK
    assert data["passed"] is True
    assert all(m["boltzmann"]["passed"] for m in data["moves"])


def test_moves(capsys, cli):
    code, data = run(capsys, ["moves", "--structure", "builtin:P_qs-q_qq-s", *cli])
    assert code == EXIT_OK
    assert data["passed"] is True
    assert len(data["moves"]) == len(move_fixtures())


def test_moves_for_quandle_skip_vertex_moves(capsys, cli):
    code, data = run(capsys, ["moves", "--structure", "builtin:dihedral3", *cli])
    assert code == EXIT_OK
    assert data["mode"] == "quandle"
    assert data["passed"] is True
    assert {m["move_id"] for m in data["moves"]} <= {"R1+", "R1-", "R2", "R3"}


def test_fuzz(capsys, cli):
    code, data = run(capsys, ["fuzz", "--structure", "builtin:P_qs-q_qq-s", "--diagram", "builtin:theta_st",
                              "--steps", "2", "--runs", "2", "--seed", "3", *cli])
    assert code == EXIT_OK
    assert data["seed"] == 3
    assert data["count"] == 16
    assert len(data["runs"]) == 2
    assert data["passed"] is True
    assert data["coeff"] == "z"
    assert len(data["weights"]) == 5
    assert all(r["weights_preserved"] for r in data["runs"])


def test_fuzz_quandle_mode_modulo_three(capsys, cli):
    code, data = run(capsys, ["fuzz", "--structure", "builtin:dihedral3", "--diagram", "builtin:trefoil",
                              "--coeff", "z3", "--steps", "3", "--runs", "2", "--seed", "5", *cli])
    assert code == EXIT_OK
    assert data["mode"] == "quandle"
    assert data["coeff"] == "z3"
    assert data["count"] == 9
    assert len(data["weights"]) == 1
    assert sum(data["weights"][0].values()) == 9
    assert data["passed"] is True


def test_freeqa_check_relation(capsys, cli):
    code, data = run(capsys, ["freeqa", "check-relation", "--depth", "4", *cli])
    assert code == EXIT_OK
    assert data["free_group"]["lhs"] == data["free_group"]["rhs"]
    assert data["equivalence"]["equivalent"] is False
    assert data["distinct"] is True


def test_freeqa_reduce(capsys, cli):
    code, data = run(capsys, ["freeqa", "reduce", "x<+a<-a", *cli])
    assert code == EXIT_OK
    assert data == {"term": "x", "pretty": "x", "length": 0}


def test_freeqa_equivalent(capsys, cli):
    code, data = run(capsys, ["freeqa", "equivalent", "b<+a * a<+b", "a<+b * b<+a<-b<+a<+b", *cli])
    assert code == EXIT_OK
    assert data["equivalent"] is True
    assert data["path"] == [[1, "positive"]]


def test_freeqa_syntax_error(capsys, cli):
    code, data = run(capsys, ["freeqa", "reduce", "a $ b", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "term_syntax"


def test_diagram_builtin_and_validate(capsys, cli, isolated_config):
    code, data = run(capsys, ["diagram", "builtin", "trefoil", *cli])
    assert code == EXIT_OK
    assert data["arcs"] == ["a1", "a2", "a3"]

    path = io_utils.save_diagram(builtin_diagram("theta_kt"), str(isolated_config / "theta.json"))
    code, data = run(capsys, ["diagram", "validate", path, *cli])
    assert code == EXIT_OK
    assert data["valid"] is True
    assert data["crossings"] == 6


def test_diagram_validation_error(capsys, cli, isolated_config):
    broken = isolated_config / "broken.json"
    broken.write_text(json.dumps({
        "arcs": ["a", "b"],
        "crossings": [{"sign": "+", "over": "a", "under_in": "a", "under_out": "b"}],
    }), encoding="utf-8")
    code, data = run(capsys, ["diagram", "validate", str(broken), *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "dangling_arc"


def test_missing_file(capsys, cli, isolated_config):
    code, data = run(capsys, ["diagram", "validate", str(isolated_config / "nope.json"), *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "invalid_input"


def test_structure_from_json_file(capsys, cli, isolated_config):
    path = io_utils.save_structure(builtin_structure("SQ4_q2-s"), str(isolated_config / "sq.json"))
    code, data = run(capsys, ["color", "--structure", path, "--diagram", "builtin:theta_st", *cli])
    assert code == EXIT_OK
    assert data["mode"] == "squandle"


def test_classify(capsys, cli):
    code, data = run(capsys, ["classify", "--size", "3", "--nontrivial", *cli])
    assert code == EXIT_OK
    assert data["kind"] == "qualgebra"
    assert data["count"] == 0

    code, data = run(capsys, ["classify", "--size", "9", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "size_too_large"


def test_classify_budget(capsys, cli):
    code, data = run(capsys, ["classify", "--size", "4", "--budget-seconds", "1e-9", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "budget_exceeded"
    assert data["error"]["details"]["stage"] == "quandles"


def test_budget_from_environment(capsys, cli, monkeypatch):
    monkeypatch.setenv("QUALGEBRA_LAB_BUDGET", "1e-9")
    code, data = run(capsys, ["classify", "--size", "4", *cli])
    assert code == EXIT_INVALID
    assert data["error"]["code"] == "budget_exceeded"


def test_preset_controls_output_format(capsys, cli, isolated_config):
    presets = isolated_config / "presets"
    presets.mkdir()
    (presets / "settings.json").write_text(json.dumps({"output": {"format": "text"}}), encoding="utf-8")
    assert main(["structure", "list", *cli]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "structures:"
    assert "  - P_qs-q_qq-s" in lines


def test_preset_controls_exhaustive_bound(capsys, cli, isolated_config):
    presets = isolated_config / "presets"
    presets.mkdir()
    (presets / "settings.json").write_text(json.dumps({"classify": {"exhaustive_bound": 1}}), encoding="utf-8")
    code, data = run(capsys, ["classify", "--kind", "squandle", "--size", "2", *cli])
    assert code == EXIT_OK
    log_text = (isolated_config / "logs" / "qualgebra_lab.log").read_text(encoding="utf-8")
    assert "Перебор для n=2 может занять значительное время" in log_text


def test_json_output_file(capsys, cli, isolated_config):
    target = isolated_config / "out" / "list.json"
    code, data = run(capsys, ["diagram", "list", "--json", str(target), *cli])
    assert code == EXIT_OK
    assert data is None
    assert "trefoil" in json.loads(target.read_text(encoding="utf-8"))["diagrams"]


def test_list_builtins(capsys, cli):
    code, data = run(capsys, ["--list-builtins", *cli])
    assert code == EXIT_OK
    assert "theta_kt" in data["diagrams"]
    assert "S4_3cycles" in data["structures"]


def test_no_command(capsys, cli):
    assert main(cli) == EXIT_INVALID


def test_internal_error(capsys, cli, monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr("app.cli.second_cohomology", boom)
    code, data = run(capsys, ["cohomology", "--structure", "builtin:Z2", *cli])
    assert code == EXIT_INTERNAL
    assert data is None


def test_output_is_reproducible(capsys, cli):
    argv = ["fuzz", "--structure", "builtin:S3", "--diagram", "builtin:cuff_hopf", "--steps", "3", "--runs", "2",
            "--seed", "11", *cli]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == first
