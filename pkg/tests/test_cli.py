import json

import pytest

from stdsub import acceptance as acc
from stdsub.cli import ParseError, load_scenario, main, run_scenario


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write(tmp_path, obj):
    p = tmp_path / "scenario.json"
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_lattice_scenario(tmp_path, capsys):
    path = write(tmp_path, {"mode": "lattice", "d_max": 4, "cases": 200, "seed": 1})
    code, rep = run(capsys, "lattice", "--scenario", path)
    assert code == 0 and rep["all_pass"]
    assert rep["scenario"]["d_max"] == 4
    assert rep["environment"]["seed"] == 1


def test_skeleton_factor_item(capsys):
    code, rep = run(capsys, "skeleton", "--dims", "1,1,1,1")
    assert code == 0
    (iv,) = [c for c in rep["checks"] if c["name"] == "skeleton.iv_radical"]
    assert iv["verdict"] == "pass" and iv["residual"] == 0


def test_report_contract(capsys):
    _, rep = run(capsys, "skeleton", "--dims", "1,1,1", "--with-involutions")
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)
    for c in rep["checks"]:
        assert set(c) >= {"name", "paper_anchor", "residual", "tolerance", "verdict"}
        assert (c["verdict"] == "pass") == (c["residual"] <= c["tolerance"])
    assert "wall_time" not in rep


def test_malformed_json(tmp_path, capsys):
    path = write(tmp_path, '{"mode": "lattice",\n "cases": }')
    assert main(["lattice", "--scenario", path]) == 2
    assert "line 2" in capsys.readouterr().err


def test_unknown_field():
    with pytest.raises(ParseError) as exc:
        load_scenario('{"mode": "lattice", "bogus": 1}')
    assert exc.value.field == "bogus"


def test_mode_mismatch():
    with pytest.raises(ParseError):
        load_scenario('{"mode": "fock"}', mode="lattice")


def test_defaults_materialized():
    sc = load_scenario('{"mode": "fock"}')
    assert sc["cutoff"] == 32 and sc["radius"] == 1.0 and sc["seed"] == acc.DEFAULT_SEED


def test_infeasible_exit(capsys):
    code, rep = run(capsys, "skeleton", "--dims", "1,2")
    assert code == 1
    assert "DegeneratePairing" in rep["error"]


def test_goal_infeasible(tmp_path, capsys):
    path = write(tmp_path, {"mode": "seqmodel", "angles": {"kind": "Constant", "value": 0.5}})
    code, rep = run(capsys, "seqmodel", "--scenario", path)
    assert code == 1 and "GoalInfeasible" in rep["error"]


def test_classify(capsys):
    code, rep = run(capsys, "classify", "--angle", "1.0471975511965976")
    assert code == 0
    assert rep["checks"][0]["details"]["label"] == "III_0.333333333333"


@pytest.mark.parametrize("regime", ["constant", "skeleton", "truncated"])
def test_tower_regimes(regime, capsys):
    code, rep = run(capsys, "tower", "--regime", regime, "--D", "8")
    assert code == 0
    assert rep["scenario"]["regime"] == regime


def test_fock_multimode(capsys):
    code, rep = run(capsys, "fock", "verify", "--d", "2", "--cutoff", "10", "--samples", "3")
    assert code == 0 and rep["all_pass"]


def test_tolerance_override_monotone():
    sc = load_scenario('{"mode": "modular", "cases": 10, "points": 10, "sums": 3}')
    base = run_scenario(sc)
    loose = run_scenario(dict(sc, tol=1e-3))
    strict = {c["name"]: c for c in base["checks"]}
    for c in loose["checks"]:
        assert c["residual"] == strict[c["name"]]["residual"]
        if strict[c["name"]]["verdict"] == "pass" and c["tolerance"] is not None:
            assert c["verdict"] == "pass"


def test_timing_flag(capsys):
    _, rep = run(capsys, "classify", "--timing")
    assert rep["wall_time"] >= 0


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["classify", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["all_pass"]


def test_deterministic_bytes():
    sc = load_scenario('{"mode": "lattice", "cases": 30}')
    assert acc.dumps(run_scenario(sc)) == acc.dumps(run_scenario(sc))
