import csv
import json

import pytest

from normgraph.cli import RunConfig, main, make_parser


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def last_json(out):
    return json.loads(out.strip().splitlines()[-1])


def test_build_graph6_k4(capsys):
    code, out = run(capsys, "build", "--p", "2", "--h", "1", "--t", "3", "--format", "graph6")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "C~"
    stats = json.loads(lines[1])
    assert stats["n"] == 4 and stats["m"] == 6


def test_build_t4_q7(capsys):
    code, out = run(capsys, "build", "--p", "7", "--h", "1", "--t", "4")
    s = last_json(out)
    assert code == 0 and s["n"] == 2058
    assert 2 * s["m"] + s["loops_discarded"] == 2058 * 342


def test_build_writes_files(capsys, tmp_path):
    g6 = tmp_path / "g.g6"
    dm = tmp_path / "g.dimacs"
    assert run(capsys, "build", "--p", "3", "--h", "1", "--t", "3", "--format", "graph6", "--out", str(g6))[0] == 0
    assert run(capsys, "build", "--p", "3", "--h", "1", "--t", "3", "--format", "dimacs", "--out", str(dm))[0] == 0
    from normgraph.graph import build, from_dimacs, from_graph6

    G = build(3, 1, 3)
    assert from_graph6(g6.read_bytes().strip()) == G
    assert from_dimacs(dm.read_bytes()) == G


def test_non_prime_is_usage_error(capsys):
    assert run(capsys, "build", "--p", "4", "--h", "1", "--t", "3")[0] == 2


def test_vertex_cap_is_capacity_error(capsys):
    assert run(capsys, "build", "--p", "7", "--h", "1", "--t", "4", "--vertex-cap", "100")[0] == 3


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "--p", "3", "--h", "1", "--t", "3", "--claim", "custom"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["build", "--p", "3"])
    assert exc.value.code == 2


def test_check_ars_pass(capsys, tmp_path):
    out_file = tmp_path / "c.json"
    code, out = run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "ars", "--out", str(out_file))
    cert = last_json(out)
    assert code == 0 and cert["verdict"] == "PASS" and cert["claim"] == "ars_t"
    assert json.loads(out_file.read_text()) == cert
    for key in ["claim", "p", "h", "t", "q", "c", "bound", "threshold", "verdict", "observed",
                "witness", "nodes_explored", "wall_time_ms", "exploratory"]:
        assert key in cert


def test_check_main_t3(capsys):
    assert run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "main")[0] == 2
    code, out = run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "main", "--exploratory")
    cert = last_json(out)
    assert code == 1 and cert["verdict"] == "FAIL" and cert["exploratory"]
    assert cert["witness"]["left"] == [0, 2, 5, 6] and cert["witness"]["common"]


def test_check_budget_indeterminate(capsys):
    code, out = run(capsys, "check", "--p", "3", "--h", "1", "--t", "4", "--claim", "ars", "--budget", "3")
    assert code == 4 and last_json(out)["verdict"] == "INDETERMINATE"


def test_check_custom(capsys):
    code, out = run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "custom", "--c", "2", "--threshold", "2")
    cert = last_json(out)
    assert code == 1 and cert["c"] == 2 and cert["threshold"] == 2


@pytest.mark.parametrize("which", ["identity", "general-position", "span-property", "neighborhood-equality"])
def test_geometry_commands(capsys, which):
    code, out = run(capsys, "geometry", "--p", "3", "--h", "1", "--t", "3", "--which", which)
    cert = last_json(out)
    assert code == 0 and cert["verdict"] == "PASS"
    assert "details" in cert


def test_geometry_budget_capacity(capsys):
    code, _ = run(capsys, "geometry", "--p", "3", "--h", "1", "--t", "4", "--which", "general-position", "--budget", "10")
    assert code == 3


def test_report(capsys, tmp_path):
    files = []
    for i, argv in enumerate([
        ["check", "--p", "3", "--h", "1", "--t", "3", "--claim", "ars"],
        ["check", "--p", "2", "--h", "1", "--t", "3", "--claim", "ars"],
    ]):
        f = tmp_path / f"{i}.json"
        run(capsys, *argv, "--out", str(f))
        files.append(str(f))
    table = tmp_path / "s.csv"
    code = main(["report", *files, "--csv", str(table)])
    captured = capsys.readouterr()
    assert code == 0 and last_json(captured.out)["overall"] == "PASS"
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["claim", "p", "h", "t", "q", "c", "bound", "observed", "verdict"]
    assert len(rows) == 3 and "kst_margin" in captured.err

    bad = tmp_path / "fail.json"
    run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "main", "--exploratory", "--out", str(bad))
    assert main(["report", *files, str(bad)]) == 1
    capsys.readouterr()
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["report", str(junk)]) == 2
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"claim": "ars_t"}))
    assert main(["report", str(partial)]) == 2


def test_config_reproduces_certificate(capsys):
    code, out = run(capsys, "check", "--p", "3", "--h", "1", "--t", "3", "--claim", "main", "--exploratory")
    first = last_json(out)
    argv = RunConfig(**first["config"]).to_argv()
    code2, out2 = run(capsys, *argv)
    second = last_json(out2)
    assert code == code2
    first.pop("wall_time_ms"), second.pop("wall_time_ms")
    assert first == second


def test_config_round_trip_through_parser():
    args = make_parser().parse_args(["geometry", "--p", "5", "--h", "1", "--t", "3", "--which", "identity", "--seed", "7"])
    cfg = RunConfig.from_args(args)
    assert RunConfig.from_args(make_parser().parse_args(cfg.to_argv())) == cfg
