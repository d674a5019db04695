"""CLI: subcommands, exit codes, determinism."""

import json

from symcirc.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_pattern_gen(capsys, tmp_path):
    code, out, _ = _run(capsys, "pattern", "gen", "path", "--v", "5")
    assert code == 0
    data = json.loads(out)
    assert data["a"] == 3 and data["b"] == 2 and len(data["edges"]) == 4


def test_width_pipeline(capsys, tmp_path):
    graph = tmp_path / "p5.json"
    code, _, _ = _run(capsys, "pattern", "gen", "path", "--v", "5", "--out", str(graph))
    assert code == 0
    code, out, _ = _run(capsys, "width", "pw", "--graph", str(graph))
    assert code == 0
    assert json.loads(out)["value"] == 1


def test_compile_and_analyze(capsys, tmp_path):
    graph = tmp_path / "p3.json"
    _run(capsys, "pattern", "gen", "path", "--v", "3", "--out", str(graph))
    circuit = tmp_path / "c.json"
    code, _, _ = _run(capsys, "compile", "--graph", str(graph), "--shape", "td",
                      "--n", "2", "--m", "2", "--out", str(circuit))
    assert code == 0
    payload = json.loads(circuit.read_text())
    raw = tmp_path / "raw.json"
    raw.write_text(json.dumps(payload["circuit"]))
    code, out, _ = _run(capsys, "analyze", "--circuit", str(raw), "--n", "2", "--m", "2")
    assert code == 0
    report = json.loads(out)
    assert report["maxSup"] <= 2


def test_oracle_subcommand(capsys, tmp_path):
    graph = tmp_path / "p2.json"
    _run(capsys, "pattern", "gen", "path", "--v", "2", "--out", str(graph))
    host = tmp_path / "host.json"
    host.write_text(json.dumps({
        "n": 2, "m": 2,
        "weights": [[i, j, {"num": "1", "den": "1"}] for i in (1, 2) for j in (1, 2)],
    }))
    code, out, _ = _run(capsys, "oracle", "hom", "--pattern", str(graph), "--host", str(host))
    assert code == 0
    assert json.loads(out)["value"]["num"] == "4"


def test_verify_identity_exit_codes(capsys):
    code, out, _ = _run(capsys, "verify", "identity", "--name", "quotient",
                        "--trials", "3", "--seed", "7")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_reduce_subcommand(capsys):
    code, out, _ = _run(capsys, "--seed", "3", "reduce", "clique-grid", "--n", "1")
    assert code == 0
    assert json.loads(out)["identity_holds"] is True


def test_suite_determinism(capsys, tmp_path):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    code, _, _ = _run(capsys, "suite", "all", "--seed", "1", "--out", str(r1))
    assert code == 0
    code, _, _ = _run(capsys, "suite", "all", "--seed", "1", "--out", str(r2))
    assert code == 0
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert report["failed"] == 0


def test_reduce_pipeline_subcommands(capsys, tmp_path):
    p2 = tmp_path / "p2.json"
    p3 = tmp_path / "p3.json"
    _run(capsys, "pattern", "gen", "path", "--v", "2", "--out", str(p2))
    _run(capsys, "pattern", "gen", "path", "--v", "3", "--out", str(p3))
    code, out, _ = _run(capsys, "--seed", "3", "reduce", "minor", "--n", "2",
                        "--minor-pattern", str(p2), "--host-pattern", str(p3))
    assert code == 0 and json.loads(out)["identity_holds"]
    code, out, _ = _run(capsys, "--seed", "3", "reduce", "extract-subgraph", "--n", "1",
                        "--minor-pattern", str(p2), "--host-pattern", str(p3))
    assert code == 0 and json.loads(out)["identity_holds"]
    terms = tmp_path / "terms.json"
    terms.write_text(json.dumps({"terms": [
        {"alpha": {"num": "1", "den": "1"}, "graph": json.loads(p2.read_text())},
        {"alpha": {"num": "2", "den": "1"}, "graph": json.loads(p3.read_text())},
    ]}))
    code, out, _ = _run(capsys, "--seed", "3", "reduce", "extract-lincomb", "--n", "2",
                        "--big-n", "3", "--ell", "0", "--terms", str(terms))
    assert code == 0 and json.loads(out)["identity_holds"]


def test_caps_file(capsys, tmp_path):
    caps = tmp_path / "caps.json"
    caps.write_text(json.dumps({"width_vertices": 4}))
    p6 = tmp_path / "p6.json"
    _run(capsys, "pattern", "gen", "path", "--v", "6", "--out", str(p6))
    code, _, err = _run(capsys, "--caps", str(caps), "width", "tw", "--graph", str(p6))
    assert code == 2 and "cap" in err


def test_verify_json_flag(capsys):
    code, out, _ = _run(capsys, "--json", "verify", "identity", "--name", "cfi",
                        "--trials", "2", "--seed", "1")
    assert code == 0
    report = json.loads(out)
    assert all(t["pass"] for t in report["tests"])


def test_usage_errors(capsys, tmp_path):
    code, _, _ = _run(capsys, "width", "tw", "--graph", str(tmp_path / "missing.json"))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\"a\": 1}")
    code, _, err = _run(capsys, "width", "tw", "--graph", str(bad))
    assert code in (0, 2)  # graph with no b field is a parse error
    bad.write_text("{\"nope\": 1}")
    code, _, _ = _run(capsys, "width", "tw", "--graph", str(bad))
    assert code == 2
    code, _, _ = _run(capsys, "frobnicate")
    assert code == 2
