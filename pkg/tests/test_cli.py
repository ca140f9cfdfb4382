"""CLI: parsing, round-trips, commands, exit codes and formats."""

import json

import pytest

from perfx.cli import ParseError, main, parse_session, print_session

SESSION = """
ring A = QQ[t]
ring B = QQ[t,x] / (x^2 - t)
map f : A -> B = (t)
module M on A = coker [[t]]
module OB on B = free(1)
complex K on A = koszul(t)
point p0 on A = (0)
point p1 on A = (1)
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_session_basics():
    session = parse_session(SESSION)
    assert set(session.rings) == {"A", "B"}
    assert session.maps["f"].is_module_finite()
    assert session.points["p0"].coords == (0,)
    assert session.complexes["K"].rank(0) == 1


def test_parse_error_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_session("ring A = QQ[t]\nmodule M on Z = coker [[t]]")
    with pytest.raises(ParseError, match="unknown identifier"):
        parse_session("module M on Z = coker [[t]]")
    with pytest.raises(ParseError, match="vanishing locus"):
        parse_session("ring Q = QQ[x] / (x - 1)\npoint p on Q = (0)")


def test_roundtrip():
    session = parse_session(SESSION)
    text = print_session(session)
    again = parse_session(text)
    assert print_session(again) == text


def test_cli_perfect(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, out, _ = run_cli(capsys, "perfect", "M", "at", "p0", "--input", str(path))
    assert code == 0
    assert "perfect_near_point" in out


def test_cli_unknown_identifier(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, _out, err = run_cli(capsys, "perfect", "ZZ", "at", "p0", "--input", str(path))
    assert code == 2
    assert "unknown identifier" in err


def test_cli_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.pfx"
    path.write_text("ring A = QQ[t]\nring A = QQ[u]")
    code, _out, err = run_cli(capsys, "roundtrip", "--input", str(path))
    assert code == 2
    assert "duplicate" in err


def test_cli_hp_scan_csv(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, out, _ = run_cli(
        capsys,
        "hp-scan", "ring=A", "sheaf=M", "p=0", "points=line(t=s; s={0,1,2,-1,7})",
        "--format", "csv", "--input", str(path),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "point,p,dim,audit"
    assert lines[1].startswith("(0),0,1,")
    assert all(line.endswith("pass") for line in lines[1:])


def test_cli_grauert_flat(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, out, _ = run_cli(
        capsys,
        "grauert", "map=f", "sheaf=OB", "p=0", "points={(0),(1),(2),(-1),(3)}",
        "--input", str(path),
    )
    assert code == 0
    assert "constant: True" in out


def test_cli_grauert_witness(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, out, _ = run_cli(
        capsys,
        "grauert", "ring=A", "sheaf=M", "p=0", "points={(0),(1),(2)}",
        "--input", str(path),
    )
    assert code == 1
    assert "(0)" in out


def test_cli_json_format(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(SESSION)
    code, out, _ = run_cli(
        capsys, "tor", "M", "at", "p0", "--format", "json", "--input", str(path)
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["tor_dims"] == [1, 1, 0, 0, 0, 0, 0]


def test_cli_blowup_example(capsys):
    code, out, _ = run_cli(capsys, "example", "blowup-chi", "n=2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "point,chi_classical,chi_nice"
    first = lines[1].split(",")
    assert first[1] == "2" and first[2] == "1"
    for line in lines[2:]:
        assert line.endswith(",1,1")


def test_cli_local_cohomology(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text("ring R = QQ[x,y]\n")
    code, out, _ = run_cli(
        capsys,
        "local-cohomology", "ring=R", "t=(x,y)", "--window=-4..0",
        "--format", "csv", "--input", str(path),
    )
    assert code == 0
    rows = {tuple(line.split(",")[:2]): line.split(",")[2]
            for line in out.strip().splitlines()[1:]}
    assert rows[("2", "-4")] == "3"
    assert rows[("2", "-2")] == "1"


def test_cli_relperf_failure_exit(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text(
        "ring A = QQ[t]\nring B = QQ[t,x] / (t*x)\nmap f : A -> B = (t)\n"
        "module OB on B = free(1)\npoint p0 on A = (0)\n"
    )
    code, out, _ = run_cli(
        capsys, "relperf", "OB", "over", "f", "points={(0),(1)}",
        "--input", str(path),
    )
    assert code == 1
    assert "not_relatively_perfect" in out


def test_cli_usage_error(capsys):
    code, _out, err = run_cli(capsys, "frobnicate")
    assert code == 2
    assert "unknown command" in err


def test_cli_chi_scan_blowup(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text("family X = blowup(QQ, 2)\n")
    code, out, _ = run_cli(
        capsys,
        "chi-scan", "family=X", "sheaf=O(1)",
        "points=line(y1=s,y2=0; s={0,1,2,-1,7})",
        "--format", "csv", "--input", str(path),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "point,p,dim,audit"
    assert all(line.split(",")[2] == "1" for line in lines[1:])


def test_cli_verify_axiom(tmp_path, capsys):
    path = tmp_path / "d.pfx"
    path.write_text("diagram D = regression(seed=5, index=1)\n")
    code, out, _ = run_cli(
        capsys, "verify-axiom", "A123", "diagram=D", "--input", str(path)
    )
    assert code == 0
    assert "equal_evidence" in out


def test_cli_transfer_check(tmp_path, capsys):
    path = tmp_path / "s.pfx"
    path.write_text("ring A = QQ[t]\ncomplex U on A = unit\n")
    code, out, _ = run_cli(
        capsys, "transfer-check", "ring=A", "t=(t)", "n=U", "i=0",
        "--input", str(path),
    )
    assert code == 0
