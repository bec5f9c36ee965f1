import json
import subprocess
import sys

from mvcirc.cli import main


def run_cli(argv, capsys):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_zoo_list(capsys):
    code, out, _ = run_cli(["zoo", "list"], capsys)
    assert code == 0
    assert "Z6" in out and "majority" in out
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) >= 13


def test_zoo_show_round_trips(capsys):
    code, out, _ = run_cli(["zoo", "show", "Z4"], capsys)
    assert code == 0
    from mvcirc.algebra import parse_algebra
    from mvcirc.zoo import get

    assert parse_algebra(out) == get("Z4")


def test_classify_json_z6(capsys):
    code, out, _ = run_cli(["classify", "zoo:Z6", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["verdicts"]["SCSAT"]["kind"] == "PolyTime"
    assert data["flags"]["supernilpotent"] == "yes"


def test_classify_s3_text(capsys):
    code, out, _ = run_cli(["classify", "zoo:S3"], capsys)
    assert code == 0
    assert "CSAT: NPComplete-regime" in out
    assert "CEQV: CoNPComplete-regime" in out


def test_conlat_z4(capsys):
    code, out, _ = run_cli(["conlat", "zoo:Z4"], capsys)
    assert code == 0
    assert "{0 2|1 3}" in out
    assert "-<" in out


def test_conlat_dot(capsys):
    code, out, _ = run_cli(["conlat", "zoo:Z4", "--dot"], capsys)
    assert code == 0
    assert out.startswith("digraph")


def test_commutator_cmd(capsys):
    code, out, _ = run_cli(
        ["commutator", "zoo:S3", "--alpha", "{0 1 2 3 4 5}", "--beta", "{0 1 2 3 4 5}"],
        capsys,
    )
    assert code == 0
    assert out.strip() == "{0 3 4|1 2 5}"


def test_typeset_cmd(capsys):
    code, out, _ = run_cli(["typeset", "zoo:2boolean", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["typeset"] == [3]


def test_solve_csat(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 = input x\ng1 = input y\ng2 = meet g0 g1\ng3 = const 1\noutputs: g2 g3\n")
    code, out, _ = run_cli(["solve", "csat", "zoo:2lattice", str(circ)], capsys)
    assert code == 0
    assert out.strip() == "SAT x=1 y=1"


def test_solve_ceqv(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text(
        "g0 = input x\ng1 = input y\ng2 = meet g0 g1\ng3 = meet g1 g0\noutputs: g2 g3\n"
    )
    code, out, _ = run_cli(["solve", "ceqv", "zoo:2lattice", str(circ)], capsys)
    assert code == 0
    assert out.strip() == "EQUIV"


def test_solve_scsat_equations(tmp_path, capsys):
    circ = tmp_path / "s.txt"
    circ.write_text(
        "g0 = input x\ng1 = mul g0 g0\ng2 = const 1\nequation: g1 g2\n"
    )
    code, out, _ = run_cli(["solve", "scsat", "zoo:Z2", str(circ)], capsys)
    assert code == 0
    assert out.strip() == "UNSAT"


def test_solve_unknown_file(capsys):
    code, _, err = run_cli(["solve", "csat", "zoo:Z2", "/nonexistent/file"], capsys)
    assert code == 66


def test_solve_budget_exit_code(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    lines = [f"g{i} = input x{i}" for i in range(8)]
    lines.append("outputs: g0 g1")
    circ.write_text("\n".join(lines) + "\n")
    code, _, err = run_cli(
        ["solve", "csat", "zoo:Z6", str(circ), "--solver", "brute", "--budget", "100"],
        capsys,
    )
    assert code == 2


def test_solve_precondition_exit_code(tmp_path, capsys):
    circ = tmp_path / "c.txt"
    circ.write_text("g0 = input x\ng1 = mul g0 g0\noutputs: g0 g1\n")
    code, _, err = run_cli(["solve", "csat", "zoo:Z2", str(circ), "--solver", "usp"], capsys)
    assert code == 3


def test_usage_error_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "mvcirc.cli", "bogus-command"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 64


def test_reduce_3sat(tmp_path, capsys):
    dimacs = tmp_path / "f.cnf"
    dimacs.write_text("p cnf 2 1\n1 -2 2 0\n")
    code, out, _ = run_cli(["reduce", "3sat", "zoo:2boolean", str(dimacs)], capsys)
    assert code == 0
    assert "outputs:" in out


def test_reduce_csp(tmp_path, capsys):
    struct = tmp_path / "d.txt"
    struct.write_text("domain 2\nrel eq arity 2\n0 0\n1 1\n")
    inst = tmp_path / "i.txt"
    inst.write_text("eq x y\n")
    code, out, _ = run_cli(["reduce", "csp", str(struct), str(inst)], capsys)
    assert code == 0
    assert "R_eq" in out


def test_solve_mcsat(tmp_path, capsys):
    circ = tmp_path / "m.txt"
    circ.write_text(
        "g0 = input x\ng1 = input y\ng2 = meet g0 g1\ng3 = join g0 g1\n"
        "outputs: g2 g3 g0\n"
    )
    code, out, _ = run_cli(["solve", "mcsat", "zoo:2lattice", str(circ)], capsys)
    assert code == 0
    assert out.startswith("SAT")


def test_solve_stdin(monkeypatch, capsys):
    import io

    monkeypatch.setattr(
        "sys.stdin", io.StringIO("g0 = input x\ng1 = const 0\noutputs: g0 g1\n")
    )
    code, out, _ = run_cli(["solve", "csat", "zoo:2lattice", "-"], capsys)
    assert code == 0
    assert out.strip() == "SAT x=0"


def test_outputs_byte_stable(capsys):
    code1, out1, _ = run_cli(["classify", "zoo:Z4ring", "--json"], capsys)
    code2, out2, _ = run_cli(["classify", "zoo:Z4ring", "--json"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
