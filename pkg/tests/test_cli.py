import json
from fractions import Fraction

import pytest

from iwahori_whittaker.cli import main
from iwahori_whittaker.scalars import LAM, Q, CycloScalar, QLPoly, psi_char
from iwahori_whittaker.series import SeriesMatrix, TruncatedSeries


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_whittaker_eval(capsys):
    code, out = run(capsys, "whittaker", "eval", "--d", "1,0", "--sigma", "1,2")
    assert code == 0 and QLPoly.from_json(out["value"]) == Q ** -1 * LAM
    _, out = run(capsys, "whittaker", "eval", "--d", "0,0", "--sigma", "2,1")
    assert QLPoly.from_json(out["value"]) == -(Q ** -1)
    _, out = run(capsys, "whittaker", "eval", "--d", "0,2", "--sigma", "1,2")
    assert out["value"] == []


def test_whittaker_eval_matrix(capsys, tmp_path):
    p = 3
    # u·diag(π, 1) with u_12 = π^{-1}
    g = SeriesMatrix(p, [[TruncatedSeries.monomial(p, 1), TruncatedSeries.monomial(p, -1)],
                         [TruncatedSeries.zero(p), TruncatedSeries.one(p)]])
    path = write(tmp_path, "m.json", g.to_json())
    code, out = run(capsys, "whittaker", "eval-matrix", "--file", path, "--p", "3")
    assert code == 0
    assert out["cell"] == {"d": [1, 0], "sigma": [1, 2]}
    assert out["psi_phase"] == 1
    expected = psi_char(1, p) * CycloScalar.rational(p, Fraction(1, 3), 1)
    assert CycloScalar.from_json(out["value"]) == expected
    code, out = run(capsys, "whittaker", "eval-matrix", "--file", path, "--p", "5")
    assert code == 3


def test_precision_exhaustion_exit_code(capsys, tmp_path):
    m = {"p": 3, "n": 2, "window": [-4, 8],
         "entries": [[{"exact_zero": False, "coeffs": [[0, 1]], "exact": True}, {"exact_zero": True, "coeffs": []}],
                     [{"exact_zero": False, "coeffs": []}, {"exact_zero": False, "coeffs": []}]]}
    code, out = run(capsys, "whittaker", "eval-matrix", "--file", write(tmp_path, "m.json", m),
                    "--retries", "1")
    assert code == 2 and out["error"] == "precision"


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(capsys, "whittaker", "eval-matrix", "--file", str(bad))
    assert code == 3
    code, _ = run(capsys, "whittaker", "eval", "--d", "1,x", "--sigma", "1,2")
    assert code == 3
    code, _ = run(capsys, "whittaker", "eval", "--d", "0,0", "--sigma", "1,2", "--prec", "0:8")
    assert code == 3


def test_hecke_verify(capsys):
    code, out = run(capsys, "hecke", "verify", "--gen", "tleq:1", "--n", "2", "--p", "3")
    assert code == 0 and out["ok"] and out["checked"] == 10 and out["eigenvalue_text"] == "lam"
    code, out = run(capsys, "hecke", "verify", "--gen", "word:srefl:1,tleq:2")
    assert code == 0 and out["eigenvalue_text"] == "lam"


def test_hecke_verify_with_cell_file(capsys, tmp_path):
    cells = [{"d": [0, 0], "sigma": [1, 2]}, {"d": [1, -1], "sigma": [2, 1]}]
    code, out = run(capsys, "hecke", "verify", "--gen", "srefl:1", "--cells",
                    write(tmp_path, "c.json", cells))
    assert code == 0 and out["checked"] == 2


def test_hecke_reps(capsys):
    code, out = run(capsys, "hecke", "reps", "--gen", "tleq:1", "--n", "2", "--p", "2")
    assert code == 0 and out["count"] == 2 and out["validation"]["ok"]


def test_hecke_apply(capsys):
    code, out = run(capsys, "hecke", "apply", "--gen", "srefl:1", "--d", "0,0", "--sigma", "1,2")
    assert code == 0 and out["agrees"] and out["text"] == "-1"
    code, _ = run(capsys, "hecke", "apply", "--gen", "srefl:1")
    assert code == 3


def test_quiver_commands(capsys, tmp_path):
    code, out = run(capsys, "quiver", "enumerate", "--n", "2", "--dims", "1,1")
    assert code == 0 and out["count"] == 3
    sheaf = write(tmp_path, "r.json", {"n": 2, "p": 3, "dims": [1, 1], "maps": [[[1]], [[0]]]})
    code, out = run(capsys, "quiver", "decompose", "--file", sheaf)
    assert code == 0 and out["segments"] == [[0, 2]]
    simple = write(tmp_path, "s.json", {"n": 2, "p": 3, "dims": [1, 0], "maps": [[], [[]]]})
    code, out = run(capsys, "quiver", "homext", "--x", simple, "--y", simple)
    assert code == 0 and out["hom"] == 1 and out["ext1"] == 0
    code, out = run(capsys, "quiver", "filter", "--file", sheaf)
    assert [s["dims"] for s in out["steps"]] == [[0, 0], [0, 1], [1, 1]]


def test_quiver_invalid_rep(capsys, tmp_path):
    bad = write(tmp_path, "r.json", {"n": 2, "p": 3, "dims": [1, 1], "maps": [[[1]], [[1]]]})
    code, out = run(capsys, "quiver", "decompose", "--file", bad)
    assert code == 3 and "nilpotent" in out["message"]
    bad = write(tmp_path, "r2.json", {"n": 2, "p": 3, "dims": [1, 1], "maps": [[[1, 1]], [[0]]]})
    code, _ = run(capsys, "quiver", "decompose", "--file", bad)
    assert code == 3


def test_trace_commands(capsys):
    code, out = run(capsys, "trace", "table", "--d", "1")
    assert code == 0 and [r[2] for r in out["rows"]] == ["lam", "-q*lam + lam", "lam"]
    _, out = run(capsys, "trace", "table", "--d", "2")
    assert QLPoly.from_json(out["rows"][2][1]) == (Q + (Q - 1) ** 2) * LAM ** 2
    code, out = run(capsys, "trace", "verify", "--d-max", "8")
    assert code == 0 and out["ok"]


def test_out_file_and_determinism(capsys, tmp_path):
    target = tmp_path / "o.json"
    assert main(["hecke", "verify", "--gen", "srefl:1", "--seed", "4", "--out", str(target)]) == 0
    first = target.read_text()
    assert main(["hecke", "verify", "--gen", "srefl:1", "--seed", "4", "--out", str(target)]) == 0
    assert target.read_text() == first
    assert capsys.readouterr().out == ""


def test_stdin_input(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(
        {"n": 1, "p": 2, "dims": [2], "maps": [[[0, 1], [0, 0]]]})))
    code, out = run(capsys, "quiver", "decompose")
    assert code == 0 and out["segments"] == [[0, 2]]


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        main(["nope"])
