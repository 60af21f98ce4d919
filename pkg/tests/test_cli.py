import json

import pytest

from lmodules.cli import main
from lmodules.lmod import validate
from lmodules.serialize import lmod_from_json


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_roots(capsys):
    code, out, _ = run(capsys, "roots", "A2")
    assert code == 0 and "positive roots (3)" in out
    code, out, _ = run(capsys, "roots", "A1", "--json")
    assert code == 0 and json.loads(out)["weyl_order"] == 2
    code, _, err = run(capsys, "roots", "X9")
    assert code == 2 and "X9" in err


def test_kostant(capsys):
    code, out, _ = run(capsys, "kostant", "--json", "A1", "--", "G", "0")
    assert code == 0 and len(json.loads(out)["components"]) == 2
    code, out, _ = run(capsys, "kostant", "A2", "1", "1", "0", "--json")
    assert code == 0 and len(json.loads(out)["components"]) == 1
    code, _, _ = run(capsys, "kostant", "A2", "G", "-1,0")
    assert code == 2
    code, _, _ = run(capsys, "kostant", "A2", "G")
    assert code == 2


def test_build_validate_microsupport_mix(capsys, tmp_path):
    path = tmp_path / "wc_a2.json"
    code, _, _ = run(capsys, "build", "wc", "A2", "G", "0", "mu", "--out", str(path))
    assert code == 0
    assert validate(lmod_from_json(path.read_text())) is None
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 0 and "ok" in out
    code, out, _ = run(capsys, "microsupport", str(path), "--eta", "mu", "--json")
    members = json.loads(out)["members"]
    assert code == 0 and [(m["parabolic"], m["highest_weight"]) for m in members] == [(3, [0, 0])]
    code, out, _ = run(capsys, "mix", str(path), "--eta", "mu", "--json")
    report = json.loads(out)
    assert code == 0 and report["steps"] == 1 and report["ok"]


def test_build_ic_matches_wc(capsys, tmp_path):
    from lmodules.lmod import local_cohomology
    ic, wc = tmp_path / "ic.json", tmp_path / "wc.json"
    assert run(capsys, "build", "ic", "A1", "0", "m", "--out", str(ic))[0] == 0
    assert run(capsys, "build", "wc", "A1", "G", "0", "--eta", "mu", "--out", str(wc))[0] == 0
    a, b = lmod_from_json(ic.read_text()), lmod_from_json(wc.read_text())
    for P in a.poset:
        assert local_cohomology(a, P) == local_cohomology(b, P)


def test_build_missing_args(capsys):
    assert run(capsys, "build", "wc", "A2")[0] == 2
    assert run(capsys, "build", "wc", "A2", "G")[0] == 2
    assert run(capsys, "build", "ic", "A2", "1,0", "x")[0] == 2


def test_validate_reports_violation(capsys, tmp_path):
    path = tmp_path / "m.json"
    run(capsys, "build", "wc", "A2", "G", "0", "mu", "--out", str(path))
    data = json.loads(path.read_text())
    codes = []
    for key in sorted(data["morphisms"]):
        bad = json.loads(json.dumps(data))
        bad["morphisms"][key][0]["scalar"] = "7/1"
        path.write_text(json.dumps(bad))
        code, out, _ = run(capsys, "validate", str(path))
        codes.append(code)
        assert code in (0, 1) and (code == 0 or "violation" in out)
    assert 1 in codes
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "ic-wc", "A2", "0", "m")
    assert code == 0 and "PASS" in out
    code, _, err = run(capsys, "verify", "ic-wc", "A2", "1,0", "m")
    assert code == 2 and "self-contragredient" in err


def test_verify_type_d_warns(capsys):
    code, out, err = run(capsys, "verify", "ic-wc", "D4", "0,0,0,0", "m", "--no-mix")
    assert code == 0
    assert "UNVERIFIED" in out and "warning" in err and "type D" in err


def test_verify_all_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("LMOD_THREADS", "2")
    code, first, _ = run(capsys, "verify", "--all", "--json")
    monkeypatch.setenv("LMOD_THREADS", "1")
    code2, second, _ = run(capsys, "verify", "--all", "--json")
    assert code == code2 == 0 and first == second
    results = json.loads(first)["results"]
    assert [(r["type"], r["parity"]) for r in results] == [
        (t, p) for t in ("A1", "A2", "B2", "G2") for p in ("m", "n")]
    assert all(r["status"] == "PASS" for r in results)


def test_json_output_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "build", "ic", "B2", "0,1", "n", "--out", str(a))
    run(capsys, "build", "ic", "B2", "0,1", "n", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [[], ["nope"], ["roots"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2
