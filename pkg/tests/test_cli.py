from __future__ import annotations

import hashlib
import json
import re
import random
import subprocess
import sys

import pytest

from hyperdet import cli
from hyperdet import detfun as dt
from hyperdet import epsilon as ep


@pytest.fixture(scope="module")
def eps_file(tmp_path_factory, table):
    p = tmp_path_factory.mktemp("eps") / "eps.txt"
    table.save(p)
    return p


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_dims_n4(capsys, tmp_path):
    man = tmp_path / "m.json"
    code, out = run(capsys, "dims", "--n", "4", "--evidence", "--manifest", str(man))
    assert code == 0
    assert re.findall(r"dim=(\d+)", out.out) == ["0", "3", "5", "3", "0"]
    assert "total 11" in out.out and "[rank]" in out.out and "[symmetry]" in out.out
    m = json.loads(man.read_text())
    assert m["result"]["total"] == 11 and len(m["primes"]) == 2 and m["seed"] == 0


def test_dims_n3_and_block(capsys):
    code, out = run(capsys, "dims", "--n", "3")
    assert code == 0 and out.out.strip().endswith("total 2")
    code, out = run(capsys, "dims", "--n", "5", "--p", "5")
    assert out.out.strip() == "n=5 p=5 dim=32"


def test_dims_n7_infeasible(capsys):
    code, out = run(capsys, "dims", "--n", "7")
    assert code == cli.EXIT_INFEASIBLE and "reduce" in out.err


def test_epsilon_solve_verify_and_tamper(capsys, tmp_path):
    out_path = tmp_path / "eps.txt"
    code, out = run(capsys, "epsilon", "solve", "--out", str(out_path))
    assert code == 0 and "histogram 1:6840 -1:6792 -4:12 0:171112" in out.out
    assert len(out_path.read_text().splitlines()) == 184_756 + 3
    code, out = run(capsys, "epsilon", "verify", "--in", str(out_path))
    assert code == 0 and "corank 1" in out.out
    lines = out_path.read_text().split("\n")
    lines[100] = lines[100][:-1] + ("1" if lines[100][-1] == "0" else "0")
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines))
    code, out = run(capsys, "epsilon", "verify", "--in", str(bad))
    assert code == cli.EXIT_DIGEST


def test_epsilon_verify_flags_wrong_but_well_formed_table(capsys, tmp_path, table):
    vals = -table.values
    p = tmp_path / "neg.txt"
    ep.EpsilonTable(table.masks, vals).save(p)
    code, out = run(capsys, "epsilon", "verify", "--in", str(p))
    assert code == cli.EXIT_STRUCTURAL and "FAIL" in out.out


def test_solve_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "epsilon", "solve", "--out", str(a), "--seed", "3")
    run(capsys, "epsilon", "solve", "--out", str(b), "--seed", "3")
    assert a.read_bytes() == b.read_bytes()


def test_orbits(capsys, tmp_path, eps_file):
    out_path = tmp_path / "orb.txt"
    code, out = run(capsys, "orbits", "--eps", str(eps_file), "--out", str(out_path))
    assert code == 0
    assert "# orbits 20" in out.out and "# total 13644" in out.out
    assert "size 1440 eps 1" in out.out
    first = out_path.read_bytes()
    run(capsys, "orbits", "--eps", str(eps_file), "--out", str(out_path))
    assert out_path.read_bytes() == first


def test_det_eval(capsys, tmp_path, eps_file):
    p1 = tmp_path / "p1.json"
    p1.write_text(dt.basis_config(ep.p1_mask()).to_json())
    code, out = run(capsys, "det", "eval", "--input", str(p1), "--method", "both", "--eps", str(eps_file))
    assert code == 0 and out.out.splitlines() == ["sum: 1/1", "brackets: 1/1"]
    deg = tmp_path / "deg.json"
    deg.write_text(dt.degenerate_config((1, 3, 5, 6), random.Random(0)).to_json())
    code, out = run(capsys, "det", "eval", "--input", str(deg), "--eps", str(eps_file))
    assert code == 0 and out.out.splitlines() == ["sum: 0/1", "brackets: 0/1"]


def test_det_disagreement(capsys, tmp_path, eps_file):
    text = (dt.resources.files("hyperdet") / "data/brackets.txt").read_text()
    recs = [ln for ln in text.splitlines() if not ln.startswith("#")]
    recs[0] = recs[0].replace("sign: +1", "sign: -1")
    body = "".join(r + "\n" for r in recs)
    bad = tmp_path / "brackets.txt"
    bad.write_text(body + f"# sha256={hashlib.sha256(body.encode()).hexdigest()}\n")
    cfg = tmp_path / "c.json"
    cfg.write_text(dt.random_config(random.Random(2)).to_json())
    code, out = run(capsys, "det", "eval", "--input", str(cfg), "--eps", str(eps_file), "--brackets", str(bad))
    assert code == cli.EXIT_DISAGREE and "DISAGREE" in out.err


def test_det_bad_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 6, "entries": {"1,2,3": ["1", "0"]}}))
    code, out = run(capsys, "det", "eval", "--input", str(cfg), "--method", "brackets")
    assert code == cli.EXIT_INPUT and "missing" in out.err


def test_reduce(capsys, tmp_path):
    code, out = run(capsys, "reduce", "--n", "7", "--samples", "20")
    assert code == 0 and "20/20 certificates verified" in out.out
    cert = tmp_path / "cert.txt"
    code, out = run(capsys, "reduce", "--n", "6", "--mask", "fff00", "--out", str(cert))
    assert code == 0 and cert.read_text().startswith("# hyperdet certificate n=6 root=fff00")
    code, out = run(capsys, "reduce", "--n", "6", "--mask", "003ff")
    assert code == cli.EXIT_INPUT


def test_verify_suites(capsys):
    code, out = run(capsys, "verify", "reduction", "--n", "7", "--samples", "30")
    assert code == 0 and "[PASS] criterion 8" in out.out
    code, out = run(capsys, "verify", "brackets", "--seed", "1")
    assert code == 0 and "[PASS] criterion 7" in out.out


def test_manifest_default_location(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERDET_CACHE", str(tmp_path))
    run(capsys, "dims", "--n", "3", "--seed", "5")
    m = json.loads((tmp_path / "manifests" / "dims.json").read_text())
    assert m["seed"] == 5 and m["exit_status"] == 0 and "total" in m["timings"]


def test_help_lists_exit_codes():
    res = subprocess.run([sys.executable, "-m", "hyperdet", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for sub in ("dims", "epsilon", "orbits", "det", "reduce", "verify"):
        assert sub in res.stdout
    assert "Exit codes" in res.stdout and "digest" in res.stdout


def test_usage_error_exit_code():
    res = subprocess.run([sys.executable, "-m", "hyperdet", "dims"], capture_output=True, text=True)
    assert res.returncode == cli.EXIT_USAGE
