import json

import numpy as np
import pytest

from rankminors import Tensor, __version__
from rankminors.cli import main
from rankminors.oracles import BUDGET_ENV


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text(Tensor(np.zeros((2, 2, 2), dtype=int), 2).to_json())
    diag = np.zeros((3, 3, 3), dtype=int)
    for i in range(3):
        diag[i, i, i] = 1
    d = tmp_path / "diag.json"
    d.write_text(Tensor(diag, 2).to_json())
    rnd = tmp_path / "rnd.json"
    rnd.write_text(Tensor(np.random.default_rng(0).integers(0, 2, (4, 4, 4)), 2).to_json())
    return {"zero": str(zero), "diag": str(d), "rnd": str(rnd), "dir": tmp_path}


def test_budget(capsys):
    code, rep = run(capsys, "budget", "--name", "F4trp", "--l", "2")
    assert code == 0 and rep["result"]["value"] == "9830400"
    assert rep["version"] == __version__


def test_budget_errors(capsys):
    code, rep = run(capsys, "budget", "--name", "Missing", "--l", "2")
    assert code == 1
    code, rep = run(capsys, "budget", "--list")
    assert code == 0 and "F4trp" in rep["result"]


def test_rank_zero(capsys, files):
    code, rep = run(capsys, "rank", "--notion", "pr", "--input", files["zero"])
    assert code == 0 and rep["result"]["value"] == 0
    assert len(rep["input_sha256"]) == 64


def test_rank_with_certificate(capsys, files):
    cert = files["dir"] / "cert.json"
    code, rep = run(capsys, "rank", "--notion", "sr", "--input", files["diag"], "--emit-certificate", str(cert))
    assert code == 0 and rep["result"]["value"] == 3 and rep["result"]["certificate_valid"]
    assert json.loads(cert.read_text())["value"] == 3


def test_rank_family_file(capsys, files):
    fam = files["dir"] / "fam.json"
    fam.write_text(json.dumps({"d": 3, "partitions": [[[1], [2, 3]]]}))
    code, rep = run(capsys, "rank", "--notion", str(fam), "--input", files["diag"])
    assert code == 0 and rep["result"]["value"] == 3


def test_minor_find(capsys, files):
    code, rep = run(capsys, "minor", "find", "--notion", "sr", "--target", "2", "--input", files["diag"])
    assert code == 0 and rep["result"]["verified"] and rep["result"]["minor_rank"] >= 2


def test_minor_too_high(capsys, files):
    code, rep = run(capsys, "minor", "find", "--notion", "sr", "--target", "4", "--input", files["diag"])
    assert code == 2 and rep["error"] == "RankTooLow"


def test_disjoint_find(capsys, files):
    code, rep = run(capsys, "disjoint", "find", "--notion", "tr", "--target", "1", "--input", files["rnd"])
    assert code == 0 and rep["result"]["disjoint"] is True
    subsets = rep["result"]["subsets"]
    flat = [x for s in subsets for x in s]
    assert len(flat) == len(set(flat))


def test_bias(capsys, files):
    code, rep = run(capsys, "bias", "--exact", "--input", files["diag"])
    assert code == 0 and rep["result"]["exact"] == "27/64"
    code, rep = run(capsys, "bias", "--samples", "2000", "--seed", "3", "--input", files["diag"])
    assert code == 0 and rep["result"]["samples"] == 2000 and rep["seed"] == 3


def test_verify_counterexample(capsys):
    code, rep = run(capsys, "verify-counterexample")
    assert code == 0 and rep["result"]["all_pass"]


def test_generate_deterministic(capsys, files):
    out1 = files["dir"] / "a.json"
    out2 = files["dir"] / "b.json"
    for out in (out1, out2):
        code, _ = run(capsys, "generate", "--kind", "rank1sum", "--param", "n=3", "--param", "k=2",
                      "--seed", "5", "--output", str(out))
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_usage_errors(capsys, files):
    assert main(["nope"]) == 1
    capsys.readouterr()
    assert main(["rank", "--input", str(files["dir"] / "missing.json")]) == 1
    capsys.readouterr()
    assert main(["generate", "--kind", "nope"]) == 1


def test_scale_exceeded_exit_code(capsys, files, monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "10")
    code, rep = run(capsys, "rank", "--notion", "tr", "--input", files["rnd"])
    assert code == 3 and rep["scale_exceeded"] and rep["node_budget"] == 10
