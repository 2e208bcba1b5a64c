import json

import numpy as np
import pytest

from atomlab.cli import RunConfig, dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dumps_canonical():
    s = dumps({"b": np.float64(0.1), "a": [np.int64(2), float("inf"), float("nan"), True, None]})
    assert s == '{"a":[2,"inf","nan",true,null],"b":0.10000000000000001}\n'


def test_run_config_rejects_unknown():
    with pytest.raises(ValueError):
        RunConfig.from_dict({"command": "verify", "bogus": 1})
    a = RunConfig(command="verify", action="k-bounds", output="x.json")
    b = RunConfig(command="verify", action="k-bounds", output="y.json")
    assert a.digest() == b.digest()
    assert a.digest() != RunConfig(command="verify", action="k-bounds", seed=1).digest()


def test_render_csv(capsys):
    code, out, _ = run(capsys, "atom", "render", "--cube", "1,1:0.5,0.5", "--weight", "power:0.5", "--grid", "8")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,y,value" and len(lines) == 65
    vals = {float(line.split(",")[2]) for line in lines[1:]}
    assert len(vals) == 3


def test_classify(capsys):
    code, out, _ = run(capsys, "weight", "classify", "--weight", "power:0.5", "--class", "dini:1,bn:2,doubling")
    doc = json.loads(out)
    assert code == 0 and doc["tool"] == "atomlab"
    assert [r["class"] for r in doc["results"]] == ["dini:1", "bn:2", "doubling"]
    code, out, _ = run(capsys, "weight", "classify", "--weight", "power:0", "--class", "dini:1")
    assert json.loads(out)["results"][0]["passed"] is False


def test_extend_eval_paths_agree(capsys):
    args = ["extend", "eval", "--cube", "3:0.5", "--at", "0.5,3.0"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args, "--method", "quadrature")
    va, vb = json.loads(a)["results"]["value"], json.loads(b)["results"]["value"]
    np.testing.assert_allclose(va, vb, atol=1e-10)


def test_norm_aw_and_errors(capsys):
    code, out, _ = run(capsys, "norm", "aw", "--cube", "3:0.5", "--weight", "power:2", "--mode", "radial")
    # the atom is normalized by the same weight: w(J) = (3.5^3 - 2.5^3) / 3
    wJ = (3.5**3 - 2.5**3) / 3
    assert code == 0 and json.loads(out)["results"]["value"] == pytest.approx(0.08154775227471214 / wJ, rel=1e-8)
    code, _, err = run(capsys, "norm", "aw", "--cube", "3:0.5", "--weight", "power:0", "--mode", "radial")
    assert code == 3 and "NonIntegrableWeight" in err
    code, _, _ = run(capsys, "norm", "aw", "--cube", "3:0.5", "--weight", "nonsense")
    assert code == 2
    code, _, _ = run(capsys, "extend", "eval", "--cube", "3:0.5", "--at", "1.0,3.0")
    assert code == 3


def test_decompose(tmp_path, capsys):
    f = np.array([[1.0, -1.0], [2.0, -2.0]])
    p = tmp_path / "f.csv"
    np.savetxt(p, f, delimiter=",")
    code, out, _ = run(capsys, "decompose", "--input", str(p), "--weight", "power:0")
    assert code == 0 and len(json.loads(out)["results"]["function"]["terms"]) == 2
    np.save(tmp_path / "g.npy", np.ones(4))
    code, _, _ = run(capsys, "decompose", "--input", str(tmp_path / "g.npy"))
    assert code == 2


def test_verify_exit_codes_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "k-bounds", "--seed", "7", "--json", "--out", str(a)]) == 1
    assert main(["verify", "k-bounds", "--seed", "7", "--json", "--out", str(b)]) == 1
    assert a.read_bytes() == b.read_bytes()
    assert main(["verify", "k2-far", "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("PASS k2-far")


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 7, "samples": 10000}))
    code, out, _ = run(capsys, "--config", str(cfg), "verify", "k-bounds", "--json")
    assert code == 1 and json.loads(out)["results"][0]["seed"] == 7
    code, out, _ = run(capsys, "--config", str(cfg), "verify", "k-bounds", "--json", "--seed", "3")
    assert json.loads(out)["results"][0]["seed"] == 3
    cfg.write_text(json.dumps({"nope": 1}))
    assert main(["--config", str(cfg), "verify", "k-bounds"]) == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["weight", "classify", "--weight", "power:1", "--class", "zorn:1"]) == 2
    assert main(["atom", "render", "--cube", "9:0.5"]) == 2
