import io
import json
import math
import subprocess
import sys

import pytest

from divkit.cli import emit_csv, emit_svg, run
from divkit.core import Channel, Dist
from divkit.regions import ErrorPoint


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    ch = tmp_path / "ch.json"
    a.write_text(json.dumps(Dist(("a", "b"), (0.5, 0.5)).to_dict()))
    b.write_text(json.dumps(Dist(("a", "b"), (0.25, 0.75)).to_dict()))
    ch.write_text(json.dumps(Channel.from_array([[0.5, 0.5], [0.5, 0.5]], ("a", "b"), ("x", "y")).to_dict()))
    return str(a), str(b), str(ch)


def test_div(files):
    a, b, _ = files
    code, out, _ = call("div", "--div", "renyi:2", "--mu1", a, "--mu2", b)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.2876821, abs=1e-7)
    code, out, _ = call("div", "--div", "kl", "--mu1", a, "--mu2", a)
    assert json.loads(out) == {"value": 0.0}
    code, out, _ = call("div", "--div", "renyi:2", "--mu1", a, "--mu2", b, "--bits")
    assert json.loads(out)["value"] == pytest.approx(math.log(4 / 3) / math.log(2), abs=1e-11)


def test_infinite_values_are_strings(tmp_path):
    p = tmp_path / "p.json"
    q = tmp_path / "q.json"
    p.write_text(json.dumps({"labels": ["a", "b"], "probs": [1.0, 0.0]}))
    q.write_text(json.dumps({"labels": ["a", "b"], "probs": [0.0, 1.0]}))
    code, out, _ = call("div", "--div", "max", "--mu1", str(p), "--mu2", str(q))
    assert code == 0 and json.loads(out) == {"value": "inf"}


def test_cut_counterexample():
    code, out, _ = call("cut", "--div", "renyi:2", "--k", "2", "--counterexample", "2,4")
    res = json.loads(out)
    assert code == 0
    assert res["gap"] == pytest.approx(0.0496955513, abs=1e-9)
    assert res["blocks"] == [["a"], ["b", "c"]]
    code2, out2, _ = call("cut", "--div", "renyi:2", "--k", "2", "--counterexample", "2,4", "--closed-form")
    assert json.loads(out2)["value"] == res["value"]


def test_gen_test():
    code, out, _ = call("gen-test", "--div", "renyi:2", "--k", "2", "--counterexample", "2,4", "--delta", "3.45")
    res = json.loads(out)
    assert res["not_k_generated"] and res["full_distinguishing"] and not res["cut_distinguishing"]
    code, out, _ = call("gen-test", "--div", "tv", "--k", "2", "--size", "4", "--trials", "10", "--seed", "3")
    assert json.loads(out)["gap_found"] is False and json.loads(out)["seed"] == 3


def test_region_boundary_csv_and_contains():
    code, out, _ = call("region", "--spec", "dp:0.67,0.05", "--boundary", "512", "--out", "csv")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "pfa,pmd" and len(lines) == 513
    code, out, _ = call("region", "--spec", "renyi:2,1.0", "--contains", "0.3,0.4")
    assert json.loads(out)["inside"] is True
    code, out, _ = call("region", "--spec", "renyi:2,1", "--inside-of", "dp:3,0.01")
    assert json.loads(out)["contained"] is False


def test_region_svg():
    code, out, _ = call("region", "--spec", "hellinger:0.1", "--boundary", "50", "--svg")
    assert code == 0
    assert out.startswith("<svg") and 'width="600"' in out and out.count("<polyline") == 2


def test_convert():
    code, out, _ = call("convert", "rdp2dp", "--alpha", "2", "--rho", "1", "--delta", "0.01", "--method", "mironov")
    assert json.loads(out)["eps"] == pytest.approx(5.60517018599, abs=1e-10)
    code, out, _ = call("convert", "rdp2dp", "--alpha", "2", "--rho", "1", "--delta", "0.01")
    assert json.loads(out)["eps"] == pytest.approx(4.21887582487, abs=1e-10)
    code, out, _ = call("convert", "hd2dp", "--eps", "1", "--rho", "0.1")
    assert json.loads(out)["delta"] == pytest.approx(0.26094687604, abs=1e-10)
    code, out, _ = call("--seed", "9", "convert", "falsify", "--div", "renyi:2", "--rho", "1",
                        "--eps", "5.6", "--delta", "0.01", "--trials", "50")
    assert json.loads(out)["ok"] is True and json.loads(out)["seed"] == 9


def test_bvn(files):
    *_, ch = files
    code, out, _ = call("bvn", "--channel", ch)
    res = json.loads(out)
    assert [t["weight"] for t in res["terms"]] == [0.5, 0.5]
    assert res["terms"][0]["rule"]["assignment"] == {"a": "x", "b": "x"}


def test_rr_cloud():
    code, out, _ = call("rr-cloud", "--bits", "3", "--flip", "0.34", "--region", "dp:0.67,0.05", "--out", "csv")
    lines = out.strip().split("\n")
    assert lines[0] == "pfa,pmd,inside" and len(lines) == 257
    assert all(line.endswith(",true") for line in lines[1:])
    code, out, _ = call("rr-cloud", "--all-pairs", "--out", "json")
    assert len(json.loads(out)) == 12 * 256


def test_check():
    code, out, _ = call("check", "--mech", "rr:3,0.34", "--claim", "zcdp:0.6633,0")
    res = json.loads(out)
    assert code == 0 and res["holds"] and res["label"] == "grid-verified"


def test_errors(files, capsys):
    a, b, _ = files
    code, _, err = call("div", "--div", "renyi:0.5", "--mu1", a, "--mu2", b)
    assert code == 1 and json.loads(err)["error"] == "domain"
    code, _, err = call("div", "--div", "kl", "--mu1", "/nonexistent.json", "--mu2", b)
    assert code == 1 and json.loads(err)["error"] == "domain"
    code, _, err = call("check", "--mech", "rr:12,0.3", "--claim", "dp:1,0")
    assert code == 1 and json.loads(err)["error"] == "capacity"
    assert call("frobnicate")[0] == 2
    assert call("div", "--nope")[0] == 2
    capsys.readouterr()


def test_emit_csv():
    assert emit_csv([]) == "pfa,pmd"
    assert emit_csv([ErrorPoint(0, 1)]) == "pfa,pmd\n0,1"
    assert emit_csv([ErrorPoint(0.1, 0.2)], [True]) == "pfa,pmd,inside\n0.1,0.2,true"
    assert emit_csv([ErrorPoint(1 / 3, 0.0)]) == "pfa,pmd\n0.333333333333,0"


def test_emit_svg_points():
    svg = emit_svg([], [ErrorPoint(0, 1), ErrorPoint(1, 0)])
    assert svg.count("<circle") == 2


def test_dist_round_trip_through_cli(tmp_path):
    code, out, _ = call("gen-test", "--div", "renyi:2", "--k", "3", "--size", "4", "--trials", "20")
    res = json.loads(out)
    mu1 = Dist.from_dict(res["mu1"])
    path = tmp_path / "m.json"
    path.write_text(json.dumps(mu1.to_dict()))
    assert Dist.from_dict(json.loads(path.read_text())) == mu1


def test_deterministic_output():
    argv = ("rr-cloud", "--all-pairs")
    assert call(*argv)[1] == call(*argv)[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "divkit.cli", "div", "--div", "tv", "--counterexample", "2,4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "value" in json.loads(proc.stdout)
