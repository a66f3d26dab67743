import csv
import json
import os
import subprocess
import sys

import pytest

from krl.cli import _hoist_globals, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def lines(out):
    return [json.loads(x) for x in out.splitlines() if x.strip()]


def test_report_trefoil(capsys, tmp_path):
    out_path = tmp_path / "r.jsonl"
    code, _, _ = run(capsys, "report", "--knot", "torus:2,3", "--out", str(out_path))
    assert code == 0
    (r,) = lines(out_path.read_text())
    assert r["sigma"] == -2 and r["h"] == 1 and r["htilde"] == "t+t^-1"
    assert [d["h_slr"] for d in r["h_slr_by_interval"]] == [1, 0, 1]
    figs = r["figures"]
    assert len(figs) == 2 and all(os.path.exists(p) for p in figs)
    assert os.path.dirname(figs[0]) == str(tmp_path / "krl-figures")


def test_report_catalog_order_and_workers(capsys, tmp_path):
    from conftest import CATALOG
    code, out, _ = run(capsys, "report", "--catalog", CATALOG, "--no-figures", "--workers", "2")
    assert code == 0
    rows = lines(out)
    assert len(rows) == 50
    names = [json.loads(x).get("name") for x in open(CATALOG) if not x.startswith("#")]
    assert [r["descriptor"].get("name") for r in rows] == names
    # sorted keys
    assert list(rows[0]) == sorted(rows[0])


def test_report_lens_and_figures_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--knot", 'raw:"1-t+t^3-t^4+t^5-t^6+t^7-t^9+t^10";montesinos;sigma=8',
                       "--lens", "18", "--figures", str(tmp_path / "figs"))
    assert code == 0
    (r,) = lines(out)
    assert r["lo"]["lens"][0]["qualifying"] == [1, 3, 4, 6, 13, 15, 16, 18]
    assert r["h"] == -4
    assert sorted(os.listdir(tmp_path / "figs")) == sorted(os.path.basename(p) for p in r["figures"])


def test_report_errors(capsys):
    assert run(capsys, "report", "--knot", "raw:t^2+1")[0] == 1
    code, out, _ = run(capsys, "report", "--knot", 'raw:"t-1+t^-1"', "--no-figures")
    assert code == 2
    assert lines(out)[0]["errors"][0]["error"] == "NoSignature"
    assert run(capsys, "report")[0] == 64
    assert run(capsys, "report", "--catalog", "/nonexistent/file.jsonl")[0] == 1


def test_riley(capsys):
    code, out, _ = run(capsys, "riley", "3/1", "--heights", "--polynomial")
    assert code == 0
    (r,) = lines(out)
    assert r["polynomial"] == "t-1" and r["heights"] == {"1": 1}
    assert run(capsys, "riley", "4/1")[0] == 1
    assert run(capsys, "riley", "x/y")[0] == 1


def test_riley_479_29(capsys):
    code, out, _ = run(capsys, "riley", "479/29", "--mod2")
    assert code == 0
    (r,) = lines(out)
    assert r["degree"] == 239 and r["real_root_count"] == 55
    assert r["heights"] == {"1": 21, "3": 16, "5": 10, "7": 6, "9": 2}
    assert r["mod2"] == "t" and r["mod2_verdict"] == "pass"


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep-2bridge", "--p-max", "3")
    assert code == 0
    assert lines(out)[-1]["summary"]["knots"] == 1
    code, out, _ = run(capsys, "sweep-2bridge", "--p-max", "100", "--count-only")
    assert lines(out)[0]["representatives"] == 544
    code, out, _ = run(capsys, "sweep-2bridge", "--p-max", "500", "--count-only")
    assert lines(out)[0]["representatives"] == 12929


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "sweep-2bridge", "--p-max", "11")
    assert code == 0
    rows = list(csv.reader(out.splitlines()[:-1]))
    assert rows[0][0] == "p" and len(rows) - 1 == json.loads(out.splitlines()[-1])["summary"]["knots"]


def test_sweep_guards(capsys):
    assert run(capsys, "sweep-2bridge", "--p-max", "2")[0] == 64
    assert run(capsys, "sweep-2bridge", "--p-max", "5000")[0] == 64


def test_lo(capsys, tmp_path):
    code, out, _ = run(capsys, "lo", 'raw:"8t^6-21t^5+27t^4-27t^3+27t^2-21t+8";alternating,small;sigma=-6',
                       "--branched", "12")
    assert code == 0
    (r,) = lines(out)
    assert r["branched_threshold"] == 23 and r["branched_refined"] == list(range(4, 13))
    code, out, _ = run(capsys, "lo", "2bridge:3/1", "--plot", str(tmp_path / "t.csv"), "--lens", "5")
    (r,) = lines(out)
    assert r["two_bridge"]["either"][0]["intervals"] == [["-inf", "1"]]
    assert (tmp_path / "t.csv").exists()
    assert run(capsys, "lo", "nonsense")[0] == 1
    code, out, _ = run(capsys, "lo", "raw:1")
    assert code == 0 and "branched_threshold" not in lines(out)[0]


def test_plot(capsys, tmp_path):
    assert run(capsys, "plot", "torus:2,3")[0] == 64
    p = tmp_path / "pc.csv"
    assert run(capsys, "plot", "torus:2,3", "--out", str(p), "--lens", "18,19")[0] == 0
    layers = {r[0] for r in list(csv.reader(open(p)))[1:]}
    assert {"lens_18", "lens_19", "dk_points"} <= layers


def test_verify_geom(capsys):
    code, out, _ = run(capsys, "verify-geom", "--samples", "50", "--seed", "3")
    assert code == 0
    rows = lines(out)
    assert all(r["pass"] for r in rows) and len(rows) == 9
    code, out, _ = run(capsys, "--format", "table", "verify-geom", "--samples", "20")
    assert code == 0 and out.splitlines()[0].startswith("identity")


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 64
    assert run(capsys)[0] == 64


def test_hoist_globals():
    assert _hoist_globals(["riley", "3/1", "--precision-bits", "512"]) == \
        ["--precision-bits", "512", "riley", "3/1"]
    assert _hoist_globals(["verify-geom", "--seed=4"]) == ["--seed=4", "verify-geom"]


def test_entry_point():
    r = subprocess.run([sys.executable, "-m", "krl.cli", "riley", "5/1", "--heights"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["heights"] == {"1": 1, "3": 1}
