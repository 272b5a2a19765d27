import json
import os
import time

import numpy as np
import pytest

from inviscid_damping import runner, svg
from inviscid_damping.cli import main
from inviscid_damping.config import parse_config, ConfigError

COUETTE = """
[profile]
name = couette
domain = 0, 1
"""


def _write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_defaults_filled():
    c = parse_config(COUETTE)
    assert (c.N, c.delta, c.overlap_fraction) == (512, 0.1, 0.5)
    assert c.k_list == (1,) and c.multiplier == "L2" and c.dt is None
    assert c.any_diagnostics


def test_k_zero_error():
    with pytest.raises(ConfigError) as e:
        parse_config(COUETTE + "[run]\nk_list = [0]\n")
    assert "k must be nonzero" in str(e.value)
    assert "line 6" in e.value.errors[0]


def test_t_end_before_t0():
    with pytest.raises(ConfigError, match="t_end must exceed t0"):
        parse_config(COUETTE + "[run]\nt0 = 10\nt_end = 5\n")


def test_all_errors_reported_with_lines():
    text = COUETTE + "colour = red\n[run]\nN = 64\ndelta = lots\nmultiplier = Hs\n[extras]\nx = 1\n"
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    errs = e.value.errors
    assert len(errs) == 5
    joined = "\n".join(errs)
    for frag in ("line 5: [profile] colour: unknown key", "line 7: [run] N: N must be >= 128",
                 "line 8: [run] delta: expected a number", "line 9: [run] multiplier",
                 "line 10: [extras]"):
        assert frag in joined


def test_missing_required_keys():
    with pytest.raises(ConfigError) as e:
        parse_config("[profile]\nkind = circular\n")
    assert any("name" in x for x in e.value.errors) and any("domain" in x for x in e.value.errors)


def test_couette_smoke_run(tmp_path):
    cfg = _write(tmp_path, COUETTE + "[run]\nN = 256\nt_end = 50\n")
    out = str(tmp_path / "out")
    t0 = time.perf_counter()
    assert main(["run", "--config", cfg, "--out", out]) == 0
    assert time.perf_counter() - t0 < 60
    checks = runner.read_csv(os.path.join(out, "checks.csv"))
    lyap = [c for c in checks if c["check"] == "lyapunov_violations"]
    assert lyap and all(c["value"] == "0" for c in lyap)
    man = json.load(open(os.path.join(out, "manifest.json")))
    assert man["failed"] == []
    for f, h in man["files"].items():
        assert runner._sha256(os.path.join(out, f)) == h
    # the manifest is the newest file
    newest = max(os.listdir(out), key=lambda f: os.stat(os.path.join(out, f)).st_mtime_ns)
    assert newest == "manifest.json"


def test_taylor_couette_run(tmp_path):
    cfg = _write(tmp_path, "[profile]\nkind = circular\nname = taylor_couette\nparams = 0.5, 1\ndomain = 1, 2\n"
                           "[run]\nk_list = 1, 2\nN = 128\nt_end = 100\nmultiplier = none\n")
    out = str(tmp_path / "tc")
    assert main(["run", "--config", cfg, "--out", out]) == 0
    checks = runner.read_csv(os.path.join(out, "checks.csv"))
    names = {(c["check"], c["k"]): c["passed"] for c in checks}
    for k in ("1", "2"):
        assert names[("B_vanishes", k)] == "1" and names[("F_frozen", k)] == "1"


def test_unbounded_circular_domain_needs_truncation(tmp_path):
    cfg = _write(tmp_path, "[profile]\nkind = circular\nname = power_law\nparams = 0.5, 1\ndomain = 0, 2\n")
    assert main(["check", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_sweep_and_render(tmp_path):
    cfg = _write(tmp_path, "[profile]\nname = exponential\nparams = 0.5, 0.01\ndomain = 0, 1\n"
                           "[run]\nk_list = 1, 2, 4, 8\nN = 128\nt_end = 60\nmultiplier = none\n"
                           "[diagnostics]\nlyapunov = false\ncoercivity = false\n")
    out = str(tmp_path / "sweep")
    assert main(["run", "--config", cfg, "--out", out, "--jobs", "2"]) == 0
    for k in (1, 2, 4, 8):
        assert os.path.exists(os.path.join(out, f"timeseries_k{k}.csv"))
    fits = runner.read_csv(os.path.join(out, "fits.csv"))
    assert {int(f["k"]) for f in fits} == {1, 2, 4, 8}
    assert main(["render", os.path.join(out, "manifest.json")]) == 0
    report = open(os.path.join(out, "report.txt")).read()
    for k in (1, 2, 4, 8):
        assert any(line.split()[:1] == [str(k)] for line in report.splitlines())
    assert "gamma0" in report and "exponent" in report
    assert os.path.exists(os.path.join(out, "loglog_k1.svg"))


def test_render_missing_ledger(tmp_path):
    cfg = _write(tmp_path, COUETTE + "[run]\nN = 128\nt_end = 20\n")
    out = str(tmp_path / "o")
    assert main(["run", "--config", cfg, "--out", out]) == 0
    os.remove(os.path.join(out, "timeseries_k1.csv"))
    assert main(["render", out]) == 2
    with pytest.raises(FileNotFoundError, match="timeseries_k1.csv"):
        runner.render(out)


def test_render_without_diagnostics(tmp_path):
    cfg = _write(tmp_path, COUETTE + "[run]\nN = 128\nt_end = 20\n[diagnostics]\nenergy = false\nfits = false\n"
                                     "lyapunov = false\nboundary = false\ncoercivity = false\nplots = false\n")
    out = str(tmp_path / "o")
    assert main(["run", "--config", cfg, "--out", out]) == 0
    runner.render(out)
    assert "no diagnostics enabled" in open(os.path.join(out, "report.txt")).read()


def test_svg_reference_slope():
    t = np.linspace(1, 100, 50)
    doc = svg.loglog([(t, 5 * t**-2.0, "synthetic")], ref_slope=-2.0)
    assert doc.startswith("<svg") and "reference slope -2" in doc and "stroke-dasharray" in doc
    # the reference line runs parallel to the series in log-log coordinates
    import re
    x1, y1, x2, y2 = map(float, re.search(r'<line x1="([\d.]+)" y1="([\d.]+)" x2="([\d.]+)" y2="([\d.]+)" '
                                          r'stroke="black"', doc).groups())
    pts = re.search(r'points="([^"]+)"', doc).group(1).split()
    (a, b), (c, d) = (tuple(map(float, pts[0].split(","))), tuple(map(float, pts[-1].split(","))))
    assert (y2 - y1) / (x2 - x1) == pytest.approx((d - b) / (c - a), rel=1e-3)


def test_bit_identical_reruns(tmp_path):
    text = ("[profile]\nname = exponential\nparams = 0.5, 0.05\ndomain = 0, 1.5\n"
            "[run]\nk_list = 1, 3\nN = 128\nt_end = 30\ninitial = random\n")
    cfg = _write(tmp_path, text)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", "--config", cfg, "--out", a, "--seed", "42", "--jobs", "2"]) == 0
    assert main(["run", "--config", cfg, "--out", b, "--seed", "42"]) == 0
    for f in sorted(os.listdir(a)):
        if f.endswith(".csv"):
            assert open(os.path.join(a, f), "rb").read() == open(os.path.join(b, f), "rb").read(), f
    c = str(tmp_path / "c")
    assert main(["run", "--config", cfg, "--out", c, "--seed", "43"]) == 0
    assert open(os.path.join(a, "timeseries_k1.csv")).read() != open(os.path.join(c, "timeseries_k1.csv")).read()


def test_check_verb(tmp_path):
    cfg = _write(tmp_path, "[profile]\nname = exponential\nparams = 1, 0.01\ndomain = 0, 1.3862943611198906\n"
                           "[run]\nk_list = 1, 2\nN = 256\n")
    out = str(tmp_path / "chk")
    assert main(["check", "--config", cfg, "--out", out]) == 0
    rows = runner.read_csv(os.path.join(out, "degeneracy.csv"))
    assert [float(r["gamma0"]) for r in rows] == pytest.approx([0.5, 0.875])
    man = json.load(open(os.path.join(out, "manifest.json")))
    assert set(man["files"]) == {"degeneracy.csv", "checks.csv", "summary.txt"}
