"""Config-driven pipeline: conditions, simulation per k, diagnostics, ledgers.

Output directory layout (all CSV: header row, comma separated, floats with 17
significant digits):

    degeneracy.csv        k, gamma0, epsilon0, kappa, bilipschitz_ratio, window_constant, P_ok, H1_violations
    checks.csv            check, k, value, threshold, passed
    timeseries_k<k>.csv   t, velocity_energy, stream_energy, wall_deviation, I, dIdt, violation_flag
    fits.csv              k, quantity, exponent, predicted, residual, t_lo, t_hi
    summary.txt           plain-text verdicts
    decay_k<k>.svg        log-log energies with reference slopes (plots = true)
    manifest.json         written last; lists every file above with its sha256
"""

import csv
import hashlib
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import load_config
from .degeneracy import build_partition, degeneracy_report, check_P
from .diagnostics import (TimeSeries, fit_decay, default_window, random_h10_fields,
                          weighted_velocity_energy, weighted_streamfunction_energy)
from .dynamics import Mode, ModeState, SimConfig, integrate, stable_dt, boundary_trace
from .elliptic import EllipticOp, weighted_coercivity_check
from .grid import Grid
from .multipliers import build_bases, MultiplierWeights, lyapunov_audit
from .profiles import make_shear_profile, make_circular_profile, to_log_polar, truncate_domain
from . import svg

TS_COLUMNS = ("t", "velocity_energy", "stream_energy", "wall_deviation", "I", "dIdt", "violation_flag")
FIT_COLUMNS = ("k", "quantity", "exponent", "predicted", "residual", "t_lo", "t_hi")
CHECK_COLUMNS = ("check", "k", "value", "threshold", "passed")
DEG_COLUMNS = ("k", "gamma0", "epsilon0", "kappa", "bilipschitz_ratio", "window_constant", "P_ok", "H1_violations")
PREDICTED = {"velocity_energy": -2.0, "stream_energy": -4.0}
COERCIVITY_SAMPLES = 100


class PipelineError(RuntimeError):
    pass


def build_profile(cfg):
    if cfg.kind == "shear":
        return make_shear_profile(cfg.name, cfg.params, cfg.domain)
    cp = make_circular_profile(cfg.name, cfg.params, cfg.domain)
    p = to_log_polar(cp, star=cfg.star)
    if cfg.truncation is not None:
        p = truncate_domain(p, np.log(cfg.truncation[0]), np.log(cfg.truncation[1]))
    if not (np.isfinite(p.domain.lo) and np.isfinite(p.domain.hi)):
        raise PipelineError("the log-polar domain is unbounded; set [profile] truncation = r1, r2")
    return p


def initial_data(kind, grid, rng=None):
    x = (grid.y - grid.lo) / (grid.hi - grid.lo)
    if kind == "smooth":
        return (1.0 + 0.5 * np.sin(np.pi * x) + 0.2 * np.cos(3 * np.pi * x)).astype(complex)
    if kind == "h1":
        return (1.0 + np.maximum(0.0, 0.5 - np.abs(x - 0.5))).astype(complex)
    if kind == "h2":
        return (np.cos(x) * (1 + x / 2)).astype(complex)
    if kind == "random":
        m = np.arange(1, 17)
        c = (rng.normal(size=m.size) + 1j * rng.normal(size=m.size)) / m**2
        return c @ np.cos(np.pi * np.outer(m - 1, x))
    raise ValueError(f"unknown initial data {kind!r}")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _setup(cfg):
    p = build_profile(cfg)
    grid = Grid(p.domain.lo, p.domain.hi, cfg.N)
    part = build_partition(p, grid, cfg.overlap_fraction)
    rep = degeneracy_report(p, list(cfg.k_list), grid, part, cfg.overlap_fraction)
    return p, grid, part, rep


def condition_checks(cfg, p, grid, part, rep):
    """Seeded coercivity sweep per k (a hard check) and (P) verdicts (reported only)."""
    checks = []
    rng = np.random.default_rng(cfg.seed)
    for k in cfg.k_list:
        if cfg.diagnostics["coercivity"]:
            op = EllipticOp("LaplaceK", k, p, grid)
            worst = min(weighted_coercivity_check(op, g) for g in random_h10_fields(grid, COERCIVITY_SAMPLES, rng))
            thr = rep.gamma0[k] - 1e-6
            checks.append({"check": "coercivity_ratio_min", "k": k, "value": worst, "threshold": thr,
                           "passed": worst >= thr, "hard": True})
        pc = check_P(rep, part, k)
        checks.append({"check": "condition_P", "k": k, "value": pc.lhs2, "threshold": pc.rhs2,
                       "passed": bool(pc), "hard": False})
    return checks


def run_k(cfg, p, grid, part, rep, k):
    """Simulate one wavenumber and evaluate its diagnostics."""
    T = cfg.t_end - cfg.t0
    dt = cfg.dt if cfg.dt is not None else stable_dt(k, p, grid, 0.05, T)
    every = max(1, int(round(cfg.output_every / dt)))
    sim = SimConfig(dt=dt, t_end=cfg.t_end, output_every=every)
    mode = Mode(p, grid, k)
    rng = np.random.default_rng([cfg.seed, abs(k)])
    F0 = initial_data(cfg.initial, grid, rng)
    try:
        traj = integrate(ModeState(k, cfg.t0, F0, grid), sim, mode)
    except (ValueError, FloatingPointError) as e:
        raise PipelineError(f"k={k}: {e}") from e

    d = cfg.diagnostics
    t = np.array([s.t for s in traj])
    rows = [{"t": ti} for ti in t]
    checks, fits = [], []
    walled = any(mode.walls)
    if d["energy"] or d["fits"]:
        ve = np.array([weighted_velocity_energy(s, p, mode) for s in traj])
        se = np.array([weighted_streamfunction_energy(s, p, mode) for s in traj])
        for r, a, b in zip(rows, ve, se):
            r["velocity_energy"], r["stream_energy"] = a, b
    if d["boundary"] and walled:
        tr = boundary_trace(traj)
        dev = np.maximum(np.abs(tr.left - tr.left[0]) * mode.walls[0], np.abs(tr.right - tr.right[0]) * mode.walls[1])
        for r, v in zip(rows, dev):
            r["wall_deviation"] = v
        checks.append({"check": "wall_preservation", "k": k, "value": float(dev.max()), "threshold": 1e-8,
                       "passed": float(dev.max()) <= 1e-8, "hard": True})
    if p.origin == "circular" and cfg.name in ("taylor_couette", "point_vortex"):
        bmax = float(np.max(np.abs(mode.B)))
        umax = float(np.max(np.abs(mode.U)))
        drift = float(grid.norm(traj[-1].F - traj[0].F))
        checks.append({"check": "B_vanishes", "k": k, "value": bmax, "threshold": 1e-12 * umax,
                       "passed": bmax <= 1e-12 * umax, "hard": True})
        checks.append({"check": "F_frozen", "k": k, "value": drift, "threshold": 1e-12,
                       "passed": drift <= 1e-12, "hard": True})
    if d["lyapunov"] and cfg.multiplier != "none":
        bases = build_bases(part, p)
        W = MultiplierWeights(cfg.multiplier, bases, k, cfg.delta, t=cfg.t0)
        led = lyapunov_audit(traj, W, part, p, mode, bases)
        for r, row in zip(rows, led.rows()):
            r.update({"I": row["I"], "dIdt": row["dIdt"], "violation_flag": row["violation_flag"]})
        hard = bool(rep.P_ok.get(k, False))
        checks.append({"check": "lyapunov_violations", "k": k, "value": led.violations, "threshold": 0,
                       "passed": led.violations == 0, "hard": hard})
        checks.append({"check": "lyapunov_energy_integral", "k": k, "value": led.energy_integral,
                       "threshold": float(led.I[0]), "passed": led.energy_integral <= led.I[0], "hard": hard})
    if d["fits"]:
        lo, hi = default_window(k, p, grid, cfg.t_end)
        lo = max(lo, cfg.t0 + 1e-9)
        for q in ("velocity_energy", "stream_energy"):
            v = np.array([r[q] for r in rows])
            m = (t >= lo) & (t <= hi) & (v > 0)
            if m.sum() < 3:
                continue
            f = fit_decay(TimeSeries(t[m], v[m], q))
            fits.append({"k": k, "quantity": q, "exponent": f.exponent, "predicted": PREDICTED[q],
                         "residual": f.residual, "t_lo": f.window[0], "t_hi": f.window[1]})
    return {"k": k, "dt": dt, "rows": rows, "checks": checks, "fits": fits}


def _summary(cfg, p, rep, checks, fits, mode):
    L = [f"mode: {mode}", f"profile: {p.label}", f"domain: ({p.domain.lo:.17g}, {p.domain.hi:.17g})",
         f"N = {cfg.N}", "", "conditions:", rep.text().rstrip(), ""]
    if not cfg.any_diagnostics:
        L.append("no diagnostics enabled")
    L.append("checks:")
    for c in checks:
        tag = "PASS" if c["passed"] else ("FAIL" if c["hard"] else "false")
        L.append(f"  [{tag}] {c['check']} k={c['k']}: {_fmt(c['value'])} vs {_fmt(c['threshold'])}")
    if fits:
        L.append("decay fits (exponent vs predicted):")
        for f in fits:
            L.append(f"  k={f['k']} {f['quantity']}: {f['exponent']:.4f} vs {f['predicted']:g} "
                     f"(residual {f['residual']:.3g}, window [{f['t_lo']:g}, {f['t_hi']:g}])")
    return "\n".join(L) + "\n"


def _finish(cfg, out, files, rep, checks, started, mode):
    manifest = {
        "mode": mode,
        "config": cfg.echo(),
        "version": __version__,
        "degeneracy": {"label": rep.label, "epsilon0": rep.epsilon0, "kappa": rep.kappa,
                       "bilipschitz_ratio": rep.bilipschitz_ratio, "window_constant": rep.window_constant,
                       "gamma0": {str(k): v for k, v in rep.gamma0.items()},
                       "P_ok": {str(k): v for k, v in rep.P_ok.items()}},
        "failed": [f"{c['check']} k={c['k']}" for c in checks if c["hard"] and not c["passed"]],
        "wall_clock_s": time.perf_counter() - started,
        "files": {f: _sha256(os.path.join(out, f)) for f in files},
    }
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def check(cfg, out=None, jobs=1):
    """Conditions only: degeneracy report, (P) verdicts, seeded coercivity sweep."""
    started = time.perf_counter()
    out = out or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    p, grid, part, rep = _setup(cfg)
    checks = condition_checks(cfg, p, grid, part, rep)
    write_csv(os.path.join(out, "degeneracy.csv"), DEG_COLUMNS, rep.rows())
    write_csv(os.path.join(out, "checks.csv"), CHECK_COLUMNS, checks)
    with open(os.path.join(out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(_summary(cfg, p, rep, checks, [], "check"))
    return _finish(cfg, out, ["degeneracy.csv", "checks.csv", "summary.txt"], rep, checks, started, "check")


def run(cfg, out=None, jobs=1):
    """Full pipeline; per-k simulations run on a thread pool, ledgers are written in k order."""
    started = time.perf_counter()
    out = out or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    p, grid, part, rep = _setup(cfg)
    checks = condition_checks(cfg, p, grid, part, rep)
    with ThreadPoolExecutor(max_workers=max(1, int(jobs))) as ex:
        results = list(ex.map(lambda k: run_k(cfg, p, grid, part, rep, k), cfg.k_list))
    files = ["degeneracy.csv", "checks.csv"]
    fits = []
    for r in results:
        checks.extend(r["checks"])
        fits.extend(r["fits"])
        name = f"timeseries_k{r['k']}.csv"
        write_csv(os.path.join(out, name), TS_COLUMNS, r["rows"])
        files.append(name)
    write_csv(os.path.join(out, "degeneracy.csv"), DEG_COLUMNS, rep.rows())
    write_csv(os.path.join(out, "checks.csv"), CHECK_COLUMNS, checks)
    if cfg.diagnostics["fits"]:
        write_csv(os.path.join(out, "fits.csv"), FIT_COLUMNS, fits)
        files.append("fits.csv")
    if cfg.diagnostics["plots"]:
        for r in results:
            name = f"decay_k{r['k']}.svg"
            if _plot_series(os.path.join(out, name), r["rows"], r["k"]):
                files.append(name)
    with open(os.path.join(out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(_summary(cfg, p, rep, checks, fits, "run"))
    files.append("summary.txt")
    return _finish(cfg, out, files, rep, checks, started, "run")


def _plot_series(path, rows, k):
    series = []
    for q in ("velocity_energy", "stream_energy"):
        vals = [(float(r["t"]), float(r[q])) for r in rows if r.get(q, "") not in ("", None)]
        if vals:
            series.append(([a for a, _ in vals], [b for _, b in vals], q))
    if not series or not any(a > 0 and b > 0 for x, y, _ in series for a, b in zip(x, y)):
        return False
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg.loglog(series, title=f"k = {k}", ylabel="energy", ref_slope=-2.0))
    return True


def render(manifest_path, out=None):
    """Report files from a finished run: report.txt, a per-k table, and log-log plots."""
    if os.path.isdir(manifest_path):
        manifest_path = os.path.join(manifest_path, "manifest.json")
    if not os.path.exists(manifest_path):
        raise FileNotFoundError(f"no manifest at {manifest_path}")
    src = os.path.dirname(os.path.abspath(manifest_path))
    with open(manifest_path, encoding="utf-8") as fh:
        man = json.load(fh)
    missing = [f for f in man["files"] if not os.path.exists(os.path.join(src, f))]
    if missing:
        raise FileNotFoundError("missing ledger files: " + ", ".join(missing))
    changed = [f for f, h in man["files"].items() if _sha256(os.path.join(src, f)) != h]
    out = out or src
    os.makedirs(out, exist_ok=True)

    deg = {int(r["k"]): r for r in read_csv(os.path.join(src, "degeneracy.csv"))}
    fits = read_csv(os.path.join(src, "fits.csv")) if "fits.csv" in man["files"] else []
    diags = man["config"].get("diagnostics", {})
    lines = [f"profile: {man['degeneracy']['label']}  (version {man['version']}, mode {man['mode']})", ""]
    if changed:
        lines += ["WARNING: files changed since the manifest was written: " + ", ".join(changed), ""]
    if not any(diags.values()):
        lines += ["no diagnostics enabled", ""]
    hdr = ("k", "gamma0", "epsilon0", "kappa", "P", "exponent", "predicted", "residual")
    lines.append("  ".join(f"{h:>12}" for h in hdr))
    for k, r in sorted(deg.items()):
        kf = [f for f in fits if int(f["k"]) == k and f["quantity"] == "velocity_energy"] or [None]
        f = kf[0]
        cells = [str(k), f"{float(r['gamma0']):.6g}", f"{float(r['epsilon0']):.6g}", f"{float(r['kappa']):.6g}",
                 "true" if r["P_ok"] == "1" else "false",
                 f"{float(f['exponent']):.4f}" if f else "-", f"{float(f['predicted']):g}" if f else "-",
                 f"{float(f['residual']):.3g}" if f else "-"]
        lines.append("  ".join(f"{c:>12}" for c in cells))
    for f in fits:
        if f["quantity"] != "velocity_energy":
            lines.append(f"k={f['k']} {f['quantity']}: exponent {float(f['exponent']):.4f} "
                         f"vs predicted {float(f['predicted']):g}")
    if man["failed"]:
        lines += ["", "failed checks: " + ", ".join(man["failed"])]
    written = ["report.txt"]
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    for f in sorted(man["files"]):
        if f.startswith("timeseries_k"):
            k = int(f[len("timeseries_k"):-4])
            name = f"loglog_k{k}.svg"
            if _plot_series(os.path.join(out, name), read_csv(os.path.join(src, f)), k):
                written.append(name)
    return written


def run_path(verb, config_path, out=None, jobs=1, seed=None):
    cfg = load_config(config_path)
    if seed is not None:
        cfg.seed = int(seed)
    return (check if verb == "check" else run)(cfg, out, jobs)
