"""Experiment configuration: sectioned `key = value` text.

    [profile]
    kind = shear            # shear | circular
    name = exponential
    params = 0.5, 0.001
    domain = 0, 2.7725887
    truncation = 1, 2       # circular only: (r1, r2) cut in the radial variable
    star = false            # circular only: use the star-shifted variables

    [run]
    k_list = 1, 2, 4
    N = 512
    dt = auto               # or a number; auto picks the largest step <= 0.05 with dt k max|U'| <= 1/2
    t0 = 0
    t_end = 100
    output_every = 0.5      # time between stored samples
    overlap_fraction = 0.5
    delta = 0.1
    multiplier = L2         # L2 | H1 | none
    initial = smooth        # smooth | h1 | h2 | random

    [diagnostics]
    energy = true
    fits = true
    lyapunov = true
    boundary = true
    coercivity = true
    plots = true

    [output]
    dir = out
    seed = 0

Every problem found is reported at once, each with its line number.
"""

import configparser
import math
import re
from dataclasses import dataclass, field, asdict

from .profiles import SHEAR_NAMES, CIRCULAR_NAMES


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


DEFAULTS = {
    "profile": {"kind": "shear", "name": None, "params": "", "domain": None, "truncation": "", "star": "false"},
    "run": {"k_list": "1", "N": "512", "dt": "auto", "t0": "0", "t_end": "100", "output_every": "0.5",
            "overlap_fraction": "0.5", "delta": "0.1", "multiplier": "L2", "initial": "smooth"},
    "diagnostics": {"energy": "true", "fits": "true", "lyapunov": "true", "boundary": "true",
                    "coercivity": "true", "plots": "true"},
    "output": {"dir": "out", "seed": "0"},
}
DIAGNOSTICS = tuple(DEFAULTS["diagnostics"])
MULTIPLIERS = ("L2", "H1", "none")
INITIAL = ("smooth", "h1", "h2", "random")


@dataclass
class ExperimentConfig:
    kind: str
    name: str
    params: tuple
    domain: tuple
    truncation: tuple = None
    star: bool = False
    k_list: tuple = (1,)
    N: int = 512
    dt: float = None          # None = automatic
    t0: float = 0.0
    t_end: float = 100.0
    output_every: float = 0.5
    overlap_fraction: float = 0.5
    delta: float = 0.1
    multiplier: str = "L2"
    initial: str = "smooth"
    diagnostics: dict = field(default_factory=lambda: {d: True for d in DIAGNOSTICS})
    out_dir: str = "out"
    seed: int = 0

    def echo(self):
        d = asdict(self)
        d["params"] = list(self.params)
        d["domain"] = list(self.domain)
        d["k_list"] = list(self.k_list)
        d["truncation"] = None if self.truncation is None else list(self.truncation)
        return d

    @property
    def any_diagnostics(self):
        return any(self.diagnostics.values())


def _line_numbers(text):
    """(section, key) -> line and section -> line, for error messages."""
    where, sec_line, sec = {}, {}, None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            sec = m.group(1).strip()
            sec_line.setdefault(sec, i)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and sec is not None:
            where.setdefault((sec, m.group(1).strip().lower()), i)
    return where, sec_line


def _floats(s):
    return tuple(float(x) for x in s.replace("[", "").replace("]", "").split(",") if x.strip())


def parse_config(text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError([f"line {getattr(e, 'lineno', '?')}: {e.message.splitlines()[0]}"]) from None
    lines, sec_lines = _line_numbers(text)
    errors = []

    def err(sec, key, msg):
        ln = lines.get((sec, key.lower())) if key else sec_lines.get(sec)
        errors.append(f"line {ln if ln else '?'}: [{sec}] {key + ': ' if key else ''}{msg}")

    for sec in cp.sections():
        if sec not in DEFAULTS:
            err(sec, None, f"unknown section [{sec}]")
            continue
        known = {k.lower() for k in DEFAULTS[sec]}
        for key in cp[sec]:
            if key not in known:
                err(sec, key, "unknown key")

    def get(sec, key):
        if cp.has_section(sec) and cp.has_option(sec, key):
            return cp.get(sec, key).strip()
        return DEFAULTS[sec][key]

    def conv(sec, key, fn, what):
        raw = get(sec, key)
        try:
            return fn(raw)
        except (TypeError, ValueError):
            err(sec, key, f"expected {what}, got {raw!r}")
            return None

    def boolean(s):
        t = s.lower()
        if t in ("true", "yes", "on", "1"):
            return True
        if t in ("false", "no", "off", "0"):
            return False
        raise ValueError(s)

    def integer(s):
        v = float(s)
        if not v.is_integer():
            raise ValueError(s)
        return int(v)

    def finite(s):
        v = float(s)
        if not math.isfinite(v):
            raise ValueError(s)
        return v

    kind = get("profile", "kind").lower()
    name = get("profile", "name")
    if kind not in ("shear", "circular"):
        err("profile", "kind", f"expected shear or circular, got {kind!r}")
    if name is None:
        err("profile", None, "missing key 'name'")
    elif kind == "shear" and name not in SHEAR_NAMES:
        err("profile", "name", f"unknown shear profile {name!r} (known: {', '.join(SHEAR_NAMES)})")
    elif kind == "circular" and name not in CIRCULAR_NAMES:
        err("profile", "name", f"unknown circular profile {name!r} (known: {', '.join(CIRCULAR_NAMES)})")
    params = conv("profile", "params", _floats, "a comma-separated list of numbers")
    domain = None
    if get("profile", "domain") is None:
        err("profile", None, "missing key 'domain'")
    else:
        domain = conv("profile", "domain", _floats, "two numbers lo, hi")
        if domain is not None and (len(domain) != 2 or not domain[0] < domain[1]):
            err("profile", "domain", "expected two numbers lo < hi")
            domain = None
    trunc = conv("profile", "truncation", _floats, "two numbers r1, r2") or None
    if trunc is not None and (len(trunc) != 2 or not 0 < trunc[0] < trunc[1]):
        err("profile", "truncation", "expected two numbers 0 < r1 < r2")
    if trunc is not None and kind != "circular":
        err("profile", "truncation", "truncation applies to circular profiles only")
    star = conv("profile", "star", boolean, "true or false")

    ks = conv("run", "k_list", lambda s: tuple(integer(x) for x in _floats(s)), "a list of integers")
    if ks is not None:
        if not ks:
            err("run", "k_list", "empty wavenumber list")
        if any(k == 0 for k in ks):
            err("run", "k_list", "k must be nonzero (the k = 0 mode is conserved)")
    N = conv("run", "N", integer, "an integer")
    if N is not None and N < 128:
        err("run", "N", f"N must be >= 128, got {N}")
    dt_raw = get("run", "dt")
    dt = None if dt_raw.lower() == "auto" else conv("run", "dt", finite, "a number or 'auto'")
    if dt is not None and dt <= 0:
        err("run", "dt", "dt must be positive")
    t0 = conv("run", "t0", finite, "a number")
    t_end = conv("run", "t_end", finite, "a number")
    if t0 is not None and t0 < 0:
        err("run", "t0", "t0 must be >= 0")
    if t0 is not None and t_end is not None and not t_end > t0:
        err("run", "t_end", f"t_end must exceed t0 (t_end = {t_end:g}, t0 = {t0:g})")
    every = conv("run", "output_every", finite, "a number")
    if every is not None and every <= 0:
        err("run", "output_every", "output_every must be positive")
    ov = conv("run", "overlap_fraction", finite, "a number")
    if ov is not None and not 0 < ov < 1:
        err("run", "overlap_fraction", "overlap_fraction must lie in (0, 1)")
    delta = conv("run", "delta", finite, "a number")
    if delta is not None and not 0 < delta < 1:
        err("run", "delta", "delta must lie in (0, 1)")
    mult = get("run", "multiplier")
    if mult not in MULTIPLIERS:
        err("run", "multiplier", f"expected one of {', '.join(MULTIPLIERS)}, got {mult!r}")
    init = get("run", "initial").lower()
    if init not in INITIAL:
        err("run", "initial", f"expected one of {', '.join(INITIAL)}, got {init!r}")

    diags = {d: conv("diagnostics", d, boolean, "true or false") for d in DIAGNOSTICS}
    out_dir = get("output", "dir")
    seed = conv("output", "seed", integer, "an integer")
    if seed is not None and not 0 <= seed < 2**64:
        err("output", "seed", "seed must lie in [0, 2^64)")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(kind, name, params, domain, trunc, star, ks, N, dt, t0, t_end, every, ov, delta,
                            mult, init, diags, out_dir, seed)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
