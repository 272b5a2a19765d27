"""Command line: check | run | render."""

import argparse
import sys

from .config import ConfigError
from . import runner


def main(argv=None):
    ap = argparse.ArgumentParser(prog="inviscid-damping", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb, text in (("check", "conditions only"), ("run", "full pipeline")):
        sp = sub.add_parser(verb, help=text)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None, help="output directory (default: [output] dir)")
        sp.add_argument("--jobs", type=int, default=1, help="concurrent wavenumbers")
        sp.add_argument("--seed", type=int, default=None, help="overrides [output] seed")
    sp = sub.add_parser("render", help="reports from a manifest")
    sp.add_argument("--config", default=None, help="manifest.json or the run directory")
    sp.add_argument("--out", default=None)
    sp.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; unused")
    sp.add_argument("--seed", type=int, default=None, help="accepted for symmetry; unused")
    sp.add_argument("manifest", nargs="?", default=None)
    a = ap.parse_args(argv)

    if a.verb == "render":
        src = a.manifest or a.config
        if src is None:
            ap.error("render needs a manifest path")
        try:
            files = runner.render(src, a.out)
        except (FileNotFoundError, KeyError, ValueError) as e:
            print(f"render: {e}", file=sys.stderr)
            return 2
        print("\n".join(files))
        return 0

    if a.seed is not None and not 0 <= a.seed < 2**64:
        ap.error("--seed must lie in [0, 2^64)")
    try:
        man = runner.run_path(a.verb, a.config, a.out, a.jobs, a.seed)
    except ConfigError as e:
        print("config errors:\n" + str(e), file=sys.stderr)
        return 2
    except (OSError, runner.PipelineError, ValueError) as e:
        print(f"{a.verb}: {e}", file=sys.stderr)
        return 2
    with open(f"{a.out or runner.load_config(a.config).out_dir}/summary.txt", encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    if man["failed"]:
        print("FAILED: " + ", ".join(man["failed"]), file=sys.stderr)
        return 1
    return 0
