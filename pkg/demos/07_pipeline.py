"""The experiment pipeline: config text in, ledgers and a report out.

Equivalent to `python -m inviscid_damping run --config sweep.ini --out <dir>`
followed by `render`.
"""

import tempfile

from inviscid_damping import runner
from inviscid_damping.config import parse_config

cfg = parse_config("""
[profile]
name = exponential
params = 0.5, 0.01
domain = 0, 1
[run]
k_list = 1, 2
N = 256
t_end = 60
initial = h2
""")
out = tempfile.mkdtemp()
manifest = runner.run(cfg, out, jobs=2)
runner.render(out, out)
print(open(f"{out}/report.txt").read())
