"""
Singular conjugacy diagnostics
==============================

Near the edge of a tongue the orbit lingers next to the ghost of the
periodic orbit, so the invariant measure piles up on a few cells.
These numbers are heuristics only.
"""
import sys
from fractions import Fraction
from pathlib import Path

from nonkam import _svg
from nonkam.arithmetic import NAMED_CONSTANTS
from nonkam.families import arnold
from nonkam.rotation import mode_lock_interval, solve_parameter
from nonkam.singularity import empirical_conjugacy, herman_functional, singularity_indicator

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)
golden = NAMED_CONSTANTS["golden"]

cases = {}
for sigma in (0.5, 0.99):
    lam = solve_parameter(lambda l: arnold(l, sigma), golden, (0.0, 1.0)).parameter
    cases[f"golden, sigma={sigma}"] = arnold(lam, sigma)
_, hi = mode_lock_interval(None, Fraction(1, 2), 0.9)
for gap in (1e-3, 1e-4, 1e-5):
    cases[f"1/2 edge + {gap:g}"] = arnold(hi + gap, 0.9)

series = {}
for label, g in cases.items():
    h = empirical_conjugacy(g)
    print(f"{label:20s} rho {h.rotation.value:.8f}  N(f) {herman_functional(g):.4f}  "
          f"90% mass on {singularity_indicator(h):.4f} of the circle")
    series[label] = (h.nodes, h.cdf)
_svg.lines(series, out / "cdfs.svg", loglog=False)
