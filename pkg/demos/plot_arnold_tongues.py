"""
Arnold tongues and the devil's staircase
========================================

The rotation number of ``x + lam + sigma/(2 pi) sin(2 pi x)`` is locked
on whole intervals of ``lam`` at every rational value.
"""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from nonkam import _svg
from nonkam.families import arnold
from nonkam.rotation import devil_staircase, mode_lock_interval

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

# A staircase at sigma = 0.9: flat steps at 0, 1/2, 1/3, ...
lams = np.linspace(0.0, 1.0, 801)
stair = devil_staircase(lambda lam: arnold(lam, 0.9), lams, N=5000)
_svg.lines({"sigma=0.9": (lams, stair)}, out / "staircase.svg", loglog=False)

# Tongue widths grow with sigma; the 0-tongue is exactly sigma/pi wide
for r in (Fraction(0), Fraction(1, 2), Fraction(1, 3)):
    widths = []
    for sigma in (0.25, 0.5, 0.75, 0.95):
        lo, hi = mode_lock_interval(None, r, sigma)
        widths.append(hi - lo)
    print(f"rho = {r}: widths", " ".join(f"{w:.6f}" for w in widths))
lo, hi = mode_lock_interval(None, 0, 0.5)
print(f"0-tongue width at sigma = 0.5: {hi - lo:.9f}, sigma/pi = {0.5 / np.pi:.9f}")
