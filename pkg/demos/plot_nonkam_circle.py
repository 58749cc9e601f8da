"""
A non-KAM invariant circle
==========================

The twist map ``(x, y) -> (x + beta + y + phi(x), y + phi(x))`` keeps an
invariant graph although ``phi`` is large in ``C^iota``. Its lower norms
decay with the frequency ``n`` while the top derivative grows.
"""
import sys
from pathlib import Path

from nonkam import _svg
from nonkam.arithmetic import NAMED_CONSTANTS
from nonkam.construct import build_nonkam
from nonkam.families import nonkam_g
from nonkam.herman import phi_from_g
from nonkam.norms import asymptotic_slope, cr_norm, sup_norm_derivative

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)
golden = NAMED_CONSTANTS["golden"]

# With a generous delta the search stops at a small frequency
cert = build_nonkam(golden, iota=2, epsilon=0.25, nu=0.1, delta=100.0, M=5.0)
print("chosen:", cert.chosen)
print("measurements:", {k: v for k, v in cert.measurements.items() if k != "rho_method"})
cert.export_csv(out / "graph.csv")
(out / "certificate.json").write_text(cert.to_json())

# Norm scaling in n: C^{iota - eps} decays, C^iota grows like n^nu
iota, eps, nu = 3, 0.25, 0.1
ns = [2**j for j in range(4, 11)]
low = [cr_norm(phi_from_g(nonkam_g(golden, n, iota, nu)), iota - eps, 64 * n).cr_value for n in ns]
top = [sup_norm_derivative(phi_from_g(nonkam_g(golden, n, iota, nu)), iota, 64 * n) for n in ns]
print(f"slope of C^{iota - eps}: {asymptotic_slope(zip(ns, low)):.3f}")
print(f"slope of |D^{iota} phi|: {asymptotic_slope(zip(ns, top)):.3f}")
_svg.lines({"C^2.75": (ns, low), "D^3 sup": (ns, top)}, out / "norms.svg")
