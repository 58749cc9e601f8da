"""
Continued fractions and arithmetic witnesses
============================================

Floats only determine finitely many partial quotients. Quotient lists
can be pushed much further with exact integers.
"""
from nonkam.arithmetic import ContinuedFractionExpansion, classify, continued_fraction, \
    self_referential_quotients

for name in ("golden", "sqrt2m1", "3/10"):
    cf = continued_fraction(name)
    print(f"{name:8s} depth {cf.depth:2d} truncated={cf.truncated} quotients {cf.partial_quotients[:8]}...")

c = classify(continued_fraction("golden", 30), D=0.3, C=2.0)
print("golden: constant type", c.constant_type, "log-growth witness", round(c.diophantine_witness, 4))

# a_{k+1} = q_k: denominators square at every step
liouville = ContinuedFractionExpansion.from_quotients(self_referential_quotients(12))
c = classify(liouville, D=1e-3)
print("synthetic: q_11 has", len(str(liouville.convergents[-1][1])), "digits")
print("  log-growth witness", round(c.diophantine_witness, 4), "D witness", f"{c.d_witness:.3e}")
print("  Brjuno partial sums", [round(s, 4) for s in c.brjuno_partial_sums])
