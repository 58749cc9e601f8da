"""Continued fractions, convergents and witness-based arithmetic classification.

A float stands for every real within half an ulp of it, so its expansion
is computed for both ends of that interval with exact rationals and stops
(flagging truncation) as soon as the two disagree. Quotient lists are
taken at face value with big-integer convergents, which is how
Liouville-like test numbers are built.

Asymptotic conditions cannot be decided from finitely many quotients;
``classify`` reports the smallest constants consistent with the data
inspected, stamped with the depth.
"""
from __future__ import annotations

import decimal
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np


def _correctly_rounded(expr):
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        return float(expr(decimal.Decimal))


# correctly rounded, so the half-ulp interval contains the true value
NAMED_CONSTANTS = {
    "golden": _correctly_rounded(lambda D: (D(5).sqrt() - 1) / 2),
    "sqrt2m1": _correctly_rounded(lambda D: D(2).sqrt() - 1),
}
FLOAT_DEPTH_LIMIT = 40


def circle_norm(x):
    """Distance from ``x`` to the nearest integer."""
    if isinstance(x, Fraction):
        r = x - math.floor(x)
        return min(r, 1 - r)
    d = np.abs(np.asarray(x, dtype=float) - np.rint(x))
    return float(d) if d.ndim == 0 else d


def parse_alpha(text):
    """``golden``, ``sqrt2m1``, ``p/q`` (exact) or a decimal literal (float)."""
    if not isinstance(text, str):
        return text
    s = text.strip()
    if s in NAMED_CONSTANTS:
        return NAMED_CONSTANTS[s]
    if "/" in s:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational {text!r}") from exc
    try:
        return float(s)
    except ValueError as exc:
        raise ValueError(f"cannot parse alpha {text!r}") from exc


def convergents(quotients):
    """``(p_k, q_k)`` via the three-term recurrences, exact integers."""
    p_prev, q_prev, p, q = 1, 0, None, None
    p2, q2 = 0, 1
    out = []
    for a in quotients:
        p = a * p_prev + p2
        q = a * q_prev + q2
        out.append((p, q))
        p2, q2, p_prev, q_prev = p_prev, q_prev, p, q
    return out


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    partial_quotients: tuple
    convergents: tuple
    exact_rational: bool = False
    truncated: bool = False

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    @classmethod
    def from_quotients(cls, quotients, exact_rational: bool = False):
        qs = tuple(int(a) for a in quotients)
        if not qs:
            raise ValueError("need at least one quotient")
        if any(a < 1 for a in qs[1:]) or qs[0] < 0:
            raise ValueError("quotients must be a0 >= 0 followed by positive integers")
        return cls(qs, tuple(convergents(qs)), exact_rational, False)

    def value(self) -> Fraction:
        p, q = self.convergents[-1]
        return Fraction(p, q)

    def to_dict(self):
        return {
            "partial_quotients": list(self.partial_quotients),
            "convergents": [list(c) for c in self.convergents],
            "depth": self.depth,
            "exact_rational": self.exact_rational,
            "truncated": self.truncated,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def _euclid(r: Fraction, depth: int | None):
    qs = []
    while depth is None or len(qs) < depth:
        a = math.floor(r)
        qs.append(a)
        r -= a
        if r == 0:
            return qs, False
        r = 1 / r
    return qs, True


def _interval_expansion(lo: Fraction, hi: Fraction, depth: int):
    qs = []
    while len(qs) < depth:
        a = math.floor(lo)
        if math.floor(hi) != a or hi == a + 1:
            return qs, True
        qs.append(a)
        lo, hi = lo - a, hi - a
        if lo <= 0:
            return qs, True
        lo, hi = 1 / hi, 1 / lo
    return qs, False


def continued_fraction(alpha, depth: int = FLOAT_DEPTH_LIMIT) -> ContinuedFractionExpansion:
    """Expansion to at most ``depth`` quotients.

    Exact inputs (Fraction, int, ``"p/q"``) are expanded by Euclid and are
    flagged ``exact_rational`` when the expansion terminates. Floats use
    the half-ulp interval and stop with ``truncated`` set once the
    quotient is no longer determined, never emitting noise.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if isinstance(alpha, str):
        alpha = parse_alpha(alpha)
    if isinstance(alpha, (Fraction, int)):
        qs, cut = _euclid(Fraction(alpha), depth)
        exp = ContinuedFractionExpansion.from_quotients(qs, exact_rational=not cut)
        return ContinuedFractionExpansion(exp.partial_quotients, exp.convergents,
                                          exp.exact_rational, cut)
    x = float(alpha)
    if not math.isfinite(x):
        raise ValueError("alpha must be finite")
    half_ulp = Fraction(math.ulp(x)) / 2
    centre = Fraction(x)
    qs, cut = _interval_expansion(centre - half_ulp, centre + half_ulp, depth)
    if not qs:
        qs, cut = [math.floor(x)], True
    exp = ContinuedFractionExpansion.from_quotients(qs)
    return ContinuedFractionExpansion(exp.partial_quotients, exp.convergents, False,
                                      cut and len(qs) < depth)


@dataclass(frozen=True)
class Classification:
    """Witnesses computed from the first ``depth`` quotients only.

    ``diophantine_witness`` is the smallest ``C`` with
    ``ln q_{k+1} <= C ln q_k`` over the inspected ``q_k >= 2``;
    ``d_witness`` the smallest observed ``q_k^(1 + tau) / (q_k + q_{k+1})``,
    a lower bound for ``q_k^(2 + tau) |alpha - p_k / q_k|``;
    ``h_class_witness`` the smallest ``C`` with
    ``ln q_{k+1} <= C (ln q_k)^mu``.
    """

    depth: int
    applicable: bool
    constant_type: int | None = None
    diophantine_witness: float | None = None
    d_witness: float | None = None
    tau: float = 0.0
    brjuno_partial_sum: float | None = None
    brjuno_partial_sums: tuple = ()
    mu: float | None = None
    h_class_witness: float | None = None
    checks: tuple = ()
    note: str = "partial: finite data cannot certify asymptotic conditions"

    def to_dict(self):
        d = asdict(self)
        d["brjuno_partial_sums"] = list(self.brjuno_partial_sums)
        d["checks"] = [list(c) for c in self.checks]
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def _ln(n: int) -> float:
    return math.log(n)


def classify(cf: ContinuedFractionExpansion, D: float | None = None, tau: float = 0.0,
             C: float | None = None, mu: float | None = None) -> Classification:
    """Depth-stamped witnesses for the arithmetic conditions.

    When thresholds ``D``, ``C`` are given, ``checks`` records whether the
    inspected data violate them: ``("diophantine_D", D, ok)``,
    ``("log_growth", C, ok)`` and, with ``mu``, ``("h_class", C, ok)``.
    """
    if cf.depth < 3:
        raise ValueError("classification needs at least 3 quotients")
    if cf.exact_rational:
        return Classification(cf.depth, False, note="rational: classification not applicable")
    qs = [q for _, q in cf.convergents]
    a = cf.partial_quotients
    constant_type = max(a[1:])
    ratios, h_ratios, d_vals, sums = [], [], [], []
    total = 0.0
    for k in range(len(qs) - 1):
        q, q_next = qs[k], qs[k + 1]
        total += _ln(q_next) / q
        sums.append(total)
        d_vals.append(math.exp((1.0 + tau) * _ln(q) - _ln(q + q_next)))
        if q >= 2:
            ratios.append(_ln(q_next) / _ln(q))
            if mu is not None:
                h_ratios.append(_ln(q_next) / _ln(q) ** mu)
    witness = max(ratios) if ratios else None
    h_witness = (max(h_ratios) if h_ratios else None) if mu is not None else None
    d_witness = min(d_vals) if d_vals else None
    checks = []
    if D is not None and d_witness is not None:
        checks.append(("diophantine_D", D, d_witness >= D))
    if C is not None and witness is not None:
        checks.append(("log_growth", C, witness <= C))
    if C is not None and h_witness is not None:
        checks.append(("h_class", C, h_witness <= C))
    return Classification(
        depth=cf.depth,
        applicable=True,
        constant_type=int(constant_type),
        diophantine_witness=witness,
        d_witness=d_witness,
        tau=float(tau),
        brjuno_partial_sum=total,
        brjuno_partial_sums=tuple(sums),
        mu=mu,
        h_class_witness=h_witness,
        checks=tuple(checks),
    )


def self_referential_quotients(depth: int):
    """Quotients with ``a_{k+1} = q_k`` (``a_0 = 0``), a fast-growing Liouville-type test case."""
    qs = [0]
    q_prev, q = 0, 1
    while len(qs) < depth:
        a = q
        qs.append(a)
        q_prev, q = q, a * q + q_prev
    return qs
