"""Invariant circles that are small in C^(iota - eps) and large in C^iota.

Pipeline: pick a frequency ``n`` with ``||n alpha||`` in the middle third
of the circle, solve for the translation ``beta`` of

    g(x) = x + beta + n**-(iota - nu) sin(2 pi n x)

so that ``rho(g) = alpha``, then form the twist-map perturbation ``phi``
and invariant graph ``Psi`` from ``g``. The norms of ``phi`` are measured
and the next admissible ``n`` is tried if any inequality fails.

``beta`` is solved on the frequency-one conjugate ``x + n beta +
n**-(iota - nu - 1) sin(2 pi x)`` whose rotation number is ``n alpha``.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import herman
from .arithmetic import circle_norm
from .circlemap import CircleLift
from .errors import BudgetError
from .families import min_frequency, nonkam_g
from .norms import cr_norm
from .rotation import _rational_target, compare_rotation, rotation_number, solve_parameter

I0 = (1.0 / 3.0 - 1e-6, 2.0 / 3.0 + 1e-6)
D_PROXY = 1.0 / 3.0
SOLVE_N = 4096
SOLVE_WIDTH = 1e-14
CONFIRM_N = 1_000_000
RHO_TOL = 1e-9
INVARIANCE_TOL = 1e-10


def _in_window(dist) -> bool:
    return I0[0] < float(dist) < I0[1]


def _exact_alpha(alpha):
    """Fraction for rational input (or floats within 1e-13 of p/q, q <= 50), else None."""
    if isinstance(alpha, (Fraction, tuple, str, int)):
        return _rational_target(alpha)
    return _rational_target(float(alpha))


def _frac_circle_norm(r: Fraction) -> Fraction:
    r = r - math.floor(r)
    return min(r, 1 - r)


def threshold(iota: int, nu: float, M: float, d_proxy: float = D_PROXY) -> float:
    """``(2 M / ((2 pi)^iota |sin(pi d)|))^(1 / nu)``: candidates must exceed it."""
    return (2.0 * M / ((2.0 * math.pi) ** iota * abs(math.sin(math.pi * d_proxy)))) ** (1.0 / nu)


def admissible_n(alpha, start: int = 1, max_scan: int = 10_000_000):
    """Yield ``n >= start`` with ``||n alpha||`` in ``I0``, in increasing order.

    For rational ``p/q`` only the progression ``q t + k`` is visited, ``k``
    minimising ``| ||k p/q|| - 1/2 |``.
    """
    start = max(1, int(start))
    exact = _exact_alpha(alpha)
    if exact is not None:
        q = exact.denominator
        k = min(range(1, q + 1), key=lambda j: (abs(_frac_circle_norm(j * exact) - Fraction(1, 2)), j))
        if not _in_window(_frac_circle_norm(k * exact)):
            return
        t = max(0, -(-(start - k) // q))
        while True:
            yield q * t + k
            t += 1
    alpha = float(alpha)
    for n in range(start, start + max_scan):
        if _in_window(circle_norm(n * alpha)):
            yield n
    raise BudgetError(f"no admissible n in [{start}, {start + max_scan})")


def select_n(alpha, iota: int, nu: float, M: float, d_proxy: float = D_PROXY, min_n: int = 1,
             use_threshold: bool = True, max_scan: int = 10_000_000) -> int:
    """Smallest admissible ``n`` above the size threshold (and ``min_n``)."""
    start = min_n
    if use_threshold:
        start = max(start, math.floor(threshold(iota, nu, M, d_proxy)) + 1)
    for n in admissible_n(alpha, start, max_scan):
        return n
    raise BudgetError(f"alpha = {alpha} has no admissible residue class")


@dataclass
class ConstructionCertificate:
    inputs: dict
    chosen: dict
    measurements: dict
    verdict: dict
    timings: dict = field(default_factory=dict)
    attempts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.verdict.get("pass"))

    def to_dict(self, include_timings: bool = False) -> dict:
        return {
            "inputs": self.inputs,
            "chosen": self.chosen,
            "measurements": self.measurements,
            "verdict": self.verdict,
            "attempts": self.attempts,
            "timings": self.timings if include_timings else None,
        }

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionCertificate":
        return cls(data["inputs"], data["chosen"], data["measurements"], data["verdict"],
                   data.get("timings") or {}, data.get("attempts") or [])

    def objects(self):
        """Rebuild ``(g, T, Psi)`` from the chosen ``n`` and ``beta``."""
        return _objects(self.chosen["n"], self.chosen["beta"], self.inputs["iota"], self.inputs["nu"])

    def export_csv(self, dest):
        g, T, G = self.objects()
        meta = {"n": self.chosen["n"], "alpha": self.inputs["alpha_label"]}
        return herman.export_graph_csv(dest, T, G, 64 * self.chosen["n"], meta)


def _objects(n, beta, iota, nu):
    g = nonkam_g(beta, n, iota, nu)
    T = herman.TwistMap(beta, herman.phi_from_g(g))
    return g, T, herman.graph_from_g(g, beta)


def solve_beta(alpha, n: int, iota: int, nu: float, N: int = SOLVE_N, width: float = SOLVE_WIDTH):
    """``beta`` with ``rho(nonkam_g(beta, n, iota, nu)) = alpha``; returns (beta, solution)."""
    amp = float(n) ** -(iota - nu - 1.0)
    exact = _exact_alpha(alpha)
    target = n * exact if exact is not None else n * float(alpha)
    k = math.floor(target)
    gamma = target - k
    family = lambda lam: CircleLift(lam, ((amp, 1, 0.0),))
    bracket = (float(gamma) - 1.01 * amp - 1e-12, float(gamma) + 1.01 * amp + 1e-12)
    if exact is not None:
        sol = solve_parameter(family, gamma, bracket, tol=width, exact=True)
    else:
        sol = solve_parameter(family, gamma, bracket, tol=width, N=N, exact=False)
    return (sol.parameter + k) / n, sol


def _measure(alpha, n, beta, iota, epsilon, nu, confirm_rho=True, clock=None):
    clock = clock if clock is not None else {}
    g, T, G = _objects(n, beta, iota, nu)
    grid = 64 * n
    t0 = time.perf_counter()
    c_low = cr_norm(T.phi, iota - epsilon, grid).cr_upper
    c_high = cr_norm(T.phi, iota, grid).cr_value
    t1 = time.perf_counter()
    inv = herman.verify_invariance(T, G, grid)
    t2 = time.perf_counter()
    m = {
        "c_low_norm": c_low,
        "c_high_norm": c_high,
        "invariance_residual": inv,
        "sin_factor": abs(math.sin(math.pi * n * beta)),
        "rho_residual": None,
        "rho_method": None,
    }
    if confirm_rho:
        m.update(_rho_check(alpha, g))
    clock["norms"] = clock.get("norms", 0.0) + t1 - t0
    clock["invariance"] = clock.get("invariance", 0.0) + t2 - t1
    clock["rho"] = clock.get("rho", 0.0) + time.perf_counter() - t2
    return m


def _rho_check(alpha, g):
    exact = _exact_alpha(alpha)
    if exact is not None:
        if compare_rotation(g, exact) == 0:
            return {"rho_residual": 0.0, "rho_method": "locking"}
        est = rotation_number(g, "weighted_birkhoff", CONFIRM_N)
        return {"rho_residual": abs(est.value - float(exact)), "rho_method": "locking"}
    est = rotation_number(g, "weighted_birkhoff", CONFIRM_N)
    return {"rho_residual": abs(est.value - float(alpha)), "rho_method": "weighted_birkhoff"}


def _verdict(m, delta, M):
    v = {
        "rho": m["rho_residual"] is not None and m["rho_residual"] <= RHO_TOL,
        "c_low": m["c_low_norm"] < delta,
        "c_high": m["c_high_norm"] > M,
        "invariance": m["invariance_residual"] <= INVARIANCE_TOL,
    }
    v["pass"] = all(v.values())
    return v


def _validate(iota, epsilon, nu, delta, M):
    if int(iota) != iota or iota < 2:
        raise ValueError("iota must be an integer >= 2")
    if not 0.0 < nu < epsilon < 0.5:
        raise ValueError("need 0 < nu < epsilon < 1/2")
    if not (delta > 0 and M > 0):
        raise ValueError("delta and M must be positive")


def alpha_label(alpha) -> str:
    exact = _exact_alpha(alpha)
    if exact is not None:
        return f"{exact.numerator}/{exact.denominator}"
    return repr(float(alpha))


def build_nonkam(alpha, iota: int = 2, epsilon: float = 0.25, nu: float | None = None,
                 delta: float = 0.5, M: float = 5.0, max_candidates: int = 50,
                 orbit_budget: int = 10**7, d_proxy: float = D_PROXY, margin: float = 0.05,
                 label: str | None = None) -> ConstructionCertificate:
    """Search admissible ``n`` in increasing order for a passing certificate.

    Candidates whose sine factor makes ``c_high > M`` hopeless are skipped
    before the norms are measured. The rotation number is confirmed only
    once the norm and invariance checks pass. Raises ``BudgetError`` (with
    the best failing certificate in ``.best``) when ``max_candidates`` or
    ``orbit_budget`` runs out.
    """
    nu = epsilon / 2.0 if nu is None else nu
    _validate(iota, epsilon, nu, delta, M)
    iota = int(iota)
    exact = _exact_alpha(alpha)
    inputs = {
        "alpha": float(exact) if exact is not None else float(alpha),
        "alpha_label": label or alpha_label(alpha),
        "iota": iota, "epsilon": float(epsilon), "nu": float(nu),
        "delta": float(delta), "M": float(M),
    }
    start = max(min_frequency(iota - nu - 1.0), math.floor(threshold(iota, nu, M, d_proxy)) + 1)
    clock = {"solve": 0.0}
    attempts, best = [], None
    orbit_steps = 0
    t_start = time.perf_counter()
    for count, n in enumerate(admissible_n(alpha, start)):
        if count >= max_candidates:
            break
        t0 = time.perf_counter()
        beta, sol = solve_beta(alpha, n, iota, nu)
        clock["solve"] += time.perf_counter() - t0
        orbit_steps += sol.orbit_steps
        sin_factor = abs(math.sin(math.pi * n * beta))
        if sin_factor * 2.0 * (2.0 * math.pi) ** iota * n**nu <= M * (1.0 + margin):
            attempts.append({"n": n, "outcome": "skipped: sine factor too small"})
            continue
        m = _measure(alpha, n, beta, iota, epsilon, nu, confirm_rho=False, clock=clock)
        norms_ok = m["c_low_norm"] < delta and m["c_high_norm"] > M and \
            m["invariance_residual"] <= INVARIANCE_TOL
        if norms_ok:
            t0 = time.perf_counter()
            m.update(_rho_check(alpha, nonkam_g(beta, n, iota, nu)))
            clock["rho"] = clock.get("rho", 0.0) + time.perf_counter() - t0
            if exact is None:
                orbit_steps += CONFIRM_N
        verdict = _verdict(m, delta, M)
        cert = ConstructionCertificate(inputs, {"n": n, "beta": beta}, m, verdict, clock, attempts)
        attempts.append({"n": n, "outcome": "pass" if verdict["pass"] else "fail",
                         "c_low_norm": m["c_low_norm"], "c_high_norm": m["c_high_norm"]})
        if verdict["pass"]:
            clock["total"] = time.perf_counter() - t_start
            return cert
        if best is None or m["c_low_norm"] < best.measurements["c_low_norm"]:
            best = cert
        if orbit_steps >= orbit_budget:
            break
    clock["total"] = time.perf_counter() - t_start
    raise BudgetError(f"no passing certificate within {len(attempts)} candidates "
                      f"({orbit_steps} orbit steps)", best)


def verify_certificate(data) -> ConstructionCertificate:
    """Re-measure a certificate (dict or JSON text) from its inputs and chosen ``(n, beta)``."""
    if isinstance(data, str):
        data = json.loads(data)
    inp, chosen = data["inputs"], data["chosen"]
    alpha = Fraction(inp["alpha_label"]) if "/" in inp["alpha_label"] else inp["alpha"]
    m = _measure(alpha, int(chosen["n"]), float(chosen["beta"]), int(inp["iota"]),
                 float(inp["epsilon"]), float(inp["nu"]))
    return ConstructionCertificate(inp, dict(chosen), m, _verdict(m, inp["delta"], inp["M"]))
