import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonkam.circlemap import CallableLift, CircleLift, bell_table, derivative_stack, eval_lift, \
    faa_di_bruno, inverse_derivative_stack, invert, iterate, rigid_rotation
from nonkam.errors import CertificateError
from nonkam.families import arnold

TWO_PI = 2.0 * math.pi
WOBBLY = CircleLift(0.3, ((0.05, 1, 0.0), (0.02, 2, 1.0), (0.004, 5, -0.4)))


@st.composite
def lifts(draw):
    k = draw(st.integers(1, 3))
    terms = []
    budget = 0.9
    for _ in range(k):
        m = draw(st.integers(1, 6))
        a = draw(st.floats(-1.0, 1.0)) * budget / (TWO_PI * m * k)
        ph = draw(st.floats(0.0, TWO_PI))
        terms.append((a, m, ph))
    return CircleLift(draw(st.floats(-2.0, 2.0)), tuple(terms))


# -- evaluation ------------------------------------------------------------------------


def test_eval_rigid():
    assert eval_lift(rigid_rotation(0.5), 0.25) == 0.75


def test_eval_arnold_fixed_point_and_quarter():
    f = arnold(0.0, 0.5)
    assert eval_lift(f, 0.0) == 0.0
    assert eval_lift(f, 0.25) == pytest.approx(0.25 + 0.5 / TWO_PI, abs=1e-15)
    assert eval_lift(f, 0.25) == pytest.approx(0.3295775, abs=1e-7)


def test_certificate_rejects_non_monotone():
    with pytest.raises(CertificateError):
        CircleLift(0.0, ((0.2, 1, 0.0),))
    uncertified = CircleLift(0.0, ((0.2, 1, 0.0),), certify=False)
    assert uncertified.min_slope < 0
    with pytest.raises(CertificateError):
        invert(uncertified, 0.1)


def test_bad_frequency_rejected():
    with pytest.raises(ValueError):
        CircleLift(0.0, ((0.01, 1.5, 0.0),))
    with pytest.raises(ValueError):
        CircleLift(0.0, ((0.0, 2**31, 0.0),))


def test_tiny_amplitudes_flushed():
    f = CircleLift(0.2, ((1e-320, 3, 0.0),))
    assert f.is_rigid and f.terms == ()


@given(lifts())
@settings(max_examples=40, deadline=None)
def test_periodicity(f):
    xs = np.linspace(-3, 3, 10_000)
    assert np.max(np.abs(f(xs + 1) - f(xs) - 1)) <= 1e-12


@given(lifts())
@settings(max_examples=30, deadline=None)
def test_monotone_on_grid(f):
    xs = np.linspace(0, 1, 5001)
    assert np.all(np.diff(f(xs)) > 0)


# -- derivatives -----------------------------------------------------------------------


def test_derivative_stack_examples():
    f = CircleLift(0.0, ((0.05, 1, 0.0),))
    s = derivative_stack(f, 0.0, 3)
    assert s[1] == pytest.approx(1.3141593, abs=1e-7)
    assert s[2] == pytest.approx(0.0, abs=1e-15)
    assert s[3] == pytest.approx(-(TWO_PI**3) * 0.05, rel=1e-14)
    assert s[3] == pytest.approx(-12.40251, abs=1e-5)
    assert s[0] == eval_lift(f, 0.0)


def test_derivative_stack_against_mpmath():
    mp.mp.dps = 40
    fm = lambda x: x + 0.3 + 0.05 * mp.sin(2 * mp.pi * x) + 0.02 * mp.sin(4 * mp.pi * x + 1) \
        + 0.004 * mp.sin(10 * mp.pi * x - mp.mpf("0.4"))
    for x in (0.0, 0.123, 0.77):
        s = derivative_stack(WOBBLY, x, 6)
        for k in range(7):
            ref = float(mp.diff(fm, mp.mpf(x), k))
            assert s[k] == pytest.approx(ref, rel=1e-12, abs=1e-12 * TWO_PI**k)


# -- inversion -------------------------------------------------------------------------


def test_invert_examples():
    assert invert(rigid_rotation(0.37), 0.9) == pytest.approx(0.53, abs=1e-15)
    assert invert(arnold(0.0, 0.5), 0.0) == 0.0
    f = arnold(0.3, 0.5)
    x = invert(f, 0.7)
    # bisection oracle to 1e-14
    lo, hi = 0.7 - 0.3 - 0.1, 0.7 - 0.3 + 0.1
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) < 0.7 else (lo, mid)
    assert x == pytest.approx(0.5 * (lo + hi), abs=1e-14)
    assert abs(f(x) - 0.7) <= 1e-14


@given(lifts(), st.floats(-5.0, 5.0))
@settings(max_examples=60, deadline=None)
def test_invert_roundtrip_and_translation(f, y):
    x = invert(f, y)
    assert abs(f(x) - y) <= 1e-12
    assert invert(f, y + 1.0) == pytest.approx(x + 1.0, abs=1e-12)


def test_invert_preserves_array_shape():
    ys = np.linspace(0, 1, 12).reshape(3, 4)
    xs = invert(WOBBLY, ys)
    assert xs.shape == (3, 4)
    assert np.max(np.abs(WOBBLY(xs) - ys)) <= 1e-13


# -- Faa di Bruno ---------------------------------------------------------------------


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _brute_force_composition(outer, inner, m):
    # sum over set partitions of {1..m}: D^|pi| F * prod_{B in pi} D^|B| G
    total = 0.0
    for part in _set_partitions(list(range(m))):
        term = outer[len(part)]
        for block in part:
            term *= inner[len(block)]
        total += term
    return total


def test_faa_di_bruno_matches_partition_enumeration(rng):
    for _ in range(5):
        outer = list(rng.normal(size=8))
        inner = list(rng.normal(size=8))
        got = faa_di_bruno(outer, inner)
        for m in range(1, 8):
            assert got[m] == pytest.approx(_brute_force_composition(outer, inner, m), rel=1e-12)


def test_bell_numbers():
    B = bell_table(7, [1.0] * 7)
    bell = [sum(B[(n, k)] for k in range(n + 1)) for n in range(8)]
    assert bell == [1, 1, 2, 5, 15, 52, 203, 877]


def test_inverse_stack_reciprocal_example():
    f = CircleLift(0.0, ((0.05, 1, 0.0),))
    s = inverse_derivative_stack(f, 0.0, 2)
    assert s[1] == pytest.approx(1.0 / (1.0 + TWO_PI * 0.05), rel=1e-15)
    assert s[1] == pytest.approx(0.7609428, abs=1e-7)
    assert s[2] == pytest.approx(0.0, abs=1e-14)


def test_inverse_stack_rigid():
    s = inverse_derivative_stack(rigid_rotation(0.4), 0.3, 5)
    assert s[1] == 1.0
    assert all(s[m] == 0.0 for m in range(2, 6))


def _mp_inverse(terms, t):
    def f(x):
        return x + t + sum(a * mp.sin(2 * mp.pi * m * x + ph) for a, m, ph in terms)

    def inv(y):
        return mp.findroot(lambda x: f(x) - y, y - t)

    return inv


def test_inverse_stack_against_high_precision_differences(rng):
    mp.mp.dps = 45
    terms = [(mp.mpf(a), m, mp.mpf(ph)) for a, m, ph in WOBBLY.terms]
    inv = _mp_inverse(terms, mp.mpf(WOBBLY.translation))
    for y in rng.uniform(0, 1, 6):
        s = inverse_derivative_stack(WOBBLY, y, 6)
        for k in range(1, 7):
            ref = float(mp.diff(inv, mp.mpf(float(y)), k))
            assert abs(s[k] - ref) <= 1e-9 * max(1.0, abs(ref))


def test_inverse_second_derivative_closed_form():
    beta, n, iota_nu = 0.3, 10, 2.95
    g = CircleLift(beta, ((n ** -iota_nu, n, 0.0),))
    ys = np.linspace(0, 1, 257)
    s = inverse_derivative_stack(g, ys, 2)
    closed = TWO_PI**2 / n ** (iota_nu - 2.0) * np.sin(TWO_PI * n * s[0]) * s[1] ** 3
    assert np.max(np.abs(s[2] - closed)) <= 1e-12 * np.max(np.abs(closed))


@given(lifts(), st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_chain_rule_identity(f, y):
    K = 4
    inv = inverse_derivative_stack(f, y, K)
    outer = derivative_stack(f, inv[0], K).values
    comp = faa_di_bruno(list(outer), list(inv.values))
    assert comp[0] == pytest.approx(y, abs=1e-12)
    assert comp[1] == pytest.approx(1.0, abs=1e-8)
    for m in range(2, K + 1):
        assert abs(comp[m]) <= 1e-8 * max(1.0, max(abs(v) for v in outer[1:]))


# -- orbits ----------------------------------------------------------------------------


def test_iterate_examples():
    assert iterate(rigid_rotation(1 / 3), 0.0, 3)[-1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(iterate(arnold(0.0, 0.7), 0.0, 50) == 0.0)
    orbit = iterate(arnold(0.3, 0.5), 0.0, 100_000)
    assert orbit[-1] / 100_000 == pytest.approx(0.2927398, abs=1e-5)


def test_iterate_matches_python_loop():
    orbit = iterate(WOBBLY, 0.1, 1000)
    x = 0.1
    for _ in range(1000):
        x = WOBBLY(x)
    assert orbit[-1] == pytest.approx(x, abs=1e-9)


def test_callable_lift_fallback():
    f = CallableLift(lambda x: x + 0.2 + 0.05 * np.sin(TWO_PI * np.asarray(x)))
    assert f.approximate
    assert f.derivative(0.0) == pytest.approx(1 + TWO_PI * 0.05, rel=1e-8)
    assert iterate(f, 0.0, 5)[-1] == pytest.approx(iterate(arnold(0.2, TWO_PI * 0.05), 0.0, 5)[-1])
    with pytest.raises(CertificateError):
        CallableLift(lambda x: x + 0.3 * np.sin(TWO_PI * np.asarray(x)))
