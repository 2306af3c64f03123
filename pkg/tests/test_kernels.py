import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from youngwalls.kernels import _pure

try:
    from youngwalls.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

coef = st.floats(-10, 10, allow_nan=False)
unit = st.floats(0, 1)


@needs_compiled
@settings(max_examples=200)
@given(st.lists(coef, min_size=1, max_size=12), unit, unit, unit)
def test_cdf_inversion_identical(density, a, b, u):
    lo, hi = min(a, b), max(a, b)
    r1 = _pure.cdf_invert_double(density, lo, hi, u, 1e-12, 1e-6)
    r2 = _ckernels.cdf_invert_double(density, lo, hi, u, 1e-12, 1e-6)
    for x, y in zip(r1, r2):
        assert (math.isnan(x) and math.isnan(y)) or x == y


@needs_compiled
@settings(max_examples=100)
@given(st.data())
def test_collapse_identical(data):
    nv = data.draw(st.integers(1, 4))
    nt = data.draw(st.integers(1, 8))
    coefs = data.draw(st.lists(coef, min_size=nt, max_size=nt))
    powers = data.draw(st.lists(st.integers(0, 5), min_size=nt, max_size=nt))
    outer = [tuple(data.draw(st.lists(st.integers(0, 4), min_size=nv, max_size=nv))) for _ in range(nt)]
    values = data.draw(st.lists(unit, min_size=nv, max_size=nv))
    args = (coefs, powers, outer, values, max(powers))
    assert _pure.collapse_terms(*args) == _ckernels.collapse_terms(*args)


@needs_compiled
@settings(max_examples=100)
@given(st.lists(st.integers(-(2**200), 2**200), min_size=1, max_size=10), st.integers(0, 2**60))
def test_fixed_point_identical(coeffs, m):
    p, c = _pure.FixedPoly(coeffs, 60), _ckernels.FixedPoly(coeffs, 60)
    assert p.value(m) == c.value(m)
    assert p.degree == c.degree


@given(st.lists(st.integers(-(2**80), 2**80), min_size=1, max_size=8), st.integers(0, 2**40))
def test_fixed_point_error_bound(coeffs, m):
    bits = 40
    exact = sum(Fraction(c) * Fraction(m, 2**bits) ** i for i, c in enumerate(coeffs))
    assert abs(_pure.FixedPoly(coeffs, bits).value(m) - exact) <= len(coeffs)


def test_fixed_point_inversion_monotone():
    # F(x) = x on the grid: inversion returns the target itself
    f = _pure.FixedPoly([0, 1 << 30], 30)
    assert abs(f.invert(0, 1 << 30, 12345, 1) - 12345) <= 1


def test_double_kernel_inverts_known_cdf():
    t, mass, dens, _ = _pure.cdf_invert_double([0.0, 2.0], 0.0, 1.0, 0.25, 1e-12, 1e-6)
    assert abs(t - 0.5) <= 1e-12
    assert mass == pytest.approx(1.0)
    assert dens == pytest.approx(1.0)


def test_ill_conditioned_density_flagged():
    # (z - 1/2)^40 expanded: huge alternating coefficients, tiny mass
    from math import comb

    coeffs = [comb(40, i) * (-0.5) ** (40 - i) for i in range(41)]
    t, *_ = _pure.cdf_invert_double(coeffs, 0.0, 1.0, 0.5, 1e-12, 41 * 2.0**-21)
    assert math.isnan(t)


@needs_compiled
def test_backends_give_identical_sample_streams():
    code = (
        "from youngwalls import kernels, sampler, density;"
        "t = density.iterate_recurrence(density.polyo_2nx3_block(), 12);"
        "r = sampler.make_rng(42);"
        "print(kernels.BACKEND, [sorted(sampler.sample_polyomino(t, n, r).values.items()) for n in (3, 12)])"
    )
    outs = {}
    for pure in ("0", "1"):
        env = dict(os.environ, YOUNGWALLS_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        backend, _, payload = res.stdout.partition(" ")
        outs[backend] = payload
    assert set(outs) == {"compiled", "python"}
    assert outs["compiled"] == outs["python"]
