"""Reference implementation of the sampling kernels in plain Python.

The compiled module mirrors these functions operation for operation, so
both backends produce bit-identical results.
"""

import math


def _ipow(x, e):
    r = 1.0
    for _ in range(e):
        r *= x
    return r


def collapse_terms(coefs, powers, outer_exps, values, degree):
    """Univariate coefficients of a multivariate polynomial at fixed outer values.

    ``powers[t]`` is the exponent of the free variable in term ``t`` and
    ``outer_exps[t]`` the exponents of the remaining variables, whose
    values are in ``values``.
    """
    out = [0.0] * (degree + 1)
    for t in range(len(coefs)):
        c = coefs[t]
        row = outer_exps[t]
        for j in range(len(values)):
            if row[j]:
                c *= _ipow(values[j], row[j])
        out[powers[t]] += c
    return out


def _horner(cs, x):
    acc = 0.0
    for i in range(len(cs) - 1, -1, -1):
        acc = acc * x + cs[i]
    return acc


def cdf_invert_double(density, lo, hi, u, tol, min_rel_mass):
    """Inverse-CDF step for a polynomial density on ``[lo, hi]``, in doubles.

    The density is first re-expanded around ``lo`` so that rounding errors
    scale with the interval width. Returns ``(t, mass, density(t), scale)``
    where ``scale`` bounds the rounding error of the CDF in units of
    machine epsilon; when ``mass <= min_rel_mass * scale`` the result would
    be unreliable and ``t`` is NaN.
    """
    d = len(density)
    w = hi - lo
    r = max(abs(lo), abs(hi))
    size = 0.0
    rp = 1.0
    for i in range(d):
        size += abs(density[i]) * rp
        rp *= r
    scale = w * size
    shifted = list(density)
    for i in range(d - 1):
        for j in range(d - 2, i - 1, -1):
            shifted[j] += lo * shifted[j + 1]
    anti = [0.0] * (d + 1)
    for i in range(d):
        anti[i + 1] = shifted[i] / (i + 1)
    mass = _horner(anti, w)
    if not mass > min_rel_mass * scale:
        return math.nan, mass, 0.0, scale
    target = u * mass
    a, b = 0.0, w
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if _horner(anti, mid) < target:
            a = mid
        else:
            b = mid
    s = 0.5 * (a + b)
    t = min(max(lo + s, lo), hi)
    return t, mass, _horner(shifted, s), scale


class FixedPoly:
    """Polynomial with integer coefficients evaluated at ``m / 2**bits``.

    ``value(m)`` approximates ``sum(c_i * (m / 2**bits)**i)`` with floor
    rounding at each Horner step, so the error is at most ``degree`` units.
    """

    def __init__(self, coeffs, bits):
        self.coeffs = [int(c) for c in coeffs]
        self.bits = int(bits)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def value(self, m):
        cs = self.coeffs
        if not cs:
            return 0
        bits = self.bits
        acc = cs[-1]
        for i in range(len(cs) - 2, -1, -1):
            acc = cs[i] + ((acc * m) >> bits)
        return acc

    def invert(self, lo, hi, target, tol):
        """Bisection for ``value(m) == target`` on the integer range ``[lo, hi]``."""
        cs = self.coeffs
        bits = self.bits
        top = len(cs) - 2
        while hi - lo > tol:
            mid = (lo + hi) >> 1
            acc = cs[-1]
            for i in range(top, -1, -1):
                acc = cs[i] + ((acc * mid) >> bits)
            if acc < target:
                lo = mid
            else:
                hi = mid
        return (lo + hi) >> 1
