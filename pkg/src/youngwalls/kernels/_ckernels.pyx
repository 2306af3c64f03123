# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels: double Horner/bisection and GMP fixed point.

Semantics match ``_pure`` exactly; see that module for the contracts.
"""

from libc.math cimport fabs, NAN
from libc.stdlib cimport malloc, free


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct *mpz_ptr
    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    int mpz_set_str(mpz_ptr, const char *, int)
    void mpz_set(mpz_ptr, mpz_ptr)
    void mpz_mul_ui(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_fdiv_q_2exp(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_add(mpz_ptr, mpz_ptr, mpz_ptr)
    int mpz_cmp(mpz_ptr, mpz_ptr)
    size_t mpz_sizeinbase(mpz_ptr, int)
    char *mpz_get_str(char *, int, mpz_ptr)


cdef inline double _ipow(double x, int e) noexcept nogil:
    cdef double r = 1.0
    cdef int k
    for k in range(e):
        r *= x
    return r


cdef inline double _horner(double *cs, int n, double x) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(n - 1, -1, -1):
        acc = acc * x + cs[i]
    return acc


def collapse_terms(coefs, powers, outer_exps, values, int degree):
    cdef int nt = len(coefs)
    cdef int nv = len(values)
    cdef int t, j, e
    cdef double c
    cdef double *vals = <double *> malloc(max(nv, 1) * sizeof(double))
    cdef double *out = <double *> malloc((degree + 1) * sizeof(double))
    try:
        for j in range(nv):
            vals[j] = values[j]
        for j in range(degree + 1):
            out[j] = 0.0
        for t in range(nt):
            c = coefs[t]
            row = outer_exps[t]
            for j in range(nv):
                e = row[j]
                if e:
                    c *= _ipow(vals[j], e)
            out[<int> powers[t]] += c
        return [out[j] for j in range(degree + 1)]
    finally:
        free(vals)
        free(out)


def cdf_invert_double(density, double lo, double hi, double u, double tol, double min_rel_mass):
    cdef int d = len(density)
    cdef int i, j
    cdef double *dens = <double *> malloc(max(d, 1) * sizeof(double))
    cdef double *anti = <double *> malloc((d + 1) * sizeof(double))
    cdef double w = hi - lo
    cdef double r, size, scale, rp, mass, target, a, b, mid, s, t
    try:
        r = max(fabs(lo), fabs(hi))
        size = 0.0
        rp = 1.0
        for i in range(d):
            dens[i] = density[i]
            size += fabs(dens[i]) * rp
            rp *= r
        scale = w * size
        for i in range(d - 1):
            for j in range(d - 2, i - 1, -1):
                dens[j] += lo * dens[j + 1]
        anti[0] = 0.0
        for i in range(d):
            anti[i + 1] = dens[i] / (i + 1)
        mass = _horner(anti, d + 1, w)
        if not mass > min_rel_mass * scale:
            return NAN, mass, 0.0, scale
        target = u * mass
        a = 0.0
        b = w
        with nogil:
            while b - a > tol:
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                if _horner(anti, d + 1, mid) < target:
                    a = mid
                else:
                    b = mid
        s = 0.5 * (a + b)
        t = min(max(lo + s, lo), hi)
        return t, mass, _horner(dens, d, s), scale
    finally:
        free(dens)
        free(anti)


cdef int _set_from_int(mpz_ptr dst, object value) except -1:
    cdef bytes s = format(value, "x").encode("ascii")
    if mpz_set_str(dst, s, 16) != 0:
        raise ValueError("cannot convert integer to mpz")
    return 0


cdef object _to_int(mpz_ptr src):
    cdef size_t n = mpz_sizeinbase(src, 16) + 2
    cdef char *buf = <char *> malloc(n)
    try:
        mpz_get_str(buf, 16, src)
        return int(buf.decode("ascii"), 16)
    finally:
        free(buf)


cdef class FixedPoly:
    cdef mpz_t *cs
    cdef int n
    cdef readonly int bits

    def __cinit__(self, coeffs, bits):
        cdef int i
        self.n = len(coeffs)
        self.bits = bits
        self.cs = <mpz_t *> malloc(max(self.n, 1) * sizeof(mpz_t))
        for i in range(self.n):
            mpz_init(self.cs[i])
            _set_from_int(self.cs[i], int(coeffs[i]))

    def __dealloc__(self):
        cdef int i
        if self.cs != NULL:
            for i in range(self.n):
                mpz_clear(self.cs[i])
            free(self.cs)

    @property
    def degree(self):
        return self.n - 1

    cdef void _eval(self, mpz_ptr acc, unsigned long m) noexcept:
        cdef int i
        mpz_set(acc, self.cs[self.n - 1])
        for i in range(self.n - 2, -1, -1):
            mpz_mul_ui(acc, acc, m)
            mpz_fdiv_q_2exp(acc, acc, self.bits)
            mpz_add(acc, acc, self.cs[i])

    def value(self, m):
        cdef mpz_t acc
        if self.n == 0:
            return 0
        mpz_init(acc)
        try:
            self._eval(acc, m)
            return _to_int(acc)
        finally:
            mpz_clear(acc)

    def invert(self, lo, hi, target, tol):
        cdef unsigned long a = lo, b = hi, mid, t = tol
        cdef mpz_t acc, tgt
        mpz_init(acc)
        mpz_init(tgt)
        try:
            _set_from_int(tgt, int(target))
            while b - a > t:
                mid = (a + b) >> 1
                self._eval(acc, mid)
                if mpz_cmp(acc, tgt) < 0:
                    a = mid
                else:
                    b = mid
            return (a + b) >> 1
        finally:
            mpz_clear(acc)
            mpz_clear(tgt)
