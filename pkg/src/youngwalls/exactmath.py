"""Exact rational polynomials in one and several variables.

Coefficients are :class:`fractions.Fraction`, which already keeps values
reduced with a positive denominator. Univariate polynomials are dense,
multivariate ones are sparse maps from exponent tuples to coefficients over
a fixed, ordered variable set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence, Union

from .errors import UsageError

Rational = Fraction
Number = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a reduced Fraction."""
    num, sep, den = text.strip().partition("/")
    try:
        return Fraction(int(num), int(den) if sep else 1)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational literal: {text!r}") from exc


def format_rational(value: Number) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class BoundRef:
    """An integration bound: the constant 0, the constant 1, or a symbol."""

    kind: str  # "const" or "var"
    value: Union[int, str]

    def __post_init__(self):
        if self.kind == "const":
            if self.value not in (0, 1):
                raise UsageError(f"constant bounds must be 0 or 1, got {self.value!r}")
        elif self.kind == "var":
            if not isinstance(self.value, str) or not self.value:
                raise UsageError(f"variable bound needs a symbol name, got {self.value!r}")
        else:
            raise UsageError(f"unknown bound kind {self.kind!r}")

    @classmethod
    def zero(cls) -> "BoundRef":
        return cls("const", 0)

    @classmethod
    def one(cls) -> "BoundRef":
        return cls("const", 1)

    @classmethod
    def var(cls, name: str) -> "BoundRef":
        return cls("var", name)

    @classmethod
    def parse(cls, text: str) -> "BoundRef":
        text = str(text).strip()
        if text == "0":
            return cls.zero()
        if text == "1":
            return cls.one()
        return cls.var(text)

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    def __str__(self) -> str:
        return str(self.value)


class Polynomial:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``var**i``; trailing zeros are
    stripped so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs: Iterable[Number] = (), var: str = "z"):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.var = var
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c: Number, var: str = "z") -> "Polynomial":
        return cls([c], var)

    @classmethod
    def monomial(cls, degree: int, c: Number = 1, var: str = "z") -> "Polynomial":
        return cls([0] * degree + [c], var)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Polynomial"):
        if self.var != other.var and not (self.is_zero() or other.is_zero()):
            raise UsageError(f"variable mismatch: {self.var!r} vs {other.var!r}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.var)
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial([c * a for a in self.coeffs], self.var)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Polynomial((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out, self.var)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs and (self.var == other.var or self.is_zero())
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial.constant(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __call__(self, point):
        return evaluate(self, point)

    def antiderivative(self) -> "Polynomial":
        """Antiderivative vanishing at 0."""
        return Polynomial([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)], self.var)

    def derivative(self) -> "Polynomial":
        return Polynomial([c * i for i, c in enumerate(self.coeffs)][1:], self.var)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str], var: str = "z") -> "Polynomial":
        return cls([parse_rational(s) for s in items], var)

    def __repr__(self):
        if self.is_zero():
            return f"Polynomial(0, var={self.var!r})"
        terms = [f"{c}*{self.var}^{i}" for i, c in enumerate(self.coeffs) if c]
        return "Polynomial(" + " + ".join(terms) + ")"


def evaluate(p: Polynomial, point):
    """Horner evaluation; exact for int/Fraction points, double for floats."""
    if isinstance(point, float):
        acc = 0.0
        for c in reversed(p.coeffs):
            acc = acc * point + float(c)
        return acc
    if not isinstance(point, _RationalABC):
        raise UsageError(f"cannot evaluate at {point!r}")
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * point + c
    return acc


def definite_unit_integral(p: Polynomial) -> Fraction:
    """Exact value of the integral of ``p`` over [0, 1]."""
    return sum((c / (i + 1) for i, c in enumerate(p.coeffs)), Fraction(0))


Exps = tuple[int, ...]


class MultivariatePolynomial:
    """Sparse polynomial over a declared, ordered tuple of variable names."""

    __slots__ = ("vars", "terms", "_index")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, Number] | None = None):
        self.vars: tuple[str, ...] = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise UsageError(f"duplicate variables in {self.vars}")
        self._index = {v: i for i, v in enumerate(self.vars)}
        clean: dict[Exps, Fraction] = {}
        for exps, c in (terms or {}).items():
            if len(exps) != len(self.vars):
                raise UsageError(f"exponent vector {exps} does not match variables {self.vars}")
            c = Fraction(c)
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, variables, index, terms):
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.vars = variables
        obj._index = index
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, variables: Sequence[str], c: Number) -> "MultivariatePolynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "MultivariatePolynomial":
        variables = tuple(variables)
        if name not in variables:
            raise UsageError(f"{name!r} is not among {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exps: 1})

    @classmethod
    def from_polynomial(cls, p: Polynomial, variables: Sequence[str], name: str | None = None):
        """Lift a univariate polynomial, placing it in variable ``name``."""
        variables = tuple(variables)
        name = name or p.var
        if name not in variables:
            raise UsageError(f"{name!r} is not among {variables}")
        k = variables.index(name)
        terms = {}
        for i, c in enumerate(p.coeffs):
            if c:
                e = [0] * len(variables)
                e[k] = i
                terms[tuple(e)] = c
        return cls._raw(variables, {v: i for i, v in enumerate(variables)}, terms)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"{name!r} is not among {self.vars}") from None

    def is_zero(self) -> bool:
        return not self.terms

    def contains(self, name: str) -> bool:
        k = self.index(name)
        return any(e[k] for e in self.terms)

    def degree_in(self, name: str) -> int:
        k = self.index(name)
        return max((e[k] for e in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def _check(self, other: "MultivariatePolynomial"):
        if self.vars != other.vars:
            raise UsageError(f"variable sets differ: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if not isinstance(other, MultivariatePolynomial):
            other = MultivariatePolynomial.constant(self.vars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultivariatePolynomial._raw(self.vars, self._index, out)

    __radd__ = __add__

    def __neg__(self):
        return MultivariatePolynomial._raw(
            self.vars, self._index, {e: -c for e, c in self.terms.items()}
        )

    def __sub__(self, other):
        if not isinstance(other, MultivariatePolynomial):
            other = MultivariatePolynomial.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultivariatePolynomial):
            c = Fraction(other)
            if not c:
                return MultivariatePolynomial._raw(self.vars, self._index, {})
            return MultivariatePolynomial._raw(
                self.vars, self._index, {e: c * a for e, a in self.terms.items()}
            )
        self._check(other)
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultivariatePolynomial._raw(
            self.vars, self._index, {e: c for e, c in out.items() if c}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MultivariatePolynomial):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultivariatePolynomial.constant(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __pow__(self, k: int):
        out = MultivariatePolynomial.constant(self.vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def substitute(self, name: str, value) -> "MultivariatePolynomial":
        """Replace a variable by a number; the variable stays declared."""
        k = self.index(name)
        value = Fraction(value)
        out: dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            if e[k]:
                c = c * value ** e[k]
                e = e[:k] + (0,) + e[k + 1:]
            out[e] = out.get(e, 0) + c
        return MultivariatePolynomial._raw(
            self.vars, self._index, {e: c for e, c in out.items() if c}
        )

    def rename(self, mapping: Mapping[str, str]) -> "MultivariatePolynomial":
        return MultivariatePolynomial(
            tuple(mapping.get(v, v) for v in self.vars), self.terms
        )

    def to_univariate(self, name: str, values: Mapping[str, Number] | None = None) -> Polynomial:
        """Collapse to a univariate polynomial in ``name``.

        Every other variable occurring in the polynomial must get a value.
        """
        k = self.index(name)
        values = {v: Fraction(x) for v, x in (values or {}).items()}
        coeffs: dict[int, Fraction] = {}
        for e, c in self.terms.items():
            for j, ej in enumerate(e):
                if ej and j != k:
                    try:
                        c = c * values[self.vars[j]] ** ej
                    except KeyError:
                        raise UsageError(f"no value for {self.vars[j]!r}") from None
            coeffs[e[k]] = coeffs.get(e[k], 0) + c
        deg = max(coeffs, default=-1)
        return Polynomial([coeffs.get(i, 0) for i in range(deg + 1)], name)

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at a point; exact when all values are rational."""
        vals = [values[v] if any(e[i] for e in self.terms) else 0 for i, v in enumerate(self.vars)]
        floaty = any(isinstance(x, float) for x in vals)
        total = 0.0 if floaty else Fraction(0)
        for e, c in self.terms.items():
            t = float(c) if floaty else c
            for x, ej in zip(vals, e):
                if ej:
                    t = t * x**ej
            total += t
        return total

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [[list(e), format_rational(c)] for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultivariatePolynomial":
        return cls(data["vars"], {tuple(e): parse_rational(c) for e, c in data["terms"]})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def poly_arith(a: MultivariatePolynomial, b, op: str) -> MultivariatePolynomial:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale`` (b a number for the last)."""
    if op == "scale":
        return a * Fraction(b)
    if not isinstance(b, MultivariatePolynomial):
        raise UsageError(f"{op} needs two polynomials")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise UsageError(f"unknown operation {op!r}")


def integrate_layer(
    body: MultivariatePolynomial, var: str, lower: BoundRef, upper: BoundRef
) -> MultivariatePolynomial:
    """Integrate ``body`` in ``var`` from ``lower`` to ``upper``.

    Bounds are 0, 1 or another declared variable, which is substituted into
    the antiderivative. The result does not depend on ``var``.
    """
    k = body.index(var)
    for b in (lower, upper):
        if b.is_var:
            if b.value == var:
                raise UsageError(f"bound of {var!r} refers to {var!r} itself")
            body.index(b.value)
    out: dict[Exps, Fraction] = {}

    def put(e, c):
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)

    for e, c in body.terms.items():
        n = e[k] + 1
        c = c / n
        base = e[:k] + (0,) + e[k + 1:]
        for bound, sign in ((upper, 1), (lower, -1)):
            if bound.is_var:
                j = body._index[bound.value]
                put(base[:j] + (base[j] + n,) + base[j + 1:], sign * c)
            elif bound.value == 1:
                put(base, sign * c)
            # constant 0 contributes nothing since n >= 1
    return MultivariatePolynomial._raw(body.vars, body._index, out)
