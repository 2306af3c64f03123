"""Uniform random fillings via the density method.

The top interface value is drawn from ``p_n``; each block is then filled
outermost variable first, every variable by inverse-CDF sampling of its
conditional density (a univariate polynomial obtained from the tower's
partial integrals), and the block's chain variable becomes the interface of
the block below. Ranking the ``6n+1`` reals gives the filling.

Densities are inverted in double precision when a cancellation bound shows
that this is safe, and in fixed-point big-integer arithmetic otherwise
(high-degree ``p_k`` have huge, alternating monomial coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .density import BlockSpec, DensityTower, block_elements, element_cells, element_name
from .errors import CapacityError, DensityError, UsageError
from .exactmath import MultivariatePolynomial, Polynomial
from .formulas import BLUE, RED, UP, ColouredPath
from .shapes import Poset, ShapeSpec

DEFAULT_TOL = 1e-12
NEGATIVE_DENSITY_ALARM = -1e-9
GRID_BITS = 60  # fixed-point abscissae are multiples of 2**-GRID_BITS
TARGET_BITS = 64  # significant bits required in a fixed-point mass
MAX_TIE_RETRIES = 1000
BATCH_CHUNK = 20_000


def make_rng(seed: int | None = None) -> np.random.Generator:
    """PCG64 stream; the same seed gives the same stream on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


# -- fixed point helpers ----------------------------------------------------


def _log2_abs(c: Fraction) -> int:
    """log2 of |c| for c != 0, within one unit."""
    return c.numerator.bit_length() - c.denominator.bit_length()


def _scaled_floats(coeffs: Sequence[Fraction]) -> list[float]:
    """Doubles of ``coeffs`` times a common power of two (largest near 1)."""
    top = _max_log2(coeffs)
    scale = Fraction(2) ** -top
    return [float(c * scale) for c in coeffs]


def _to_fixed(coeffs: Sequence[Fraction], shift: int) -> list[int]:
    out = []
    for c in coeffs:
        num, den = c.numerator, c.denominator
        if shift >= 0:
            out.append((num << shift) // den)
        else:
            out.append(num // (den << -shift))
    return out


def _max_log2(coeffs: Sequence[Fraction]) -> int:
    return max((_log2_abs(c) for c in coeffs if c), default=0)


def _cancellation_bits(p: Polynomial) -> int:
    """log2 of (sum |c_i|) / (integral over [0,1]); 0 when well conditioned."""
    total = sum((abs(c) for c in p.coeffs), Fraction(0))
    integral = sum((c / (i + 1) for i, c in enumerate(p.coeffs)), Fraction(0))
    if integral <= 0 or total == 0:
        return 0
    ratio = total / integral
    return max(0, ratio.numerator.bit_length() - ratio.denominator.bit_length())


@dataclass
class _FixedFactor:
    """Exact univariate polynomial with memoized fixed-point images."""

    poly: Polynomial
    cache: dict

    def ints(self, width: int) -> tuple[list[int], int]:
        """Integers ``c_i * 2**shift`` with the largest about ``2**width``."""
        hit = self.cache.get(width)
        if hit is None:
            shift = width - _max_log2(self.poly.coeffs)
            hit = (_to_fixed(self.poly.coeffs, shift), shift)
            self.cache[width] = hit
        return hit


def _grid(x: float, up: bool) -> int:
    v = x * (1 << GRID_BITS)  # exact: scaling by a power of two
    return math.ceil(v) if up else math.floor(v)


def _fixed_invert(factors: Sequence[_FixedFactor], lo: float, hi: float, u: float, tol: float,
                  width: int) -> tuple[float, float]:
    """Inverse CDF of the product of ``factors`` on ``[lo, hi]`` in fixed point.

    Returns ``(t, normalized density at t)``. Precision is raised until the
    mass has :data:`TARGET_BITS` significant bits above the rounding noise.
    """
    lo_m, hi_m = _grid(lo, True), _grid(hi, False)
    if lo_m >= hi_m:
        return lo, 0.0
    for _ in range(8):
        prod = factors[0].ints(width)[0]
        for f in factors[1:]:
            ints = f.ints(width)[0]
            out = [0] * (len(prod) + len(ints) - 1)
            for i, a in enumerate(prod):
                if a:
                    for j, b in enumerate(ints):
                        out[i + j] += a * b
            prod = [c >> width for c in out]
        deg = len(prod) - 1
        guard = deg.bit_length() + 8
        anti = [0] + [(c << guard) // (i + 1) for i, c in enumerate(prod)]
        cdf = kernels.FixedPoly(anti, GRID_BITS)
        f_lo = cdf.value(lo_m)
        mass = cdf.value(hi_m) - f_lo
        noise = (deg + 2) * (len(factors) + 2) << guard
        have = mass.bit_length() if mass > 0 else 0
        need = noise.bit_length() + TARGET_BITS
        if mass > 0 and have >= need:
            break
        width += max(need - have, 0) + 64
    else:
        raise DensityError("fixed-point density has no positive mass at any precision")
    target = f_lo + ((mass * int(u * (1 << 53))) >> 53)
    tol_m = max(1, int(tol * (1 << GRID_BITS)))
    m = cdf.invert(lo_m, hi_m, target, tol_m)
    t = m / (1 << GRID_BITS)
    dens = kernels.FixedPoly([c << guard for c in prod], GRID_BITS).value(m)
    # density at t relative to its mean value on the interval
    return t, dens * (hi - lo) / mass


def sample_from_polynomial_density(p: Polynomial, interval=(0.0, 1.0), rng=None,
                                   tol: float = DEFAULT_TOL) -> float:
    """Draw from the density proportional to ``p`` on ``interval``.

    Bisection on the CDF to absolute tolerance ``tol``; double precision
    when safe, fixed point otherwise.
    """
    rng = rng if rng is not None else make_rng()
    lo, hi = float(interval[0]), float(interval[1])
    if hi < lo:
        raise DensityError(f"empty interval [{lo}, {hi}]")
    u = rng.random()
    t = None
    if p.is_zero() or _cancellation_bits(p) <= 20:
        t = _double_or_none(_scaled_floats(p.coeffs), lo, hi, u, tol)
    if t is None:
        width = _cancellation_bits(p) + TARGET_BITS + 16
        t, dens = _fixed_invert([_FixedFactor(p, {})], lo, hi, u, tol, width)
        _alarm(dens)
    return t


def _min_rel_mass(terms: int) -> float:
    # keeps the CDF's relative rounding error below about 2**-30
    return (terms + 1) * 2.0**-21


def _alarm(normalized_density: float):
    if normalized_density < NEGATIVE_DENSITY_ALARM:
        raise DensityError(f"density is negative ({normalized_density:.3g}) at a sampled point")


def _double_or_none(coeffs: list[float], lo, hi, u, tol):
    if not coeffs:
        raise DensityError("density is identically zero")
    t, mass, dens, scale = kernels.cdf_invert_double(coeffs, lo, hi, u, tol, _min_rel_mass(len(coeffs)))
    if math.isnan(t):
        if scale == 0.0 or (mass <= 0 and mass < -_min_rel_mass(len(coeffs)) * scale):
            raise DensityError(f"density has non-positive mass {mass:.3g} on [{lo}, {hi}]")
        return None
    if hi > lo:
        _alarm(dens * (hi - lo) / mass)
    return t


# -- per-level sampling plans -----------------------------------------------


@dataclass
class _TermTable:
    """Float image of a multivariate polynomial, collapsed onto one variable."""

    coefs: list[float]
    powers: list[int]
    outer: list[tuple[int, ...]]
    degree: int
    exact: MultivariatePolynomial
    var: str

    @classmethod
    def build(cls, poly: MultivariatePolynomial, var: str) -> "_TermTable":
        k = poly.index(var)
        items = sorted(poly.terms.items())
        # common power-of-two rescaling keeps tiny coefficients representable
        coefs = _scaled_floats([c for _, c in items])
        powers, outer = [], []
        for e, c in items:
            powers.append(e[k])
            outer.append(tuple(0 if i == k else x for i, x in enumerate(e)))
        return cls(coefs, powers, outer, max(powers, default=0), poly, var)

    def collapse(self, values: list[float]) -> list[float]:
        return kernels.collapse_terms(self.coefs, self.powers, self.outer, values, self.degree)

    def collapse_exact(self, symbols, values: list[float]) -> Polynomial:
        env = {s: Fraction(v) for s, v in zip(symbols, values)}
        return self.exact.to_univariate(self.var, env)


@dataclass
class _LayerPlan:
    index: int
    var: str
    lower: int | float  # symbol index into the value vector, or a constant
    upper: int | float
    table: _TermTable
    chain: _FixedFactor | None = None  # p_k for the chain layer
    chain_float: list[float] | None = None
    chain_width: int = 0


class SamplingPlan:
    """Everything the sampler needs from a tower, prepared level by level."""

    def __init__(self, tower: DensityTower):
        self.tower = tower
        self.spec: BlockSpec = tower.block
        self.symbols = self.spec.symbols
        self._levels: dict[int, list[_LayerPlan]] = {}
        self._polys: dict[int, _FixedFactor] = {}
        self._poly_floats: dict[int, list[float] | None] = {}
        self._widths: dict[int, int] = {}
        sym_index = {s: i for i, s in enumerate(self.symbols)}

        def bound(b):
            return sym_index[b.value] if b.is_var else float(b.value)

        self._bounds = [(bound(v.lower), bound(v.upper)) for v in self.spec.vars]
        self._inner_tables = {
            j: _TermTable.build(self.tower.inner[j + 1], v.name)
            for j, v in enumerate(self.spec.vars)
            if j + 1 in self.tower.inner
        }

    def poly(self, k: int) -> _FixedFactor:
        if k not in self._polys:
            self._polys[k] = _FixedFactor(self.tower.polys[k], {})
        return self._polys[k]

    def poly_floats(self, k: int) -> list[float] | None:
        """Rescaled doubles of ``p_k`` when it is well conditioned, else None."""
        if k not in self._poly_floats:
            p = self.tower.polys[k]
            self._poly_floats[k] = None if _cancellation_bits(p) > 20 else _scaled_floats(p.coeffs)
        return self._poly_floats[k]

    def width(self, k: int) -> int:
        """Starting fixed-point precision for densities involving ``p_k``."""
        if k not in self._widths:
            self._widths[k] = _cancellation_bits(self.tower.polys[k]) + TARGET_BITS + 16
        return self._widths[k]

    def level(self, k: int) -> list[_LayerPlan]:
        if k not in self._levels:
            if k >= self.tower.depth:
                raise UsageError(f"tower depth {self.tower.depth} is too shallow for block {k}")
            c = self.spec.chain_index
            plans = []
            for j, v in enumerate(self.spec.vars):
                lo, hi = self._bounds[j]
                if j >= c:
                    table = self._inner_tables[j]
                else:
                    table = _TermTable.build(self.tower.outer[k][j + 1], v.name)
                plan = _LayerPlan(j, v.name, lo, hi, table)
                if j == c:
                    plan.chain = self.poly(k)
                    plan.chain_float = self.poly_floats(k)
                    plan.chain_width = self.width(k)
                plans.append(plan)
            self._levels[k] = plans
        return self._levels[k]


def plan_for(tower: DensityTower) -> SamplingPlan:
    plan = getattr(tower, "_sampling_plan", None)
    if plan is None or plan.tower is not tower:
        plan = SamplingPlan(tower)
        tower._sampling_plan = plan
    return plan


def _convolve_float(a: list[float], b: list[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _sample_layer(plan: SamplingPlan, lp: _LayerPlan, values: list[float], rng, tol) -> float:
    lo = values[lp.lower] if isinstance(lp.lower, int) else lp.lower
    hi = values[lp.upper] if isinstance(lp.upper, int) else lp.upper
    if hi < lo:
        if lo - hi > 1e-12:
            raise DensityError(f"empty interval for {lp.var}: [{lo}, {hi}]")
        hi = lo
    u = rng.random()  # drawn even for a point interval, keeping streams aligned
    if hi == lo:
        return lo
    if lp.chain is None or lp.chain_float is not None:
        dens = lp.table.collapse(values)
        if lp.chain_float is not None:
            dens = _convolve_float(lp.chain_float, dens)
        t = _double_or_none(dens, lo, hi, u, tol)
        if t is not None:
            return t
    exact = _FixedFactor(lp.table.collapse_exact(plan.symbols, values), {})
    factors = [lp.chain, exact] if lp.chain is not None else [exact]
    width = max(lp.chain_width, TARGET_BITS + 16)
    t, dens = _fixed_invert(factors, lo, hi, u, tol, width)
    _alarm(dens)
    return t


def sample_block(tower: DensityTower, k: int, z: float, rng, tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Fill block ``k`` given its interface value ``z``; returns ``{var: value}``."""
    plan = plan_for(tower)
    if not 0.0 <= z <= 1.0:
        raise UsageError(f"interface value {z} outside [0, 1]")
    values = [0.0] * len(plan.symbols)
    values[0] = z
    for lp in plan.level(k):
        values[lp.index + 1] = _sample_layer(plan, lp, values, rng, tol)
    return dict(zip(plan.spec.names, values[1:]))


def sample_top(tower: DensityTower, n: int, rng, tol: float = DEFAULT_TOL) -> float:
    """Interface value of the top block, with density ``p_n`` on [0, 1]."""
    plan = plan_for(tower)
    if n == 0:
        return rng.random()
    floats = plan.poly_floats(n)
    u = rng.random()
    if floats is not None:
        t = _double_or_none(floats, 0.0, 1.0, u, tol)
        if t is not None:
            return t
    t, dens = _fixed_invert([plan.poly(n)], 0.0, 1.0, u, tol, plan.width(n))
    _alarm(dens)
    return t


@dataclass
class CellAssignment:
    """Sampled reals per element, the filling they rank to, and cell positions."""

    values: dict
    filling: dict
    cells: dict | None = None
    ties: int = 0

    def by_cell(self) -> dict:
        if self.cells is None:
            raise UsageError("this model has no geometry")
        return {self.cells[e]: lab for e, lab in self.filling.items()}


def _rank(values: Mapping) -> dict:
    order = sorted(values, key=values.__getitem__)
    return {e: i + 1 for i, e in enumerate(order)}


def sample_polyomino(tower: DensityTower, n: int, rng, tol: float = DEFAULT_TOL) -> CellAssignment:
    """One uniform filling of the ``n``-block shape."""
    if n > tower.depth:
        raise UsageError(f"tower depth {tower.depth} < n = {n}")
    spec = tower.block
    cells = element_cells(spec, n)
    for attempt in range(MAX_TIE_RETRIES):
        z = sample_top(tower, n, rng, tol)
        values = {("node", n): z}
        for k in range(n - 1, -1, -1):
            block = sample_block(tower, k, z, rng, tol)
            for var, val in block.items():
                values[element_name(spec, var, k)] = val
            z = block[spec.chain]
        if len(set(values.values())) == len(values):
            return CellAssignment(values, _rank(values), cells, attempt)
    raise CapacityError("could not avoid ties between sampled values")



# -- vectorized batches ------------------------------------------------------


def _batch_layer_density(table: _TermTable, values: np.ndarray) -> np.ndarray:
    """Per-row univariate coefficients of ``table`` (rows of ``values``)."""
    coefs = np.asarray(table.coefs)
    outer = np.asarray(table.outer, dtype=np.int64)
    terms = np.tile(coefs, (values.shape[0], 1))
    for s in range(outer.shape[1]):
        col = outer[:, s]
        if col.any():
            terms *= values[:, s : s + 1] ** col
    onehot = np.zeros((len(coefs), table.degree + 1))
    onehot[np.arange(len(coefs)), table.powers] = 1.0
    return terms @ onehot


def _batch_horner(cs: np.ndarray, x: np.ndarray) -> np.ndarray:
    acc = np.zeros(cs.shape[0])
    for i in range(cs.shape[1] - 1, -1, -1):
        acc = acc * x + cs[:, i]
    return acc


def _batch_invert(dens: np.ndarray, lo: np.ndarray, hi: np.ndarray, u: np.ndarray, tol: float):
    """Vectorized twin of the double kernel; NaN marks rows needing exact work."""
    d = dens.shape[1]
    w = hi - lo
    r = np.maximum(np.abs(lo), np.abs(hi))
    size = _batch_horner(np.abs(dens), r)
    scale = w * size
    shifted = dens.copy()
    for i in range(d - 1):
        for j in range(d - 2, i - 1, -1):
            shifted[:, j] += lo * shifted[:, j + 1]
    anti = np.zeros((dens.shape[0], d + 1))
    anti[:, 1:] = shifted / np.arange(1, d + 1)
    mass = _batch_horner(anti, w)
    good = mass > _min_rel_mass(d) * scale
    target = u * mass
    a, b = np.zeros_like(w), w.copy()
    steps = int(math.ceil(math.log2(max(float(w.max(initial=0.0)), tol) / tol))) + 1
    for _ in range(steps):
        mid = 0.5 * (a + b)
        below = _batch_horner(anti, mid) < target
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    s = 0.5 * (a + b)
    t = np.clip(lo + s, lo, hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = _batch_horner(shifted, s) * w / mass
    if np.any(good & (rel < NEGATIVE_DENSITY_ALARM)):
        raise DensityError("density is negative at a sampled point")
    return np.where(good, t, np.nan)


def _batch_layer(plan: SamplingPlan, lp: _LayerPlan, values: np.ndarray, u: np.ndarray, tol) -> np.ndarray:
    rows = values.shape[0]
    lo = values[:, lp.lower] if isinstance(lp.lower, int) else np.full(rows, lp.lower)
    hi = values[:, lp.upper] if isinstance(lp.upper, int) else np.full(rows, lp.upper)
    if np.any(lo - hi > 1e-12):
        raise DensityError(f"empty interval for {lp.var}")
    hi = np.maximum(hi, lo)
    out = np.full(rows, np.nan)
    live = hi > lo
    out[~live] = lo[~live]
    if lp.chain is None or lp.chain_float is not None:
        dens = _batch_layer_density(lp.table, values[live])
        if lp.chain_float is not None:
            pk = lp.chain_float
            conv = np.zeros((dens.shape[0], dens.shape[1] + len(pk) - 1))
            for i, c in enumerate(pk):
                conv[:, i : i + dens.shape[1]] += c * dens
            dens = conv
        out[live] = _batch_invert(dens, lo[live], hi[live], u[live], tol)
    for i in np.flatnonzero(np.isnan(out)):
        exact = _FixedFactor(lp.table.collapse_exact(plan.symbols, list(values[i])), {})
        factors = [lp.chain, exact] if lp.chain is not None else [exact]
        t, dens_t = _fixed_invert(factors, float(lo[i]), float(hi[i]), float(u[i]), tol,
                                  max(lp.chain_width, TARGET_BITS + 16))
        _alarm(dens_t)
        out[i] = t
    return out


def _batch_values(tower: DensityTower, n: int, size: int, rng, tol) -> np.ndarray:
    plan = plan_for(tower)
    spec = plan.spec
    elements = block_elements(spec, n)
    col = {e: i for i, e in enumerate(elements)}
    out = np.empty((size, len(elements)))
    u = rng.random((size, 1 + n * len(spec.vars)))
    if n == 0:
        out[:, 0] = u[:, 0]
        return out
    top = _LayerPlan(-1, spec.interface, 0.0, 1.0, _TermTable.build(
        MultivariatePolynomial.constant(plan.symbols, 1), spec.interface))
    top.chain, top.chain_float, top.chain_width = plan.poly(n), plan.poly_floats(n), plan.width(n)
    z = _batch_layer(plan, top, np.zeros((size, len(plan.symbols))), u[:, 0], tol)
    out[:, col[("node", n)]] = z
    draw = 1
    for k in range(n - 1, -1, -1):
        values = np.zeros((size, len(plan.symbols)))
        values[:, 0] = z
        for lp in plan.level(k):
            values[:, lp.index + 1] = _batch_layer(plan, lp, values, u[:, draw], tol)
            draw += 1
            out[:, col[element_name(spec, lp.var, k)]] = values[:, lp.index + 1]
        z = values[:, spec.chain_index + 1]
    return out


def sample_polyomino_batch(tower: DensityTower, n: int, size: int, rng,
                           tol: float = DEFAULT_TOL) -> np.ndarray:
    """``size`` independent uniform fillings at once, as a label matrix.

    Row ``i`` holds the labels of sample ``i`` with columns in
    :func:`block_elements` order. Uniforms are consumed in the same order
    as by repeated :func:`sample_polyomino` calls, so both give the same
    samples for the same seed unless a tie forces a redraw.
    """
    if n > tower.depth:
        raise UsageError(f"tower depth {tower.depth} < n = {n}")
    chunks = [_batch_values(tower, n, min(BATCH_CHUNK, size - i), rng, tol)
              for i in range(0, size, BATCH_CHUNK)]
    values = np.concatenate(chunks) if chunks else np.empty((0, len(block_elements(tower.block, n))))
    for _ in range(MAX_TIE_RETRIES):
        srt = np.sort(values, axis=1)
        tied = np.flatnonzero((np.diff(srt, axis=1) == 0).any(axis=1))
        if not len(tied):
            return np.argsort(np.argsort(values, axis=1), axis=1) + 1
        values[tied] = _batch_values(tower, n, len(tied), rng, tol)
    raise CapacityError("could not avoid ties between sampled values")


BOTTOM = ("node", 0)


def sample_tableau_rejection(tower: DensityTower, n: int, rng, max_attempts: int = 10**6,
                             tol: float = DEFAULT_TOL) -> tuple[CellAssignment, int]:
    """Uniform filling of the shape without its bottom cell, by rejection.

    Polyomino samples are kept only when the bottom cell holds label 1;
    that cell is then dropped and the others relabelled ``1..N-1``.
    Returns the sample and the number of attempts used.
    """
    if n < 1:
        raise UsageError("the tableau needs n >= 1")
    for attempt in range(1, max_attempts + 1):
        s = sample_polyomino(tower, n, rng, tol)
        if s.filling[BOTTOM] == 1:
            filling = {e: lab - 1 for e, lab in s.filling.items() if e != BOTTOM}
            values = {e: v for e, v in s.values.items() if e != BOTTOM}
            cells = None
            if s.cells is not None:
                cells = {e: c for e, c in s.cells.items() if e != BOTTOM}
            return CellAssignment(values, filling, cells, s.ties), attempt
    raise CapacityError(f"no acceptable sample within {max_attempts} attempts")


class Sampler:
    """A seeded stream of samples sharing one (read-only) tower."""

    def __init__(self, tower: DensityTower, seed: int | None = None, tol: float = DEFAULT_TOL):
        self.tower = tower
        self.seed = seed
        self.rng = make_rng(seed)
        self.tol = tol
        self.attempts = 0
        self.accepted = 0

    def polyomino(self, n: int) -> CellAssignment:
        return sample_polyomino(self.tower, n, self.rng, self.tol)

    def tableau(self, n: int, max_attempts: int = 10**6) -> CellAssignment:
        s, used = sample_tableau_rejection(self.tower, n, self.rng, max_attempts, self.tol)
        self.attempts += used
        self.accepted += 1
        return s


def is_linear_extension(poset: Poset, filling: Mapping) -> bool:
    labels = [filling[e] for e in poset.elements]
    if sorted(labels) != list(range(1, len(labels) + 1)):
        return False
    return all(labels[a] < labels[b] for a, b in poset.relations)


# -- two-column shapes with random vertical walls ----------------------------


def _path_weights(n: int) -> list[dict[int, int]]:
    """``W[i][a]``: weighted completions from step ``i`` at altitude ``a``.

    A down step ending at altitude ``>= 0`` may be red or blue, one ending
    below the axis must be red.
    """
    size = 2 * n
    weights = [dict() for _ in range(size + 1)]
    weights[size][0] = 1
    for i in range(size - 1, -1, -1):
        for a in range(-i, i + 1):
            up = weights[i + 1].get(a + 1, 0)
            down = weights[i + 1].get(a - 1, 0) * (2 if a - 1 >= 0 else 1)
            if up or down:
                weights[i][a] = up + down
    return weights


def _randbelow(rng, total: int) -> int:
    """Uniform integer in ``[0, total)``, also beyond 64 bits."""
    if total < 1 << 62:
        return int(rng.integers(total))
    bits = total.bit_length()
    words = (bits + 31) // 32
    while True:
        x = 0
        for w in rng.integers(0, 1 << 32, size=words, dtype=np.uint64):
            x = (x << 32) | int(w)
        x >>= 32 * words - bits
        if x < total:
            return x


def sample_coloured_path(n: int, rng) -> ColouredPath:
    """Uniform coloured bridge of length ``2n``.

    Through the colouring bijection this is a uniform pair (set of vertical
    walls, filling) on the ``n x 2`` shape.
    """
    if n < 1:
        raise UsageError("n must be positive")
    weights = _path_weights(n)
    steps, a = [], 0
    for i in range(2 * n):
        total = weights[i][a]
        pick = _randbelow(rng, total)
        up = weights[i + 1].get(a + 1, 0)
        if pick < up:
            steps.append(UP)
            a += 1
            continue
        pick -= up
        share = weights[i + 1].get(a - 1, 0)
        steps.append(RED if a - 1 < 0 or pick < share else BLUE)
        a -= 1
    return ColouredPath(tuple(steps))


def sample_wall_counts(n: int, size: int, rng) -> list[int]:
    """Number of vertical walls in ``size`` uniform walled ``n x 2`` tableaux."""
    return [sample_coloured_path(n, rng).red_count for _ in range(size)]


# -- output ----------------------------------------------------------------------


def _element_label(e) -> str:
    name, k = e
    return f"{name}@{k}"


def sample_record(model: str, n: int, seed, sample: CellAssignment, shape: ShapeSpec | None,
                  kind: str = "polyomino") -> dict:
    """JSON-ready record; ``labels`` lists grid rows bottom to top, ``None`` off the shape."""
    rec = {"model": model, "n": n, "seed": seed, "kind": kind}
    if shape is None or sample.cells is None:
        rec["labels"] = {_element_label(e): lab for e, lab in sorted(sample.filling.items(), key=str)}
        rec["walls"] = []
        return rec
    by_cell = sample.by_cell()
    rows = [r for r, _ in by_cell]
    cols = [c for _, c in by_cell]
    rec["row_offset"] = min(rows)
    rec["labels"] = [
        [by_cell.get((r, c)) for c in range(min(cols), max(cols) + 1)]
        for r in range(min(rows), max(rows) + 1)
    ]
    rec["walls"] = shape.to_json()["walls"]
    return rec


def render_ascii(shape: ShapeSpec, by_cell: Mapping) -> str:
    """Grid picture, top row first; ``|`` and ``---`` mark walls."""
    rows = [r for r, _ in shape.cells]
    cols = [c for _, c in shape.cells]
    width = len(str(max(by_cell.values())))
    c0, c1 = min(cols), max(cols)
    lines = []
    for r in range(max(rows), min(rows) - 1, -1):
        if r < max(rows):
            seps = []
            for c in range(c0, c1 + 1):
                wall = shape.has_wall((r, c), "up")
                seps.append(("-" * width if wall else " " * width) + "   ")
            lines.append("".join(seps).rstrip())
        parts = []
        for c in range(c0, c1 + 1):
            lab = by_cell.get((r, c))
            parts.append(" " * width if lab is None else f"{lab:>{width}}")
            if c < c1:
                parts.append(" | " if shape.has_wall((r, c), "right") else "   ")
        lines.append("".join(parts).rstrip())
    return "\n".join(line for line in lines)
