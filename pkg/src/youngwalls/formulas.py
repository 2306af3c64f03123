"""Closed-form counts for tableaux with walls, and the path colouring bijection."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterable, Mapping, Sequence

from .errors import ConsistencyError, UsageError
from .shapes import ShapeSpec

# -- primitives -------------------------------------------------------------


def _nonneg(n: int, what: str = "n"):
    if n < 0:
        raise UsageError(f"{what} must be non-negative, got {n}")


def binomial(n: int, k: int) -> int:
    _nonneg(n)
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def multinomial(n: int, parts: Sequence[int]) -> int:
    """Shortened multinomial ``n! / (m_1! ... m_k! (n - sum m)!)``."""
    _nonneg(n)
    if any(m < 0 for m in parts) or sum(parts) > n:
        raise UsageError(f"parts {list(parts)} do not fit in {n}")
    out = factorial(n) // factorial(n - sum(parts))
    for m in parts:
        out //= factorial(m)
    return out


def falling_factorial(n: int, k: int) -> int:
    _nonneg(k, "k")
    return prod(range(n - k + 1, n + 1))


def double_factorial(n: int) -> int:
    """``n!!``; for odd ``n = 2m-1`` this is ``(2m)! / (2^m m!)``."""
    if n < -1:
        raise UsageError("double factorial needs n >= -1")
    return prod(range(n, 0, -2))


def catalan(n: int) -> int:
    _nonneg(n)
    return comb(2 * n, n) // (n + 1)


def _exact(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ConsistencyError(f"{what} evaluated to the non-integer {value}")
    return value.numerator


# -- two columns, section on vertical walls --------------------------------


def two_col_intro_count(n: int, pattern: str) -> int:
    if n < 1:
        raise UsageError("n must be positive")
    f2n = factorial(2 * n)
    if pattern == "walls-everywhere":
        return f2n
    if pattern == "horizontal-everywhere":
        return f2n // 2**n
    if pattern == "one-column-horizontal":
        return double_factorial(2 * n - 1)
    if pattern == "vertical-everywhere":
        return comb(2 * n, n)
    if pattern == "no-walls":
        return catalan(n)
    raise UsageError(f"unknown pattern {pattern!r}")


def _check_k(n: int, k: int):
    if n < 0 or not 0 <= k <= n:
        raise UsageError(f"need 0 <= k <= n, got n={n}, k={k}")


def vertical_walls_count(n: int, k: int) -> int:
    """Tableaux of shape ``n x 2`` carrying exactly ``k`` vertical walls.

    Wall positions are summed over: this counts pairs (wall rows, filling).
    The count for one fixed choice of rows does depend on the rows; only
    its average is :func:`avg_extensions_random_walls`.
    """
    _check_k(n, k)
    return _exact(Fraction(comb(n, k) * comb(2 * n, n), n + 1 - k), "v(n,k)")


def avg_extensions_random_walls(n: int, k: int) -> Fraction:
    _check_k(n, k)
    return Fraction(comb(2 * n, n), n + 1 - k)


def wall_count_pmf(n: int) -> list[Fraction]:
    """Distribution of the number of vertical walls of a uniform tableau."""
    if n < 1:
        raise UsageError("n must be positive")
    total = 2 ** (n + 1) - 1
    return [Fraction(comb(n + 1, k), total) for k in range(n + 1)]


# -- Chung-Feller colouring ------------------------------------------------

UP, RED, BLUE = "U", "R", "B"


@dataclass(frozen=True)
class ColouredPath:
    """Bridge of up steps and red/blue down steps, starting at altitude 0."""

    steps: tuple[str, ...]

    def __post_init__(self):
        alt = 0
        for s in self.steps:
            if s == UP:
                alt += 1
            elif s in (RED, BLUE):
                alt -= 1
                if alt < 0 and s != RED:
                    raise UsageError("down steps below the axis must be red")
            else:
                raise UsageError(f"unknown step {s!r}")
        if alt != 0:
            raise UsageError("path does not return to altitude 0")

    @property
    def red_count(self) -> int:
        return self.steps.count(RED)

    def __str__(self):
        return "".join(self.steps)


def _two_column_rows(shape: ShapeSpec) -> int:
    if shape.cols != 2 or shape.extra_cells:
        raise UsageError("bijection needs a plain n x 2 shape")
    if any(d != "right" for _, d in shape.walls):
        raise UsageError("bijection handles vertical walls only")
    return shape.rows


def tableau_to_coloured_path(shape: ShapeSpec, filling: Mapping) -> ColouredPath:
    n = _two_column_rows(shape)
    column_of = {}
    for (r, c), label in filling.items():
        column_of[label] = (r, c)
    steps = []
    for m in range(1, 2 * n + 1):
        r, c = column_of[m]
        if c == 0:
            steps.append(UP)
        else:
            steps.append(RED if shape.has_wall((r, 0), "right") else BLUE)
    return ColouredPath(tuple(steps))


def path_to_tableau(path: ColouredPath) -> tuple[ShapeSpec, dict]:
    n = len(path.steps) // 2
    left = [m for m, s in enumerate(path.steps, 1) if s == UP]
    right = [(m, s) for m, s in enumerate(path.steps, 1) if s != UP]
    filling = {}
    walls = set()
    for r in range(n):
        filling[(r, 0)] = left[r]
        m, colour = right[r]
        filling[(r, 1)] = m
        if colour == RED:
            walls.add(((r, 0), "right"))
    return ShapeSpec(n, 2, walls=frozenset(walls)), filling


# -- walls in the first columns --------------------------------------------


def lemma_fillings_count(n: int, lam: int) -> int:
    if not 1 <= lam <= n:
        raise UsageError(f"need 1 <= lambda <= n, got {lam}, {n}")
    return comb(2 * n, lam) - comb(2 * n, lam - 1)


def lemma_fillings_count_rewritten(n: int, lam: int) -> Fraction:
    if not 1 <= lam <= n:
        raise UsageError(f"need 1 <= lambda <= n, got {lam}, {n}")
    return Fraction(2 * (n - lam) + 1, 2 * n + 1) * comb(2 * n + 1, lam)


@dataclass(frozen=True)
class HeightList:
    """Wall heights ``0 < h_1 < ... < h_k < n``."""

    n: int
    heights: tuple[int, ...] = ()

    def __post_init__(self):
        hs = tuple(int(h) for h in self.heights)
        object.__setattr__(self, "heights", hs)
        if self.n < 1:
            raise UsageError("n must be positive")
        if any(not 0 < h < self.n for h in hs) or any(a >= b for a, b in zip(hs, hs[1:])):
            raise UsageError(f"invalid heights {hs} for n={self.n}")

    @property
    def gaps(self) -> list[int]:
        hs = (0,) + self.heights + (self.n,)
        return [b - a for a, b in zip(hs, hs[1:])]

    @property
    def cumulative(self) -> list[int]:
        return list(self.heights) + [self.n]


def _heights(n, heights) -> HeightList:
    return heights if isinstance(heights, HeightList) else HeightList(n, tuple(heights))


def first_column_walls_count(n: int, heights: Iterable[int] | HeightList) -> int:
    hl = _heights(n, heights)
    hs = [0] + hl.cumulative
    num = prod(comb(2 * hs[i] + 1, hs[i] - hs[i - 1]) for i in range(1, len(hs)))
    return _exact(Fraction(num, 2 * n + 1), "first-column count")


def multi_column_walls_count(n: int, m: int, heights: Iterable[int] | HeightList) -> int:
    if m < 2:
        raise UsageError("need at least two columns")
    hl = _heights(n, heights)
    value = Fraction(factorial(m - 1), falling_factorial(m * n + m - 1, m - 1))
    for lam, h in zip(hl.gaps, hl.cumulative):
        for j in range(1, m - 1):
            value /= comb(lam + j, j)
        value *= multinomial(m * h + m - 1, [lam] * (m - 1))
    return _exact(value, "multi-column count")


def four_column_walls_count(n: int, heights: Iterable[int] | HeightList) -> int:
    """The explicit ``n x 4`` special case, kept as a separate cross-check."""
    hl = _heights(n, heights)
    value = Fraction(6, (4 * n + 3) * (4 * n + 2) * (4 * n + 1))
    for lam, h in zip(hl.gaps, hl.cumulative):
        value *= Fraction(2, (lam + 1) ** 2 * (lam + 2))
        value *= multinomial(4 * h + 3, [lam, lam, lam])
    return _exact(value, "four-column count")


def every_row_walls_count(n: int, m: int) -> int:
    """Walls between all rows in every column but the last: ``(mn)!/(n! m!^n)``.

    ``m = 1`` (a single chain) gives 1.
    """
    if n < 1 or m < 1:
        raise UsageError("n and m must be positive")
    return factorial(m * n) // (factorial(n) * factorial(m) ** n)


# -- hook lengths ----------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing positive parts (row lengths of a Young diagram)."""

    parts: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", ps)
        if any(p <= 0 for p in ps) or any(a < b for a, b in zip(ps, ps[1:])):
            raise UsageError(f"not a partition: {ps}")

    @property
    def size(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))


def hook_length_count(shape: Partition | Sequence[int]) -> int:
    lam = shape if isinstance(shape, Partition) else Partition(tuple(shape))
    conj = lam.conjugate().parts
    hooks = 1
    for i, row in enumerate(lam.parts):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return factorial(lam.size) // hooks


def split_product_count(n: int, parts: Sequence[Partition | Sequence[int]]) -> int:
    """Fillings of a shape cut by walls into independent Young diagrams."""
    ps = [p if isinstance(p, Partition) else Partition(tuple(p)) for p in parts]
    sizes = [p.size for p in ps]
    if sum(sizes) != n:
        raise UsageError(f"part sizes {sizes} do not add up to {n}")
    return multinomial(n, sizes) * prod(hook_length_count(p) for p in ps)
