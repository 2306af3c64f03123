"""Grid shapes with walls, their posets, and the brute-force oracle.

Coordinates are ``(row, col)`` with row 0 at the bottom. Labels must
increase rightwards along rows and upwards along columns, except across a
wall, where the constraint is simply dropped.

A wall is stored as ``(cell, direction)``: ``"up"`` is the edge between
``cell`` and the cell above it, ``"right"`` the edge to its right
neighbour.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import CapacityError, UsageError

Cell = tuple[int, int]
Wall = tuple[Cell, str]
Filling = dict  # element (cell) -> label in 1..N

DIRECTIONS = {"up": (1, 0), "right": (0, 1)}
ORACLE_MAX_SIZE = 26


def neighbour(cell: Cell, direction: str) -> Cell:
    dr, dc = DIRECTIONS[direction]
    return (cell[0] + dr, cell[1] + dc)


@dataclass(frozen=True)
class ShapeSpec:
    """A ``rows x cols`` rectangle, optionally extended by extra cells, plus walls."""

    rows: int
    cols: int
    extra_cells: frozenset = frozenset()
    walls: frozenset = frozenset()
    cells: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or (self.rows == 0) != (self.cols == 0):
            raise UsageError(f"bad dimensions {self.rows}x{self.cols}")
        extra = frozenset((int(r), int(c)) for r, c in self.extra_cells)
        walls = frozenset(((int(c[0]), int(c[1])), d) for c, d in self.walls)
        object.__setattr__(self, "extra_cells", extra)
        object.__setattr__(self, "walls", walls)
        cells = {(r, c) for r in range(self.rows) for c in range(self.cols)} | extra
        if not cells:
            raise UsageError("shape has no cells")
        object.__setattr__(self, "cells", tuple(sorted(cells)))
        for cell, d in walls:
            if d not in DIRECTIONS:
                raise UsageError(f"wall direction must be 'up' or 'right', got {d!r}")
            if cell not in cells or neighbour(cell, d) not in cells:
                raise UsageError(f"wall {cell}/{d} does not join two cells of the shape")
        if not _connected(cells):
            raise UsageError("cells do not form a connected region")

    @property
    def size(self) -> int:
        return len(self.cells)

    def has_wall(self, cell: Cell, direction: str) -> bool:
        return (cell, direction) in self.walls

    def without_cells(self, removed: Iterable[Cell]) -> "ShapeSpec":
        """Same walls, fewer cells; only valid for cells outside the rectangle."""
        removed = set(removed)
        if any(0 <= r < self.rows and 0 <= c < self.cols for r, c in removed):
            raise UsageError("can only remove extra cells")
        return ShapeSpec(self.rows, self.cols, self.extra_cells - removed, self.walls)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "extra_cells": [list(c) for c in sorted(self.extra_cells)],
            "walls": [{"cell": list(c), "dir": d} for c, d in sorted(self.walls)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ShapeSpec":
        try:
            return cls(
                int(data["rows"]),
                int(data["cols"]),
                frozenset(tuple(c) for c in data.get("extra_cells", [])),
                frozenset((tuple(w["cell"]), w["dir"]) for w in data.get("walls", [])),
            )
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed shape JSON: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ShapeSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _connected(cells: set) -> bool:
    start = next(iter(cells))
    seen = {start}
    todo = deque([start])
    while todo:
        r, c = todo.popleft()
        for nb in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class Poset:
    """Finite poset on ``elements`` given by cover pairs ``(a, b)`` meaning a < b.

    Relations are stored as index pairs into ``elements``.
    """

    elements: tuple
    relations: tuple

    def __post_init__(self):
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise UsageError("poset elements must be distinct")
        rels = tuple(sorted({(int(a), int(b)) for a, b in self.relations}))
        for a, b in rels:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise UsageError(f"bad relation {(a, b)}")
        object.__setattr__(self, "relations", rels)
        if _topological_order(n, rels) is None:
            raise UsageError("relations contain a cycle")

    @classmethod
    def from_pairs(cls, elements: Sequence[Hashable], pairs: Iterable[tuple]) -> "Poset":
        """Build from pairs of element names rather than indices."""
        idx = {e: i for i, e in enumerate(elements)}
        return cls(tuple(elements), tuple((idx[a], idx[b]) for a, b in pairs))

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls(tuple(range(n)), ())

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls(tuple(range(n)), tuple((i, i + 1) for i in range(n - 1)))

    @property
    def size(self) -> int:
        return len(self.elements)

    def predecessor_masks(self) -> list[int]:
        masks = [0] * self.size
        for a, b in self.relations:
            masks[b] |= 1 << a
        return masks


def _topological_order(n, rels):
    indeg = [0] * n
    succ = [[] for _ in range(n)]
    for a, b in rels:
        succ[a].append(b)
        indeg[b] += 1
    todo = deque(i for i in range(n) if not indeg[i])
    order = []
    while todo:
        i = todo.popleft()
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if not indeg[j]:
                todo.append(j)
    return order if len(order) == n else None


def build_poset(shape: ShapeSpec) -> Poset:
    """One cover relation per adjacent pair not separated by a wall."""
    cells = set(shape.cells)
    pairs = []
    for cell in shape.cells:
        for d in ("right", "up"):
            nb = neighbour(cell, d)
            if nb in cells and (cell, d) not in shape.walls:
                pairs.append((cell, nb))
    return Poset.from_pairs(shape.cells, pairs)


def _check_capacity(poset: Poset, max_size: int):
    if poset.size > max_size:
        raise CapacityError(
            f"{poset.size} elements exceed the brute-force limit of {max_size}; "
            "use the density method for this shape"
        )


def count_linear_extensions(poset: Poset, max_size: int = ORACLE_MAX_SIZE) -> int:
    """Number of linear extensions, by dynamic programming over downsets.

    Downsets are built level by level; only reachable ones are stored.
    """
    _check_capacity(poset, max_size)
    n = poset.size
    preds = poset.predecessor_masks()
    layer = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for ideal, ways in layer.items():
            for i in range(n):
                bit = 1 << i
                if not ideal & bit and preds[i] & ideal == preds[i]:
                    key = ideal | bit
                    nxt[key] = nxt.get(key, 0) + ways
        layer = nxt
    return layer.get((1 << n) - 1, 0)


def enumerate_fillings(poset: Poset, limit: int | None = 100_000) -> list[Filling]:
    """All linear extensions as fillings ``element -> label``.

    Order is lexicographic in the sequence of element indices receiving
    labels 1, 2, ...; raises :class:`CapacityError` above ``limit``.
    """
    _check_capacity(poset, ORACLE_MAX_SIZE)
    total = count_linear_extensions(poset)
    if limit is not None and total > limit:
        raise CapacityError(f"{total} fillings exceed the enumeration limit {limit}")
    n = poset.size
    preds = poset.predecessor_masks()
    out: list[Filling] = []
    seq: list[int] = []

    def rec(ideal):
        if len(seq) == n:
            out.append({poset.elements[i]: k + 1 for k, i in enumerate(seq)})
            return
        for i in range(n):
            bit = 1 << i
            if not ideal & bit and preds[i] & ideal == preds[i]:
                seq.append(i)
                rec(ideal | bit)
                seq.pop()

    rec(0)
    return out


def filling_key(filling: Mapping, elements: Sequence) -> tuple:
    """Labels listed in a fixed element order; hashable outcome identifier."""
    return tuple(filling[e] for e in elements)


def is_valid_filling(shape: ShapeSpec, filling: Mapping[Cell, int]) -> bool:
    """True iff every adjacency without a wall increases right- and upwards."""
    if set(filling) != set(shape.cells):
        raise UsageError("filling does not cover exactly the cells of the shape")
    if sorted(filling.values()) != list(range(1, shape.size + 1)):
        raise UsageError("labels must be a permutation of 1..N")
    for cell in shape.cells:
        for d in ("right", "up"):
            nb = neighbour(cell, d)
            if nb in filling and (cell, d) not in shape.walls and filling[cell] > filling[nb]:
                return False
    return True


# -- named shapes ---------------------------------------------------------

TWO_COLUMN_PATTERNS = (
    "walls-everywhere",
    "horizontal-everywhere",
    "one-column-horizontal",
    "vertical-everywhere",
    "no-walls",
)


def two_column_shape(n: int, pattern: str) -> ShapeSpec:
    """The five ``n x 2`` wall patterns.

    A "horizontal" wall is a horizontal edge (between a cell and the one
    above it); a "vertical" wall separates the two cells of a row.
    """
    if n < 1:
        raise UsageError("n must be positive")
    up = {((r, c), "up") for r in range(n - 1) for c in range(2)}
    right = {((r, 0), "right") for r in range(n)}
    walls = {
        "walls-everywhere": up | right,
        "horizontal-everywhere": up,
        "one-column-horizontal": {w for w in up if w[0][1] == 0},
        "vertical-everywhere": right,
        "no-walls": set(),
    }
    if pattern not in walls:
        raise UsageError(f"unknown pattern {pattern!r}; choose from {TWO_COLUMN_PATTERNS}")
    return ShapeSpec(n, 2, walls=frozenset(walls[pattern]))


def vertical_walls_shape(n: int, wall_rows: Iterable[int]) -> ShapeSpec:
    """``n x 2`` with a vertical wall in each listed row (0-based from the bottom)."""
    return ShapeSpec(n, 2, walls=frozenset(((r, 0), "right") for r in wall_rows))


def column_walls_shape(n: int, m: int, heights: Sequence[int]) -> ShapeSpec:
    """``n x m`` with horizontal walls in columns 1..m-1 at the given heights.

    Height ``h`` puts the wall between rows ``h`` and ``h+1`` counted from
    1 at the bottom. The last column has no walls.
    """
    if m < 1:
        raise UsageError("m must be positive")
    hs = list(heights)
    if any(not 0 < h < n for h in hs) or any(a >= b for a, b in zip(hs, hs[1:])):
        raise UsageError(f"heights must satisfy 0 < h_1 < ... < h_k < {n}, got {hs}")
    walls = {((h - 1, c), "up") for h in hs for c in range(m - 1)}
    return ShapeSpec(n, m, walls=frozenset(walls))


def every_row_walls_shape(n: int, m: int) -> ShapeSpec:
    return column_walls_shape(n, m, range(1, n))


def split_shape(n: int, h: int) -> ShapeSpec:
    """``n x 2`` cut by a full horizontal wall line between rows h and h+1."""
    if not 0 < h < n:
        raise UsageError("cut height must satisfy 0 < h < n")
    return ShapeSpec(n, 2, walls=frozenset(((h - 1, c), "up") for c in range(2)))


POLYOMINO_BOTTOM: Cell = (-1, 1)


def tableau_shape(n: int) -> ShapeSpec:
    """``2n x 3`` tableau with walls in the outer columns at every even height."""
    if n < 1:
        raise UsageError("n must be positive")
    walls = {((2 * k - 1, c), "up") for k in range(1, n) for c in (0, 2)}
    return ShapeSpec(2 * n, 3, walls=frozenset(walls))


def polyomino_shape(n: int) -> ShapeSpec:
    """The tableau above plus one cell under its middle column, at row -1.

    For ``n = 0`` this is the single bottom cell.
    """
    if n == 0:
        return ShapeSpec(0, 0, frozenset({POLYOMINO_BOTTOM}))
    t = tableau_shape(n)
    return ShapeSpec(t.rows, t.cols, frozenset({POLYOMINO_BOTTOM}), t.walls)
