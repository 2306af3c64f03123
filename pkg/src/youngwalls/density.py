"""The density method: polynomial towers for periodic shapes with walls.

A :class:`BlockSpec` lists the integration variables of one building block,
outermost first, each with a lower and an upper bound. Integrating the
previous polynomial (placed in the *chain* variable) through all layers
yields the next polynomial in the interface symbol ``z``:

    p_{k+1}(z) = integral over the block of p_k(chain),   p_0 = 1.

The number of fillings of the ``n``-block shape is ``N! * int_0^1 p_n``
with ``N = n * len(vars) + 1``.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Mapping

from .errors import ConsistencyError, UsageError
from .exactmath import (
    BoundRef,
    MultivariatePolynomial,
    Polynomial,
    definite_unit_integral,
    integrate_layer,
)
from .shapes import Poset

CACHE_VERSION = 1


@dataclass(frozen=True)
class BlockVar:
    name: str
    lower: BoundRef
    upper: BoundRef


@dataclass(frozen=True)
class BlockSpec:
    vars: tuple[BlockVar, ...]
    chain: str
    interface: str = "z"
    geometry: Mapping[str, tuple[int, int]] | None = field(default=None, compare=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    @property
    def symbols(self) -> tuple[str, ...]:
        """Variable set of every polynomial the tower manipulates."""
        return (self.interface,) + self.names

    @property
    def chain_index(self) -> int:
        return self.names.index(self.chain)

    @property
    def cells_per_block(self) -> int:
        return len(self.vars)

    def cell_count(self, n: int) -> int:
        return n * len(self.vars) + 1

    def to_json(self) -> dict:
        data = {
            "vars": [{"name": v.name, "lower": str(v.lower), "upper": str(v.upper)} for v in self.vars],
            "chain": self.chain,
            "interface": self.interface,
        }
        if self.geometry is not None:
            data["geometry"] = {k: list(v) for k, v in sorted(self.geometry.items())}
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "BlockSpec":
        try:
            vs = tuple(
                BlockVar(str(v["name"]), BoundRef.parse(v["lower"]), BoundRef.parse(v["upper"]))
                for v in data["vars"]
            )
            geom = data.get("geometry")
            return cls(
                vs,
                str(data["chain"]),
                str(data.get("interface", "z")),
                {k: (int(r), int(c)) for k, (r, c) in geom.items()} if geom else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed block JSON: {exc}") from exc

    def model_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ValidationReport:
    valid: bool
    problems: list[str]
    offending: str | None = None

    def raise_for_problems(self):
        if not self.valid:
            raise UsageError("invalid block: " + "; ".join(self.problems))


def validate_block(spec: BlockSpec) -> ValidationReport:
    """Check that the block is a chain of single-reference integrals."""
    problems: list[str] = []
    offending: list[str] = []

    def bad(var, msg):
        problems.append(f"{var}: {msg}")
        offending.append(var)

    names = spec.names
    if not names:
        return ValidationReport(False, ["block has no variables"], None)
    if len(set(names)) != len(names):
        problems.append("duplicate variable names")
    if spec.interface in names:
        problems.append(f"interface symbol {spec.interface!r} is also a variable")
    if spec.chain not in names:
        problems.append(f"chain variable {spec.chain!r} is not a block variable")
    pos = {n: i for i, n in enumerate(names)}
    refs = {v.name: [b.value for b in (v.lower, v.upper) if b.is_var] for v in spec.vars}

    def reaches(start, target):
        seen, todo = set(), [start]
        while todo:
            cur = todo.pop()
            if cur == target:
                return True
            if cur in seen:
                continue
            seen.add(cur)
            todo.extend(r for r in refs.get(cur, []) if r in pos)
        return False

    for i, v in enumerate(spec.vars):
        for sym in refs[v.name]:
            if sym == v.name:
                bad(v.name, "bound refers to the variable itself")
            elif sym == spec.interface:
                continue
            elif sym not in pos:
                bad(v.name, f"bound {sym!r} must be 0, 1, {spec.interface!r} or one outer variable")
            elif pos[sym] > i:
                if reaches(sym, v.name):
                    bad(v.name, f"cyclic bound reference through {sym!r}")
                else:
                    bad(v.name, f"bound on {sym!r}, which is integrated before {v.name!r}")
    if spec.geometry is not None:
        problems.extend(_geometry_problems(spec))
    return ValidationReport(not problems, problems, offending[0] if offending else None)


def _geometry_problems(spec: BlockSpec) -> list[str]:
    g = spec.geometry
    keys = set(spec.names) | {spec.interface}
    if set(g) != keys:
        return [f"geometry must place exactly {sorted(keys)}"]
    if len(set(g.values())) != len(g):
        return ["geometry is not injective"]
    (r0, c0), (r1, c1) = g[spec.chain], g[spec.interface]
    if c0 != c1 or r1 <= r0:
        return ["interface cell must sit straight above the chain cell"]
    cells = [c for k in range(3) for c in _block_cells(spec, k).values()]
    if len(set(cells)) != len(cells):
        return ["stacked blocks overlap"]
    return []


def _block_cells(spec: BlockSpec, k: int) -> dict:
    g = spec.geometry
    period = g[spec.interface][0] - g[spec.chain][0]
    out = {}
    for name in spec.names:
        if name != spec.chain:
            r, c = g[name]
            out[(name, k)] = (r + k * period, c)
    r, c = g[spec.interface]
    out[("node", k + 1)] = (r + k * period, c)
    return out


def element_name(spec: BlockSpec, var: str, k: int):
    """Canonical element of the stacked poset for variable ``var`` of block ``k``.

    The chain variable of block ``k`` and the interface of block ``k-1``
    are the same element, named ``("node", k)``.
    """
    if var == spec.chain:
        return ("node", k)
    if var == spec.interface:
        return ("node", k + 1)
    return (var, k)


def block_elements(spec: BlockSpec, n: int) -> list:
    out = [("node", 0)]
    for k in range(n):
        out.extend(element_name(spec, v, k) for v in spec.names if v != spec.chain)
        out.append(("node", k + 1))
    return out


def block_poset(spec: BlockSpec, n: int) -> Poset:
    """The poset whose order polytope the ``n``-block integral measures."""
    elements = block_elements(spec, n)
    pairs = []
    for k in range(n):
        for v in spec.vars:
            me = element_name(spec, v.name, k)
            if v.lower.is_var:
                pairs.append((element_name(spec, v.lower.value, k), me))
            if v.upper.is_var:
                pairs.append((me, element_name(spec, v.upper.value, k)))
    return Poset.from_pairs(elements, pairs)


def element_cells(spec: BlockSpec, n: int) -> dict | None:
    """Grid position of each element, when the block carries a geometry."""
    if spec.geometry is None:
        return None
    out = {("node", 0): spec.geometry[spec.chain]}
    for k in range(n):
        out.update(_block_cells(spec, k))
    return out


# -- tower -----------------------------------------------------------------


@dataclass
class DensityTower:
    """``p_0..p_n`` plus the partial integrals the sampler conditions on.

    ``inner[j]`` (``j`` > chain layer) is the integral of 1 over layers
    ``j..m-1``; it does not depend on the level. ``outer[k][j]`` (``1 <= j
    <= chain layer``) is the integral over layers ``j..m-1`` of
    ``p_k(chain)``, one dict per level ``k``.
    """

    block: BlockSpec
    polys: list[Polynomial]
    inner: dict[int, MultivariatePolynomial]
    outer: list[dict[int, MultivariatePolynomial]]

    @property
    def depth(self) -> int:
        return len(self.polys) - 1

    def cell_count(self, n: int) -> int:
        return self.block.cell_count(n)

    def __eq__(self, other):
        if not isinstance(other, DensityTower):
            return NotImplemented
        return (
            self.block.model_hash() == other.block.model_hash()
            and self.polys == other.polys
            and self.inner == other.inner
            and self.outer == other.outer
        )


def _inner_partials(spec: BlockSpec) -> dict[int, MultivariatePolynomial]:
    syms = spec.symbols
    m = len(spec.vars)
    c = spec.chain_index
    acc = MultivariatePolynomial.constant(syms, 1)
    out = {m: acc}
    for j in range(m - 1, c, -1):
        v = spec.vars[j]
        acc = integrate_layer(acc, v.name, v.lower, v.upper)
        out[j] = acc
    return out


def _push(spec: BlockSpec, inner, p: Polynomial):
    """One level: integrate ``p(chain)`` through the block.

    Returns the next polynomial and the per-level partials ``{j: R_j}`` for
    ``1 <= j <= chain layer``.
    """
    syms = spec.symbols
    c = spec.chain_index
    body = inner[c + 1] * MultivariatePolynomial.from_polynomial(
        Polynomial(p.coeffs, spec.chain), syms, spec.chain
    )
    partials = {}
    for j in range(c, -1, -1):
        v = spec.vars[j]
        body = integrate_layer(body, v.name, v.lower, v.upper)
        if j >= 1:
            partials[j] = body
    leftovers = [s for s in spec.names if body.contains(s)]
    if leftovers:
        raise ConsistencyError(f"variables {leftovers} survive the block integration")
    return body.to_univariate(spec.interface), partials


def iterate_recurrence(spec: BlockSpec, n: int, tower: DensityTower | None = None) -> DensityTower:
    """Build (or extend) the tower up to ``p_n``."""
    if n < 0:
        raise UsageError("n must be non-negative")
    validate_block(spec).raise_for_problems()
    if tower is None:
        tower = DensityTower(spec, [Polynomial.constant(1, spec.interface)], _inner_partials(spec), [])
    elif tower.block.model_hash() != spec.model_hash():
        raise ConsistencyError("tower was built for a different block")
    while len(tower.outer) < tower.depth:
        # loaded towers may lack per-level partials; recompute them
        _, parts = _push(spec, tower.inner, tower.polys[len(tower.outer)])
        tower.outer.append(parts)
    while tower.depth < n:
        nxt, parts = _push(spec, tower.inner, tower.polys[-1])
        tower.outer.append(parts)
        tower.polys.append(nxt)
    return tower


@dataclass(frozen=True)
class CountResult:
    n: int
    cells: int
    integral: Fraction
    count: int


def count_fillings(tower: DensityTower, n: int) -> CountResult:
    if not 0 <= n <= tower.depth:
        raise UsageError(f"tower depth {tower.depth} does not reach n={n}")
    integral = definite_unit_integral(tower.polys[n])
    cells = tower.cell_count(n)
    value = factorial(cells) * integral
    if value.denominator != 1:
        raise ConsistencyError(f"{cells}! * integral = {value} is not an integer (n={n})")
    return CountResult(n, cells, integral, value.numerator)


# -- kernel ----------------------------------------------------------------


def derive_kernel(spec: BlockSpec, tower: DensityTower | None = None) -> MultivariatePolynomial:
    """The polynomial ``Q(x, z)`` with ``p_next(z) = int_0^z Q(x, z) p(x) dx``.

    Monomials ``x^j`` are pushed through the block and ``Q``'s coefficients
    solved for exactly. The result is over variables ``("x", "z")``.
    Raises :class:`ConsistencyError` when no single polynomial kernel exists.
    """
    validate_block(spec).raise_for_problems()
    inner = tower.inner if tower is not None else _inner_partials(spec)
    z = spec.interface

    def push(j):
        return _push(spec, inner, Polynomial.monomial(j, 1, z))[0]

    d0 = push(0).degree
    if d0 < 1:
        raise ConsistencyError("kernel is not a single polynomial: constant block output")
    top = d0 + 1  # two degrees above what the p = 1 output implies
    outputs = {j: push(j) for j in range(top + 2)}
    q: dict[tuple[int, int], Fraction] = {}
    for s in range(top + 1):
        # coefficient of z^(s+j+1) in output j equals sum_a q[a, s-a] / (a+j+1)
        rows = [[Fraction(1, a + j + 1) for a in range(s + 1)] for j in range(s + 1)]
        rhs = [_coeff(outputs[j], s + j + 1) for j in range(s + 1)]
        sol = _solve(rows, rhs)
        for a, val in enumerate(sol):
            if val:
                q[(a, s - a)] = val
    kernel = MultivariatePolynomial(("x", z), q)
    for j, out in outputs.items():
        if _apply_kernel(kernel, j, z) != out:
            raise ConsistencyError(
                "kernel is not a single polynomial (multi-hole or piecewise block)"
            )
    return kernel


def _coeff(p: Polynomial, i: int) -> Fraction:
    return p.coeffs[i] if i < len(p.coeffs) else Fraction(0)


def _apply_kernel(kernel: MultivariatePolynomial, j: int, z: str) -> Polynomial:
    out: dict[int, Fraction] = {}
    for (a, b), c in kernel.terms.items():
        e = a + j + 1 + b
        out[e] = out.get(e, 0) + c / (a + j + 1)
    deg = max(out, default=-1)
    return Polynomial([out.get(i, 0) for i in range(deg + 1)], z)


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals for a square system."""
    n = len(rows)
    a = [row[:] + [b] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ConsistencyError("singular kernel system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def apply_kernel_step(kernel: MultivariatePolynomial, p: Polynomial) -> Polynomial:
    """``int_0^z kernel(x, z) p(x) dx`` for a kernel over ``("x", "z")``."""
    z = kernel.vars[1]
    out: dict[int, Fraction] = {}
    for j, pc in enumerate(p.coeffs):
        if pc:
            for (a, b), c in kernel.terms.items():
                e = a + j + 1 + b
                out[e] = out.get(e, 0) + c * pc / (a + j + 1)
    deg = max(out, default=-1)
    return Polynomial([out.get(i, 0) for i in range(deg + 1)], z)


# -- cache -----------------------------------------------------------------


def _payload_digest(levels, partials) -> str:
    blob = json.dumps({"levels": levels, "partials": partials}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def tower_to_json(tower: DensityTower) -> dict:
    levels = [{"n": k, "coeffs": p.to_strings()} for k, p in enumerate(tower.polys)]
    partials = [{"level": None, "layer": j, **poly.to_json()} for j, poly in sorted(tower.inner.items())]
    for k, parts in enumerate(tower.outer):
        partials.extend({"level": k, "layer": j, **poly.to_json()} for j, poly in sorted(parts.items()))
    return {
        "version": CACHE_VERSION,
        "model_hash": tower.block.model_hash(),
        "block": tower.block.to_json(),
        "levels": levels,
        "partials": partials,
        "checksum": _payload_digest(levels, partials),
    }


def tower_from_json(data: Mapping, block: BlockSpec | None = None) -> DensityTower:
    if data.get("version") != CACHE_VERSION:
        raise ConsistencyError(f"unsupported tower cache version {data.get('version')!r}")
    stored = BlockSpec.from_json(data["block"])
    if stored.model_hash() != data.get("model_hash"):
        raise ConsistencyError("tower cache model hash does not match its block")
    if block is not None and block.model_hash() != data["model_hash"]:
        raise ConsistencyError("tower cache belongs to a different model (hash mismatch)")
    if _payload_digest(data["levels"], data["partials"]) != data.get("checksum"):
        raise ConsistencyError("tower cache checksum mismatch (file was modified)")
    spec = block or stored
    polys = [Polynomial.from_strings(lv["coeffs"], spec.interface) for lv in sorted(data["levels"], key=lambda lv: lv["n"])]
    inner: dict[int, MultivariatePolynomial] = {}
    outer: list[dict[int, MultivariatePolynomial]] = []
    for item in data["partials"]:
        poly = MultivariatePolynomial.from_json(item)
        if item["level"] is None:
            inner[item["layer"]] = poly
        else:
            while len(outer) <= item["level"]:
                outer.append({})
            outer[item["level"]][item["layer"]] = poly
    # levels with an empty partial set (chain outermost) leave no trace in the file
    outer.extend({} for _ in range(len(polys) - 1 - len(outer)))
    return DensityTower(spec, polys, inner, outer)


def save_tower(tower: DensityTower, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(tower_to_json(tower), fh)
    os.replace(tmp, path)


def load_tower(path, block: BlockSpec | None = None) -> DensityTower:
    with open(path) as fh:
        return tower_from_json(json.load(fh), block)


# -- built-in models -------------------------------------------------------


def _var(name, lo, hi):
    return BlockVar(name, BoundRef.parse(lo), BoundRef.parse(hi))


def polyo_2nx3_block() -> BlockSpec:
    """Seven-cell block of the ``2n x 3`` tableau with walls in its outer columns.

    Middle column x < y < z, left column r < s, right column v < w, rows
    r < y < v and s < z < w. ``x`` is the interface of the block below.
    Geometry puts the extra bottom cell at row -1, so the tableau proper
    occupies rows ``0..2n-1``.
    """
    return BlockSpec(
        (
            _var("x", "0", "z"),
            _var("y", "x", "z"),
            _var("r", "0", "y"),
            _var("s", "r", "z"),
            _var("w", "z", "1"),
            _var("v", "y", "w"),
        ),
        chain="x",
        interface="z",
        geometry={
            "x": (-1, 1), "y": (0, 1), "z": (1, 1),
            "r": (0, 0), "s": (1, 0),
            "v": (0, 2), "w": (1, 2),
        },
    )


def polyo_2nx3_reference_kernel() -> MultivariatePolynomial:
    """The one-hole kernel of the block above, in closed factored form."""
    x = MultivariatePolynomial.variable(("x", "z"), "x")
    z = MultivariatePolynomial.variable(("x", "z"), "z")
    cubic = 3 * x**3 - 7 * x**2 * z - x * z**2 - z**3 - 2 * x**2 + 4 * x * z + 4 * z**2
    return Fraction(1, 24) * (z - 1) * (x - z) * cubic


BUILTIN_BLOCKS = {"polyo-2nx3": polyo_2nx3_block}


def builtin_block(name: str) -> BlockSpec:
    try:
        return BUILTIN_BLOCKS[name]()
    except KeyError:
        raise UsageError(f"no density block for model {name!r}") from None


def load_block(path) -> BlockSpec:
    with open(path) as fh:
        spec = BlockSpec.from_json(json.load(fh))
    return spec


def default_cache_dir() -> Path:
    return Path(os.environ.get("YOUNGWALLS_CACHE_DIR", Path.home() / ".cache" / "youngwalls"))


def cache_path_for(spec: BlockSpec, directory=None) -> Path:
    directory = Path(directory) if directory is not None else default_cache_dir()
    return directory / f"tower-{spec.model_hash()[:16]}.json"
