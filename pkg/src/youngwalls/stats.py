"""Goodness-of-fit tests and the three-way count reconciliation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from scipy.special import gammaincc

from . import formulas
from .density import block_poset, count_fillings, iterate_recurrence
from .errors import UsageError
from .models import MODELS, Model, get_model
from .shapes import (
    ORACLE_MAX_SIZE,
    build_poset,
    column_walls_shape,
    count_linear_extensions,
    vertical_walls_shape,
)

MIN_SAMPLES_PER_OUTCOME = 50
SIGNIFICANCE = 0.001
TV_THRESHOLD = 0.02


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float

    def accepts(self, alpha: float = SIGNIFICANCE) -> bool:
        return self.p_value > alpha


def chi_square_uniformity(observed: Sequence[int] | Mapping, expected: Sequence | None = None) -> ChiSquareResult:
    """Pearson chi-square of ``observed`` counts against probabilities ``expected``.

    ``expected`` defaults to uniform. The upper-tail p-value is the
    regularized upper incomplete gamma function ``Q(df/2, stat/2)``.
    """
    obs = list(observed.values()) if isinstance(observed, Mapping) else list(observed)
    k = len(obs)
    if k < 2:
        raise UsageError("need at least two outcomes")
    probs = [Fraction(1, k)] * k if expected is None else list(expected)
    if len(probs) != k:
        raise UsageError("observed and expected have different lengths")
    for o, p in zip(obs, probs):
        if p <= 0:
            what = "with positive observed count" if o > 0 else ""
            raise UsageError(f"outcome has non-positive expected probability {what}".strip())
    total = sum(obs)
    if total < MIN_SAMPLES_PER_OUTCOME * k:
        raise UsageError(f"{total} samples for {k} outcomes; need at least {MIN_SAMPLES_PER_OUTCOME * k}")
    norm = float(sum(probs))
    stat = 0.0
    for o, p in zip(obs, probs):
        e = total * float(p) / norm
        stat += (o - e) ** 2 / e
    df = k - 1
    return ChiSquareResult(stat, df, float(gammaincc(df / 2, stat / 2)))


def tally(keys: Iterable, outcomes: Sequence) -> list[int]:
    """Counts per outcome, in ``outcomes`` order; unknown keys are an error."""
    index = {o: i for i, o in enumerate(outcomes)}
    counts = [0] * len(outcomes)
    for key in keys:
        try:
            counts[index[key]] += 1
        except KeyError:
            raise UsageError(f"sample {key!r} is not one of the enumerated outcomes") from None
    return counts


# -- wall counts -------------------------------------------------------------


@dataclass
class WallReport:
    n: int
    samples: int
    exact: list[Fraction]
    empirical: list[float]
    tv_distance: float
    exact_mean: Fraction
    exact_variance: Fraction
    empirical_mean: float
    empirical_variance: float
    threshold: float = TV_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.tv_distance <= self.threshold

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "exact": [f"{p.numerator}/{p.denominator}" for p in self.exact],
            "empirical": self.empirical,
            "tv_distance": self.tv_distance,
            "exact_mean": float(self.exact_mean),
            "exact_variance": float(self.exact_variance),
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "passed": self.passed,
        }

    def table(self) -> str:
        lines = [f"{'k':>3}  {'exact':>12}  {'empirical':>10}"]
        for k, (p, q) in enumerate(zip(self.exact, self.empirical)):
            lines.append(f"{k:>3}  {float(p):>12.6f}  {q:>10.6f}")
        lines.append(f"TV distance {self.tv_distance:.5f} (threshold {self.threshold})")
        lines.append(f"mean {self.empirical_mean:.4f} vs {float(self.exact_mean):.4f}, "
                     f"variance {self.empirical_variance:.4f} vs {float(self.exact_variance):.4f}")
        return "\n".join(lines)


def pmf_moments(pmf: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    mean = sum((k * p for k, p in enumerate(pmf)), Fraction(0))
    var = sum((k * k * p for k, p in enumerate(pmf)), Fraction(0)) - mean * mean
    return mean, var


def wall_distribution_check(n: int, wall_counts: Iterable[int], threshold: float = TV_THRESHOLD) -> WallReport:
    """Empirical wall-count frequencies against the exact distribution."""
    pmf = formulas.wall_count_pmf(n)
    counts = [0] * (n + 1)
    for k in wall_counts:
        if not 0 <= k <= n:
            raise UsageError(f"wall count {k} outside 0..{n}")
        counts[k] += 1
    size = sum(counts)
    if not size:
        raise UsageError("no samples")
    emp = [c / size for c in counts]
    tv = 0.5 * sum(abs(q - float(p)) for p, q in zip(pmf, emp))
    mean, var = pmf_moments(pmf)
    emp_mean = sum(k * q for k, q in enumerate(emp))
    emp_var = sum(k * k * q for k, q in enumerate(emp)) - emp_mean**2
    return WallReport(n, size, pmf, emp, tv, mean, var, emp_mean, emp_var, threshold)


# -- reconciliation ------------------------------------------------------------


@dataclass
class Row:
    model: str
    n: int
    detail: str = ""
    formula: int | None = None
    oracle: int | None = None
    density: int | None = None

    @property
    def values(self) -> list[int]:
        return [v for v in (self.formula, self.oracle, self.density) if v is not None]

    @property
    def agrees(self) -> bool:
        return len(set(self.values)) <= 1


@dataclass
class ReconciliationTable:
    rows: list[Row] = field(default_factory=list)

    @property
    def disagreements(self) -> list[Row]:
        return [r for r in self.rows if not r.agrees]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def extend(self, other: "ReconciliationTable") -> "ReconciliationTable":
        self.rows.extend(other.rows)
        return self

    def failure_report(self) -> str:
        return "\n".join(
            f"{r.model} n={r.n} {r.detail}: formula={r.formula} oracle={r.oracle} density={r.density}"
            for r in self.disagreements
        )

    def to_json(self) -> list[dict]:
        return [{**asdict(r), "agrees": r.agrees} for r in self.rows]

    def table(self) -> str:
        def cell(v):
            return "-" if v is None else str(v)

        head = f"{'model':<20} {'n':>3} {'detail':<18} {'formula':>16} {'oracle':>16} {'density':>16}  ok"
        lines = [head]
        for r in self.rows:
            lines.append(
                f"{r.model:<20} {r.n:>3} {r.detail:<18} {cell(r.formula):>16} "
                f"{cell(r.oracle):>16} {cell(r.density):>16}  {'yes' if r.agrees else 'NO'}"
            )
        return "\n".join(lines)


def oracle_count(model: Model, n: int, m: int | None = None) -> int:
    if model.shape is not None:
        return count_linear_extensions(build_poset(model.shape_for(n, m)))
    return count_linear_extensions(block_poset(model.block, n))


def _oracle_fits(model: Model, n: int, m: int | None) -> bool:
    if model.shape is not None:
        return model.shape_for(n, m).size <= ORACLE_MAX_SIZE
    return model.block.cell_count(n) <= ORACLE_MAX_SIZE


def cross_validate(models: Iterable[str | Model] | None = None, n_range: Iterable[int] = range(1, 5),
                   m: int | None = None) -> ReconciliationTable:
    """Formula, oracle and density counts side by side for each (model, n)."""
    chosen = [get_model(x) if isinstance(x, str) else x for x in (models or MODELS)]
    table = ReconciliationTable()
    ns = list(n_range)
    for model in chosen:
        tower = iterate_recurrence(model.block, max(ns)) if model.block is not None else None
        for n in ns:
            if n < model.min_n:
                continue
            mm = m if model.needs_m else None
            if model.needs_m and mm is None:
                for mm in range(2, 5):
                    table.rows.extend(cross_validate([model], [n], mm).rows)
                continue
            row = Row(model.name, n, f"m={mm}" if mm else "")
            if model.formula is not None:
                row.formula = model.formula_count(n, mm)
            if _oracle_fits(model, n, mm):
                row.oracle = oracle_count(model, n, mm)
            if tower is not None:
                row.density = count_fillings(tower, n).count
            table.rows.append(row)
    return table


def reconcile_vertical_walls(n_max: int = 5) -> ReconciliationTable:
    """``v(n, k)`` against the oracle summed over every choice of wall rows."""
    table = ReconciliationTable()
    for n in range(1, n_max + 1):
        for k in range(n + 1):
            total = sum(
                count_linear_extensions(build_poset(vertical_walls_shape(n, rows)))
                for rows in combinations(range(n), k)
            )
            table.rows.append(Row("nx2-vertical-k", n, f"k={k}", formulas.vertical_walls_count(n, k), total))
    return table


def _height_lists(n: int):
    for k in range(n):
        yield from combinations(range(1, n), k)


def reconcile_column_walls(n_max: int = 5, columns: Sequence[int] = (3, 4),
                           max_cells: int = ORACLE_MAX_SIZE) -> ReconciliationTable:
    """Height-list closed forms (first column, and ``m`` columns) against the oracle."""
    table = ReconciliationTable()
    for n in range(1, n_max + 1):
        for hs in _height_lists(n):
            oracle = count_linear_extensions(build_poset(column_walls_shape(n, 2, hs)))
            table.rows.append(Row("nx2-first-col", n, f"h={list(hs)}", formulas.first_column_walls_count(n, hs), oracle))
    for m in columns:
        for n in range(1, max_cells // m + 1):
            for hs in _height_lists(n):
                oracle = count_linear_extensions(build_poset(column_walls_shape(n, m, hs)))
                row = Row(f"nx{m}-heights", n, f"h={list(hs)}", formulas.multi_column_walls_count(n, m, hs), oracle)
                table.rows.append(row)
    return table


def reconcile_every_row(max_cells: int = 24) -> ReconciliationTable:
    table = ReconciliationTable()
    for m in range(2, max_cells + 1):
        for n in range(1, max_cells // m + 1):
            oracle = count_linear_extensions(build_poset(column_walls_shape(n, m, range(1, n))))
            table.rows.append(Row("nxm-rowwalls", n, f"m={m}", formulas.every_row_walls_count(n, m), oracle))
    return table


def report_json(table: ReconciliationTable) -> str:
    return json.dumps({"ok": table.ok, "rows": table.to_json()}, indent=2)


@dataclass
class UniformityReport:
    method: str  # "full" or "marginal"
    samples: int
    outcomes: int
    p_value: float
    details: list[dict] = field(default_factory=list)
    alpha: float = SIGNIFICANCE

    @property
    def accepted(self) -> bool:
        return self.p_value > self.alpha

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "samples": self.samples,
            "outcomes": self.outcomes,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "accepted": self.accepted,
            "details": self.details,
        }


def _merge_small_bins(counts: list[int], probs: list[Fraction], total: int, minimum: float = 5.0):
    """Pool adjacent bins until each expects at least ``minimum`` hits."""
    out_c, out_p = [], []
    acc_c, acc_p = 0, Fraction(0)
    for c, p in zip(counts, probs):
        acc_c += c
        acc_p += p
        if acc_p * total >= minimum:
            out_c.append(acc_c)
            out_p.append(acc_p)
            acc_c, acc_p = 0, Fraction(0)
    if acc_p and out_p:
        out_c[-1] += acc_c
        out_p[-1] += acc_p
    elif acc_p:
        out_c.append(acc_c)
        out_p.append(acc_p)
    return out_c, out_p


def uniformity_test(samples: Sequence[Mapping], fillings: Sequence[Mapping],
                    alpha: float = SIGNIFICANCE) -> UniformityReport:
    """Test sampled fillings against the uniform law on ``fillings``.

    With at least 50 samples per outcome this is the full chi-square test.
    Otherwise each element's label distribution is compared with its exact
    marginal under the uniform law, and the smallest p-value is
    Bonferroni-corrected over elements.
    """
    elements = list(fillings[0])
    outcomes = [tuple(f[e] for e in elements) for f in fillings]
    keys = [tuple(s[e] for e in elements) for s in samples]
    if len(keys) >= MIN_SAMPLES_PER_OUTCOME * len(outcomes):
        res = chi_square_uniformity(tally(keys, outcomes))
        return UniformityReport("full", len(keys), len(outcomes), res.p_value,
                                [{"statistic": res.statistic, "df": res.df}], alpha)
    known = set(outcomes)
    for key in keys:
        if key not in known:
            raise UsageError(f"sample {key!r} is not one of the enumerated outcomes")
    size = len(elements)
    details, worst = [], 1.0
    for i, e in enumerate(elements):
        exact = [0] * size
        for o in outcomes:
            exact[o[i] - 1] += 1
        probs = [Fraction(c, len(outcomes)) for c in exact]
        observed = [0] * size
        for key in keys:
            observed[key[i] - 1] += 1
        support = [(c, p) for c, p in zip(observed, probs) if p]
        obs, prb = _merge_small_bins([c for c, _ in support], [p for _, p in support], len(keys))
        if len(obs) < 2:
            continue
        res = chi_square_uniformity(obs, prb)
        worst = min(worst, res.p_value)
        details.append({"element": str(e), "statistic": res.statistic, "df": res.df, "p_value": res.p_value})
    p = min(1.0, worst * max(len(details), 1))
    return UniformityReport("marginal", len(keys), len(outcomes), p, details, alpha)
