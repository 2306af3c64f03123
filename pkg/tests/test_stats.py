import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from youngwalls import sampler as S
from youngwalls.density import block_elements
from youngwalls.errors import UsageError
from youngwalls.formulas import wall_count_pmf
from youngwalls.shapes import build_poset, enumerate_fillings, polyomino_shape
from youngwalls.stats import (
    chi_square_uniformity,
    cross_validate,
    pmf_moments,
    reconcile_column_walls,
    reconcile_every_row,
    reconcile_vertical_walls,
    tally,
    uniformity_test,
    wall_distribution_check,
)


def lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma by its power series."""
    term = total = 1.0 / a
    n = 0
    while abs(term) > 1e-17 * abs(total):
        n += 1
        term *= x / (a + n)
        total += term
    return math.exp(a * math.log(x) - x - math.lgamma(a)) * total


def test_proportional_counts_give_zero_statistic():
    res = chi_square_uniformity([100, 100, 100, 100])
    assert res.statistic == 0 and res.df == 3
    assert res.p_value == pytest.approx(1.0)
    res = chi_square_uniformity([100, 300], [Fraction(1, 4), Fraction(3, 4)])
    assert res.statistic == 0


def test_chi_square_input_errors():
    with pytest.raises(UsageError):
        chi_square_uniformity([100, 100], [1, 0])
    with pytest.raises(UsageError):
        chi_square_uniformity([10, 10, 10])
    with pytest.raises(UsageError):
        chi_square_uniformity([100])
    with pytest.raises(UsageError):
        chi_square_uniformity([100, 100], [0.5, 0.25, 0.25])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(50, 400), min_size=2, max_size=12))
def test_p_value_against_series(counts):
    res = chi_square_uniformity(counts)
    k = len(counts)
    mean = sum(counts) / k
    stat = sum((c - mean) ** 2 / mean for c in counts)
    assert res.statistic == pytest.approx(stat, rel=1e-12, abs=1e-12)
    if stat == 0:
        assert res.p_value == pytest.approx(1.0)
        return
    assert abs(res.p_value - (1 - lower_gamma_series((k - 1) / 2, stat / 2))) < 1e-9


def test_tally_rejects_unknown_outcomes():
    assert tally(["a", "b", "a"], ["a", "b", "c"]) == [2, 1, 0]
    with pytest.raises(UsageError):
        tally(["d"], ["a", "b"])


def test_wall_pmf_moments():
    pmf = wall_count_pmf(4)
    assert sum(pmf) == 1
    mean, var = pmf_moments(pmf)
    assert mean == sum(k * p for k, p in enumerate(pmf))
    assert var == sum(k * k * p for k, p in enumerate(pmf)) - mean**2
    assert var > 0


def test_wall_distribution_check_passes_for_exact_sampler():
    counts = S.sample_wall_counts(5, 20_000, S.make_rng(3))
    report = wall_distribution_check(5, counts)
    assert report.passed, report.table()
    assert report.to_json()["samples"] == 20_000


def test_wall_distribution_check_flags_wrong_law():
    report = wall_distribution_check(5, [0] * 1000)
    assert not report.passed
    with pytest.raises(UsageError):
        wall_distribution_check(5, [6])


def test_cross_validation_has_no_disagreements():
    table = cross_validate(n_range=range(1, 5))
    assert table.ok, table.failure_report()
    names = {r.model for r in table.rows}
    assert "polyo-2nx3" in names and "nxm-rowwalls" in names
    poly = [r for r in table.rows if r.model == "polyo-2nx3"]
    assert all(len(r.values) == 2 for r in poly)  # oracle and density


def test_reconciliations_agree():
    for table in (reconcile_vertical_walls(4), reconcile_column_walls(4), reconcile_every_row(16)):
        assert table.rows and table.ok, table.failure_report()


def test_disagreement_is_reported():
    from youngwalls.stats import ReconciliationTable, Row

    table = ReconciliationTable([Row("m", 1, formula=3, oracle=4)])
    assert not table.ok
    assert "m" in table.failure_report()


def _fillings(n):
    return enumerate_fillings(build_poset(polyomino_shape(n)))


def test_uniformity_full_and_marginal(tower, block):
    fillings = _fillings(1)
    rng = S.make_rng(12)
    samples = [S.sample_polyomino(tower, 1, rng).by_cell() for _ in range(12 * 50)]
    full = uniformity_test(samples, fillings)
    assert full.method == "full" and full.accepted
    few = uniformity_test(samples[:200], fillings)
    assert few.method == "marginal" and few.accepted


def test_uniformity_rejects_biased_sampler():
    fillings = _fillings(1)
    biased = [fillings[0]] * 300 + fillings * 25
    assert not uniformity_test(biased, fillings).accepted


@pytest.mark.slow
def test_repeated_uniformity_runs(tower, block):
    # at alpha = 0.001 almost every independent run must accept
    fillings = _fillings(1)
    cells = S.element_cells(block, 1)
    elements = block_elements(block, 1)
    outcomes = [tuple(f[cells[e]] for e in elements) for f in fillings]
    passed = 0
    for seed in range(100):
        labels = S.sample_polyomino_batch(tower, 1, 60_000, S.make_rng(seed))
        keys = list(map(tuple, labels.tolist()))
        passed += chi_square_uniformity(tally(keys, outcomes)).accepts()
    assert passed >= 99
