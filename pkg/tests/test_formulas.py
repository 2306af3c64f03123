from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from youngwalls import formulas as F
from youngwalls.errors import UsageError
from youngwalls.shapes import (
    TWO_COLUMN_PATTERNS,
    build_poset,
    column_walls_shape,
    count_linear_extensions,
    enumerate_fillings,
    split_shape,
    two_column_shape,
    vertical_walls_shape,
)


def oracle(shape):
    return count_linear_extensions(build_poset(shape))


def test_primitives():
    assert F.binomial(5, 2) == 10
    assert F.binomial(5, 7) == 0
    assert F.multinomial(5, [2, 1]) == 30  # 5! / (2! 1! 2!)
    assert F.falling_factorial(6, 3) == 120
    assert F.double_factorial(7) == 105
    assert F.double_factorial(-1) == 1
    assert [F.catalan(n) for n in range(6)] == [1, 1, 2, 5, 14, 42]
    with pytest.raises(UsageError):
        F.binomial(-1, 0)


@pytest.mark.parametrize("pattern", TWO_COLUMN_PATTERNS)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_two_column_patterns(pattern, n):
    assert F.two_col_intro_count(n, pattern) == oracle(two_column_shape(n, pattern))


@pytest.mark.parametrize("n", range(1, 6))
def test_vertical_walls_sum_over_placements(n):
    for k in range(n + 1):
        total = sum(oracle(vertical_walls_shape(n, rows)) for rows in combinations(range(n), k))
        assert F.vertical_walls_count(n, k) == total
        assert F.avg_extensions_random_walls(n, k) == Fraction(total, F.binomial(n, k))


def test_count_depends_on_wall_position():
    # only the average over placements has a closed form
    counts = [oracle(vertical_walls_shape(3, [r])) for r in range(3)]
    assert counts == [7, 6, 7]


@given(st.integers(1, 50))
def test_sum_of_vertical_wall_counts(n):
    total = sum(F.vertical_walls_count(n, k) for k in range(n + 1))
    assert total == F.catalan(n) * (2 ** (n + 1) - 1)


@given(st.integers(1, 60))
def test_pmf_normalized_with_binomial_mode(n):
    pmf = F.wall_count_pmf(n)
    assert sum(pmf) == 1
    mode = max(range(n + 1), key=lambda k: pmf[k])
    assert mode in ((n + 1) // 2, (n + 2) // 2)


def test_pmf_small():
    assert F.wall_count_pmf(1) == [Fraction(1, 3), Fraction(2, 3)]
    assert F.wall_count_pmf(3) == [Fraction(c, 15) for c in (1, 4, 6, 4)]


@pytest.mark.parametrize("n", range(1, 13))
def test_lemma_forms_agree(n):
    for lam in range(1, n + 1):
        assert F.lemma_fillings_count(n, lam) == F.lemma_fillings_count_rewritten(n, lam)


def _height_lists(n):
    for k in range(n):
        yield from combinations(range(1, n), k)


@pytest.mark.parametrize("n", range(1, 6))
def test_first_column_heights(n):
    for hs in _height_lists(n):
        assert F.first_column_walls_count(n, hs) == oracle(column_walls_shape(n, 2, hs))


def test_heights_example():
    assert F.first_column_walls_count(2, [1]) == 3
    assert F.first_column_walls_count(3, []) == F.catalan(3)


@pytest.mark.parametrize("m", [3, 4])
def test_multi_column_heights(m):
    for n in range(1, 26 // m + 1):
        for hs in _height_lists(n):
            assert F.multi_column_walls_count(n, m, hs) == oracle(column_walls_shape(n, m, hs))


@pytest.mark.parametrize("n", range(1, 7))
def test_two_columns_specialize(n):
    for hs in _height_lists(n):
        assert F.multi_column_walls_count(n, 2, hs) == F.first_column_walls_count(n, hs)


def test_four_column_special_case():
    for n in range(1, 6):
        for hs in _height_lists(n):
            assert F.four_column_walls_count(n, hs) == F.multi_column_walls_count(n, 4, hs)


def test_every_row_walls():
    for m in range(2, 25):
        for n in range(1, 24 // m + 1):
            assert F.every_row_walls_count(n, m) == oracle(column_walls_shape(n, m, range(1, n)))
    assert F.every_row_walls_count(5, 1) == 1


def test_height_list_validation():
    with pytest.raises(UsageError):
        F.HeightList(3, (2, 1))
    with pytest.raises(UsageError):
        F.HeightList(3, (3,))
    assert F.HeightList(5, (1, 3)).gaps == [1, 2, 2]


def test_hook_lengths_and_split_products():
    assert F.hook_length_count([3, 3]) == 5
    assert F.hook_length_count([2, 2, 2]) == 5
    assert F.Partition((3, 1)).conjugate().parts == (2, 1, 1)
    for n in range(2, 7):
        for h in range(1, n):
            shape = split_shape(n, h)
            expected = F.split_product_count(2 * n, [(2,) * h, (2,) * (n - h)])
            assert oracle(shape) == expected


@pytest.mark.parametrize("n", range(1, 5))
def test_colouring_bijection(n):
    images = set()
    for k in range(n + 1):
        for rows in combinations(range(n), k):
            shape = vertical_walls_shape(n, rows)
            for f in enumerate_fillings(build_poset(shape)):
                path = F.tableau_to_coloured_path(shape, f)
                assert path.red_count == k
                assert F.path_to_tableau(path) == (shape, f)
                images.add(path.steps)
    assert len(images) == F.catalan(n) * (2 ** (n + 1) - 1)


def test_coloured_path_validation():
    with pytest.raises(UsageError):
        F.ColouredPath(("B", "U"))  # blue below the axis
    with pytest.raises(UsageError):
        F.ColouredPath(("U",))
    assert F.ColouredPath(("R", "U")).red_count == 1
