from fractions import Fraction

import numpy as np
import pytest

from youngwalls import sampler as S
from youngwalls.density import block_elements, block_poset, count_fillings, iterate_recurrence
from youngwalls.errors import CapacityError, DensityError, UsageError
from youngwalls.exactmath import Polynomial
from youngwalls.formulas import catalan
from youngwalls.shapes import (
    build_poset,
    count_linear_extensions,
    enumerate_fillings,
    is_valid_filling,
    polyomino_shape,
    tableau_shape,
)
from youngwalls.stats import chi_square_uniformity, tally


class FixedU:
    """Stand-in generator returning preset uniforms."""

    def __init__(self, *us):
        self.us = list(us)

    def random(self, size=None):
        return self.us.pop(0)


def exact_cdf(p: Polynomial, t: float) -> Fraction:
    anti = p.antiderivative()
    return anti(Fraction(t)) / anti(Fraction(1))


def test_rng_is_reproducible():
    a, b = S.make_rng(5), S.make_rng(5)
    assert a.random(4).tolist() == b.random(4).tolist()
    assert S.make_rng(6).random() != S.make_rng(5).random()


def test_uniform_density_mean():
    rng = S.make_rng(1)
    xs = [S.sample_from_polynomial_density(Polynomial([1]), (0, 1), rng) for _ in range(100_000)]
    assert abs(np.mean(xs) - 0.5) < 0.01


def test_linear_density_analytic_inverse():
    t = S.sample_from_polynomial_density(Polynomial([0, 2]), (0, 1), FixedU(0.25))
    assert abs(t - 0.5) <= 1e-12


def test_top_density_kolmogorov_distance(tower):
    p1 = tower.polys[1]
    rng = S.make_rng(2)
    xs = np.sort([S.sample_from_polynomial_density(p1, (0, 1), rng) for _ in range(100_000)])
    anti = p1.antiderivative()
    total = float(anti(Fraction(1)))
    cdf = np.array([float(anti(Fraction(x))) / total for x in xs[::50]])
    emp = (np.arange(0, len(xs), 50) + 1) / len(xs)
    assert np.max(np.abs(cdf - emp)) < 0.01


@pytest.mark.parametrize("k", [8, 30])
def test_fixed_point_path_inverts_ill_conditioned_density(block, k):
    p = iterate_recurrence(block, k).polys[k]
    assert S._cancellation_bits(p) > 20
    for u in (0.01, 0.3, 0.77):
        t = S.sample_from_polynomial_density(p, (0, 1), FixedU(u))
        assert abs(float(exact_cdf(p, t)) - u) < 1e-9


def test_density_errors():
    with pytest.raises(DensityError):
        S.sample_from_polynomial_density(Polynomial([-1]), (0, 1), S.make_rng(0))
    with pytest.raises(DensityError):
        S.sample_from_polynomial_density(Polynomial([]), (0, 1), S.make_rng(0))
    with pytest.raises(DensityError):
        S.sample_from_polynomial_density(Polynomial([1]), (1, 0), S.make_rng(0))
    with pytest.raises(DensityError):
        S._alarm(-1e-6)
    S._alarm(-1e-12)


def test_block_constraints_hold(tower, block):
    rng = S.make_rng(3)
    for n in range(1, 6):
        poset = block_poset(block, n)
        for _ in range(2000):
            s = S.sample_polyomino(tower, n, rng)
            vals = [s.values[e] for e in poset.elements]
            assert all(vals[a] < vals[b] for a, b in poset.relations)


def test_empty_interval_error(tower):
    with pytest.raises(UsageError):
        S.sample_block(tower, 0, 1.5, S.make_rng(0))


def test_first_block_marginal_matches_kernel(tower, block):
    # with p_0 = 1 the chain variable given z has density Q(x, z) / p_1(z)
    from youngwalls.density import polyo_2nx3_reference_kernel

    z = Fraction(7, 10)
    q = polyo_2nx3_reference_kernel().to_univariate("x", {"z": z})
    assert q.degree > 0
    anti = q.antiderivative()
    edges = [z * i / 10 for i in range(11)]
    probs = [(anti(b) - anti(a)) / (anti(z) - anti(0)) for a, b in zip(edges, edges[1:])]
    rng = S.make_rng(4)
    draws = [S.sample_block(tower, 0, 0.7, rng)["x"] for _ in range(20_000)]
    counts = np.histogram(draws, bins=[float(e) for e in edges])[0]
    assert chi_square_uniformity(counts.tolist(), probs).p_value > 0.001


def test_conditional_densities_telescope(tower, block):
    # layer j is drawn from the integral of p_k(chain) over the later layers;
    # the product of these normalized conditionals is p_k(chain) / p_{k+1}(z)
    from youngwalls.exactmath import MultivariatePolynomial, integrate_layer

    syms = block.symbols
    rng = S.make_rng(8)
    for k, z in ((0, 0.6), (3, 0.35)):
        pk = tower.polys[k]
        tails = [MultivariatePolynomial.from_polynomial(Polynomial(pk.coeffs, block.chain), syms, block.chain)]
        for v in reversed(block.vars):
            tails.append(integrate_layer(tails[-1], v.name, v.lower, v.upper))
        tails.reverse()  # tails[j] has layers j.. integrated out; tails[-1] is the bare body
        for _ in range(20):
            vals = S.sample_block(tower, k, z, rng)
            env = {block.interface: Fraction(z), **{name: Fraction(x) for name, x in vals.items()}}
            prod = Fraction(1)
            for j in range(len(block.vars)):
                prod *= tails[j + 1].evaluate(env) / tails[j].evaluate(env)
            expected = pk(env[block.chain]) / tower.polys[k + 1](Fraction(z))
            assert float(prod / expected) == pytest.approx(1, rel=1e-12)


def test_zero_blocks(tower):
    s = S.sample_polyomino(tower, 0, S.make_rng(0))
    assert s.filling == {("node", 0): 1}


def test_polyomino_n1_uniform(tower, block):
    shape = polyomino_shape(1)
    outcomes = [tuple(sorted(f.items())) for f in enumerate_fillings(build_poset(shape))]
    labels = S.sample_polyomino_batch(tower, 1, 60_000, S.make_rng(11))
    cells = S.element_cells(block, 1)
    elements = block_elements(block, 1)
    keys = [tuple(sorted((cells[e], int(v)) for e, v in zip(elements, row))) for row in labels]
    assert chi_square_uniformity(tally(keys, outcomes)).p_value > 0.001


def test_batch_matches_scalar_stream(tower, block):
    for n in (1, 3, 6):
        batch = S.sample_polyomino_batch(tower, n, 100, S.make_rng(21))
        rng = S.make_rng(21)
        elements = block_elements(block, n)
        for row in batch:
            f = S.sample_polyomino(tower, n, rng).filling
            assert row.tolist() == [f[e] for e in elements]


def test_seed_42_reproducible(tower):
    runs = [
        [sorted(S.sample_polyomino(tower, 3, rng).filling.items()) for _ in range(5)]
        for rng in (S.make_rng(42), S.make_rng(42))
    ]
    assert runs[0] == runs[1]
    first = S.sample_polyomino(tower, 3, S.make_rng(42))
    rec = S.sample_record("polyo-2nx3", 3, 42, first, polyomino_shape(3))
    assert rec["labels"] == GOLDEN_N3


GOLDEN_N3 = [[None, 3, None], [1, 6, 11], [4, 9, 12], [2, 10, 14], [5, 13, 18], [7, 15, 17], [8, 16, 19]]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tableau_samples_valid(tower, n):
    rng = S.make_rng(n)
    shape = tableau_shape(n)
    for _ in range(1000 if n < 3 else 300):
        s, attempts = S.sample_tableau_rejection(tower, n, rng)
        assert attempts >= 1
        assert is_valid_filling(shape, s.by_cell())


def test_tableau_n1_uniform(tower):
    rng = S.make_rng(5)
    outcomes = [tuple(sorted(f.items())) for f in enumerate_fillings(build_poset(tableau_shape(1)))]
    keys = [tuple(sorted(S.sample_tableau_rejection(tower, 1, rng)[0].by_cell().items())) for _ in range(5000)]
    assert chi_square_uniformity(tally(keys, outcomes)).p_value > 0.001


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_acceptance_rate(tower, block, n):
    size = 20_000
    labels = S.sample_polyomino_batch(tower, n, size, S.make_rng(30 + n))
    bottom = block_elements(block, n).index(("node", 0))
    rate = float(np.mean(labels[:, bottom] == 1))
    exact = count_linear_extensions(build_poset(tableau_shape(n))) / count_fillings(tower, n).count
    se = (exact * (1 - exact) / size) ** 0.5
    assert abs(rate - exact) <= 3 * se


def test_rejection_cap(tower):
    # acceptance at n = 4 is about 3%, so 200 single attempts almost surely fail once
    rng = S.make_rng(0)
    with pytest.raises(CapacityError):
        for _ in range(200):
            S.sample_tableau_rejection(tower, 4, rng, max_attempts=1)


def test_large_n_sample_is_valid():
    from youngwalls.density import polyo_2nx3_block

    tower = iterate_recurrence(polyo_2nx3_block(), 30)
    s = S.sample_polyomino(tower, 30, S.make_rng(1))
    assert is_valid_filling(polyomino_shape(30), s.by_cell())


def test_coloured_path_sampler_uniform():
    n = 3
    rng = S.make_rng(6)
    keys = [S.sample_coloured_path(n, rng).steps for _ in range(20_000)]
    outcomes = sorted(set(keys))
    assert len(outcomes) == catalan(n) * (2 ** (n + 1) - 1)
    assert chi_square_uniformity(tally(keys, outcomes)).p_value > 0.001


def test_sample_record_layout(tower):
    s = S.sample_polyomino(tower, 1, S.make_rng(7))
    rec = S.sample_record("polyo-2nx3", 1, 7, s, polyomino_shape(1))
    assert rec["row_offset"] == -1
    assert rec["labels"][0] == [None, s.by_cell()[(-1, 1)], None]
    assert len(rec["labels"]) == 3
    art = S.render_ascii(polyomino_shape(1), s.by_cell())
    assert len(art.splitlines()) == 5
