import math
from fractions import Fraction

import numpy as np
import pytest

from lmoments import arith
from lmoments.characters import (
    build_group,
    enumerate_primitive_even,
    gauss_sum,
    orthogonality_pair_sum,
    orthogonality_rhs,
    primitive_even_table,
)

pytestmark = pytest.mark.filterwarnings("ignore:q=.* is 2 mod 4")


def test_group_shapes():
    assert build_group(5).orders == (4,)
    assert sorted(build_group(8).orders) == [2, 2]
    assert build_group(1).orders in ((), (1,))
    for q in range(1, 301):
        assert math.prod(build_group(q).orders) == arith.euler_phi(q)


@pytest.mark.parametrize("q, count", [(5, 1), (7, 2), (8, 1), (12, 1), (101, 49), (6, 0)])
def test_primitive_even_counts(q, count):
    assert len(enumerate_primitive_even(build_group(q))) == count


def test_primitive_even_count_formula():
    # the count is the orthogonality relation at m = n = 1, a divisor sum
    for q in range(3, 301):
        chars = enumerate_primitive_even(build_group(q))
        assert all(c.is_primitive and c.is_even for c in chars)
        assert len(chars) == orthogonality_rhs(q, 1, 1)


def test_eval_basics():
    g = build_group(5)
    chi0 = g.principal()
    assert chi0(3) == 1 and chi0(10) == 0
    quad = enumerate_primitive_even(g)[0]
    assert abs(quad(2) + 1) < 1e-15
    assert abs(quad(4) - 1) < 1e-15


def test_complete_multiplicativity_and_zeros():
    rng = np.random.default_rng(3)
    for q in list(range(3, 300, 7)) + [256, 243, 210]:
        g = build_group(q)
        chars = list(g.characters())
        for _ in range(40):
            chi = chars[rng.integers(len(chars))]
            m, n = (int(x) for x in rng.integers(1, 10 * q, 2))
            if math.gcd(m * n, q) == 1:
                assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
            else:
                assert chi(m * n) == 0


def test_parity_matches_value_at_minus_one():
    for q in range(3, 301, 4):
        for chi in build_group(q).characters():
            assert chi.is_even == (abs(chi(q - 1) - 1) < 1e-12)


def test_primitivity_matches_conductor_search():
    # oracle: chi is primitive iff no proper divisor d of q has chi trivial on units = 1 mod d
    for q in range(2, 301, 3):
        g = build_group(q)
        units = [n for n in range(1, q) if math.gcd(n, q) == 1]
        for chi in g.characters():
            induced = any(
                all(abs(chi(n) - 1) < 1e-12 for n in units if n % d == 1 % d)
                for d in arith.divisors(q) if d < q
            )
            assert chi.is_primitive == (not induced)


def test_table_matches_pointwise():
    chars, tab = primitive_even_table(60)
    for chi, row in zip(chars, tab):
        for n in range(60):
            assert abs(row[n] - chi(n)) < 1e-13


def test_gauss_sums():
    quad = enumerate_primitive_even(build_group(5))[0]
    assert abs(gauss_sum(quad) - math.sqrt(5)) < 1e-12
    assert abs(gauss_sum(build_group(7).principal()) + 1) < 1e-12
    for q in (7, 12, 16, 45, 101):
        for chi in enumerate_primitive_even(build_group(q)):
            assert abs(abs(gauss_sum(chi)) - math.sqrt(q)) < 1e-10


def test_orthogonality_examples():
    lhs, rhs = orthogonality_pair_sum(5, 1, 1)
    assert abs(lhs - 1) < 1e-13 and rhs == 1
    lhs, rhs = orthogonality_pair_sum(7, 1, 1)
    assert abs(lhs - 2) < 1e-13 and rhs == 2
    lhs, rhs = orthogonality_pair_sum(12, 5, 7)
    assert abs(lhs - float(rhs)) < 1e-13
    assert isinstance(orthogonality_rhs(9, 2, 4), Fraction)


def test_orthogonality_requires_units():
    with pytest.raises(ValueError):
        orthogonality_pair_sum(12, 2, 5)
