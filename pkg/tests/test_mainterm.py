import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lmoments.characters import build_group, enumerate_primitive_even
from lmoments.lcentral import ShiftTuple, dirichlet_l
from lmoments.mainterm import (
    DEFAULT_DIRECTION,
    MollifierSpec,
    MomentQuery,
    circle_mean,
    empirical_mollified_moment,
    empirical_twisted_moment,
    main_term_m,
    mollified_main_term,
    predicted_twisted,
    shift_zero_limit,
    y_factor,
    z_hkq,
    zeta_q,
)


def _shifts(rng, cap=0.04, imag=0.04):
    return ShiftTuple(*(rng.uniform(-cap, cap, 4) + 1j * rng.uniform(-imag, imag, 4)))


def test_zeta_q_examples():
    assert abs(zeta_q(2, 1) - math.pi**2 / 6) < 1e-12
    assert abs(zeta_q(2, 7) - (1 - 7**-2) * math.pi**2 / 6) < 1e-12
    assert abs(zeta_q(2, 6) - math.pi**2 / 9) < 1e-12


def test_y_factor_examples():
    assert y_factor(1, 0.1, 0.2j, -0.1, 0.05) == 1
    for p in (2, 3, 101):
        assert abs(y_factor(p, 0, 0, 0, 0) - 2 * p / (p + 1)) < 1e-13


@given(st.integers(1, 10_000), st.integers(0, 2**32 - 1))
def test_y_factor_transposition(a, seed):
    al, be, ga, de = _shifts(np.random.default_rng(seed), 0.2)
    ref = y_factor(a, al, be, ga, de)
    for other in (y_factor(a, be, al, ga, de), y_factor(a, be, al, de, ga)):
        assert abs(other - ref) <= 1e-12 * abs(ref)


def test_z_hkq_trivial_case():
    a, b, c, d = 0.011, -0.02j, 0.03 + 0.01j, 0.004
    z = lambda s: mpmath.zeta(mpmath.mpc(s))  # noqa: E731
    ref = z(1 + a + c) * z(1 + a + d) * z(1 + b + c) * z(1 + b + d) / z(2 + a + b + c + d)
    assert abs(z_hkq(1, 1, 1, (a, b, c, d)) - complex(ref)) < 1e-11 * abs(complex(ref))


def test_z_hkq_transposition_invariance():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b, c, d = _shifts(rng)
        h, k = (int(x) for x in rng.integers(1, 30, 2))
        ref = z_hkq(h, k, 101, (a, b, c, d))
        assert abs(z_hkq(h, k, 101, (b, a, c, d)) - ref) <= 1e-11 * abs(ref)
        assert abs(z_hkq(h, k, 101, (a, b, d, c)) - ref) <= 1e-11 * abs(ref)


def test_z_hkq_independent_rederivation():
    # h = 2, k = 3 prime: Y_p written out by hand, zeta_q from mpmath
    a, b, c, d = (mpmath.mpf(x) for x in (0.01, 0.02, 0.03, 0.04))

    def y_prime(p, al, be, ga, de):
        loc = (1 - p ** (-1 - al - ga)) * (1 - p ** (-1 - be - ga)) / (1 - p ** (-2 - al - be - ga - de))
        return p ** (-ga) * (1 + p ** (ga - de) * loc)

    def zq(s):
        return mpmath.zeta(s) * (1 - mpmath.mpf(5) ** (-s))

    ref = y_prime(2, a, b, c, d) * y_prime(3, c, d, a, b) * (
        zq(1 + a + c) * zq(1 + a + d) * zq(1 + b + c) * zq(1 + b + d) / zq(2 + a + b + c + d)
    )
    assert abs(z_hkq(2, 3, 5, (0.01, 0.02, 0.03, 0.04)) - float(ref)) < 1e-11 * float(ref)


def test_main_term_symmetries():
    # generic: imaginary parts of unit size keep alpha + gamma etc. away from 0,
    # so the six terms do not cancel catastrophically
    rng = np.random.default_rng(12)
    for _ in range(100):
        a, b, c, d = _shifts(rng, imag=1.0)
        h, k = 2, 3
        ref = main_term_m(h, k, 101, (a, b, c, d))
        assert abs(main_term_m(k, h, 101, (c, d, a, b)) - ref) <= 1e-10 * abs(ref)
        assert abs(main_term_m(h, k, 101, (b, a, c, d)) - ref) <= 1e-10 * abs(ref)


def test_main_term_finite_near_zero():
    eps = 1e-2
    near = main_term_m(1, 1, 101, ShiftTuple.along(eps))
    limit, err = predicted_twisted(101, 1, 1)
    assert np.isfinite(near) and err < 1e-8
    # individual terms are of size 1/eps^4; the sum stays close to its limit
    assert abs(near - limit) < 0.2 * abs(limit)


def test_shift_zero_limit_examples():
    assert shift_zero_limit(lambda t: 3.5 + 0j) == 3.5
    assert abs(shift_zero_limit(lambda t: t**3 + 5) - 5) < 1e-13
    assert abs(shift_zero_limit(lambda t: 1 / (t - 2), rho=0.1, nodes=8) + 0.5) < 1e-10


def test_shift_zero_limit_default_is_stable():
    f = lambda t: main_term_m(1, 1, 101, ShiftTuple.along(t, DEFAULT_DIRECTION))  # noqa: E731
    a = circle_mean(f, 0.05, 32)
    b = circle_mean(f, 0.04, 48)
    assert abs(a - b) <= 1e-6 * abs(b)


@pytest.mark.xfail(strict=True, reason="a Gamma pole at distance 1/8 in t limits M = 8 nodes to about 1e-3")
def test_shift_zero_limit_eight_nodes_literal():
    f = lambda t: main_term_m(1, 1, 101, ShiftTuple.along(t, DEFAULT_DIRECTION))  # noqa: E731
    a = circle_mean(f, 0.05, 8)
    b = circle_mean(f, 0.04, 12)
    assert abs(a - b) <= 1e-6 * abs(b)


def test_empirical_single_character():
    chi = enumerate_primitive_even(build_group(5))[0]
    sh = ShiftTuple(0.01, 0.02j, -0.01, 0.005)
    a, b, c, d = sh
    lone = (
        dirichlet_l(0.5 + a, chi) * dirichlet_l(0.5 + b, chi)
        * dirichlet_l(0.5 + c, chi.conj()) * dirichlet_l(0.5 + d, chi.conj())
    )
    assert abs(empirical_twisted_moment(MomentQuery(5, shifts=sh)) - 2 / 3 * lone) < 1e-12


def test_empirical_conjugation_symmetry():
    sh = ShiftTuple(0.01 + 0.3j, -0.2j, 0.005, 0.1j)
    lhs = empirical_twisted_moment(MomentQuery(101, 2, 1, sh)).conjugate()
    csh = ShiftTuple(sh.gamma.conjugate(), sh.delta.conjugate(), sh.alpha.conjugate(), sh.beta.conjugate())
    rhs = empirical_twisted_moment(MomentQuery(101, 1, 2, csh))
    assert abs(lhs - rhs) < 1e-9 * abs(rhs)


def test_empirical_h_k_one_real_positive():
    for q in (5, 7, 12, 101):
        m = empirical_twisted_moment(MomentQuery(q))
        assert m.real > 0 and abs(m.imag) < 1e-12 * m.real


def test_workers_do_not_change_bits():
    q = MomentQuery(211, 2, 1, ShiftTuple(0.01, 0, 0.003j, 0))
    assert empirical_twisted_moment(q, workers=1) == empirical_twisted_moment(q, workers=8)


def test_moment_query_validation():
    with pytest.raises(ValueError):
        MomentQuery(101, 2, 4)
    with pytest.raises(ValueError):
        MomentQuery(101, 101, 1)


def test_mollifier_coefficients():
    coef = MollifierSpec(10).coefficients(101)
    assert coef[1] == 1 and 4 not in coef and 9 not in coef
    assert abs(coef[6] - (1 - math.log(6) / math.log(10))) < 1e-15
    assert 5 not in MollifierSpec(10).coefficients(5)


def test_mollified_short_is_twisted():
    spec = MollifierSpec(1.5)
    assert empirical_mollified_moment(101, spec) == empirical_twisted_moment(MomentQuery(101))
    sh = ShiftTuple(0.01, 0.02, 0.03, 0.04)
    assert mollified_main_term(101, spec, sh) == main_term_m(1, 1, 101, sh)


def test_mollified_two_term_expansion():
    c = 0.7 - 0.4j
    spec = MollifierSpec(3, "explicit", ((1, 1), (2, c)))
    q = 101
    T = lambda h, k: empirical_twisted_moment(MomentQuery(q, h, k))  # noqa: E731
    expected = T(1, 1) * (1 + abs(c) ** 2 / 2) + c / math.sqrt(2) * T(2, 1) + c.conjugate() / math.sqrt(2) * T(1, 2)
    assert abs(empirical_mollified_moment(q, spec) - expected) < 1e-10 * abs(expected)

    sh = ShiftTuple(0.01, 0.02, 0.03, 0.04)
    M = lambda h, k: main_term_m(h, k, q, sh)  # noqa: E731
    hand = M(1, 1) + c.conjugate() / 2 * M(1, 2) + c / 2 * M(2, 1) + abs(c) ** 2 / 2 * M(1, 1)
    assert abs(mollified_main_term(q, spec, sh) - hand) < 1e-12 * abs(hand)


def test_mollified_main_term_quadratic_scaling():
    sh = ShiftTuple(0.01, 0.02, 0.03, 0.04)
    base = MollifierSpec(10, "explicit", ((1, 1), (2, 0.3), (3, -0.5j), (6, 0.2)))
    lam = 1.7 - 0.2j
    scaled = MollifierSpec(10, "explicit", tuple((h, lam * c) for h, c in base.explicit))
    a = mollified_main_term(101, base, sh)
    b = mollified_main_term(101, scaled, sh)
    assert abs(b - abs(lam) ** 2 * a) < 1e-12 * abs(b)
