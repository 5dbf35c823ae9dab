import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lmoments import kloosterman as K


def test_small_values():
    assert K.kloosterman(1, 1, 2) == pytest.approx(1.0, abs=1e-14)
    assert K.kloosterman(1, 1, 3) == pytest.approx(-1.0, abs=1e-14)
    assert K.kloosterman(K.KloostermanQuery(0, 0, 12)) == pytest.approx(4.0, abs=1e-13)  # Ramanujan c_12(0) = phi(12)
    assert K.kloosterman(5, 7, 1) == 1.0


def test_query_validation():
    with pytest.raises(ValueError):
        K.KloostermanQuery(1, 1, 0)
    with pytest.raises(ValueError):
        K.kloosterman(1, 1, 0)


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(1, 400))
def test_real_and_matches_direct_sum(m, n, c):
    direct = K.kloosterman_direct(m, n, c)
    assert abs(direct.imag) <= 1e-9 * math.sqrt(c)
    assert abs(K.kloosterman(m, n, c) - direct.real) <= 1e-9 * math.sqrt(c)


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(1, 2000))
def test_weil_bound(m, n, c):
    assert abs(K.kloosterman(m, n, c)) <= K.weil_bound(m, n, c) * (1 + 1e-12)


def test_twisted_multiplicativity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        c1, c2 = (int(x) for x in rng.integers(1, 201, 2))
        if math.gcd(c1, c2) != 1:
            continue
        m, n = (int(x) for x in rng.integers(-10**4, 10**4, 2))
        i2 = pow(c2, -1, c1) if c1 > 1 else 0
        i1 = pow(c1, -1, c2) if c2 > 1 else 0
        lhs = K.kloosterman(m, n, c1 * c2)
        rhs = K.kloosterman(m * i2, n * i2, c1) * K.kloosterman(m * i1, n * i1, c2)
        assert abs(lhs - rhs) < 1e-9 * math.sqrt(c1 * c2)


def test_cusp_context():
    cusp = K.CuspContext(3, 4)
    assert cusp.Q == 12 and (3 * cusp.ubar) % 4 == 1
    with pytest.raises(ValueError):
        K.CuspContext(2, 4)
    with pytest.raises(ValueError):
        K.cusp_kloosterman(1, 1, 2, cusp)


def test_cusp_kloosterman_trivial_cusp_is_classical():
    for l in range(1, 30):
        assert K.cusp_kloosterman(5, 7, l, K.CuspContext(1, 1)) == pytest.approx(K.kloosterman(5, 7, l))


def test_phi_norms():
    phi = K.make_phi(3.0)
    assert phi.support == (3.0, 24.0)
    assert phi(3.0) == 0 and phi(24.0) == 0 and phi(13.5) == pytest.approx(1.0)
    n = phi.norms()
    assert n["sup"] == pytest.approx(1.0, abs=1e-9)
    # the bump rises to 1 and falls back: total variation 2
    assert n["d1_l1"] == pytest.approx(2.0, rel=1e-6)
    # X ||phi''||_1 is scale free
    assert 3.0 * n["d2_l1"] == pytest.approx(12.0 * K.make_phi(12.0).norms()["d2_l1"], rel=1e-6)
    with pytest.raises(ValueError):
        K.make_phi(0)


def test_phi_derivatives_finite_difference():
    phi = K.make_phi(2.0)
    x = np.linspace(2.5, 15.5, 40)
    h = 1e-5
    assert np.max(np.abs((phi(x + h) - phi(x - h)) / (2 * h) - phi.d1(x))) < 1e-6
    assert np.max(np.abs((phi.d1(x + h) - phi.d1(x - h)) / (2 * h) - phi.d2(x))) < 1e-5


ORACLE_CONFIGS = [
    K.HarnessConfig(8, 8, s=1, cusp=K.CuspContext(1, 1), X=1.0),
    K.HarnessConfig(6, 10, s=2, cusp=K.CuspContext(3, 1), X=0.5, sign=-1),
    K.HarnessConfig(10, 6, s=1, cusp=K.CuspContext(1, 4), X=2.0),
    K.HarnessConfig(5, 5, s=6, cusp=K.CuspContext(3, 4), X=0.25),
    K.HarnessConfig(7, 9, s=3, cusp=K.CuspContext(5, 2), X=1.5, sign=-1),
]


@pytest.mark.parametrize("cfg", ORACLE_CONFIGS)
def test_thkls_lhs_matches_naive(cfg):
    rng = np.random.default_rng(cfg.M * 100 + cfg.N)
    a = rng.standard_normal(cfg.M + 1) + 1j * rng.standard_normal(cfg.M + 1)
    b = rng.standard_normal(cfg.N + 1)
    fast = K.thkls_lhs(cfg, a, b, K.make_phi(cfg.x_value))
    slow = K.thkls_lhs_naive(cfg, a, b)
    assert abs(fast - slow) <= 1e-10 * max(1.0, abs(slow))


def test_thkls_lhs_phi_scale_checked():
    cfg = ORACLE_CONFIGS[0]
    with pytest.raises(ValueError):
        K.thkls_lhs(cfg, np.ones(9), np.ones(9), K.make_phi(2.0))


def test_thkls1_default_x():
    cfg = K.HarnessConfig(8, 8, L=4, s=2, cusp=K.CuspContext(3, 1))
    assert cfg.x_value == pytest.approx(math.sqrt(2 * 64) / (3 * 4))
    a, b = np.ones(9), np.ones(9)
    assert K.thkls1_rhs_envelope(cfg, a, b) > 0
    assert np.isfinite(K.thkls1_lhs(cfg, a, b))


def test_envelope_scaling():
    cfg = ORACLE_CONFIGS[2]
    a = np.full(cfg.M + 1, 0.5)
    b = np.full(cfg.N + 1, 2.0)
    e1 = K.thkls_rhs_envelope(cfg, a, b)
    # ||a||_inf enters as a square root, ||b||_2 linearly
    assert K.thkls_rhs_envelope(cfg, 4 * a, b) == pytest.approx(2 * e1)
    assert K.thkls_rhs_envelope(cfg, a, 3 * b) == pytest.approx(3 * e1)


def test_bilinear_matches_naive():
    rng = np.random.default_rng(7)
    alpha = rng.standard_normal(20)
    beta = np.exp(2j * np.pi * rng.random(30))
    lhs, env = K.bilinear_harness(91, 4, 20, 30, alpha, beta)
    assert lhs == pytest.approx(K.bilinear_naive(91, 4, alpha, beta), rel=1e-11)
    assert env > 0
    with pytest.raises(ValueError):
        K.bilinear_lhs(91, 7, alpha, beta)


def test_harness_seeded_and_stable():
    a = K.run_harness("thkls", trials=24, seed=5)
    b = K.run_harness("thkls", trials=24, seed=5)
    c = K.run_harness("thkls", trials=24, seed=6)
    assert a.as_dict() == b.as_dict()
    assert np.isfinite(a.max_ratio) and a.max_ratio > 0
    assert K.stability(a, c) < 0.1
    with pytest.raises(ValueError):
        K.run_harness("nope", trials=1)
