import cmath
import math

import numpy as np
import pytest

from lmoments import arith
from lmoments.estermann import (
    EstermannParams,
    SmoothBump,
    d_series,
    mellin_numeric,
    residues,
    voronoi_rhs,
    voronoi_terms,
)


def test_params_validation():
    with pytest.raises(ValueError):
        EstermannParams(2, 0.4, 1, 4, 0.6)  # (l, hq) > 1
    with pytest.raises(ValueError):
        EstermannParams(1, 0.4, 3, 3, 0.6)
    EstermannParams(6, 0.4, 1, 5, 0.6)


@pytest.mark.parametrize("kind", ["lognormal", "bump"])
def test_mellin_closed_vs_numeric(kind):
    V = SmoothBump(40.0, kind)
    for w in (0.4, 1 - 0.6 + 0.3j, -1.5 + 4j):
        ref = mellin_numeric(V, w)
        assert abs(V.mellin(w) - ref) < 1e-11 * max(1.0, abs(ref))


def test_window_support():
    V = SmoothBump(50.0, "bump")
    lo, hi = V.support()
    assert (lo, hi) == (25.0, 100.0)
    assert V(np.array([24.9, 100.1])).tolist() == [0.0, 0.0]
    assert abs(V(50.0) - 1) < 1e-15


def test_d_series_naive():
    p = EstermannParams(6, 0.3 + 0.2j, 2, 5, 0.5 + 0.5j)
    V = SmoothBump(30.0, "lognormal")
    lo, hi = V.support()
    total = 0j
    for n in range(1, int(hi) + 2):
        if math.gcd(n, p.q) != 1:
            continue
        total += (
            arith.sigma_lambda(n, p.lam) * n ** (-p.s)
            * cmath.exp(2j * math.pi * n * p.h / p.l) * complex(V(float(n)))
        )
    assert abs(d_series(p, V) - total) < 1e-12 * abs(total)


def test_residues_finite():
    # at q = 1 both residues are finite and nonzero for generic lambda
    r1, r2 = residues(0.4, 3, 1)
    assert np.isfinite(r1) and np.isfinite(r2) and r1 != 0


@pytest.mark.parametrize(
    "q, l, h, lam, s, M",
    [
        (1, 3, 1, 0.4, 0.6, 30.0),
        (1, 7, 2, 0.3 + 0.2j, 0.5 + 0.5j, 100.0),
        (2, 5, 1, 0.4, 0.5 + 0.5j, 30.0),
        (6, 7, 2, 0.3 + 0.2j, 0.6, 100.0),
    ],
)
def test_voronoi_lognormal(q, l, h, lam, s, M):
    p = EstermannParams(q, lam, h, l, s)
    V = SmoothBump(M, "lognormal")
    terms = voronoi_terms(p, V)
    assert terms.certified
    assert abs(d_series(p, V) - terms.total) < 1e-10


def test_displayed_form_agrees_only_at_q_one():
    V = SmoothBump(30.0, "lognormal")
    p1 = EstermannParams(1, 0.4, 1, 5, 0.6)
    assert abs(voronoi_rhs(p1, V, form="displayed") - voronoi_rhs(p1, V)) < 1e-13
    p6 = EstermannParams(6, 0.4, 1, 5, 0.6)
    lhs = d_series(p6, V)
    assert abs(voronoi_rhs(p6, V) - lhs) < 1e-10
    assert abs(voronoi_rhs(p6, V, form="displayed") - lhs) > 1e-3


def test_unknown_form():
    with pytest.raises(ValueError):
        voronoi_terms(EstermannParams(1, 0.4, 1, 3, 0.6), SmoothBump(30.0, "lognormal"), form="other")
