"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a list of ``Item`` records: a name, the measured value,
the tolerance it is held to, and whether it passed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import arith, identities
from .characters import orthogonality_tables, primitive_even_table
from .estermann import EstermannParams, SmoothBump, VoronoiQuad, d_series, voronoi_rhs
from .lcentral import ETA_CAP, ShiftTuple, afe_sides


# allowance for floating-point accumulation on top of a certified tail
ROUNDING = 1e-12


@dataclass
class Item:
    name: str
    value: float
    tolerance: float
    passed: bool
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)


def _random_shifts(rng: np.random.Generator, q: int, frac: float = 0.5, imag: float = 2.0) -> ShiftTuple:
    """Shifts with |Re| below frac * ETA_CAP / log q and |Im| <= imag."""
    cap = frac * ETA_CAP / (math.log(q) if q > 1 else 1.0)
    re = rng.uniform(-cap, cap, 4)
    im = rng.uniform(-imag, imag, 4)
    return ShiftTuple(*(re + 1j * im))


# ---------------------------------------------------------------------------
# approximate functional equation and orthogonality
# ---------------------------------------------------------------------------

AFE_MODULI = (5, 7, 12, 101)


def afe_suite(moduli=AFE_MODULI, draws: int = 5, seed: int = 0, tol: float = 1e-7) -> list[Item]:
    """All primitive even characters per modulus, ``draws`` random shift tuples each."""
    items = []
    for q in moduli:
        rng = np.random.default_rng([seed, q])
        chars, table = primitive_even_table(q)
        if not chars:
            continue
        for j in range(draws):
            sh = _random_shifts(rng, q)
            t0 = time.perf_counter()
            res = afe_sides(q, table, sh)
            worst = float(np.max(res.residual))
            items.append(Item(f"afe q={q} draw={j}", worst, tol, worst <= tol,
                              time.perf_counter() - t0, {"characters": len(chars)}))
    return items


def orthogonality_suite(q_max: int = 120, tol: float = 1e-9) -> list[Item]:
    """Every q <= q_max with q != 2 mod 4, all coprime pairs m, n < q at once."""
    items = []
    for q in range(1, q_max + 1):
        if q % 4 == 2:
            continue
        t0 = time.perf_counter()
        _, lhs, rhs = orthogonality_tables(q)
        err = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        items.append(Item(f"orthogonality q={q}", err, tol, err <= tol, time.perf_counter() - t0,
                          {"pairs": int(lhs.size)}))
    return items


# ---------------------------------------------------------------------------
# arithmetic lemmas
# ---------------------------------------------------------------------------


def _shift4(rng, re_cap: float, im_cap: float = 1.0):
    return tuple(complex(x, y) for x, y in zip(rng.uniform(-re_cap, re_cap, 4), rng.uniform(-im_cap, im_cap, 4)))


def _random_squarefree(rng, hi: int) -> int:
    while True:
        q = int(rng.integers(1, hi + 1))
        if arith.is_squarefree(q):
            return q


def lemma_suite(draws: int = 100, seed: int = 0, exact_tol: float = 1e-11, tail_tol: float = 1e-8) -> list[Item]:
    """Random draws for every arithmetic identity, each compared two ways."""
    rng = np.random.default_rng(seed)
    items: list[Item] = []

    def add(name, value, tol, t0, **extra):
        items.append(Item(name, float(value), tol, bool(value <= tol), time.perf_counter() - t0, extra))

    for j in range(draws):
        t0 = time.perf_counter()
        a = int(rng.integers(1, 10_001))
        sh = _shift4(rng, 0.2)
        vals = identities.y_symmetries(a, sh)
        gap = max(identities.relative_gap(vals[0], v) for v in vals[1:])
        add(f"Y symmetry a={a} #{j}", gap, exact_tol, t0)

    for j in range(draws):
        t0 = time.perf_counter()
        a = int(rng.integers(1, 61))
        sh = _shift4(rng, 0.1)
        res = identities.f_a_both(a, sh, identities.TruncationBudget(tol=tail_tol / 10))
        ok = res.diff <= res.tail_bound + ROUNDING * abs(res.closed) and res.tail_bound <= tail_tol
        items.append(Item(f"F_a a={a} #{j}", res.diff, res.tail_bound, bool(ok), time.perf_counter() - t0,
                          {"tail_bound": res.tail_bound, "terms": res.terms}))

    for j in range(draws):
        t0 = time.perf_counter()
        q = _random_squarefree(rng, 210)
        sh = _shift4(rng, 0.1)
        s = complex(rng.uniform(0.1, 0.6), rng.uniform(-2, 2))
        res = identities.g_q_both(q, sh, s)
        add(f"G_q q={q} #{j}", identities.relative_gap(res.raw, res.closed), exact_tol, t0)

    for j in range(draws):
        t0 = time.perf_counter()
        a = int(rng.integers(1, 6))
        b = int(rng.integers(1, 6))
        while math.gcd(a, b) != 1:
            b = int(rng.integers(1, 6))
        s = complex(rng.uniform(3.5, 5.0), rng.uniform(-3, 3))
        lam = complex(rng.uniform(1.5, 3.0), rng.uniform(-1, 1))
        res = identities.ramanujan_series_both(a, b, s, lam)
        ok = res.diff <= res.tail_bound + ROUNDING * abs(res.closed) and res.tail_bound <= tail_tol
        items.append(Item(f"Ramanujan series a={a} b={b} #{j}", res.diff, res.tail_bound, bool(ok),
                          time.perf_counter() - t0, {"tail_bound": res.tail_bound}))

    for j in range(draws):
        t0 = time.perf_counter()
        q = int(rng.integers(1, 1001))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-3, 3))
        res = identities.divisor_identity_both(q, z)
        # both sides vanish when q = 2 mod 4, so measure against the summand size
        scale = sum(arith.euler_phi(d) ** 2 * d ** (-1 - z.real) for d in arith.divisors(q))
        add(f"divisor identity q={q} #{j}", res.diff / max(abs(res.closed), scale), exact_tol, t0)

    primes = [p for p in range(2, 200) if len(arith.divisors(p)) == 2]
    for j in range(draws):
        t0 = time.perf_counter()
        p = int(rng.choice(primes))
        al, be = _shift4(rng, 0.3, 2.0)[:2]
        g1 = identities.relative_gap(identities.varpi(p, p, al, be),
                                     -(p ** (-0.5 - al)) - p ** (-0.5 - be))
        g2 = identities.relative_gap(identities.varpi(p * p, p, al, be), p ** (-1 - al - be))
        g3 = abs(identities.varpi(1, p, al, be) - 1)
        add(f"varpi special values p={p} #{j}", max(g1, g2, g3), exact_tol, t0)

    return items


# ---------------------------------------------------------------------------
# Voronoi summation
# ---------------------------------------------------------------------------


def voronoi_grid() -> list[tuple[EstermannParams, SmoothBump]]:
    """q in {1,2,6}, l in {3,5,7}, h in {1,2}, two lambdas, two s, M in {30,100}; (l, hq) = 1."""
    out = []
    for q in (1, 2, 6):
        for l in (3, 5, 7):
            for h in (1, 2):
                if math.gcd(l, h * q) != 1:
                    continue
                for lam in (0.4, 0.3 + 0.2j):
                    for s in (0.6, 0.5 + 0.5j):
                        for M in (30.0, 100.0):
                            out.append((EstermannParams(q, lam, h, l, s), SmoothBump(M, "lognormal")))
    return out


def voronoi_suite(tol: float = 1e-6, include_bump: bool = True, quad: VoronoiQuad = VoronoiQuad()) -> list[Item]:
    cases = voronoi_grid()
    if include_bump:
        cases.append((EstermannParams(1, 0.4, 1, 3, 0.6), SmoothBump(50.0, "bump")))
    items = []
    for p, V in cases:
        t0 = time.perf_counter()
        lhs = d_series(p, V)
        rhs = voronoi_rhs(p, V, quad)
        err = abs(lhs - rhs)
        items.append(Item(
            f"voronoi q={p.q} l={p.l} h={p.h} lam={p.lam} s={p.s} {V.kind} M={V.M:g}",
            err, tol, err <= tol, time.perf_counter() - t0,
        ))
    return items
