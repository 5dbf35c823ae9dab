"""Two-route numerical checks of the arithmetic lemmas behind the main terms.

Every ``*_both`` function returns the raw (truncated) definition next to the
closed form.  Infinite sums come with a certified tail: an explicit majorant
of everything that was not summed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import arith
from .lcentral import ShiftTuple
from .mainterm import riemann_zeta, y_factor, zeta_q


def _pw(n: int, z: complex) -> complex:
    """n**z via exp(z log n)."""
    return cmath.exp(complex(z) * math.log(n))


@dataclass(frozen=True)
class TruncationBudget:
    """Input limits for a truncated sum; the result reports the tail it achieved."""

    max_terms: int = 200_000
    tol: float = 1e-10


@dataclass(frozen=True)
class BothResult:
    raw: complex
    closed: complex
    tail_bound: float = 0.0
    terms: int = 0
    achieved: bool = True

    def __iter__(self):
        return iter((self.raw, self.closed))

    @property
    def diff(self) -> float:
        return abs(self.raw - self.closed)


# ---------------------------------------------------------------------------
# F_a: sum over d | a^infinity
# ---------------------------------------------------------------------------


def _local_sigma(p: int, e_max: int, x: complex, y: complex) -> np.ndarray:
    # sigma_{x,y}(p^e) = sum_{i+j=e} p^{-ix - jy}, e = 0..e_max
    lp = math.log(p)
    out = np.empty(e_max + 1, dtype=complex)
    for e in range(e_max + 1):
        i = np.arange(e + 1)
        out[e] = np.sum(np.exp(-(i * x + (e - i) * y) * lp))
    return out


def f_a_closed(a: int, shifts) -> complex:
    al, be, ga, de = shifts
    out = y_factor(a, al, be, ga, de)
    for p in arith.prime_divisors(a):
        q = lambda z: 1.0 - cmath.exp(-z * math.log(p))  # noqa: E731
        out *= q(2 + al + be + ga + de) / (q(1 + al + ga) * q(1 + be + ga) * q(1 + al + de) * q(1 + be + de))
    return out


def f_a_raw(a: int, shifts, log_d_max: float) -> tuple[complex, int, float]:
    """Partial sum over d | a^inf with log d <= log_d_max, its size, and the majorant tail."""
    al, be, ga, de = shifts
    fac = arith.factorize(a)
    primes = [p for p, _ in fac]
    ks = [k for _, k in fac]
    if not primes:
        return 1.0 + 0j, 1, 0.0
    kap1 = max(0.0, -al.real, -be.real)
    kap2 = max(0.0, -ga.real, -de.real)
    expo = kap1 + kap2 - 1.0
    if expo >= 0:
        raise ValueError("shifts too far left for the d-sum to converge")
    e_caps = [int(log_d_max / math.log(p)) for p in primes]
    s_ab = [_local_sigma(p, c, al, be) for p, c in zip(primes, e_caps)]
    s_gd = [_local_sigma(p, c + k, ga, de) for p, c, k in zip(primes, e_caps, ks)]
    total = 0j
    majorant_in = 0.0
    terms = 0
    logs = [math.log(p) for p in primes]

    def rec(i: int, logd: float, val: complex, maj: float):
        nonlocal total, majorant_in, terms
        if i == len(primes):
            total += val * math.exp(-logd)
            majorant_in += maj
            terms += 1
            return
        p_log, k = logs[i], ks[i]
        for e in range(e_caps[i] + 1):
            ld = logd + e * p_log
            if ld > log_d_max + 1e-12:
                break
            rec(i + 1, ld, val * s_ab[i][e] * s_gd[i][e + k],
                maj * (e + 1) * (e + k + 1) * math.exp(expo * e * p_log))

    rec(0, 0.0, 1.0 + 0j, 1.0)
    full = 1.0
    for p, k in zip(primes, ks):
        r = p**expo
        full *= (1 + r) / (1 - r) ** 3 + k / (1 - r) ** 2
    scale = a**kap2
    tail = max(0.0, full - majorant_in) * scale
    return total, terms, tail


def f_a_both(a: int, shifts, budget: TruncationBudget = TruncationBudget()) -> BothResult:
    """F_a two ways: raw d-sum (grown until the certified tail meets tol) and Y_a times local factors."""
    shifts = ShiftTuple(*shifts)
    if shifts.max_abs_real() >= 0.2:
        raise ValueError("need |Re shift| < 0.2 for the d-sum")
    closed = f_a_closed(a, shifts)
    log_d = 20.0
    while True:
        raw, terms, tail = f_a_raw(a, shifts, log_d)
        if tail <= budget.tol:
            return BothResult(raw, closed, tail, terms, True)
        if terms > budget.max_terms:
            return BothResult(raw, closed, tail, terms, False)
        log_d *= 1.5


# ---------------------------------------------------------------------------
# varpi, script Y, G_q
# ---------------------------------------------------------------------------


def varpi(a: int, q: int, alpha: complex, beta: complex) -> complex:
    """sum over a1 a2 = a, a1 | q, a2 | q of mu(a1) mu(a2) a1^{-1/2-alpha} a2^{-1/2-beta}."""
    total = 0j
    for a1 in arith.divisors(a):
        a2 = a // a1
        if q % a1 or q % a2:
            continue
        m = arith.mobius(a1) * arith.mobius(a2)
        if m:
            total += m * _pw(a1, -0.5 - alpha) * _pw(a2, -0.5 - beta)
    return total


def script_y(h: int, k: int, shifts, s: complex) -> complex:
    """Y_h(-delta-s, beta+s, gamma+s, -alpha-s) Y_k(gamma+s, -alpha-s, -delta-s, beta+s)."""
    al, be, ga, de = (complex(z) for z in shifts)
    return y_factor(h, -de - s, be + s, ga + s, -al - s) * y_factor(k, ga + s, -al - s, -de - s, be + s)


def g_q_raw(q: int, shifts, s: complex) -> complex:
    al, be, ga, de = (complex(z) for z in shifts)
    q2 = q * q
    total = 0j
    for a in arith.divisors(q2):
        for b in arith.divisors(q2 // a):
            if math.gcd(a, b) != 1:
                continue
            for c in arith.divisors(q2 // (a * b)):
                w = varpi(a * c, q, al, be) * varpi(b * c, q, ga, de)
                if w == 0:
                    continue
                total += (
                    w * _pw(a, -0.5 - s) * _pw(b, -0.5 - s) * _pw(c, -2 * s)
                    * script_y(a, b, (al, be, ga, de), s)
                )
    return total


def g_q_closed(q: int, shifts, s: complex) -> complex:
    al, be, ga, de = (complex(z) for z in shifts)
    out = 1.0 + 0j
    for p in arith.prime_divisors(q):
        ip = lambda z: cmath.exp(-z * math.log(p))  # noqa: E731
        out *= (
            (1 - ip(1 - al + be))
            * (1 - ip(1 + be + ga + 2 * s))
            * (1 - ip(1 + ga - de))
            / (1 - ip(2 - al + be + ga - de))
            * (1 - 2.0 / p + ip(1 + al + de + 2 * s))
        )
    return out


def g_q_both(q: int, shifts, s: complex) -> BothResult:
    if not arith.is_squarefree(q):
        raise ValueError("G_q identity needs squarefree q")
    return BothResult(g_q_raw(q, shifts, s), g_q_closed(q, shifts, s))


# ---------------------------------------------------------------------------
# Ramanujan-sum Dirichlet series
# ---------------------------------------------------------------------------


def ramanujan_series_closed(a: int, b: int, s: complex, lam: complex) -> complex:
    out = _pw(a, 1 - s) * riemann_zeta(s) * zeta_q(1 + lam + s, b) / zeta_q(2 + lam, a * b)
    for p in arith.prime_divisors(a):
        out *= 1 - _pw(p, -(1 - s))
    return out


def ramanujan_series_raw(a: int, b: int, s: complex, lam: complex, r_max: int, l_max: int) -> complex:
    """sum_{r <= R} r^-s sum_{l <= L, (l, b) = 1} c_{al}(r) l^{-2-lam}.

    Uses c_n(r) = sum_{d | (n, r)} d mu(n/d), so the r-sum becomes
    sum_{d | al} d^{1-s} mu(al/d) H(R // d) with H the partial sums of j^-s.
    """
    s, lam = complex(s), complex(lam)
    j = np.arange(1, r_max + 1, dtype=float)
    h = np.concatenate([[0.0], np.cumsum(np.exp(-s * np.log(j)))])
    mu = arith.mobius_sieve(a * l_max)
    ls = np.arange(1, l_max + 1)
    lw = np.exp(-(2 + lam) * np.log(ls)) * (np.gcd(ls, b) == 1)
    total = 0j
    for d in range(1, min(a * l_max, r_max) + 1):
        step = d // math.gcd(d, a)  # d | a l  <=>  step | l
        l = np.arange(step, l_max + 1, step)
        if l.size == 0:
            continue
        mu_v = mu[a * l // d]
        total += _pw(d, 1 - s) * h[r_max // d] * np.sum(mu_v * lw[l - 1])
    return complex(total)


def ramanujan_series_tail(a: int, s: complex, lam: complex, r_max: int, l_max: int) -> float:
    """Majorant of the rectangular truncation error (r > R, or r <= R and l > L)."""
    sig, lr = complex(s).real, complex(lam).real
    if sig <= 1 or lr <= -1:
        raise ValueError("need Re s > 1 and Re lambda > -1")
    zeta2 = riemann_zeta(2 + lr).real
    big_r = float(r_max)
    lr_ = math.log(big_r)
    r_tail = a * zeta2 * sig * big_r ** (1 - sig) * (
        lr_ / (sig - 1) + 1 / (sig - 1) ** 2 + 1 / (sig - 1)
    )
    # sum_{r <= R} sigma_1(r) r^-sig, by sieve
    sig1 = np.zeros(r_max + 1)
    for dd in range(1, r_max + 1):
        sig1[dd::dd] += dd
    rs = np.arange(1, r_max + 1, dtype=float)
    head = float(np.sum(sig1[1:] * rs ** (-sig)))
    l_tail = head * l_max ** (-1 - lr) / (1 + lr)
    return r_tail + l_tail


def ramanujan_series_both(
    a: int, b: int, s: complex, lam: complex, r_max: int = 10_000, l_max: int = 10_000
) -> BothResult:
    if math.gcd(a, b) != 1:
        raise ValueError("a and b must be coprime")
    if complex(s).real <= 1 or complex(lam).real <= -1:
        raise ValueError("need Re s > 1 and Re lambda > -1")
    raw = ramanujan_series_raw(a, b, s, lam, r_max, l_max)
    closed = ramanujan_series_closed(a, b, s, lam)
    tail = ramanujan_series_tail(a, s, lam, r_max, l_max)
    return BothResult(raw, closed, tail, r_max * l_max, True)


# ---------------------------------------------------------------------------
# divisor-sum identity
# ---------------------------------------------------------------------------


def divisor_identity_both(q: int, z: complex) -> BothResult:
    z = complex(z)
    lhs = 0j
    for d in arith.divisors(q):
        mu = arith.mobius(q // d)
        if mu == 0:
            continue
        term = arith.euler_phi(d) ** 2 * _pw(d, -1 - z) * mu
        for p in arith.prime_divisors(arith.coprime_part(q, d)):
            term *= 1 - 2.0 / p + _pw(p, -1 - z)
        lhs += term
    rhs = arith.phi_star(q) * _pw(q, -z)
    for p in arith.prime_divisors(q):
        rhs *= 1 - _pw(p, -(1 - z))
    return BothResult(lhs, rhs)


def y_symmetries(a: int, shifts) -> tuple[complex, complex, complex, complex]:
    """Y_a at (al,be,ga,de), (be,al,ga,de), (be,al,de,ga), (al,be,de,ga)."""
    al, be, ga, de = shifts
    return (
        y_factor(a, al, be, ga, de),
        y_factor(a, be, al, ga, de),
        y_factor(a, be, al, de, ga),
        y_factor(a, al, be, de, ga),
    )


def relative_gap(x: complex, y: complex) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-300)
