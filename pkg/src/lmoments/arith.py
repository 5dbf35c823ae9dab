"""Exact multiplicative arithmetic on machine integers.

Everything here is pure and reentrant.  Factorizations of ``n <= 2**20`` come
from a lazily built smallest-prime-factor table; larger inputs (up to
``2**50``) fall back to trial division over a 2-3-5 wheel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

MAX_N = 2**50
_SPF_LIMIT = 2**20
_spf_table: np.ndarray | None = None


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization: ``pairs`` is ``((p, e), ...)`` with p increasing."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _spf() -> np.ndarray:
    global _spf_table
    if _spf_table is None:
        n = _SPF_LIMIT
        spf = np.zeros(n + 1, dtype=np.int64)
        for p in range(2, math.isqrt(n) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        idx = np.nonzero(spf == 0)[0]
        spf[idx] = idx
        _spf_table = spf
    return _spf_table


def _check(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    if n > MAX_N:
        raise OverflowError(f"{n} exceeds the supported range 2**50")
    return n


def _trial_division(n: int) -> list[tuple[int, int]]:
    pairs = []
    for p in (2, 3, 5):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    p, i = 7, 0
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        p += steps[i]
        i = (i + 1) & 7
    if n > 1:
        pairs.append((n, 1))
    return pairs


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Return the prime factorization of ``n`` (``1 <= n <= 2**50``)."""
    n = _check(n)
    if n <= _SPF_LIMIT:
        spf = _spf()
        pairs: list[tuple[int, int]] = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return Factorization(tuple(pairs))
    return Factorization(tuple(_trial_division(n)))


def prime_divisors(n: int) -> tuple[int, ...]:
    return factorize(n).primes


@lru_cache(maxsize=65536)
def divisors(n: int) -> tuple[int, ...]:
    """All positive divisors of ``n`` in increasing order."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def squarefree_divisors(n: int) -> tuple[int, ...]:
    ps = prime_divisors(n)
    out = []
    for mask in product((0, 1), repeat=len(ps)):
        d = 1
        for p, bit in zip(ps, mask):
            if bit:
                d *= p
        out.append(d)
    return tuple(sorted(out))


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def tau(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def sigma_lambda(n: int, lam: complex) -> complex:
    """Divisor power sum sum_{d | n} d**lam, with d**lam = exp(lam * log d)."""
    lam = complex(lam)
    return sum(cmath.exp(lam * math.log(d)) for d in divisors(n))


def sigma_shift(n: int, alpha: complex, beta: complex) -> complex:
    """sum over a*d = n of a**(-alpha) * d**(-beta)."""
    alpha, beta = complex(alpha), complex(beta)
    total = 0j
    for a in divisors(n):
        d = n // a
        total += cmath.exp(-alpha * math.log(a) - beta * math.log(d))
    return total


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) as an exact integer, via sum_{d | (q, n)} d * mu(q/d)."""
    q = _check(q)
    g = math.gcd(q, int(n))
    return sum(d * mobius(q // d) for d in divisors(g))


def phi_star(q: int) -> int:
    """Number of primitive characters modulo ``q``."""
    out = 1
    for p, e in factorize(q):
        if e == 1:
            out *= p - 2
        else:
            out *= p ** (e - 2) * (p - 1) ** 2
    return out


def coprime_part(q: int, d: int) -> int:
    """Largest divisor of ``q`` coprime to ``d``."""
    q = _check(q)
    _check(d)
    g = math.gcd(q, d)
    while g > 1:
        q //= g
        g = math.gcd(q, g)
    return q


def modinv(x: int, m: int) -> int:
    return pow(int(x), -1, int(m))


def mobius_sieve(n: int) -> np.ndarray:
    """mu(k) for 0 <= k <= n (entry 0 is 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p :: p * p] = 0
    return mu


def phi_sieve(n: int) -> np.ndarray:
    """Euler phi(k) for 0 <= k <= n."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi
