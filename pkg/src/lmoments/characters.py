"""Dirichlet characters modulo q via CRT-local generators.

A character is an exponent vector against fixed generators of the cyclic
factors of (Z/qZ)^*: a primitive root for each odd prime power, ``-1`` for
``4``, and the pair ``(-1, 5)`` for ``2**k`` with ``k >= 3``.  Evaluation goes
through precomputed discrete-log tables, and values are reduced as exact
integer phases over the group exponent before exponentiation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from . import arith


@dataclass(frozen=True)
class LocalFactor:
    """One cyclic factor: generator ``gen`` of order ``order`` inside (Z/p^k)^*."""

    p: int
    k: int
    gen: int
    order: int
    log: np.ndarray = field(repr=False, compare=False)  # size p**k, -1 off units

    @property
    def modulus(self) -> int:
        return self.p**self.k


def _primitive_root(p: int, k: int) -> int:
    pk = p**k
    phi = (p - 1) * p ** (k - 1)
    prime_factors = arith.prime_divisors(phi)
    for g in range(2, pk):
        if g % p == 0:
            continue
        if all(pow(g, phi // r, pk) != 1 for r in prime_factors):
            return g
    raise ArithmeticError(f"no primitive root modulo {p}^{k}")


def _cyclic_log(pk: int, gen: int, order: int, base: np.ndarray | None = None):
    log = np.full(pk, -1, dtype=np.int64)
    x = 1
    for j in range(order):
        log[x] = j
        x = x * gen % pk
    if x != 1:
        raise ArithmeticError("generator order mismatch")
    return log


def _local_factors(p: int, k: int) -> list[LocalFactor]:
    pk = p**k
    if p != 2:
        g = _primitive_root(p, k)
        order = (p - 1) * p ** (k - 1)
        return [LocalFactor(p, k, g, order, _cyclic_log(pk, g, order))]
    if k == 1:
        log = np.array([-1, 0], dtype=np.int64)
        return [LocalFactor(2, 1, 1, 1, log)]
    if k == 2:
        log = np.array([-1, 0, -1, 1], dtype=np.int64)
        return [LocalFactor(2, 2, 3, 2, log)]
    # x = (-1)^a 5^b: tabulate both coordinates at once
    order5 = 2 ** (k - 2)
    log_m1 = np.full(pk, -1, dtype=np.int64)
    log_5 = np.full(pk, -1, dtype=np.int64)
    x = 1
    for b in range(order5):
        log_m1[x], log_5[x] = 0, b
        log_m1[pk - x], log_5[pk - x] = 1, b
        x = x * 5 % pk
    return [
        LocalFactor(2, k, pk - 1, 2, log_m1),
        LocalFactor(2, k, 5, order5, log_5),
    ]


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """The character group modulo ``q`` with its discrete-log data."""

    q: int
    factors: tuple[LocalFactor, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(f.order for f in self.factors)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.factors else 1

    @cached_property
    def logs(self) -> np.ndarray:
        """(n_factors, q) array of local discrete logs of each residue; -1 off units."""
        res = np.arange(self.q)
        if not self.factors:
            return np.zeros((0, self.q), dtype=np.int64)
        return np.stack([f.log[res % f.modulus] for f in self.factors])

    @cached_property
    def unit_mask(self) -> np.ndarray:
        if self.q == 1:
            return np.ones(1, dtype=bool)
        return np.gcd(np.arange(self.q), self.q) == 1

    @cached_property
    def _scale(self) -> np.ndarray:
        return np.array([self.exponent // o for o in self.orders], dtype=np.int64)

    def character(self, exponents) -> "DirichletCharacter":
        exps = tuple(int(e) % o for e, o in zip(exponents, self.orders))
        if len(exps) != len(self.factors):
            raise ValueError("exponent vector length does not match the group")
        return DirichletCharacter(self, exps)

    def principal(self) -> "DirichletCharacter":
        return self.character([0] * len(self.factors))

    def characters(self):
        """All phi(q) characters in lexicographic exponent order."""
        for exps in product(*(range(o) for o in self.orders)):
            yield DirichletCharacter(self, exps)

    def phase_table(self, chars) -> np.ndarray:
        """Integer phases k with chi(a) = e(k / exponent); -1 where chi(a) = 0."""
        exps = np.array([c.exponents for c in chars], dtype=np.int64).reshape(
            len(chars), len(self.factors)
        )
        logs = self.logs
        ph = (exps * self._scale) @ np.where(logs < 0, 0, logs) % self.exponent
        ph[:, ~self.unit_mask] = -1
        return ph

    def table(self, chars) -> np.ndarray:
        """Complex matrix of chi(a) for chi in ``chars`` (rows), 0 <= a < q."""
        ph = self.phase_table(chars)
        roots = np.exp(2j * np.pi * np.arange(self.exponent) / self.exponent)
        out = roots[np.where(ph < 0, 0, ph)]
        out[ph < 0] = 0
        return out


@dataclass(frozen=True)
class DirichletCharacter:
    group: CharacterGroup = field(repr=False)
    exponents: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.group.q

    def phase(self, n: int) -> Fraction | None:
        """chi(n) = e(phase); None when gcd(n, q) > 1."""
        g = self.group
        r = int(n) % g.q
        if not g.unit_mask[r]:
            return None
        num = 0
        for e, f in zip(self.exponents, g.factors):
            num += Fraction(e * int(f.log[r % f.modulus]), f.order)
        return num - math.floor(num)

    def __call__(self, n: int) -> complex:
        ph = self.phase(n)
        if ph is None:
            return 0j
        k = ph.numerator * (self.group.exponent // ph.denominator)
        return cmath.exp(2j * math.pi * k / self.group.exponent)

    def values(self) -> np.ndarray:
        return self.group.table([self])[0]

    def conj(self) -> "DirichletCharacter":
        return self.group.character([-e for e in self.exponents])

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_even(self) -> bool:
        ph = self.phase(self.q - 1)
        return ph == 0

    @property
    def is_primitive(self) -> bool:
        """Primitivity from the exponent vector (local conductor conditions)."""
        by_prime: dict[int, list[tuple[LocalFactor, int]]] = {}
        for e, f in zip(self.exponents, self.group.factors):
            by_prime.setdefault(f.p, []).append((f, e))
        for p, parts in by_prime.items():
            f0 = parts[0][0]
            k = f0.k
            if p != 2:
                e = parts[0][1]
                if k == 1 and e == 0:
                    return False
                if k >= 2 and e % p == 0:
                    return False
            elif k == 1:
                return False
            elif k == 2:
                if parts[0][1] == 0:
                    return False
            elif parts[1][1] % 2 == 0:
                return False
        return True

    def conductor(self) -> int:
        """Smallest d | q such that chi is trivial on units congruent to 1 mod d."""
        q = self.q
        vals = self.values()
        units = np.nonzero(self.group.unit_mask)[0]
        for d in arith.divisors(q):
            sel = units[units % d == 1 % d]
            if np.allclose(vals[sel], 1.0, atol=1e-9):
                return d
        return q

    def gauss_sum(self) -> complex:
        return gauss_sum(self)


@lru_cache(maxsize=256)
def build_group(q: int) -> CharacterGroup:
    """Character group modulo ``q`` (q = 2 mod 4 is allowed but flagged)."""
    q = int(q)
    if q < 1:
        raise ValueError("modulus must be positive")
    if q % 4 == 2:
        warnings.warn(
            f"q={q} is 2 mod 4: there are no primitive characters", stacklevel=2
        )
    factors: list[LocalFactor] = []
    for p, k in arith.factorize(q):
        factors.extend(_local_factors(p, k))
    return CharacterGroup(q, tuple(factors))


def enumerate_primitive_even(group: CharacterGroup) -> list[DirichletCharacter]:
    """Primitive even characters of ``group`` in lexicographic exponent order."""
    if group.q == 1:
        return [group.principal()]
    minus_one = group.q - 1
    out = []
    for chi in group.characters():
        if chi.is_primitive and chi.phase(minus_one) == 0:
            out.append(chi)
    return out


def primitive_even_table(q: int) -> tuple[list[DirichletCharacter], np.ndarray]:
    """Primitive even characters mod ``q`` and their value table."""
    group = build_group(q)
    chars = enumerate_primitive_even(group)
    return chars, group.table(chars) if chars else np.zeros((0, q), complex)


def gauss_sum(chi: DirichletCharacter) -> complex:
    q = chi.q
    a = np.arange(q)
    return complex(np.sum(chi.values() * np.exp(2j * np.pi * a / q)))


def orthogonality_pair_sum(q: int, m: int, n: int) -> tuple[complex, Fraction]:
    """Character side and divisor side of the primitive-even orthogonality relation.

    lhs is sum over primitive even chi mod q of chi(m) conj(chi(n)); rhs is
    (1/2) sum over d | (q, m - n) and d | (q, m + n) of phi(d) mu(q/d).
    """
    if math.gcd(m * n, q) != 1:
        raise ValueError("orthogonality requires (mn, q) = 1")
    chars, tab = primitive_even_table(q)
    lhs = complex(np.sum(tab[:, m % q] * np.conj(tab[:, n % q])))
    return lhs, orthogonality_rhs(q, m, n)


def orthogonality_rhs(q: int, m: int, n: int) -> Fraction:
    total = 0
    for d in arith.divisors(q):
        w = arith.euler_phi(d) * arith.mobius(q // d)
        if w == 0:
            continue
        total += w * (((m - n) % d == 0) + ((m + n) % d == 0))
    return Fraction(total, 2)


def orthogonality_tables(q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All-pairs version: (units, lhs matrix, rhs matrix) over units m, n < q."""
    chars, tab = primitive_even_table(q)
    units = np.nonzero(build_group(q).unit_mask)[0]
    if q == 1:
        units = np.array([0])
    sub = tab[:, units]
    lhs = sub.T @ np.conj(sub)
    rhs = np.zeros((len(units), len(units)))
    diff = units[:, None] - units[None, :]
    summ = units[:, None] + units[None, :]
    for d in arith.divisors(q):
        w = arith.euler_phi(d) * arith.mobius(q // d)
        if w:
            rhs += w * ((diff % d == 0).astype(float) + (summ % d == 0))
    return units, lhs, rhs / 2
