"""Predicted main terms and the empirical moments they predict.

The zero-shift value of a main term is extracted by a circle mean
(1/M) sum_j f(rho e^{2 pi i j/M}) along a fixed complex direction: every
individual term of the six-term sum has poles at zero shifts, but the sum is
analytic there.
"""

from __future__ import annotations

import cmath
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import arith
from .characters import primitive_even_table
from .lcentral import PoleError, ShiftTuple, hurwitz_regular, l_values, x_factor

DEFAULT_DIRECTION = tuple(d * (1 + 1j) / math.sqrt(2) for d in (1, 2, 3, 4))
DEFAULT_RHO = 0.05
DEFAULT_NODES = 32
CHUNK = 64  # characters per work item; fixed so reductions do not depend on workers


def _p_pow(p: int, z: complex) -> complex:
    """p**(-z)."""
    return cmath.exp(-z * math.log(p))


def riemann_zeta(s: complex) -> complex:
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return complex(hurwitz_regular(s, 1.0)[0]) + 1.0 / (s - 1.0)


def zeta_q(s: complex, q: int) -> complex:
    """zeta(s) with the Euler factors at primes dividing q removed."""
    out = riemann_zeta(s)
    for p in arith.prime_divisors(q):
        out *= 1.0 - _p_pow(p, s)
    return out


def y_factor(a: int, alpha: complex, beta: complex, gamma: complex, delta: complex) -> complex:
    """Y_a: a^-gamma sum_{d | a} d^{gamma-delta} prod_{p | d} (local factors)."""
    local = {}
    for p in arith.prime_divisors(a):
        den = 1.0 - _p_pow(p, 2 + alpha + beta + gamma + delta)
        if den == 0:
            raise PoleError(f"local factor of Y_a vanishes at p={p}")
        local[p] = (1.0 - _p_pow(p, 1 + alpha + gamma)) * (1.0 - _p_pow(p, 1 + beta + gamma)) / den
    total = 0j
    for d in arith.divisors(a):
        term = cmath.exp((gamma - delta) * math.log(d))
        for p in arith.prime_divisors(d):
            term *= local[p]
        total += term
    return total * cmath.exp(-gamma * math.log(a))


def z_q(q: int, alpha, beta, gamma, delta) -> complex:
    num = (
        zeta_q(1 + alpha + gamma, q)
        * zeta_q(1 + alpha + delta, q)
        * zeta_q(1 + beta + gamma, q)
        * zeta_q(1 + beta + delta, q)
    )
    return num / zeta_q(2 + alpha + beta + gamma + delta, q)


def z_hkq(h: int, k: int, q: int, shifts) -> complex:
    a, b, c, d = shifts
    return y_factor(h, a, b, c, d) * y_factor(k, c, d, a, b) * z_q(q, a, b, c, d)


def main_term_m(h: int, k: int, q: int, shifts) -> complex:
    """The six-term main term frak{M}_{h,k}(alpha, beta, gamma, delta)."""
    a, b, c, d = shifts
    X = {x: x_factor(x, q) for x in (a, b, c, d)}
    return (
        z_hkq(h, k, q, (a, b, c, d))
        + X[a] * X[b] * X[c] * X[d] * z_hkq(h, k, q, (-c, -d, -a, -b))
        + X[a] * X[c] * z_hkq(h, k, q, (b, -c, d, -a))
        + X[b] * X[c] * z_hkq(h, k, q, (a, -c, d, -b))
        + X[a] * X[d] * z_hkq(h, k, q, (b, -d, c, -a))
        + X[b] * X[d] * z_hkq(h, k, q, (a, -d, c, -b))
    )


class LimitError(RuntimeError):
    pass


def circle_mean(f: Callable[[complex], complex], rho: float, nodes: int) -> complex:
    """(1/M) sum_j f(rho e^{2 pi i j / M})."""
    total = 0j
    for j in range(nodes):
        total += f(rho * cmath.exp(2j * math.pi * j / nodes))
    return total / nodes


def shift_zero_limit(
    f: Callable[[complex], complex],
    rho: float = DEFAULT_RHO,
    nodes: int = DEFAULT_NODES,
    tol: float | None = None,
) -> complex:
    """f(0) from values on |t| = rho; with ``tol``, doubling M must agree to tol (relative)."""
    val = circle_mean(f, rho, nodes)
    if tol is not None:
        ref = circle_mean(f, rho, 2 * nodes)
        if abs(val - ref) > tol * max(1.0, abs(ref)):
            raise LimitError(f"circle mean not converged: |diff| = {abs(val - ref):.3g}")
    return val


def predicted_twisted(
    q: int, h: int, k: int, rho: float = DEFAULT_RHO, nodes: int = DEFAULT_NODES,
    direction=DEFAULT_DIRECTION,
) -> tuple[complex, float]:
    """(hk)^{-1/2} frak{M}_{h,k} at zero shifts, with a limit-extraction error estimate."""
    def f(t):
        return main_term_m(h, k, q, ShiftTuple.along(t, direction))

    val = circle_mean(f, rho, nodes)
    ref = circle_mean(f, 0.8 * rho, 2 * nodes)
    scale = (h * k) ** -0.5
    return scale * val, scale * abs(val - ref)


# ---------------------------------------------------------------------------
# mollifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    """Coefficients alpha_h for h <= y, (h, q) = 1.

    ``rule`` is "mu-linear" (mu(h)(1 - log h / log y)) or "explicit", in which
    case ``explicit`` maps h to alpha_h.
    """

    y: float
    rule: str = "mu-linear"
    explicit: tuple[tuple[int, complex], ...] = ()

    def coefficients(self, q: int) -> dict[int, complex]:
        if self.y < 1:
            raise ValueError("mollifier length must be at least 1")
        out: dict[int, complex] = {}
        if self.rule == "mu-linear":
            for h in range(1, int(math.floor(self.y)) + 1):
                if math.gcd(h, q) != 1:
                    continue
                mu = arith.mobius(h)
                if mu == 0:
                    continue
                w = 1.0 if h == 1 else 1.0 - math.log(h) / math.log(self.y)
                if w != 0:
                    out[h] = complex(mu * w)
        elif self.rule == "explicit":
            for h, c in self.explicit:
                if h <= self.y and math.gcd(h, q) == 1 and c != 0:
                    out[int(h)] = complex(c)
        else:
            raise ValueError(f"unknown mollifier rule {self.rule!r}")
        return out

    def describe(self) -> str:
        if self.rule == "mu-linear":
            return f"mu(h)(1-log h/log y), y={self.y:g}"
        return f"explicit, y={self.y:g}, coeffs={list(self.explicit)}"


def mollified_main_term(q: int, mollifier: MollifierSpec, shifts) -> complex:
    """sum over ah, ak <= y, (ahk, q) = 1, (h, k) = 1 of alpha_{ah} conj(alpha_{ak}) / (ahk) * frak{M}_{h,k}."""
    coef = mollifier.coefficients(q)
    total = 0j
    cache: dict[tuple[int, int], complex] = {}
    for a in range(1, int(mollifier.y) + 1):
        for h in range(1, int(mollifier.y // a) + 1):
            ca = coef.get(a * h)
            if ca is None:
                continue
            for k in range(1, int(mollifier.y // a) + 1):
                cb = coef.get(a * k)
                if cb is None or math.gcd(h, k) != 1 or math.gcd(a * h * k, q) != 1:
                    continue
                key = (h, k)
                if key not in cache:
                    cache[key] = main_term_m(h, k, q, shifts)
                total += ca * cb.conjugate() / (a * h * k) * cache[key]
    return total


def predicted_mollified(
    q: int, mollifier: MollifierSpec, rho: float = DEFAULT_RHO, nodes: int = DEFAULT_NODES,
    direction=DEFAULT_DIRECTION,
) -> tuple[complex, float]:
    def f(t):
        return mollified_main_term(q, mollifier, ShiftTuple.along(t, direction))

    val = circle_mean(f, rho, nodes)
    ref = circle_mean(f, 0.8 * rho, 2 * nodes)
    return val, abs(val - ref)


# ---------------------------------------------------------------------------
# empirical moments
# ---------------------------------------------------------------------------


def default_workers() -> int:
    return max(1, int(os.environ.get("LMOMENTS_WORKERS", "1")))


def _chunked_sum(fn: Callable[[slice], complex], n: int, workers: int | None) -> complex:
    """sum of fn over fixed-size slices, reduced in slice order."""
    slices = [slice(lo, min(n, lo + CHUNK)) for lo in range(0, n, CHUNK)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(slices) == 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, slices))
    total = 0j
    for p in parts:
        total += p
    return total


@dataclass(frozen=True)
class MomentQuery:
    q: int
    h: int = 1
    k: int = 1
    shifts: ShiftTuple = field(default_factory=ShiftTuple)

    def __post_init__(self):
        if self.h < 1 or self.k < 1:
            raise ValueError("h and k must be positive")
        if math.gcd(self.h, self.k) != 1 or math.gcd(self.h * self.k, self.q) != 1:
            raise ValueError("need (h, k) = (hk, q) = 1")


def _weighted_moment(q: int, shifts: ShiftTuple, weights: Callable[[np.ndarray], np.ndarray],
                     workers: int | None) -> complex:
    chars, table = primitive_even_table(q)
    if not chars:
        raise ValueError(f"no primitive even characters modulo {q}")
    a, b, c, d = shifts

    def part(sl: slice) -> complex:
        t = table[sl]
        tc = np.conj(t)
        prod = (
            l_values(q, t, 0.5 + a)
            * l_values(q, t, 0.5 + b)
            * l_values(q, tc, 0.5 + c)
            * l_values(q, tc, 0.5 + d)
        )
        return complex(np.sum(prod * weights(t)))

    return 2.0 / arith.phi_star(q) * _chunked_sum(part, len(chars), workers)


def empirical_twisted_moment(query: MomentQuery, workers: int | None = None) -> complex:
    """(2/phi*(q)) sum^+ L L L L chi(h) conj(chi(k))."""
    q, h, k = query.q, query.h, query.k
    return _weighted_moment(
        q, query.shifts, lambda t: t[:, h % q] * np.conj(t[:, k % q]), workers
    )


def empirical_mollified_moment(
    q: int, mollifier: MollifierSpec, shifts: ShiftTuple = ShiftTuple(),
    workers: int | None = None,
) -> complex:
    """(2/phi*(q)) sum^+ L L L L |A(1/2, chi)|^2."""
    coef = mollifier.coefficients(q)
    hs = np.array(sorted(coef), dtype=np.int64)
    w = np.array([coef[h] / math.sqrt(h) for h in hs])
    if len(hs) == 1 and hs[0] == 1 and w[0] == 1:
        # A == 1 identically: share the twisted (h = k = 1) code path exactly
        return empirical_twisted_moment(MomentQuery(q, 1, 1, shifts), workers)

    def weights(t):
        amp = t[:, hs % q] @ w
        return (amp * np.conj(amp)).real

    return _weighted_moment(q, shifts, weights, workers)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class MomentReport:
    q: int
    h: int
    k: int
    shift_mode: str
    empirical: complex
    predicted: complex
    err_estimate: float
    seconds: float = 0.0
    mollifier: str = ""
    shifts: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def ratio(self) -> complex:
        return self.empirical / self.predicted if self.predicted != 0 else complex("nan")

    @property
    def deviation(self) -> float:
        return abs(self.ratio - 1.0)


def twisted_report(
    q: int, h: int = 1, k: int = 1, shifts: ShiftTuple | None = None,
    rho: float = DEFAULT_RHO, nodes: int = DEFAULT_NODES, workers: int | None = None,
) -> MomentReport:
    """Empirical vs predicted twisted moment; ``shifts=None`` means the zero-shift limit."""
    t0 = time.perf_counter()
    if shifts is None:
        emp = empirical_twisted_moment(MomentQuery(q, h, k), workers)
        pred, err = predicted_twisted(q, h, k, rho, nodes)
        mode, sh = "zero-limit", (0j,) * 4
    else:
        shifts.check(q)
        emp = empirical_twisted_moment(MomentQuery(q, h, k, shifts), workers)
        pred, err = (h * k) ** -0.5 * main_term_m(h, k, q, shifts), 0.0
        mode, sh = "explicit", shifts.as_tuple()
    return MomentReport(
        q, h, k, mode, emp, pred, err, time.perf_counter() - t0, "", sh,
        {"rho": rho, "nodes": nodes, "delta": ShiftTuple(*sh).delta_factor(),
         "error_envelope": q ** (-1 / 20) * (h + k) ** 0.3},
    )


def mollified_report(
    q: int, mollifier: MollifierSpec, shifts: ShiftTuple | None = None,
    rho: float = DEFAULT_RHO, nodes: int = DEFAULT_NODES, workers: int | None = None,
) -> MomentReport:
    t0 = time.perf_counter()
    if shifts is None:
        emp = empirical_mollified_moment(q, mollifier, ShiftTuple(), workers)
        pred, err = predicted_mollified(q, mollifier, rho, nodes)
        mode, sh = "zero-limit", (0j,) * 4
    else:
        shifts.check(q)
        emp = empirical_mollified_moment(q, mollifier, shifts, workers)
        pred, err = mollified_main_term(q, mollifier, shifts), 0.0
        mode, sh = "explicit", shifts.as_tuple()
    return MomentReport(
        q, 1, 1, mode, emp, pred, err, time.perf_counter() - t0, mollifier.describe(), sh,
        {"rho": rho, "nodes": nodes, "delta": ShiftTuple(*sh).delta_factor(),
         "error_envelope": q ** (-1 / 20) * mollifier.y ** 1.1},
    )
