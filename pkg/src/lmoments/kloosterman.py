"""Kloosterman sums, cusp sums for Gamma_0(uv), and bound harnesses.

The harnesses evaluate the left sides of the sums-of-Kloosterman-sums bounds
exactly at desk scale and divide by the right-side envelopes with implied
constants set to 1.  Only the statistics of that ratio are meaningful.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import arith, kernels

THETA = 7 / 64


@dataclass(frozen=True)
class KloostermanQuery:
    m: int
    n: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("modulus must be positive")


def kloosterman(m, n: int | None = None, c: int | None = None) -> float:
    """S(m, n; c) as a float.  Accepts a KloostermanQuery or three integers."""
    if isinstance(m, KloostermanQuery):
        m, n, c = m.m, m.n, m.c
    if c is None or c < 1:
        raise ValueError("modulus must be positive")
    return float(kernels.kloosterman_sum(int(m), int(n), int(c)))


def kloosterman_direct(m: int, n: int, c: int) -> complex:
    """Naive complex sum over units, for cross-checks (no tables, no batching)."""
    total = 0j
    for x in range(c):
        if math.gcd(x, c) != 1:
            continue
        xb = pow(x, -1, c) if c > 1 else 0
        total += cmath.exp(2j * math.pi * ((m * x + n * xb) % c) / c)
    return total


def weil_bound(m: int, n: int, c: int) -> float:
    g = math.gcd(math.gcd(m, n), c)
    return arith.tau(c) * math.sqrt(g) * math.sqrt(c)


@dataclass(frozen=True)
class CuspContext:
    """Q = u v with (u, v) = 1 and the cusp pair (infinity, 1/u) of Gamma_0(Q)."""

    u: int
    v: int

    def __post_init__(self):
        if self.u < 1 or self.v < 1 or math.gcd(self.u, self.v) != 1:
            raise ValueError("need positive coprime u, v")

    @property
    def Q(self) -> int:
        return self.u * self.v

    @property
    def ubar(self) -> int:
        return pow(self.u, -1, self.v) if self.v > 1 else 0

    def gamma(self, l: int) -> float:
        return l * self.u * math.sqrt(self.v)


def cusp_kloosterman(m: int, n: int, l: int, cusp: CuspContext) -> complex:
    """S_{inf,1/u}(m, n; l u sqrt v) = e(n ubar / v) S(m vbar, n; l u)."""
    if math.gcd(l, cusp.v) != 1:
        raise ValueError("gamma = l u sqrt(v) needs (l, v) = 1")
    c = l * cusp.u
    vbar = pow(cusp.v, -1, c) if c > 1 else 0
    tw = cmath.exp(2j * math.pi * (n * cusp.ubar % cusp.v) / cusp.v) if cusp.v > 1 else 1.0
    return tw * kloosterman(m * vbar, n, c)


# ---------------------------------------------------------------------------
# test function phi
# ---------------------------------------------------------------------------


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    ok = np.abs(t) < 1
    out[ok] = np.exp(1.0 - 1.0 / (1.0 - t[ok] ** 2))
    return out


@dataclass(frozen=True)
class TestFunctionPhi:
    """phi(x) = exp(1 - 1/(1 - t^2)), t = (x - 4.5X)/(3.5X): support [X, 8X], peak 1."""

    __test__ = False  # not a pytest class

    X: float

    def __post_init__(self):
        if self.X <= 0:
            raise ValueError("X must be positive")

    def _t(self, x):
        return (np.asarray(x, dtype=float) - 4.5 * self.X) / (3.5 * self.X)

    def __call__(self, x):
        return _bump(self._t(x))

    def d1(self, x):
        t = self._t(x)
        b = _bump(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(b > 0, b * (-2 * t) / (1 - t**2) ** 2, 0.0)
        return out / (3.5 * self.X)

    def d2(self, x):
        t = self._t(x)
        b = _bump(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(b > 0, b * (6 * t**4 - 2) / (1 - t**2) ** 4, 0.0)
        return out / (3.5 * self.X) ** 2

    @property
    def support(self) -> tuple[float, float]:
        return self.X, 8 * self.X

    def norms(self, nodes: int = 200_001) -> dict[str, float]:
        """Measured sup |phi|, ||phi'||_1, ||phi''||_1 (trapezoid on a fine grid)."""
        x = np.linspace(self.X, 8 * self.X, nodes)
        return {
            "sup": float(np.max(np.abs(self(x)))),
            "d1_l1": float(np.trapezoid(np.abs(self.d1(x)), x)),
            "d2_l1": float(np.trapezoid(np.abs(self.d2(x)), x)),
        }


def make_phi(X: float) -> TestFunctionPhi:
    return TestFunctionPhi(float(X))


# ---------------------------------------------------------------------------
# Theorem-1.3-type sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarnessConfig:
    M: int
    N: int
    L: int = 1
    s: int = 1
    cusp: CuspContext = field(default_factory=lambda: CuspContext(1, 1))
    X: float | None = None
    theta: float = THETA
    sign: int = 1
    seed: int = 0
    trials: int = 200

    def __post_init__(self):
        if self.M < 1 or self.N < 1 or self.L < 1 or self.s < 1:
            raise ValueError("ranges and s must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not 0 <= self.theta <= 0.5:
            raise ValueError("theta must lie in [0, 1/2]")

    @property
    def x_value(self) -> float:
        """X, defaulting to (sMN)^{1/2} / (u v^{1/2} L) when not given."""
        if self.X is not None:
            return float(self.X)
        return math.sqrt(self.s * self.M * self.N) / (self.cusp.u * math.sqrt(self.cusp.v) * self.L)

    def m_range(self) -> np.ndarray:
        return np.arange(self.M, 2 * self.M + 1)

    def n_range(self) -> np.ndarray:
        return np.arange(self.N, 2 * self.N + 1)

    def l_range(self) -> tuple[int, int]:
        """l with X < 4 pi sqrt(smn) / (l u sqrt v) < 8X for some m, n in range."""
        X = self.x_value
        us = self.cusp.u * math.sqrt(self.cusp.v)
        lo = 4 * math.pi * math.sqrt(self.s * self.M * self.N) / (8 * X * us)
        hi = 4 * math.pi * math.sqrt(self.s * 4 * self.M * self.N) / (X * us)
        return max(1, math.floor(lo)), max(1, math.ceil(hi))


def thkls_matrix(config: HarnessConfig) -> np.ndarray:
    """K[m, n] = sum_gamma phi(4 pi sqrt(smn)/gamma)/gamma S_{inf,1/u}(sm, sign n; gamma)."""
    lo, hi = config.l_range()
    return kernels.cusp_kernel(
        config.m_range(), config.n_range(), config.s, config.sign,
        config.cusp.u, config.cusp.v, config.x_value, lo, hi,
    )


def thkls_lhs(config: HarnessConfig, a, b, phi: TestFunctionPhi | None = None) -> complex:
    """sum_m a_m sum_n b_n sum_gamma phi(4 pi sqrt(smn)/gamma)/gamma S_{inf,1/u}(sm, +-n; gamma).

    ``a`` is indexed by m = M..2M and ``b`` by n = N..2N.  Only the standard
    phi of scale ``config.x_value`` is supported by the batched kernel.
    """
    if phi is not None and not math.isclose(phi.X, config.x_value):
        raise ValueError("phi scale must equal the config's X")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if not np.any(a) or not np.any(b):
        return 0j
    return complex(a @ thkls_matrix(config) @ b)


def thkls_lhs_naive(config: HarnessConfig, a, b) -> complex:
    """Triple loop with direct complex Kloosterman sums; shares nothing with the kernel."""
    phi = make_phi(config.x_value)
    lo, hi = config.l_range()
    cusp = config.cusp
    total = 0j
    for i, m in enumerate(config.m_range()):
        for j, n in enumerate(config.n_range()):
            if a[i] == 0 or b[j] == 0:
                continue
            for l in range(lo, hi + 1):
                if math.gcd(l, cusp.v) != 1:
                    continue
                gam = cusp.gamma(l)
                w = float(phi(4 * math.pi * math.sqrt(config.s * m * n) / gam))
                if w == 0.0:
                    continue
                c = l * cusp.u
                vbar = pow(cusp.v, -1, c) if c > 1 else 0
                nn = config.sign * int(n)
                tw = cmath.exp(2j * math.pi * (nn * cusp.ubar % cusp.v) / cusp.v)
                total += a[i] * b[j] * w / gam * tw * kloosterman_direct(config.s * int(m) * vbar, nn, c)
    return total


def _envelope_core(config: HarnessConfig, a, b) -> float:
    X = config.x_value
    Q = config.cusp.Q
    s, M, N = config.s, config.M, config.N
    th = config.theta
    lead = (1 + abs(math.log(X)) + X ** (-th)) / (1 + X)
    f1 = math.sqrt(1 + X + math.sqrt(s / Q))
    f2 = math.sqrt(1 + X + math.sqrt(math.gcd(s, Q)) * M / math.sqrt(Q))
    f3 = 1 + X + math.sqrt(N / Q)
    a_inf = float(np.max(np.abs(a))) if len(a) else 0.0
    b_2 = float(np.linalg.norm(b))
    return lead * f1 * f2 * f3 * math.sqrt(M) * math.sqrt(a_inf) * b_2


def thkls_rhs_envelope(config: HarnessConfig, a, b) -> float:
    """Right side of the sums-of-Kloosterman-sums bound with all constants set to 1."""
    return _envelope_core(config, np.asarray(a), np.asarray(b))


# Theorem-1.4-type sums: smooth weight g(m, n, l) = W(m/M) W(n/N) W(l/L)


def _unit_bump(x):
    """Bump on [1, 2] with peak 1."""
    return _bump(2 * np.asarray(x, dtype=float) - 3)


def thkls1_matrix(config: HarnessConfig) -> np.ndarray:
    """K[m, n] = sum_{(l, v) = 1} g(m, n, l) S(s m vbar, sign n; l u), m, n over the full dyadic ranges."""
    ms, ns = config.m_range(), config.n_range()
    u, v = config.cusp.u, config.cusp.v
    wm = _unit_bump(ms / config.M)
    wn = _unit_bump(ns / config.N)
    out = np.zeros((len(ms), len(ns)))
    mm, nn = np.meshgrid(ms, ns, indexing="ij")
    for l in range(config.L, 2 * config.L + 1):
        wl = float(_unit_bump(l / config.L))
        if wl == 0.0 or math.gcd(l, v) != 1:
            continue
        c = l * u
        vbar = pow(v, -1, c) if c > 1 else 0
        kl = kernels.kloosterman_many((config.s * mm.ravel() * vbar) % c, (config.sign * nn.ravel()) % c, c)
        out += wl * kl.reshape(mm.shape)
    return out * wm[:, None] * wn[None, :]


def thkls1_lhs(config: HarnessConfig, a, b) -> complex:
    return complex(np.asarray(a, dtype=complex) @ thkls1_matrix(config) @ np.asarray(b, dtype=complex))


def thkls1_rhs_envelope(config: HarnessConfig, a, b) -> float:
    """Envelope with X = (sMN)^{1/2}/(u v^{1/2} L) and the extra u v^{1/2} L factor."""
    cusp = config.cusp
    return _envelope_core(config, np.asarray(a), np.asarray(b)) * cusp.u * math.sqrt(cusp.v) * config.L


# ---------------------------------------------------------------------------
# bilinear forms with incomplete Kloosterman sums
# ---------------------------------------------------------------------------


def incomplete_matrix(q: int, c: int, A: int, B: int) -> np.ndarray:
    """E[a, b] = e(c a bbar / q) for (b, q) = 1, zero otherwise (a <= A, b <= B)."""
    eye = np.eye(B)
    cols = [kernels.incomplete_sums(q, c, A, B, eye[j]) for j in range(B)]
    return np.stack(cols, axis=1)


def bilinear_lhs(q: int, c: int, alpha, beta) -> float:
    if math.gcd(c, q) != 1:
        raise ValueError("need (c, q) = 1")
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    t = kernels.incomplete_sums(q, c, len(alpha), len(beta), beta)
    return float(np.real(np.sum(alpha * np.abs(t))))


def bilinear_envelope(q: int, A: int, B: int, alpha, beta) -> float:
    a2 = float(np.linalg.norm(alpha))
    binf = float(np.max(np.abs(beta))) if len(beta) else 0.0
    bracket = A**-0.5 * B**-0.25 * q**0.25 + A**-0.5 + q**-0.5 + B**-0.5
    return a2 * binf * math.sqrt(A) * B * bracket


def bilinear_harness(q: int, c: int, A: int, B: int, alpha, beta) -> tuple[float, float]:
    """(lhs, envelope) for sum_{a<=A} alpha_a |sum_{b<=B, (b,q)=1} beta_b e(c a bbar/q)|."""
    alpha = np.asarray(alpha, dtype=complex)[:A]
    beta = np.asarray(beta, dtype=complex)[:B]
    return bilinear_lhs(q, c, alpha, beta), bilinear_envelope(q, A, B, alpha, beta)


def bilinear_naive(q: int, c: int, alpha, beta) -> float:
    total = 0.0
    for a, al in enumerate(alpha, start=1):
        inner = 0j
        for b, be in enumerate(beta, start=1):
            if math.gcd(b, q) == 1:
                inner += be * cmath.exp(2j * math.pi * (c * a * pow(b, -1, q) % q) / q)
        total += (al * abs(inner)).real
    return total


# ---------------------------------------------------------------------------
# harness statistics
# ---------------------------------------------------------------------------

THKLS_GRID = (
    HarnessConfig(8, 8, s=1, cusp=CuspContext(1, 1), X=1.0),
    HarnessConfig(16, 8, s=2, cusp=CuspContext(3, 1), X=0.5),
    HarnessConfig(8, 16, s=1, cusp=CuspContext(1, 4), X=2.0, sign=-1),
    HarnessConfig(16, 16, s=6, cusp=CuspContext(3, 4), X=0.25),
    HarnessConfig(12, 12, s=3, cusp=CuspContext(5, 2), X=1.0, sign=-1),
    HarnessConfig(24, 16, s=1, cusp=CuspContext(1, 3), X=4.0),
)

THKLS1_GRID = (
    HarnessConfig(8, 8, L=8, s=1, cusp=CuspContext(1, 1)),
    HarnessConfig(16, 8, L=6, s=2, cusp=CuspContext(3, 1)),
    HarnessConfig(8, 16, L=10, s=1, cusp=CuspContext(1, 4), sign=-1),
    HarnessConfig(16, 16, L=4, s=6, cusp=CuspContext(3, 4)),
    HarnessConfig(12, 12, L=12, s=3, cusp=CuspContext(5, 2), sign=-1),
)

BILINEAR_GRID = (  # (q, c, A, B)
    (101, 1, 40, 40),
    (401, 7, 60, 120),
    (1009, 3, 100, 50),
    (2003, 11, 200, 200),
    (360, 7, 80, 80),
    (1001, 2, 30, 150),
)


def _unimodular(rng, n):
    return np.exp(2j * np.pi * rng.random(n))


def _phase(z):
    out = np.ones_like(z)
    nz = np.abs(z) > 0
    out[nz] = z[nz] / np.abs(z[nz])
    return out


def _worst_pair(K: np.ndarray, rng, steps: int):
    """Unimodular a and unit b pushing |a K b| up by alternating maximisation."""
    a = _unimodular(rng, K.shape[0])
    for _ in range(steps):
        b = np.conj(K.T @ a)
        nb = np.linalg.norm(b)
        b = b / nb if nb else b
        a = _phase(np.conj(K @ b))
    b = np.conj(K.T @ a)
    nb = np.linalg.norm(b)
    return a, (b / nb if nb else b)


@lru_cache(maxsize=64)
def _cached_matrix(kind: str, config: HarnessConfig) -> np.ndarray:
    return thkls_matrix(config) if kind == "thkls" else thkls1_matrix(config)


@lru_cache(maxsize=64)
def _cached_incomplete(q: int, c: int, A: int, B: int) -> np.ndarray:
    return incomplete_matrix(q, c, A, B)


@dataclass
class HarnessStats:
    kind: str
    trials: int
    seed: int
    max_ratio: float
    mean_ratio: float
    median_ratio: float
    per_config_max: list[float]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "trials": self.trials, "seed": self.seed,
            "max_ratio": self.max_ratio, "mean_ratio": self.mean_ratio,
            "median_ratio": self.median_ratio, "per_config_max": self.per_config_max,
        }


def _trial_ratio(kind: str, idx: int, rng, steps: int) -> float:
    if kind in ("thkls", "thkls1"):
        grid = THKLS_GRID if kind == "thkls" else THKLS1_GRID
        cfg = grid[idx % len(grid)]
        K = _cached_matrix(kind, cfg)
        a, b = _worst_pair(K, rng, steps)
        lhs = abs(a @ K @ b)
        env = thkls_rhs_envelope(cfg, a, b) if kind == "thkls" else thkls1_rhs_envelope(cfg, a, b)
        return lhs / env
    if kind == "bilinear":
        q, c, A, B = BILINEAR_GRID[idx % len(BILINEAR_GRID)]
        E = _cached_incomplete(q, c, A, B)
        beta = _unimodular(rng, B)
        for _ in range(steps):
            beta = _phase(E.conj().T @ (E @ beta))
        t = np.abs(E @ beta)
        alpha = t / np.linalg.norm(t) if np.any(t) else np.ones(A) / math.sqrt(A)
        lhs, env = bilinear_harness(q, c, A, B, alpha, beta)
        return lhs / env
    raise ValueError(f"unknown harness {kind!r}")


def run_harness(kind: str, trials: int = 200, seed: int = 0, steps: int = 6) -> HarnessStats:
    """Ratio statistics over seeded trials; configurations cycle through a fixed grid.

    Each trial draws a random starting coefficient vector from its own
    substream and improves it toward the worst case, so the maximum reflects
    the configuration rather than the luck of the draw.
    """
    sizes = {"thkls": len(THKLS_GRID), "thkls1": len(THKLS1_GRID), "bilinear": len(BILINEAR_GRID)}
    if kind not in sizes:
        raise ValueError(f"unknown harness {kind!r}")
    grid_len = sizes[kind]
    ratios = []
    per_cfg = [0.0] * grid_len
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        r = _trial_ratio(kind, i, rng, steps)
        ratios.append(r)
        per_cfg[i % grid_len] = max(per_cfg[i % grid_len], r)
    arr = np.array(ratios)
    return HarnessStats(kind, trials, seed, float(arr.max()), float(arr.mean()), float(np.median(arr)), per_cfg)


def stability(first: HarnessStats, second: HarnessStats) -> float:
    """Relative change of the maximum ratio between two seed sets."""
    return abs(first.max_ratio - second.max_ratio) / max(first.max_ratio, second.max_ratio)
