"""Generalised Estermann D-functions and a two-sided check of Voronoi summation.

The left side is the finite (or rapidly convergent) smoothed sum

    D_q(s, lam, h/l; V) = sum_{(n, q) = 1} sigma_lam(n) n^-s e(nh/l) V(n).

The right side is the polar terms plus the dual sums over squarefree a | q,
each with the two kernels

    Vo_pm(x) = 2 (2 pi)^-lam (1/2 pi i) int_(c) (4 pi^2 x)^(u-1)
               Vt(u - s) Gamma(1 - u) Gamma(1 + lam - u) S_pm(u) du,

S_+ = cos(pi lam / 2), S_- = cos(pi (u - lam/2)), combined as
e(+m h'/l) Vo_+ - e(-m h'/l) Vo_-, where h' is the inverse of h a^2 mod l.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import arith, kernels
from .lcentral import log_gamma
from .mainterm import zeta_q

LN2 = math.log(2.0)


@dataclass(frozen=True)
class EstermannParams:
    q: int
    lam: complex
    h: int
    l: int
    s: complex

    def __post_init__(self):
        if self.q < 1 or self.l < 1:
            raise ValueError("q and l must be positive")
        if math.gcd(self.l, self.h * self.q) != 1:
            raise ValueError("need (l, hq) = 1")


def _bump_profile(tau):
    """exp(1 - 1/(1 - tau^2)) on (-1, 1), zero outside; peak value 1."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    inside = np.abs(tau) < 1
    t2 = tau[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t2))
    return out


@dataclass(frozen=True)
class SmoothBump:
    """V(x) = W(x / M) for a fixed unit-scale window W.

    ``kind="bump"``: W(x) = exp(1 - 1/(1 - tau^2)) with tau = log2 x, so
    supp W = [1/2, 2].  ``kind="lognormal"``: W(x) = exp(-(log x)^2 / (2 sigma^2)),
    not compactly supported but Gaussian in log x, with closed-form Mellin
    transform sigma sqrt(2 pi) exp(sigma^2 w^2 / 2).
    """

    M: float
    kind: str = "bump"
    sigma: float = 0.3

    def __post_init__(self):
        if self.kind not in ("bump", "lognormal"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.M <= 0:
            raise ValueError("M must be positive")

    def unit(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.log(x)
        if self.kind == "bump":
            return _bump_profile(lx / LN2)
        return np.exp(-(lx**2) / (2 * self.sigma**2))

    def __call__(self, x):
        return self.unit(np.asarray(x, dtype=float) / self.M)

    def support(self) -> tuple[float, float]:
        """Interval outside which V is zero (bump) or below 1e-20 (lognormal)."""
        if self.kind == "bump":
            return self.M / 2, 2 * self.M
        r = self.sigma * math.sqrt(2 * 20 * math.log(10))
        return self.M * math.exp(-r), self.M * math.exp(r)

    def unit_mellin(self, w, nodes: int | None = None):
        """W~(w) for an array of w (closed form for lognormal, Gauss-Legendre for bump)."""
        w = np.asarray(w, dtype=complex)
        if self.kind == "lognormal":
            return self.sigma * math.sqrt(2 * math.pi) * np.exp(self.sigma**2 * w**2 / 2)
        if nodes is None:
            wmax = float(np.max(np.abs(w))) if w.size else 0.0
            nodes = int(1.5 * wmax * LN2) + 96
        x, wt = np.polynomial.legendre.leggauss(nodes)
        prof = _bump_profile(x) * wt * LN2
        out = np.empty(w.shape, dtype=complex)
        flat = w.ravel()
        res = out.reshape(-1)
        step = max(1, 2_000_000 // nodes)
        for lo in range(0, flat.size, step):
            res[lo : lo + step] = np.exp(np.outer(flat[lo : lo + step], x * LN2)) @ prof
        return out

    def mellin(self, w, nodes: int | None = None):
        """V~(w) = M^w W~(w)."""
        w = np.asarray(w, dtype=complex)
        return np.exp(w * math.log(self.M)) * self.unit_mellin(w, nodes)

    def derivative_norms(self, j_max: int = 6, degree: int = 400) -> list[float]:
        """Estimated sup-norms of W^(j), j = 0..j_max, from a Chebyshev interpolant."""
        lo, hi = (0.5, 2.0) if self.kind == "bump" else self.support()
        if self.kind == "lognormal":
            lo, hi = lo / self.M, hi / self.M
        cheb = np.polynomial.Chebyshev.interpolate(self.unit, degree, domain=[lo, hi])
        grid = np.linspace(lo, hi, 4001)
        out = []
        for j in range(j_max + 1):
            out.append(float(np.max(np.abs(cheb.deriv(j)(grid)))) if j else float(np.max(np.abs(cheb(grid)))))
        return out


class QuadratureError(RuntimeError):
    pass


def mellin_numeric(V: SmoothBump, w: complex, tol: float = 1e-13) -> complex:
    """int_0^inf V(x) x^(w-1) dx by Gauss-Legendre in log x, node count doubled until stable."""
    lo, hi = V.support()
    a, b = math.log(lo), math.log(hi)
    w = complex(w)
    n = 64
    prev = None
    while n <= 1 << 16:
        x, wt = np.polynomial.legendre.leggauss(n)
        y = 0.5 * (b - a) * x + 0.5 * (a + b)
        val = complex(0.5 * (b - a) * np.sum(wt * V(np.exp(y)) * np.exp(w * y)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n *= 2
    raise QuadratureError(f"Mellin transform did not settle at w={w}")


# ---------------------------------------------------------------------------
# left side
# ---------------------------------------------------------------------------


def d_series(params: EstermannParams, V: SmoothBump) -> complex:
    """The smoothed D-function as a direct sum over the support of V."""
    lo, hi = V.support()
    n_lo, n_hi = max(1, math.ceil(lo)), math.floor(hi)
    if n_hi < n_lo:
        return 0j
    if n_hi > 50_000_000:
        raise ValueError("window too long for a direct sum")
    n = np.arange(n_lo, n_hi + 1)
    keep = np.gcd(n, params.q) == 1
    n = n[keep]
    sig = kernels.sigma_pair_table(n_hi, 0.0, -complex(params.lam))[n]
    ph = np.exp(2j * np.pi * ((n * params.h) % params.l) / params.l)
    ns = np.exp(-complex(params.s) * np.log(n))
    return complex(np.sum(sig * ns * ph * V(n)))


def residues(lam: complex, l: int, q: int) -> tuple[complex, complex]:
    """Residues of D_q(s, lam, h/l) at s = 1 and s = 1 + lam."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    c = arith.euler_phi(q) / q
    r1 = c * cmath.exp((-1 + lam) * math.log(l)) * zeta_q(1 - lam, q)
    r2 = c * cmath.exp((-1 - lam) * math.log(l)) * zeta_q(1 + lam, q)
    return r1, r2


# ---------------------------------------------------------------------------
# right side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VoronoiQuad:
    dt: float = 0.05
    rel_tol: float = 1e-14
    max_height: float = 6000.0
    bound_shifts: tuple[float, ...] = (2.5, 4.0, 6.0, 8.0, 10.0)
    dual_tol: float = 1e-10
    empirical_tol: float = 1e-9
    max_m: int = 2_000_000


@dataclass
class VoronoiTerms:
    main: complex
    dual_plus: complex
    dual_minus: complex
    height: float
    m_max: int
    abscissa: float
    tail_bound: float
    certified: bool

    @property
    def total(self) -> complex:
        return self.main + self.dual_plus - self.dual_minus


def _log_cos(z):
    """A logarithm of cos z that stays finite for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    sgn = np.where(z.imag >= 0, 1.0, -1.0)
    return -1j * sgn * z - math.log(2.0) + np.log1p(np.exp(2j * sgn * z))


class _KernelLine:
    """Samples of Vt(u - s) Gamma(1 - u) Gamma(1 + lam - u) S_pm(u) on Re u = c."""

    def __init__(self, s: complex, lam: complex, V: SmoothBump, quad: VoronoiQuad, c: float):
        right = min(1.0, 1.0 + complex(lam).real)
        if c >= right:
            raise ValueError(f"contour Re u = {c} must lie left of the Gamma poles at {right}")
        self.s, self.lam, self.V, self.quad, self.c = complex(s), complex(lam), V, quad, c

    def _integrands(self, t):
        u = self.c + 1j * t
        lg = log_gamma(1 - u) + log_gamma(1 + self.lam - u)
        vt = self.V.mellin(u - self.s)
        plus = vt * np.exp(lg) * np.cos(np.pi * self.lam / 2)
        # Gamma decays like e^{-pi|t|} and cos grows like e^{pi|t|}: combine logs
        minus = vt * np.exp(lg + _log_cos(np.pi * (u - self.lam / 2)))
        return plus, minus

    @cached_property
    def samples(self):
        """Uniform nodes out to a height where the integrand has decayed.

        Accepts either a relative drop below ``rel_tol`` or, for numerically
        transformed windows, a plateau (no further halving) below 1e-12 of the
        peak, which marks the rounding floor of the Mellin transform.
        """
        quad = self.quad
        height = 25.0
        prev_edge = math.inf
        while True:
            t = np.arange(-height, height + quad.dt / 2, quad.dt)
            plus, minus = self._integrands(t)
            env = np.maximum(np.abs(plus), np.abs(minus))
            peak = float(np.max(env))
            edge = float(np.max(env[np.abs(t) > 0.8 * height]))
            if edge <= quad.rel_tol * peak:
                return t, plus, minus, height
            if edge <= 1e-12 * peak and edge > 0.5 * prev_edge:
                return t, plus, minus, height
            if height >= quad.max_height:
                raise QuadratureError(f"kernel integrand not decayed at height {height}")
            prev_edge = edge
            height = min(quad.max_height, height * 1.6)

    def prefactor(self) -> complex:
        return 2 * cmath.exp(-self.lam * math.log(2 * math.pi)) / (2 * math.pi)

    def l1_norm(self) -> float:
        """Upper estimate of (1/2pi) int |2 (2pi)^-lam F(c + it)| dt, both signs."""
        t, plus, minus, _ = self.samples
        return abs(self.prefactor()) * self.quad.dt * float(np.sum(np.abs(plus) + np.abs(minus)))

    def kernel(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(Vo_+(x), Vo_-(x)) for an array of x > 0, by the trapezoid rule on Re u = c."""
        t, plus, minus, _ = self.samples
        y = np.log(4 * np.pi**2 * np.asarray(x, dtype=float))
        scale = self.prefactor() * self.quad.dt * np.exp((self.c - 1) * y)
        kp = kernels.line_sum(t[0], self.quad.dt, plus, y) * scale
        km = kernels.line_sum(t[0], self.quad.dt, minus, y) * scale
        return kp, km


def _ramanujan_weights(e: int, m: np.ndarray) -> np.ndarray:
    """mu(e) c_e(m) for squarefree e (c_p(m) = p - 1 if p | m, else -1)."""
    out = np.full(m.shape, float(arith.mobius(e)))
    for p in arith.prime_divisors(e):
        out *= np.where(m % p == 0, p - 1.0, -1.0)
    return out


def _tail_at(line_far: _KernelLine, lam: complex, la2: int, m0: int) -> float:
    kappa = max(0.0, -lam.real)
    p = 1.0 - line_far.c - kappa
    if p <= 1.0:
        return math.inf
    b = line_far.l1_norm() * (4 * math.pi**2 / la2) ** (line_far.c - 1)
    lm = math.log(m0)
    return b * p * m0 ** (1 - p) * (lm / (p - 1) + 1 / (p - 1) ** 2 + 1 / (p - 1))


def _dual_cutoff(far_lines, lam: complex, la2: int, tol: float, max_m: int) -> tuple[int, float]:
    """Smallest m0 with a certified bound on sum_{m > m0} |sigma_{-lam}(m) Vo_pm(m/la2)|.

    On Re u = c' < c the kernel is at most B (4 pi^2 x)^(c'-1), B the L1 norm
    of the integrand; |sigma_{-lam}(m)| <= tau(m) m^kappa, and the tau-sum is
    bounded by partial summation with sum_{m <= x} tau(m) <= x log x + x.
    Every candidate c' gives a valid bound, so the smallest m0 wins.
    """
    m0 = 16
    while True:
        tail = min(_tail_at(f, lam, la2, m0) for f in far_lines)
        if tail <= tol:
            return m0, tail
        if m0 >= max_m:
            raise QuadratureError(f"dual sum tail {tail:.2e} above tolerance at m={m0}")
        m0 = min(max_m, int(m0 * 1.1) + 1)


def _dual_cutoff_empirical(line: _KernelLine, lam: complex, la2: int, tol: float, max_m: int) -> tuple[int, float]:
    """Cutoff from the observed kernel decay: m^(1+kappa) log m |Vo(m/la2)| below tol at
    four consecutive geometric sample points.  An estimate, not a bound."""
    kappa = max(0.0, -lam.real)
    ms = np.unique((16 * 1.25 ** np.arange(80)).astype(np.int64))
    ms = ms[ms <= max_m]
    kp, km = line.kernel(ms / la2)
    size = np.maximum(np.abs(kp), np.abs(km)) * ms ** (1 + kappa) * np.log(ms + 1.0)
    run = 0
    for i, v in enumerate(size):
        run = run + 1 if v <= tol else 0
        if run == 4:
            j = i - 3
            return int(ms[j]), float(size[j])
    raise QuadratureError(f"dual kernel has not decayed below {tol:.1e} by m={max_m}")


def _dual_sum(params, line, far_lines, e: int, quad: VoronoiQuad, form: str):
    la2 = (params.l * e) ** 2
    hbar = arith.modinv(params.h * e * e % params.l, params.l) if params.l > 1 else 0
    lam = complex(params.lam)
    if far_lines:
        m_max, tail = _dual_cutoff(far_lines, lam, la2, quad.dual_tol / e, quad.max_m)
    else:
        m_max, tail = _dual_cutoff_empirical(line, lam, la2, quad.empirical_tol / e, quad.max_m)
    sig_all = kernels.sigma_pair_table(m_max, 0.0, lam)
    tot_p, tot_m = 0j, 0j
    block = 4096
    for lo in range(1, m_max + 1, block):
        m = np.arange(lo, min(m_max, lo + block - 1) + 1)
        if form == "derived":
            w = _ramanujan_weights(e, m)
        else:
            w = (np.gcd(m, e) == 1).astype(float)
        sig = sig_all[m] * w
        kp, km = line.kernel(m / la2)
        ph = np.exp(2j * np.pi * ((m * hbar) % params.l) / params.l)
        tot_p += np.sum(sig * ph * kp)
        tot_m += np.sum(sig * np.conj(ph) * km)
    return tot_p, tot_m, m_max, tail * e


def default_abscissa(V: SmoothBump, lam: complex) -> float:
    right = min(1.0, 1.0 + complex(lam).real)
    if V.kind == "lognormal" and right > -1.5:
        return -2.0
    return right - 0.5


def voronoi_terms(
    params: EstermannParams,
    V: SmoothBump,
    quad: VoronoiQuad = VoronoiQuad(),
    form: str = "derived",
) -> VoronoiTerms:
    """Polar terms and both dual sums.

    ``form="derived"`` weights the e-th dual sum by mu(e) c_e(m) over all m;
    ``form="displayed"`` keeps only (m, e) = 1 with weight 1.  The two agree
    when q = 1.
    """
    if form not in ("derived", "displayed"):
        raise ValueError(f"unknown form {form!r}")
    lam, s, q, l = complex(params.lam), complex(params.s), params.q, params.l
    r1, r2 = residues(lam, l, q)
    main = r1 * complex(V.mellin(1 - s)) + r2 * complex(V.mellin(1 - s + lam))
    c = default_abscissa(V, lam)
    line = _KernelLine(s, lam, V, quad, c)
    # certified tails need the far-left integrand, which only the closed-form
    # (lognormal) Mellin transform resolves; the compact bump's numerical
    # transform hits its rounding floor long before the Gamma growth is beaten
    far_lines = (
        [_KernelLine(s, lam, V, quad, c - d) for d in quad.bound_shifts] if V.kind == "lognormal" else []
    )
    coef = arith.euler_phi(q) / q
    dp, dm, m_max, tail = 0j, 0j, 0, 0.0
    for e in arith.squarefree_divisors(q):
        w = coef / arith.euler_phi(e) * cmath.exp((-1 + lam) * math.log(l * e))
        sp_, sm_, mm, tb = _dual_sum(params, line, far_lines, e, quad, form)
        dp += w * sp_
        dm += w * sm_
        m_max = max(m_max, mm)
        tail += abs(w) * tb
    return VoronoiTerms(main, dp, dm, line.samples[3], m_max, c, tail, bool(far_lines))


def voronoi_rhs(
    params: EstermannParams, V: SmoothBump, quad: VoronoiQuad = VoronoiQuad(), form: str = "derived"
) -> complex:
    return voronoi_terms(params, V, quad, form).total
