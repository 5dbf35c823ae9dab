"""Central L-values and the approximate functional equation.

Gamma is a Lanczos approximation (g = 7, nine terms) with reflection; the
Hurwitz zeta function is Euler-Maclaurin with a regularized pole term, so
that ``L(s, chi)`` for non-principal chi stays finite at s = 1.  The weight
``V(x)`` is a Gauss-Legendre panel quadrature of its Mellin-Barnes integral.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.special import bernoulli

from .characters import DirichletCharacter
from .kernels import residue_matrix, sigma_pair_table

ETA_CAP = 0.2

_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class PoleError(ValueError):
    """Raised when an input sits on a pole of the requested function."""


class QuadratureError(RuntimeError):
    def __init__(self, msg: str, achieved: float):
        super().__init__(f"{msg} (achieved error estimate {achieved:.3g})")
        self.achieved = achieved


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------


def _log_gamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = np.full(np.shape(z), _LANCZOS[0], dtype=complex)
    for k in range(1, 9):
        acc = acc + _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """A logarithm of Gamma(z) (branch unspecified; exp() of it is Gamma)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any((z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))):
        raise PoleError("Gamma has a pole at nonpositive integers")
    left = z.real < 0.5
    out = np.empty_like(z)
    out[~left] = _log_gamma_right(z[~left])
    if left.any():
        zl = z[left]
        out[left] = (
            math.log(math.pi) - np.log(np.sin(np.pi * zl)) - _log_gamma_right(1.0 - zl)
        )
    return out[0] if scalar else out


def complex_gamma(z):
    """Gamma(z) for complex z (scalar or array)."""
    out = np.exp(log_gamma(z))
    return complex(out) if np.ndim(out) == 0 else out


def gamma_ratio(num, den):
    """prod Gamma(num_i) / prod Gamma(den_j), evaluated in log space."""
    return np.exp(sum(log_gamma(a) for a in num) - sum(log_gamma(b) for b in den))


# ---------------------------------------------------------------------------
# Hurwitz zeta and Dirichlet L
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _bernoulli_terms(depth: int) -> np.ndarray:
    b = bernoulli(2 * depth)
    return np.array([b[2 * k] / math.factorial(2 * k) for k in range(1, depth + 1)])


def _phi1(z):
    # (e^z - 1)/z, accurate near 0
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 0.5
    out = np.empty_like(z)
    zs = z[small]
    acc = np.zeros_like(zs)
    term = np.ones_like(zs)
    for k in range(1, 25):
        acc += term
        term = term * zs / (k + 1)
    out[small] = acc
    zl = z[~small]
    out[~small] = (np.exp(zl) - 1.0) / zl
    return out


def hurwitz_regular(s: complex, x, depth: int = 15) -> np.ndarray:
    """zeta(s, x) - 1/(s - 1): entire in s, vectorized over x in (0, 1]."""
    s = complex(s)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("Hurwitz parameter must be positive")
    n_terms = 20 + int(math.ceil(abs(s)))
    n = np.arange(n_terms)
    head = np.exp(-s * np.log(n[None, :] + x[:, None])).sum(axis=1)
    big = n_terms + x
    lb = np.log(big)
    pole = -lb * _phi1((1.0 - s) * lb)
    tail = 0.5 * np.exp(-s * lb)
    coef = _bernoulli_terms(depth)
    rising = s  # s (s+1) ... (s + 2k - 2)
    for k in range(1, depth + 1):
        tail = tail + coef[k - 1] * rising * np.exp(-(s + 2 * k - 1) * lb)
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
    return head + pole + tail


def hurwitz_zeta(s: complex, x, depth: int = 15):
    if complex(s) == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    out = hurwitz_regular(s, x, depth) + 1.0 / (complex(s) - 1.0)
    return complex(out[0]) if np.ndim(x) == 0 else out


@lru_cache(maxsize=64)
def _zeta_vector(q: int, s: complex, depth: int) -> np.ndarray:
    # entry a (0 <= a < q) holds the regular part of zeta(s, a'/q), a' = a or q
    a = np.arange(q, dtype=float)
    a[0] = q
    out = hurwitz_regular(s, a / q, depth)
    out.flags.writeable = False
    return out


def l_values(q: int, table: np.ndarray, s: complex, depth: int = 15) -> np.ndarray:
    """L(s, chi) for every row of a character value table mod q."""
    s = complex(s)
    reg = _zeta_vector(int(q), s, depth)
    table = np.atleast_2d(table)
    out = table @ reg
    mass = table.sum(axis=1)
    principal = np.abs(mass) > 0.5
    if principal.any():
        if s == 1:
            raise PoleError("principal L-function has a pole at s = 1")
        out = out + np.where(principal, mass / (s - 1.0), 0.0)
    return np.exp(-s * math.log(q)) * out


def dirichlet_l(s: complex, chi: DirichletCharacter, depth: int = 15) -> complex:
    """L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q)."""
    return complex(l_values(chi.q, chi.values()[None, :], s, depth)[0])


# ---------------------------------------------------------------------------
# shifts, X and g factors, G
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftTuple:
    alpha: complex = 0j
    beta: complex = 0j
    gamma: complex = 0j
    delta: complex = 0j

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"shift {name} is not finite")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def __iter__(self):
        return iter(self.as_tuple())

    def negated(self) -> "ShiftTuple":
        return ShiftTuple(-self.alpha, -self.beta, -self.gamma, -self.delta)

    def conj(self) -> "ShiftTuple":
        return ShiftTuple(*(z.conjugate() for z in self))

    def max_abs_real(self) -> float:
        return max(abs(z.real) for z in self)

    def is_valid_for(self, q: int, eta_cap: float = ETA_CAP) -> bool:
        if q <= 1:
            return self.max_abs_real() < eta_cap
        return self.max_abs_real() < eta_cap / math.log(q)

    def check(self, q: int, eta_cap: float = ETA_CAP) -> "ShiftTuple":
        if not self.is_valid_for(q, eta_cap):
            raise ValueError(
                f"shifts {self.as_tuple()} leave the domain |Re| < {eta_cap}/log q"
            )
        return self

    def delta_factor(self) -> float:
        """(1+|alpha|)(1+|beta|)(1+|gamma|)(1+|delta|)."""
        return float(np.prod([1.0 + abs(z) for z in self]))

    @staticmethod
    def along(t: complex, direction=(1, 2, 3, 4)) -> "ShiftTuple":
        return ShiftTuple(*(t * d for d in direction))


def x_factor(alpha: complex, q: int) -> complex:
    """X_alpha = (q/pi)^-alpha Gamma((1/2 - alpha)/2) / Gamma((1/2 + alpha)/2)."""
    alpha = complex(alpha)
    power = cmath.exp(-alpha * math.log(q / math.pi))
    return complex(power * gamma_ratio([(0.5 - alpha) / 2], [(0.5 + alpha) / 2]))


def x_product(q: int, *shifts: complex) -> complex:
    out = 1.0 + 0j
    for a in shifts:
        out *= x_factor(a, q)
    return out


def g_factor(s, shifts: ShiftTuple, parity_a: int = 0):
    """pi^{-2s} prod_x Gamma((1/2 + x + s + a)/2) / Gamma((1/2 + x + a)/2)."""
    s = np.asarray(s, dtype=complex)
    num = [(0.5 + x + s + parity_a) / 2 for x in shifts]
    den = [np.full(s.shape, (0.5 + x + parity_a) / 2) for x in shifts]
    out = np.exp(-2 * s * math.log(math.pi)) * gamma_ratio(num, den)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GProfile:
    """G(s) = exp((s/width)^2), times P(s)/P(0) when ``vanishing``.

    P(s) = prod over shifts x of (s^2 - (1/2 + x)^2)(s^2 - (1/2 - x)^2).
    The vanishing factor is what places zeros at 1/2 +- x; it is needed only
    when L(s, chi) has poles (q = 1).  A wide Gaussian without it gives a much
    faster-decaying V and keeps direct AFE sums at desk size.
    """

    width: float = 1.0
    vanishing: bool = True

    def label(self) -> str:
        tail = "*P(s)/P(0)" if self.vanishing else ""
        return f"exp((s/{self.width:g})^2){tail}"


SPEC_G = GProfile(1.0, True)
SHARP_G = GProfile(10.0, False)


def _vanishing_poly(s, shifts: ShiftTuple):
    out = np.ones(np.shape(s), dtype=complex)
    s2 = np.asarray(s, dtype=complex) ** 2
    for x in shifts:
        out = out * (s2 - (0.5 + x) ** 2) * (s2 - (0.5 - x) ** 2)
    return out


def big_g(s, shifts: ShiftTuple, profile: GProfile = SPEC_G):
    """The admissible test function G(s) of the approximate functional equation."""
    s = np.asarray(s, dtype=complex)
    out = np.exp((s / profile.width) ** 2)
    if profile.vanishing:
        p0 = _vanishing_poly(np.zeros(()), shifts)
        if abs(p0) == 0:
            raise PoleError("P(0) = 0: a shift equals +-1/2")
        out = out * _vanishing_poly(s, shifts) / p0
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# V weight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    abscissa: float = 1.0
    nodes: int = 16  # Gauss-Legendre nodes per panel
    height: float = 40.0
    em_depth: int = 15
    tol: float = 1e-12
    panel_width: float = 0.5
    left_abscissa: float = -0.25  # used for x < 1, after picking up the residue at 0

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(
            self.abscissa, 2 * self.nodes, self.height, self.em_depth, self.tol,
            self.panel_width, self.left_abscissa,
        )

    def height_for(self, profile: GProfile) -> float:
        # the Gaussian must fall far below tol before the contour is cut
        return max(self.height, profile.width * math.sqrt(math.log(1.0 / self.tol) + 20.0))


@lru_cache(maxsize=8)
def _gl_panels(height: float, width: float, nodes: int):
    # panels are refined fourfold for |t| < 2, where the contour passes
    # closest to the pole at s = 0 and the Gamma poles at s = -1/2 - x
    x, w = np.polynomial.legendre.leggauss(nodes)
    inner = np.linspace(-2.0, 2.0, int(math.ceil(16 / width)) + 1)
    n_outer = max(1, int(math.ceil((height - 2.0) / width)))
    outer = np.linspace(2.0, max(height, 2.0 + width), n_outer + 1)
    edges = np.concatenate([-outer[::-1], inner[1:-1], outer])
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


class VWeight:
    """V_{alpha,beta,gamma,delta}(x) with contour data precomputed once."""

    def __init__(
        self,
        shifts: ShiftTuple,
        parity_a: int = 0,
        quad: QuadratureConfig = QuadratureConfig(),
        profile: GProfile = SPEC_G,
    ):
        self.shifts = shifts
        self.parity_a = parity_a
        self.quad = quad
        self.profile = profile
        height = quad.height_for(profile)
        t, w = _gl_panels(height, quad.panel_width, quad.nodes)
        self._right = self._line(quad.abscissa, t, w)
        if quad.left_abscissa is not None:
            lim = 0.5 + parity_a - max(abs(x.real) for x in shifts)
            if not (-lim < quad.left_abscissa < 0):
                raise ValueError("left abscissa crosses a Gamma pole")
            self._left = self._line(quad.left_abscissa, t, w)
        else:
            self._left = None

    def _line(self, c: float, t: np.ndarray, w: np.ndarray):
        s = c + 1j * t
        f = big_g(s, self.shifts, self.profile) * g_factor(s, self.shifts, self.parity_a) / s
        return s, f * w / (2 * math.pi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(x <= 0):
            raise ValueError("V is defined for x > 0")
        out = np.empty(x.shape, dtype=complex)
        lx = np.log(x)
        use_left = (x < 1.0) if self._left is not None else np.zeros(x.shape, bool)
        for mask, line, residue in ((~use_left, self._right, 0.0), (use_left, self._left, 1.0)):
            if not mask.any():
                continue
            s, fw = line
            idx = np.nonzero(mask)[0]
            for lo in range(0, len(idx), 2048):
                sel = idx[lo : lo + 2048]
                out[sel] = residue + np.exp(-np.outer(lx[sel], s)) @ fw
        return complex(out[0]) if scalar else out

    def abs_bound(self, x: float) -> float:
        """sum |weights| x^-c: the size of the integrand, for rounding estimates."""
        s, fw = self._right if x >= 1 or self._left is None else self._left
        return float(np.sum(np.abs(fw)) * x ** (-s[0].real))


def v_weight(
    x,
    shifts: ShiftTuple,
    parity_a: int = 0,
    quad: QuadratureConfig = QuadratureConfig(),
    profile: GProfile = SPEC_G,
    check: bool = True,
):
    """V(x) by contour quadrature; node doubling is used as the convergence check."""
    val = VWeight(shifts, parity_a, quad, profile)(x)
    if check:
        ref = VWeight(shifts, parity_a, quad.doubled(), profile)(x)
        err = float(np.max(np.abs(np.asarray(val) - np.asarray(ref))))
        if err > quad.tol * max(1.0, float(np.max(np.abs(ref)))):
            raise QuadratureError("V quadrature did not converge", err)
    return val


@dataclass
class VTable:
    """V(N / q^2) for integers 1 <= N <= n_max, through Chebyshev interpolation in log x."""

    values: np.ndarray
    n_max: int
    x_cut: float
    tail_estimate: float
    degree: int
    interp_error: float = field(default=0.0)


def _cheb_fit(func, lo: float, hi: float, tol: float, max_deg: int = 2048):
    """Chebyshev coefficients of func(exp(u)) on [lo, hi], degree doubled until the tail is small."""
    deg = 64
    prev_tail = math.inf
    while True:
        k = np.arange(deg + 1)
        theta = np.pi * (k + 0.5) / (deg + 1)
        u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * np.cos(theta)
        vals = func(np.exp(u))
        coef = (2.0 / (deg + 1)) * (np.cos(np.outer(k, theta)) @ vals)
        coef[0] *= 0.5
        tail = float(np.max(np.abs(coef[-8:])))
        # stop on success, or once the tail has hit the rounding floor of the samples
        if tail < tol or deg >= max_deg or tail > 0.5 * prev_tail > 0 and deg >= 256:
            return coef, tail
        prev_tail = tail
        deg *= 2


def find_cutoff(
    vw: VWeight, q: int, tol: float, x_max: float = 1e6, grid: int = 400
) -> tuple[float, float]:
    """Smallest x_cut so that the estimated AFE tail beyond x_cut * q^2 is below tol.

    The tail is bounded by q * int_{x_cut} (log(x q^2))^3 / 6 * x^-1/2 |V(x)| dx,
    using tau_4(N) <~ (log N)^3 / 6 for the divisor-type coefficients.
    """
    xs = np.geomspace(1.0, x_max, grid)
    absv = np.abs(vw(xs))
    dens = q * (np.log(xs * q * q) ** 3 / 6.0 + 1.0) * absv / np.sqrt(xs)
    # trapezoid tail integrals from each grid point to x_max
    seg = 0.5 * (dens[1:] + dens[:-1]) * np.diff(xs)
    tails = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    if tails[-1] > tol or dens[-1] * x_max > tol:
        raise QuadratureError("V has not decayed within the search window", dens[-1] * x_max)
    ok = np.nonzero(tails <= tol)[0]
    i = int(ok[0])
    return float(xs[i]), float(tails[i])


def v_table(
    vw: VWeight, q: int, tol: float = 1e-13, max_terms: int = 50_000_000
) -> VTable:
    x_cut, tail = find_cutoff(vw, q, tol)
    n_max = int(math.ceil(x_cut * q * q))
    if n_max > max_terms:
        raise MemoryError(
            f"AFE truncation needs mn <= {n_max}, above the budget {max_terms}"
        )
    lo, hi = -2.0 * math.log(q) - 1e-9, math.log(max(n_max, 2) / (q * q)) + 1e-9
    if q == 1:
        lo = -1e-9
    coef, err = _cheb_fit(vw, lo, hi, tol)
    n = np.arange(1, n_max + 1, dtype=float)
    u = np.log(n) - 2.0 * math.log(q)
    t = (2.0 * u - (hi + lo)) / (hi - lo)
    vals = np.zeros(n_max + 1, dtype=complex)
    vals[1:] = cheb.chebval(t, coef)
    return VTable(vals, n_max, x_cut, tail, len(coef) - 1, err)


# ---------------------------------------------------------------------------
# approximate functional equation
# ---------------------------------------------------------------------------


@dataclass
class AfeResult:
    direct: np.ndarray
    approx: np.ndarray
    residual: np.ndarray
    n_max: int
    tail_estimate: float
    profile: str


def _afe_side(q, table_m, table_n, shifts: ShiftTuple, vtab: VTable):
    a, b, c, d = shifts
    n_max = vtab.n_max
    sq = np.zeros(n_max + 1)
    sq[1:] = 1.0 / np.sqrt(np.arange(1, n_max + 1))
    wa = sigma_pair_table(n_max, a, b) * sq
    wb = sigma_pair_table(n_max, c, d) * sq
    w = residue_matrix(q, n_max, wa, wb, vtab.values)
    return np.einsum("ir,rt,it->i", table_m, w, table_n)


def afe_sides(
    q: int,
    table: np.ndarray,
    shifts: ShiftTuple,
    quad: QuadratureConfig = QuadratureConfig(),
    profile: GProfile = SHARP_G,
    tol: float = 1e-13,
) -> AfeResult:
    """Both sides of the four-fold approximate functional equation for even primitive chi."""
    if q == 1 and not profile.vanishing:
        raise ValueError("q = 1 needs a G vanishing at the zeta poles")
    table = np.atleast_2d(table)
    a, b, c, d = shifts
    direct = (
        l_values(q, table, 0.5 + a, quad.em_depth)
        * l_values(q, table, 0.5 + b, quad.em_depth)
        * l_values(q, np.conj(table), 0.5 + c, quad.em_depth)
        * l_values(q, np.conj(table), 0.5 + d, quad.em_depth)
    )
    vw = VWeight(shifts, 0, quad, profile)
    vw_dual = VWeight(shifts.negated(), 0, quad, profile)
    vt = v_table(vw, q, tol)
    vt_dual = v_table(vw_dual, q, tol)
    first = _afe_side(q, table, np.conj(table), shifts, vt)
    second = _afe_side(q, np.conj(table), table, shifts.negated(), vt_dual)
    approx = first + x_product(q, a, b, c, d) * second
    return AfeResult(
        direct,
        approx,
        np.abs(direct - approx),
        max(vt.n_max, vt_dual.n_max),
        vt.tail_estimate + vt_dual.tail_estimate,
        profile.label(),
    )


def afe_residual(
    chi: DirichletCharacter,
    shifts: ShiftTuple,
    quad: QuadratureConfig = QuadratureConfig(),
    profile: GProfile = SHARP_G,
) -> float:
    """|L L L L - (first V-sum + X * dual V-sum)| for one primitive even character."""
    if not chi.is_primitive or not chi.is_even:
        raise ValueError("the approximate functional equation here needs primitive even chi")
    shifts.check(chi.q)
    res = afe_sides(chi.q, chi.values()[None, :], shifts, quad, profile)
    return float(res.residual[0])


def zeta(s: complex) -> complex:
    """Riemann zeta via the Hurwitz routine at x = 1."""
    return hurwitz_zeta(s, 1.0)
