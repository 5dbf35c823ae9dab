"""Hot inner loops, each with a numba path and a pure-numpy path.

The public wrappers at the bottom dispatch on :data:`lmoments._accel.USE_NUMBA`.
Both paths compute the same quantities; the numpy path is the reference the
benchmark compares against and the fallback when numba is unavailable.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._accel import USE_NUMBA, njit

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# modular inverses
# ---------------------------------------------------------------------------


@njit
def _unit_inverses_nb(c):
    # Montgomery batch inversion over all units mod c: one egcd for the product.
    units = np.empty(c, dtype=np.int64)
    k = 0
    for x in range(1, c + 1):
        a, b = x % c, c
        while b:
            a, b = b, a % b
        if a == 1:
            units[k] = x % c
            k += 1
    units = units[:k]
    inv = np.empty(k, dtype=np.int64)
    if c == 1:
        inv[0] = 0
        return units, inv
    prefix = np.empty(k, dtype=np.int64)
    acc = 1
    for i in range(k):
        acc = (acc * units[i]) % c
        prefix[i] = acc
    # inverse of the full product via extended Euclid
    r0, r1, s0, s1 = c, prefix[k - 1], 0, 1
    while r1:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    acc = s0 % c
    for i in range(k - 1, 0, -1):
        inv[i] = (acc * prefix[i - 1]) % c
        acc = (acc * units[i]) % c
    inv[0] = acc
    return units, inv


def _unit_inverses_np(c):
    x = np.arange(1, c + 1, dtype=np.int64) % c
    if c == 1:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    units = x[np.gcd(x, c) == 1]
    # vectorised extended Euclid
    r0 = np.full(units.shape, c, dtype=np.int64)
    r1 = units.copy()
    s0 = np.zeros_like(units)
    s1 = np.ones_like(units)
    while np.any(r1):
        nz = r1 != 0
        qq = np.where(nz, r0 // np.where(nz, r1, 1), 0)
        r0, r1 = np.where(nz, r1, r0), np.where(nz, r0 - qq * r1, r1)
        s0, s1 = np.where(nz, s1, s0), np.where(nz, s0 - qq * s1, s1)
    return units, s0 % c


# ---------------------------------------------------------------------------
# Kloosterman sums
# ---------------------------------------------------------------------------


@njit
def _kloosterman_nb(m, n, c):
    units, inv = _unit_inverses_nb(c)
    mm = m % c
    nn = n % c
    total = 0.0
    for i in range(units.shape[0]):
        r = (mm * units[i] + nn * inv[i]) % c
        total += math.cos(TWO_PI * r / c)
    return total


def _kloosterman_np(m, n, c):
    units, inv = _unit_inverses_np(c)
    r = ((m % c) * units + (n % c) * inv) % c
    return float(np.cos(TWO_PI * r / c).sum())


@njit
def _kloosterman_many_nb(ms, ns, c):
    # S(ms[j], ns[j]; c) for a batch sharing the modulus; cos table of size c.
    units, inv = _unit_inverses_nb(c)
    table = np.empty(c, dtype=np.float64)
    for r in range(c):
        table[r] = math.cos(TWO_PI * r / c)
    out = np.empty(ms.shape[0], dtype=np.float64)
    for j in range(ms.shape[0]):
        mm = ms[j] % c
        nn = ns[j] % c
        total = 0.0
        for i in range(units.shape[0]):
            total += table[(mm * units[i] + nn * inv[i]) % c]
        out[j] = total
    return out


def _kloosterman_many_np(ms, ns, c):
    units, inv = _unit_inverses_np(c)
    table = np.cos(TWO_PI * np.arange(c) / c)
    out = np.empty(len(ms), dtype=np.float64)
    step = max(1, 2_000_000 // max(1, len(units)))
    for lo in range(0, len(ms), step):
        mm = (np.asarray(ms[lo : lo + step]) % c)[:, None]
        nn = (np.asarray(ns[lo : lo + step]) % c)[:, None]
        out[lo : lo + step] = table[(mm * units + nn * inv) % c].sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# Mellin-Barnes line sums: sum_k w_k * exp(i * t_k * y) for many y
# ---------------------------------------------------------------------------


@njit
def _line_sum_nb(t0, dt, weights, ys):
    # Uniform t-grid; the phase is advanced by repeated multiplication and
    # re-anchored every 256 steps to bound rounding drift.
    nt = weights.shape[0]
    out = np.empty(ys.shape[0], dtype=np.complex128)
    for j in range(ys.shape[0]):
        y = ys[j]
        step = complex(math.cos(dt * y), math.sin(dt * y))
        acc = 0j
        k = 0
        while k < nt:
            ph = t0 + k * dt
            z = complex(math.cos(ph * y), math.sin(ph * y))
            kmax = min(nt, k + 256)
            while k < kmax:
                acc += weights[k] * z
                z *= step
                k += 1
        out[j] = acc
    return out


def _line_sum_np(t0, dt, weights, ys):
    t = t0 + dt * np.arange(weights.shape[0])
    out = np.empty(len(ys), dtype=np.complex128)
    step = max(1, 4_000_000 // max(1, len(t)))
    for lo in range(0, len(ys), step):
        out[lo : lo + step] = np.exp(1j * np.outer(ys[lo : lo + step], t)) @ weights
    return out


# ---------------------------------------------------------------------------
# divisor-type coefficient sieves
# ---------------------------------------------------------------------------


@njit
def _sigma_pair_nb(n_max, alpha, beta):
    # sigma_{alpha,beta}(m) = sum_{a d = m} a^-alpha d^-beta for 1 <= m <= n_max
    logs = np.empty(n_max + 1, dtype=np.float64)
    logs[0] = 0.0
    for k in range(1, n_max + 1):
        logs[k] = math.log(k)
    pa = np.empty(n_max + 1, dtype=np.complex128)
    pb = np.empty(n_max + 1, dtype=np.complex128)
    for k in range(1, n_max + 1):
        pa[k] = cmath.exp(-alpha * logs[k])
        pb[k] = cmath.exp(-beta * logs[k])
    out = np.zeros(n_max + 1, dtype=np.complex128)
    for a in range(1, n_max + 1):
        w = pa[a]
        d = 1
        m = a
        while m <= n_max:
            out[m] += w * pb[d]
            d += 1
            m += a
    return out


def _sigma_pair_np(n_max, alpha, beta):
    k = np.arange(1, n_max + 1, dtype=np.float64)
    pa = np.concatenate(([0.0], np.exp(-alpha * np.log(k))))
    pb = np.concatenate(([0.0], np.exp(-beta * np.log(k))))
    out = np.zeros(n_max + 1, dtype=np.complex128)
    for a in range(1, n_max + 1):
        cnt = n_max // a
        out[a :: a][:cnt] += pa[a] * pb[1 : cnt + 1]
    return out


@njit
def _residue_matrix_nb(q, x_max, wa, wb, vtab):
    # W[r, t] = sum over m*n <= x_max, m = r, n = t (mod q), of wa[m] wb[n] vtab[m n]
    out = np.zeros((q, q), dtype=np.complex128)
    for m in range(1, x_max + 1):
        am = wa[m]
        if am == 0:
            continue
        r = m % q
        nmax = x_max // m
        for n in range(1, nmax + 1):
            out[r, n % q] += am * wb[n] * vtab[m * n]
    return out


def _residue_matrix_np(q, x_max, wa, wb, vtab):
    out = np.zeros((q, q), dtype=np.complex128)
    for m in range(1, x_max + 1):
        if wa[m] == 0:
            continue
        nmax = x_max // m
        n = np.arange(1, nmax + 1)
        vals = wa[m] * wb[1 : nmax + 1] * vtab[m * n]
        np.add.at(out[m % q], n % q, vals)
    return out


# ---------------------------------------------------------------------------
# Kloosterman harness matrices
# ---------------------------------------------------------------------------


@njit
def _unit_table_nb(c):
    units, inv = _unit_inverses_nb(c)
    table = np.empty(c, dtype=np.float64)
    stab = np.empty(c, dtype=np.float64)
    for r in range(c):
        table[r] = math.cos(TWO_PI * r / c)
        stab[r] = math.sin(TWO_PI * r / c)
    return units, inv, table, stab


@njit
def _cusp_kernel_nb(ms, ns, s, sign, u, v, x_scale, l_lo, l_hi):
    """K[i, j] = sum_l phi(4 pi sqrt(s m n)/gamma)/gamma * S_{inf,1/u}(s m, sign n; gamma).

    gamma = l u sqrt(v), (l, v) = 1, phi the standard bump on [X, 8X].
    """
    nm = ms.shape[0]
    nn = ns.shape[0]
    out = np.zeros((nm, nn), dtype=np.complex128)
    sv = math.sqrt(v)
    # u^{-1} mod v
    ubar = 0
    if v > 1:
        for t in range(1, v):
            if (u * t) % v == 1:
                ubar = t
                break
    for l in range(l_lo, l_hi + 1):
        a, b = l, v
        while b:
            a, b = b, a % b
        if a != 1:
            continue
        c = l * u
        gam = l * u * sv
        units, inv, ctab, stab = _unit_table_nb(c)
        # v^{-1} mod c
        vbar = 0
        if c == 1:
            vbar = 0
        else:
            r0, r1, s0, s1 = c, v % c, 0, 1
            while r1:
                qq = r0 // r1
                r0, r1 = r1, r0 - qq * r1
                s0, s1 = s1, s0 - qq * s1
            vbar = s0 % c
        for i in range(nm):
            for j in range(nn):
                arg = 4.0 * math.pi * math.sqrt(s * ms[i] * ns[j]) / gam
                tt = (arg - 4.5 * x_scale) / (3.5 * x_scale)
                if tt <= -1.0 or tt >= 1.0:
                    continue
                w = math.exp(1.0 - 1.0 / (1.0 - tt * tt)) / gam
                mm = (s * ms[i] * vbar) % c
                nv = (sign * ns[j]) % c
                total = 0.0
                for k in range(units.shape[0]):
                    total += ctab[(mm * units[k] + nv * inv[k]) % c]
                ph = TWO_PI * ((sign * ns[j] * ubar) % v) / v if v > 1 else 0.0
                out[i, j] += w * total * complex(math.cos(ph), math.sin(ph))
    return out


def _cusp_kernel_np(ms, ns, s, sign, u, v, x_scale, l_lo, l_hi):
    ms = np.asarray(ms, dtype=np.int64)
    ns = np.asarray(ns, dtype=np.int64)
    out = np.zeros((len(ms), len(ns)), dtype=np.complex128)
    ubar = pow(int(u), -1, int(v)) if v > 1 else 0
    sv = math.sqrt(v)
    mn = np.multiply.outer(ms, ns)
    for l in range(l_lo, l_hi + 1):
        if math.gcd(l, v) != 1:
            continue
        c = l * u
        gam = l * u * sv
        arg = 4.0 * math.pi * np.sqrt(s * mn) / gam
        tt = (arg - 4.5 * x_scale) / (3.5 * x_scale)
        inside = (tt > -1.0) & (tt < 1.0)
        if not inside.any():
            continue
        vbar = pow(int(v), -1, c) if c > 1 else 0
        ii, jj = np.nonzero(inside)
        kl = _kloosterman_many_np(
            (s * ms[ii] * vbar) % c, (sign * ns[jj]) % c, c
        )
        w = np.exp(1.0 - 1.0 / (1.0 - tt[ii, jj] ** 2)) / gam
        ph = TWO_PI * ((sign * ns[jj] * ubar) % v) / v if v > 1 else np.zeros(len(jj))
        np.add.at(out, (ii, jj), w * kl * np.exp(1j * ph))
    return out


@njit
def _incomplete_sums_nb(q, c, a_max, b_max, beta):
    # T[a] = sum_{b <= B, (b, q) = 1} beta_b e(c a bbar / q)
    units, inv, ctab, stab = _unit_table_nb(q)
    binv = np.zeros(b_max + 1, dtype=np.int64)
    ok = np.zeros(b_max + 1, dtype=np.bool_)
    pos = np.full(q, -1, dtype=np.int64)
    for k in range(units.shape[0]):
        pos[units[k]] = k
    for b in range(1, b_max + 1):
        k = pos[b % q]
        if k >= 0:
            ok[b] = True
            binv[b] = inv[k]
    out = np.zeros(a_max, dtype=np.complex128)
    for a in range(1, a_max + 1):
        acc = 0j
        ca = (c * a) % q
        for b in range(1, b_max + 1):
            if ok[b]:
                r = (ca * binv[b]) % q
                acc += beta[b - 1] * complex(ctab[r], stab[r])
        out[a - 1] = acc
    return out


def _incomplete_sums_np(q, c, a_max, b_max, beta):
    b = np.arange(1, b_max + 1, dtype=np.int64)
    ok = np.gcd(b, q) == 1
    units, inv = _unit_inverses_np(q)
    lookup = np.zeros(q, dtype=np.int64)
    lookup[units] = inv
    binv = lookup[b[ok] % q]
    a = np.arange(1, a_max + 1, dtype=np.int64)
    r = ((c * a) % q)[:, None] * binv[None, :] % q
    return np.exp(TWO_PI * 1j * r / q) @ np.asarray(beta)[ok]


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def unit_inverses(c):
    """Units modulo ``c`` and their inverses (parallel arrays)."""
    return (_unit_inverses_nb if USE_NUMBA else _unit_inverses_np)(int(c))


def kloosterman_sum(m, n, c):
    return (_kloosterman_nb if USE_NUMBA else _kloosterman_np)(int(m), int(n), int(c))


def kloosterman_many(ms, ns, c):
    ms = np.ascontiguousarray(ms, dtype=np.int64)
    ns = np.ascontiguousarray(ns, dtype=np.int64)
    return (_kloosterman_many_nb if USE_NUMBA else _kloosterman_many_np)(ms, ns, int(c))


def line_sum(t0, dt, weights, ys):
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    return (_line_sum_nb if USE_NUMBA else _line_sum_np)(float(t0), float(dt), weights, ys)


def sigma_pair_table(n_max, alpha, beta):
    """Array of sigma_{alpha,beta}(m), index m in [0, n_max] (index 0 is 0)."""
    return (_sigma_pair_nb if USE_NUMBA else _sigma_pair_np)(
        int(n_max), complex(alpha), complex(beta)
    )


def residue_matrix(q, x_max, wa, wb, vtab):
    wa = np.ascontiguousarray(wa, dtype=np.complex128)
    wb = np.ascontiguousarray(wb, dtype=np.complex128)
    vtab = np.ascontiguousarray(vtab, dtype=np.complex128)
    return (_residue_matrix_nb if USE_NUMBA else _residue_matrix_np)(
        int(q), int(x_max), wa, wb, vtab
    )


def cusp_kernel(ms, ns, s, sign, u, v, x_scale, l_lo, l_hi):
    ms = np.ascontiguousarray(ms, dtype=np.int64)
    ns = np.ascontiguousarray(ns, dtype=np.int64)
    return (_cusp_kernel_nb if USE_NUMBA else _cusp_kernel_np)(
        ms, ns, int(s), int(sign), int(u), int(v), float(x_scale), int(l_lo), int(l_hi)
    )


def incomplete_sums(q, c, a_max, b_max, beta):
    beta = np.ascontiguousarray(beta, dtype=np.complex128)
    return (_incomplete_sums_nb if USE_NUMBA else _incomplete_sums_np)(
        int(q), int(c), int(a_max), int(b_max), beta
    )
