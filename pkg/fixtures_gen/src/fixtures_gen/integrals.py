"""Gaussian one- and two-electron integrals over contracted Cartesian AOs.

Hermite-expansion (McMurchie-Davidson) recursions; angular momenta are
unrestricted but only s and p functions occur in the supported bases.
The Boys function is evaluated inside the compiled kernels by a series
plus downward recursion, large-argument asymptotics above T = 35.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _boys_fill(mmax, T, F):
    if T < 1e-13:
        for m in range(mmax + 1):
            F[m] = 1.0 / (2 * m + 1) - T / (2 * m + 3)
        return
    if T > 35.0:
        F[0] = 0.5 * np.sqrt(np.pi / T)
        for m in range(mmax):
            F[m + 1] = (2 * m + 1) * F[m] / (2.0 * T)
        return
    mtop = mmax + 25
    # F_mtop by series, then stable downward recursion
    term = 1.0 / (2 * mtop + 1)
    acc = term
    k = 1
    while k < 500:
        term *= 2.0 * T / (2 * mtop + 2 * k + 1)
        acc += term
        if term < 1e-17 * acc:
            break
        k += 1
    emt = np.exp(-T)
    fm = acc * emt
    for m in range(mtop - 1, -1, -1):
        fm = (2.0 * T * fm + emt) / (2 * m + 1)
        if m <= mmax:
            F[m] = fm


@njit(cache=True)
def _etab(la, lb, a, b, qx):
    """Hermite expansion table E[i, j, t] for one dimension, qx = Ax - Bx."""
    p = a + b
    pa = -b / p * qx
    pb = a / p * qx
    E = np.zeros((la + 1, lb + 1, la + lb + 2))
    E[0, 0, 0] = np.exp(-a * b / p * qx * qx)
    for i in range(1, la + 1):
        for t in range(i + 1):
            v = pa * E[i - 1, 0, t] + (t + 1) * E[i - 1, 0, t + 1]
            if t > 0:
                v += E[i - 1, 0, t - 1] / (2.0 * p)
            E[i, 0, t] = v
    for j in range(1, lb + 1):
        for i in range(la + 1):
            for t in range(i + j + 1):
                v = pb * E[i, j - 1, t] + (t + 1) * E[i, j - 1, t + 1]
                if t > 0:
                    v += E[i, j - 1, t - 1] / (2.0 * p)
                E[i, j, t] = v
    return E


@njit(cache=True)
def _rtab(tmax, umax, vmax, p, x, y, z):
    """Hermite Coulomb tensor R[t, u, v] at order zero."""
    ntot = tmax + umax + vmax
    T = p * (x * x + y * y + z * z)
    F = np.empty(ntot + 1)
    _boys_fill(ntot, T, F)
    R = np.zeros((ntot + 1, tmax + 1, umax + 1, vmax + 1))
    f = 1.0
    for n in range(ntot + 1):
        R[n, 0, 0, 0] = f * F[n]
        f *= -2.0 * p
    for t in range(1, tmax + 1):
        for n in range(ntot - t + 1):
            v = x * R[n + 1, t - 1, 0, 0]
            if t > 1:
                v += (t - 1) * R[n + 1, t - 2, 0, 0]
            R[n, t, 0, 0] = v
    for u in range(1, umax + 1):
        for t in range(tmax + 1):
            for n in range(ntot - t - u + 1):
                v = y * R[n + 1, t, u - 1, 0]
                if u > 1:
                    v += (u - 1) * R[n + 1, t, u - 2, 0]
                R[n, t, u, 0] = v
    for v in range(1, vmax + 1):
        for u in range(umax + 1):
            for t in range(tmax + 1):
                for n in range(ntot - t - u - v + 1):
                    w = z * R[n + 1, t, u, v - 1]
                    if v > 1:
                        w += (v - 1) * R[n + 1, t, u, v - 2]
                    R[n, t, u, v] = w
    return R[0]


@njit(cache=True)
def _eri_quartet(l1, c1, a1, d1, l2, c2, a2, d2,
                 l3, c3, a3, d3, l4, c4, a4, d4):
    val = 0.0
    for ia in range(a1.shape[0]):
        for ib in range(a2.shape[0]):
            aa = a1[ia]
            ab = a2[ib]
            p = aa + ab
            px = (aa * c1[0] + ab * c2[0]) / p
            py = (aa * c1[1] + ab * c2[1]) / p
            pz = (aa * c1[2] + ab * c2[2]) / p
            e1x = _etab(l1[0], l2[0], aa, ab, c1[0] - c2[0])
            e1y = _etab(l1[1], l2[1], aa, ab, c1[1] - c2[1])
            e1z = _etab(l1[2], l2[2], aa, ab, c1[2] - c2[2])
            cab = d1[ia] * d2[ib]
            for ic in range(a3.shape[0]):
                for idd in range(a4.shape[0]):
                    ac = a3[ic]
                    ad = a4[idd]
                    q = ac + ad
                    qex = (ac * c3[0] + ad * c4[0]) / q
                    qey = (ac * c3[1] + ad * c4[1]) / q
                    qez = (ac * c3[2] + ad * c4[2]) / q
                    e2x = _etab(l3[0], l4[0], ac, ad, c3[0] - c4[0])
                    e2y = _etab(l3[1], l4[1], ac, ad, c3[1] - c4[1])
                    e2z = _etab(l3[2], l4[2], ac, ad, c3[2] - c4[2])
                    alpha = p * q / (p + q)
                    R = _rtab(l1[0] + l2[0] + l3[0] + l4[0],
                              l1[1] + l2[1] + l3[1] + l4[1],
                              l1[2] + l2[2] + l3[2] + l4[2],
                              alpha, px - qex, py - qey, pz - qez)
                    s = 0.0
                    for t in range(l1[0] + l2[0] + 1):
                        ex1 = e1x[l1[0], l2[0], t]
                        if ex1 == 0.0:
                            continue
                        for u in range(l1[1] + l2[1] + 1):
                            ey1 = e1y[l1[1], l2[1], u]
                            if ey1 == 0.0:
                                continue
                            for v in range(l1[2] + l2[2] + 1):
                                ez1 = e1z[l1[2], l2[2], v]
                                if ez1 == 0.0:
                                    continue
                                for tt in range(l3[0] + l4[0] + 1):
                                    ex2 = e2x[l3[0], l4[0], tt]
                                    if ex2 == 0.0:
                                        continue
                                    for uu in range(l3[1] + l4[1] + 1):
                                        ey2 = e2y[l3[1], l4[1], uu]
                                        if ey2 == 0.0:
                                            continue
                                        for vv in range(l3[2] + l4[2] + 1):
                                            ez2 = e2z[l3[2], l4[2], vv]
                                            if ez2 == 0.0:
                                                continue
                                            sg = 1.0 if (tt + uu + vv) % 2 == 0 else -1.0
                                            s += (ex1 * ey1 * ez1 * sg
                                                  * ex2 * ey2 * ez2
                                                  * R[t + tt, u + uu, v + vv])
                    pref = 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))
                    val += cab * d3[ic] * d4[idd] * pref * s
    return val


@njit(cache=True)
def _eri_fill(lmn, cen, pstart, palpha, pcoef):
    N = lmn.shape[0]
    out = np.zeros((N, N, N, N))
    for i in range(N):
        for j in range(i + 1):
            pij = i * (i + 1) // 2 + j
            for k in range(N):
                for l in range(k + 1):
                    pkl = k * (k + 1) // 2 + l
                    if pij < pkl:
                        continue
                    v = _eri_quartet(
                        lmn[i], cen[i], palpha[pstart[i]:pstart[i + 1]],
                        pcoef[pstart[i]:pstart[i + 1]],
                        lmn[j], cen[j], palpha[pstart[j]:pstart[j + 1]],
                        pcoef[pstart[j]:pstart[j + 1]],
                        lmn[k], cen[k], palpha[pstart[k]:pstart[k + 1]],
                        pcoef[pstart[k]:pstart[k + 1]],
                        lmn[l], cen[l], palpha[pstart[l]:pstart[l + 1]],
                        pcoef[pstart[l]:pstart[l + 1]])
                    out[i, j, k, l] = v
                    out[j, i, k, l] = v
                    out[i, j, l, k] = v
                    out[j, i, l, k] = v
                    out[k, l, i, j] = v
                    out[l, k, i, j] = v
                    out[k, l, j, i] = v
                    out[l, k, j, i] = v
    return out


def _pack(aos):
    N = len(aos)
    lmn = np.array([f.lmn for f in aos], dtype=np.int64)
    cen = np.array([f.center for f in aos], dtype=np.float64)
    pstart = np.zeros(N + 1, dtype=np.int64)
    for i, f in enumerate(aos):
        pstart[i + 1] = pstart[i] + len(f.alphas)
    palpha = np.concatenate([f.alphas for f in aos])
    pcoef = np.concatenate([f.coeffs for f in aos])
    return lmn, cen, pstart, palpha, pcoef


def eri(aos):
    """Full two-electron integral tensor (ab|cd), chemist notation."""
    return _eri_fill(*_pack(aos))


def _pair_terms(fa, fb):
    for aa, ca in zip(fa.alphas, fa.coeffs):
        for ab, cb in zip(fb.alphas, fb.coeffs):
            yield aa, ca, ab, cb


def overlap(aos):
    N = len(aos)
    S = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1):
            fa, fb = aos[i], aos[j]
            v = 0.0
            for aa, ca, ab, cb in _pair_terms(fa, fb):
                p = aa + ab
                s = (np.pi / p) ** 1.5
                for d in range(3):
                    E = _etab(fa.lmn[d], fb.lmn[d], aa, ab,
                              fa.center[d] - fb.center[d])
                    s *= E[fa.lmn[d], fb.lmn[d], 0]
                v += ca * cb * s
            S[i, j] = S[j, i] = v
    return S


def kinetic(aos):
    N = len(aos)
    T = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1):
            fa, fb = aos[i], aos[j]
            v = 0.0
            for aa, ca, ab, cb in _pair_terms(fa, fb):
                p = aa + ab
                s1 = np.zeros(3)
                k1 = np.zeros(3)
                for d in range(3):
                    la, lb = fa.lmn[d], fb.lmn[d]
                    E = _etab(la, lb + 2, aa, ab,
                              fa.center[d] - fb.center[d])
                    s1[d] = E[la, lb, 0]
                    term = 4.0 * ab * ab * E[la, lb + 2, 0]
                    term -= 2.0 * ab * (2 * lb + 1) * E[la, lb, 0]
                    if lb >= 2:
                        term += lb * (lb - 1) * E[la, lb - 2, 0]
                    k1[d] = -0.5 * term
                pref = (np.pi / p) ** 1.5
                v += ca * cb * pref * (k1[0] * s1[1] * s1[2]
                                       + s1[0] * k1[1] * s1[2]
                                       + s1[0] * s1[1] * k1[2])
            T[i, j] = T[j, i] = v
    return T


def nuclear(aos, charges):
    """Nuclear-attraction matrix; charges = [(Z, xyz_bohr), ...]."""
    N = len(aos)
    V = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1):
            fa, fb = aos[i], aos[j]
            v = 0.0
            for aa, ca, ab, cb in _pair_terms(fa, fb):
                p = aa + ab
                P = (aa * fa.center + ab * fb.center) / p
                Es = [_etab(fa.lmn[d], fb.lmn[d], aa, ab,
                            fa.center[d] - fb.center[d]) for d in range(3)]
                lx = fa.lmn[0] + fb.lmn[0]
                ly = fa.lmn[1] + fb.lmn[1]
                lz = fa.lmn[2] + fb.lmn[2]
                for Z, C in charges:
                    R = _rtab(lx, ly, lz, p,
                              P[0] - C[0], P[1] - C[1], P[2] - C[2])
                    s = 0.0
                    for t in range(lx + 1):
                        for u in range(ly + 1):
                            for w in range(lz + 1):
                                s += (Es[0][fa.lmn[0], fb.lmn[0], t]
                                      * Es[1][fa.lmn[1], fb.lmn[1], u]
                                      * Es[2][fa.lmn[2], fb.lmn[2], w]
                                      * R[t, u, w])
                    v -= Z * ca * cb * 2.0 * np.pi / p * s
            V[i, j] = V[j, i] = v
    return V


def moment(aos, powers):
    """Matrix of <a| x^e y^f z^g |b> about the origin."""
    N = len(aos)
    M = np.zeros((N, N))
    binom = {0: (1,), 1: (1, 1), 2: (1, 2, 1)}
    for e in powers:
        if e not in binom:
            raise ValueError("moment powers above 2 unsupported")
    for i in range(N):
        for j in range(N):
            fa, fb = aos[i], aos[j]
            v = 0.0
            for aa, ca, ab, cb in _pair_terms(fa, fb):
                p = aa + ab
                s = (np.pi / p) ** 1.5
                for d in range(3):
                    la, lb = fa.lmn[d], fb.lmn[d]
                    e = powers[d]
                    E = _etab(la, lb + e, aa, ab,
                              fa.center[d] - fb.center[d])
                    bx = fb.center[d]
                    acc = 0.0
                    for k in range(e + 1):
                        acc += binom[e][k] * bx ** (e - k) * E[la, lb + k, 0]
                    s *= acc
                v += ca * cb * s
            M[i, j] = v
    return M


def nuclear_repulsion(charges):
    e = 0.0
    for i, (zi, ci) in enumerate(charges):
        for zj, cj in charges[i + 1:]:
            e += zi * zj / np.linalg.norm(np.asarray(ci) - np.asarray(cj))
    return e
