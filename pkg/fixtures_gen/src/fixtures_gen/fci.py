"""Determinant full CI over an active space, used as the energy oracle.

Matrix elements follow the Slater-Condon rules with occupation bitmasks;
the Hamiltonian is assembled dense and diagonalized directly for small
dimensions, by a Lanczos solve seeded at the reference determinant above
a few hundred determinants.
"""

from itertools import combinations

import numpy as np
from scipy.sparse.linalg import eigsh


def _strings(n_orb, n_el):
    out = []
    for occ in combinations(range(n_orb), n_el):
        m = 0
        for p in occ:
            m |= 1 << p
        out.append(m)
    return out


def _sign(mask, i, a):
    """Parity of moving an electron from occupied i to empty a."""
    lo, hi = (i, a) if i < a else (a, i)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1.0 if between.bit_count() & 1 else 1.0


def _singles(strings, index, n_orb):
    out = []
    for si, m in enumerate(strings):
        for i in range(n_orb):
            if not (m >> i) & 1:
                continue
            for a in range(n_orb):
                if (m >> a) & 1:
                    continue
                m2 = m ^ (1 << i) ^ (1 << a)
                out.append((si, index[m2], i, a, _sign(m, i, a)))
    return out


def _occ_list(m, n_orb):
    return [p for p in range(n_orb) if (m >> p) & 1]


def fci_ground_energy(h1, e2, n_alpha, n_beta, e_offset=0.0, tol=1e-11):
    """Lowest eigenvalue of the active-space Hamiltonian plus offset."""
    n = h1.shape[0]
    sa = _strings(n, n_alpha)
    sb = _strings(n, n_beta)
    ia = {m: k for k, m in enumerate(sa)}
    ib = {m: k for k, m in enumerate(sb)}
    na, nb = len(sa), len(sb)
    dim = na * nb

    jd = np.einsum("iijj->ij", e2)          # (ii|jj)
    kd = np.einsum("ijji->ij", e2)          # (ij|ji)
    occ_a = np.array([[(m >> p) & 1 for p in range(n)] for m in sa], float)
    occ_b = np.array([[(m >> p) & 1 for p in range(n)] for m in sb], float)

    # same-spin one-string energies
    def string_energy(occ):
        e1 = occ @ np.diag(h1)
        coul = 0.5 * (np.einsum("si,ij,sj->s", occ, jd, occ)
                      - np.einsum("si,ij,sj->s", occ, kd, occ))
        return e1 + coul

    ea = string_energy(occ_a)
    eb = string_energy(occ_b)
    cross = occ_a @ jd @ occ_b.T

    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    H[idx, idx] = (ea[:, None] + eb[None, :] + cross).ravel()

    singles_a = _singles(sa, ia, n)
    singles_b = _singles(sb, ib, n)

    # single excitations: effective one-electron part plus field of the
    # opposite spin
    col_b = np.arange(nb)
    for si, sj, i, a, sg in singles_a:
        common = _occ_list(sa[si] & ~(1 << i), n)
        base = h1[i, a]
        for k in common:
            base += e2[i, a, k, k] - e2[i, k, k, a]
        vals = sg * (base + occ_b @ e2[i, a].diagonal())
        H[si * nb + col_b, sj * nb + col_b] += vals
    col_a = np.arange(na)
    for si, sj, i, a, sg in singles_b:
        common = _occ_list(sb[si] & ~(1 << i), n)
        base = h1[i, a]
        for k in common:
            base += e2[i, a, k, k] - e2[i, k, k, a]
        vals = sg * (base + occ_a @ e2[i, a].diagonal())
        H[col_a * nb + si, col_a * nb + sj] += vals

    # same-spin double excitations
    def add_doubles(strings, index, axis):
        for si, m in enumerate(strings):
            occ = _occ_list(m, n)
            vir = [p for p in range(n) if not (m >> p) & 1]
            for i, j in combinations(occ, 2):
                for a, b in combinations(vir, 2):
                    m1 = m ^ (1 << i) ^ (1 << a)
                    sg = _sign(m, i, a) * _sign(m1, j, b)
                    sj = index[m1 ^ (1 << j) ^ (1 << b)]
                    val = sg * (e2[i, a, j, b] - e2[i, b, j, a])
                    if axis == 0:
                        H[si * nb + col_b, sj * nb + col_b] += val
                    else:
                        H[col_a * nb + si, col_a * nb + sj] += val

    add_doubles(sa, ia, 0)
    add_doubles(sb, ib, 1)

    # opposite-spin double excitations
    for si, sj, i, a, sg1 in singles_a:
        rows = si * nb
        cols = sj * nb
        for ti, tj, j, b, sg2 in singles_b:
            H[rows + ti, cols + tj] += sg1 * sg2 * e2[i, a, j, b]

    if dim <= 400:
        w = np.linalg.eigvalsh(H)
        return float(w[0] + e_offset)
    v0 = np.zeros(dim)
    ref_a = ia[(1 << n_alpha) - 1]
    ref_b = ib[(1 << n_beta) - 1]
    v0[ref_a * nb + ref_b] = 1.0
    w = eigsh(H, k=1, which="SA", v0=v0, tol=tol, maxiter=5000)[0]
    return float(w[0] + e_offset)
