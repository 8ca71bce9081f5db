"""Fermion-to-qubit mappings built on a tiny symbolic Pauli algebra.

Operators are dicts {(x_mask, z_mask): complex} with the matrix
convention term = coeff * X^x * Z^z (X factors standing left of Z).
Mode index m is bit m of the masks and char m of emitted labels.
"""

import numpy as np

# -- elementary algebra --


def term_mul(c1, x1, z1, c2, x2, z2):
    # Z^z1 commuted past X^x2 picks up (-1)^{|z1 & x2|}
    c = c1 * c2
    if (z1 & x2).bit_count() & 1:
        c = -c
    return c, x1 ^ x2, z1 ^ z2


def op_mul(a, b):
    out = {}
    for (x1, z1), c1 in a.items():
        for (x2, z2), c2 in b.items():
            c, x, z = term_mul(c1, x1, z1, c2, x2, z2)
            key = (x, z)
            out[key] = out.get(key, 0.0) + c
    return out


def op_axpy(acc, other, scale=1.0):
    for key, c in other.items():
        acc[key] = acc.get(key, 0.0) + scale * c


def op_dagger(a):
    out = {}
    for (x, z), c in a.items():
        v = np.conjugate(c)
        if (x & z).bit_count() & 1:
            v = -v
        out[(x, z)] = v
    return out


def op_clean(a, floor=1e-14):
    return {k: c for k, c in a.items() if abs(c) > floor}


def ladder(m, dag):
    """a_m (or its adjoint) under the Jordan-Wigner convention."""
    below = (1 << m) - 1
    x = 1 << m
    s = 0.5 if dag else -0.5
    return {(x, below): 0.5, (x, below | (1 << m)): s}


def excitation(i, j):
    """Number-conserving product a^dag_i a_j in mode indices."""
    return op_mul(ladder(i, True), ladder(j, False))


# -- spin-orbital Hamiltonian assembly --


def mode_index(p, spin, n_sp, interleaved):
    return 2 * p + spin if interleaved else p + spin * n_sp


def spin_orbital_hamiltonian(h1, e2, e0, interleaved, floor=1e-12):
    """Map the active-space electronic operator to qubit modes.

    h1, e2 are spatial MO integrals (chemist two-electron convention),
    e0 the scalar offset.  Returns a dict operator on 2 * n_sp modes.
    """
    n_sp = h1.shape[0]
    exc = {}
    for spin in (0, 1):
        for p in range(n_sp):
            for q in range(n_sp):
                mp = mode_index(p, spin, n_sp, interleaved)
                mq = mode_index(q, spin, n_sp, interleaved)
                exc[(p, q, spin)] = excitation(mp, mq)

    H = {(0, 0): complex(e0)}
    heff = h1 - 0.5 * np.einsum("pqqs->ps", e2)
    for spin in (0, 1):
        for p in range(n_sp):
            for q in range(n_sp):
                if abs(heff[p, q]) > floor:
                    op_axpy(H, exc[(p, q, spin)], heff[p, q])
    for p in range(n_sp):
        for q in range(n_sp):
            for r in range(n_sp):
                for s in range(n_sp):
                    g = e2[p, q, r, s]
                    if abs(g) <= floor:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            op_axpy(H, op_mul(exc[(p, q, s1)],
                                              exc[(r, s, s2)]), 0.5 * g)
    return op_clean(H)


# -- parity transform and qubit reduction --


def cnot_chain(op, n_modes):
    """Conjugate by the prefix-parity circuit CNOT(0->1)...CNOT(n-2->n-1)."""
    out = {}
    for (x, z), c in op.items():
        for j in range(n_modes - 1):
            if (x >> j) & 1:
                x ^= 1 << (j + 1)
            if (z >> (j + 1)) & 1:
                z ^= 1 << j
        key = (x, z)
        out[key] = out.get(key, 0.0) + c
    return out


def _drop_bit(v, pos):
    return (v & ((1 << pos) - 1)) | ((v >> (pos + 1)) << pos)


def reduce_qubits(op, positions, signs):
    """Substitute Z eigenvalues at fixed-parity positions and drop them.

    Every term must act as I or Z there; an X component would change the
    conserved parity and signals a mapping error.
    """
    order = sorted(zip(positions, signs), reverse=True)
    out = {}
    for (x, z), c in op.items():
        for pos, sgn in order:
            if (x >> pos) & 1:
                raise ValueError(f"operator flips conserved parity bit {pos}")
            if (z >> pos) & 1:
                c = c * sgn
            x = _drop_bit(x, pos)
            z = _drop_bit(z, pos)
        key = (x, z)
        out[key] = out.get(key, 0.0) + c
    return out


def jordan_wigner_terms(h1, e2, e0):
    """Interleaved Jordan-Wigner qubit operator (alpha even, beta odd)."""
    return spin_orbital_hamiltonian(h1, e2, e0, interleaved=True)


def parity_reduced_terms(h1, e2, e0, n_alpha, n_beta):
    """Parity-mapped operator with the two fixed-parity qubits removed.

    Block spin ordering (alpha modes first); the removed qubits are the
    middle one (alpha-count parity) and the last (total parity).
    Returns (terms, (sign_mid, sign_last), n_reduced).
    """
    n_sp = h1.shape[0]
    M = 2 * n_sp
    jw = spin_orbital_hamiltonian(h1, e2, e0, interleaved=False)
    par = cnot_chain(jw, M)
    s_mid = -1.0 if n_alpha % 2 else 1.0
    s_last = -1.0 if (n_alpha + n_beta) % 2 else 1.0
    red = reduce_qubits(par, (n_sp - 1, M - 1), (s_mid, s_last))
    return op_clean(red), (s_mid, s_last), M - 2


# -- reference determinants --


def hf_occupations(n_sp, n_alpha, n_beta, interleaved):
    occ = [0] * (2 * n_sp)
    for p in range(n_alpha):
        occ[mode_index(p, 0, n_sp, interleaved)] = 1
    for p in range(n_beta):
        occ[mode_index(p, 1, n_sp, interleaved)] = 1
    return occ


def hf_bitstring_jw(n_sp, n_alpha, n_beta):
    return "".join(map(str, hf_occupations(n_sp, n_alpha, n_beta, True)))


def hf_bitstring_parity_reduced(n_sp, n_alpha, n_beta):
    occ = hf_occupations(n_sp, n_alpha, n_beta, False)
    par = np.cumsum(occ) % 2
    keep = [k for k in range(2 * n_sp) if k not in (n_sp - 1, 2 * n_sp - 1)]
    return "".join(str(par[k]) for k in keep)


def expectation_bits(op, bits):
    """<b|op|b> for a computational basis state given as a bit string."""
    mask = 0
    for q, ch in enumerate(bits):
        if ch == "1":
            mask |= 1 << q
    val = 0.0
    for (x, z), c in op.items():
        if x == 0:
            val += c.real if (z & mask).bit_count() % 2 == 0 else -c.real
    return val


# -- label emission --


def pauli_label(x, z, n):
    out = []
    for m in range(n):
        xb = (x >> m) & 1
        zb = (z >> m) & 1
        out.append("IXZY"[xb + 2 * zb] if xb + 2 * zb != 3 else "Y")
    return "".join(out)


def to_label_terms(op, n, floor=0.0):
    """Convert to (label, real_coeff) pairs, identity first, then by |c| desc.

    The stored convention coeff * X^x Z^z is rebased onto the Hermitian
    label operator i^{|x&z|} X^x Z^z, which must leave real coefficients.
    """
    rows = []
    for (x, z), c in op.items():
        v = c * (-1j) ** ((x & z).bit_count() % 4)
        if abs(v.imag) > 1e-9:
            raise ValueError("non-Hermitian coefficient survived mapping")
        r = v.real
        if abs(r) <= floor and (x, z) != (0, 0):
            continue
        rows.append((pauli_label(x, z, n), r, x, z))
    ident = [r for r in rows if (r[2], r[3]) == (0, 0)]
    rest = sorted((r for r in rows if (r[2], r[3]) != (0, 0)),
                  key=lambda r: (-abs(r[1]), r[0]))
    return [(lab, c) for lab, c, _, _ in ident + rest]


# -- UCCSD-style excitation pools --


def _mapped_generator(t_op, mapper):
    anti = dict(t_op)
    op_axpy(anti, op_dagger(t_op), -1.0)
    gen = {k: 1j * c for k, c in op_clean(anti).items()}
    return mapper(gen)


def uccsd_pool(n_sp, n_alpha, n_beta, mapping):
    """Hermitian single and double excitation generators for the mapping.

    mapping is "jw" (interleaved) or "parity" (block order, two-qubit
    reduced).  Labels record the originating spatial excitation; spin
    labels a/b.  Returns (elements, n_qubits) with elements a list of
    (label, op_dict).
    """
    if n_alpha != n_beta:
        raise ValueError("spin-restricted pools only")
    n_occ = n_alpha
    occ = range(n_occ)
    virt = range(n_occ, n_sp)
    interleaved = mapping == "jw"
    M = 2 * n_sp

    if mapping == "jw":
        def mapper(op):
            return op
        n_out = M
    elif mapping == "parity":
        s_mid = -1.0 if n_alpha % 2 else 1.0
        s_last = -1.0 if (n_alpha + n_beta) % 2 else 1.0

        def mapper(op):
            return reduce_qubits(cnot_chain(op, M), (n_sp - 1, M - 1),
                                 (s_mid, s_last))
        n_out = M - 2
    else:
        raise ValueError(f"unknown mapping {mapping!r}")

    def mode(p, s):
        return mode_index(p, s, n_sp, interleaved)

    sp = "ab"
    elements = []
    for s in (0, 1):
        for i in occ:
            for a in virt:
                t = excitation(mode(a, s), mode(i, s))
                elements.append((f"s:{i}{sp[s]}->{a}{sp[s]}",
                                 _mapped_generator(t, mapper)))
    for i in occ:
        for j in occ:
            for a in virt:
                for b in virt:
                    t = op_mul(excitation(mode(a, 0), mode(i, 0)),
                               excitation(mode(b, 1), mode(j, 1)))
                    elements.append((f"d:{i}a,{j}b->{a}a,{b}b",
                                     _mapped_generator(t, mapper)))
    for s in (0, 1):
        for ii, i in enumerate(occ):
            for j in list(occ)[ii + 1:]:
                for ai, a in enumerate(virt):
                    for b in list(virt)[ai + 1:]:
                        t = op_mul(excitation(mode(a, s), mode(i, s)),
                                   excitation(mode(b, s), mode(j, s)))
                        elements.append(
                            (f"d:{i}{sp[s]},{j}{sp[s]}->{a}{sp[s]},{b}{sp[s]}",
                             _mapped_generator(t, mapper)))
    elements = [(lab, op_clean(op)) for lab, op in elements]
    return [(lab, op) for lab, op in elements if op], n_out
