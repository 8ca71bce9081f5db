"""Dense-matrix and fixture-reading oracles shared by the test modules."""

import json
from pathlib import Path

import numpy as np

FIXDIR = Path(__file__).resolve().parents[2] / "fixtures"


def dense_op(op, n):
    """Dense matrix of a {(x, z): coeff} operator, coeff * X^x Z^z.

    Basis index k holds mode m in bit m, so X^x maps column k to row
    k ^ x and Z^z contributes (-1)^{|k & z|}.
    """
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    k = np.arange(dim)
    for (x, z), c in op.items():
        sign = 1.0 - 2.0 * (np.bitwise_count(k & z) % 2)
        m[k ^ x, k] += c * sign
    return m


def dense_label(label):
    # fixture labels put qubit q at char q; keep that bit alignment
    dim = 1 << len(label)
    m = np.zeros((dim, dim), dtype=complex)
    k = np.arange(dim)
    x = z = 0
    for q, ch in enumerate(label):
        if ch in "XY":
            x |= 1 << q
        if ch in "ZY":
            z |= 1 << q
    sign = 1.0 - 2.0 * (np.bitwise_count(k & z) % 2)
    phase = 1j ** ((x & z).bit_count() % 4)
    m[k ^ x, k] += phase * sign
    return m


def zz_expectation(terms, bits):
    """<bits|H|bits> from label terms; only I/Z strings contribute."""
    mask = 0
    for q, ch in enumerate(bits):
        if ch == "1":
            mask |= 1 << q
    val = 0.0
    for t in terms:
        lab = t["pauli"]
        if any(ch in "XY" for ch in lab):
            continue
        z = 0
        for q, ch in enumerate(lab):
            if ch == "Z":
                z |= 1 << q
        val += t["coeff"] * (1.0 if (z & mask).bit_count() % 2 == 0 else -1.0)
    return val


def load_fixture(name):
    return json.loads((FIXDIR / f"{name}.json").read_text())
