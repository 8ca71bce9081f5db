"""Matrix-free ground states and entanglement diagnostics for n up to ~16.

Statevector index convention: qubit 0 is the most significant bit of the
amplitude index, so a qubit bitmask m acts on index bits through its
bit-reversal.  All entropies use natural logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .pauli import PauliString, PauliSum

__all__ = [
    "Statevector",
    "GroundState",
    "ConvergenceError",
    "basis_state",
    "apply_pauli",
    "apply_pauli_sum",
    "apply_clifford_to_state",
    "ground_state",
    "operator_norm",
    "reduced_density",
    "entanglement_entropy",
    "entropy_profile",
    "mutual_information",
    "permute_qubits",
]

_DENSE_MAX = 8
_GROUND_SEED = 912
_EIG_CLAMP = 1e-14


class ConvergenceError(RuntimeError):
    """Iterative eigensolve failed its residual contract."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Statevector:
    """Complex amplitudes over computational basis states, qubit 0 = MSB."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes)
        if amps.shape != (1 << self.n,):
            raise ValueError("amplitude count must be 2^n")
        if amps.dtype != np.complex128:
            amps = amps.astype(np.complex128)
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(n: int, bits: str | int) -> Statevector:
    """|bits>; a string indexes qubit 0 first, an int is the raw index."""
    if isinstance(bits, str):
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise ValueError("bitstring must be n characters of 0/1")
        idx = int(bits, 2)
    else:
        idx = int(bits)
        if not 0 <= idx < (1 << n):
            raise ValueError("basis index out of range")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[idx] = 1.0
    return Statevector(n, amps)


def _index_mask(mask: int, n: int) -> int:
    out = 0
    for q in range(n):
        if (mask >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def _parity_of(values: np.ndarray, n: int) -> np.ndarray:
    if n <= 16:
        from ._kernels import PARITY16
        return PARITY16[values]
    return (np.bitwise_count(values.astype(np.uint64)) & 1).astype(np.int8)


def apply_pauli(p: PauliString, psi: Statevector) -> Statevector:
    """P|psi> for a single Pauli string, including its i^phase prefactor."""
    if p.n != psi.n:
        raise ValueError("qubit count mismatch")
    n = p.n
    ax = _index_mask(p.x, n)
    az = _index_mask(p.z, n)
    src = np.arange(1 << n, dtype=np.int64) ^ ax
    signs = 1.0 - 2.0 * _parity_of(src & az, n)
    out = (1j ** p.phase) * signs * psi.amplitudes[src]
    return Statevector(n, out)


def _compiled_terms(H: PauliSum):
    """Split H into a diagonal amplitude array plus off-diagonal term data."""
    n = H.n
    diag = np.zeros(1 << n)
    ax, az, w = [], [], []
    real = True
    for c, p in H.items():
        ia = _index_mask(p.x, n)
        iz = _index_mask(p.z, n)
        if ia == 0:
            idx = np.arange(1 << n, dtype=np.int64)
            diag += c * (1.0 - 2.0 * _parity_of(idx & iz, n))
        else:
            wt = c * (1j ** p.phase)
            if wt.imag != 0.0:
                real = False
            ax.append(ia)
            az.append(iz)
            w.append(wt)
    return diag, np.array(ax, dtype=np.int64), np.array(az, dtype=np.int64), \
        np.array(w, dtype=np.complex128), real


def _numba_matvec(H: PauliSum):
    """Matrix-free y = H x closure; real float64 path when H is real."""
    from ._kernels import PARITY16, matvec
    diag, ax, az, w, real = _compiled_terms(H)
    N = 1 << H.n
    if real:
        wr = w.real.copy()

        def mv_real(x):
            out = np.empty(N)
            return matvec(np.ascontiguousarray(x, dtype=np.float64),
                          out, diag, ax, az, wr, PARITY16)
        return mv_real, True

    def mv(x):
        out = np.empty(N, dtype=np.complex128)
        return matvec(np.ascontiguousarray(x, dtype=np.complex128),
                      out, diag, ax, az, w, PARITY16)
    return mv, False


def apply_pauli_sum(H: PauliSum, psi: Statevector,
                    engine: str = "auto") -> Statevector:
    """H|psi> term by term; compiled gather kernel or plain numpy.

    The numpy engine is an independent per-term implementation kept as a
    cross-check for the compiled kernel, not just a fallback.
    """
    if H.n != psi.n:
        raise ValueError("qubit count mismatch")
    if engine not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "numpy" or H.n > 16:
        out = np.zeros(1 << H.n, dtype=np.complex128)
        for c, p in H.items():
            out += c * apply_pauli(p, psi).amplitudes
        return Statevector(H.n, out)
    mv, real = _numba_matvec(H)
    amps = psi.amplitudes
    if real and np.abs(amps.imag).max() == 0.0:
        return Statevector(H.n, mv(amps.real).astype(np.complex128))
    if real:
        return Statevector(H.n, mv(amps.real) + 1j * mv(amps.imag))
    return Statevector(H.n, mv(amps))


def apply_clifford_to_state(factors, psi: Statevector,
                            inverse: bool = False) -> Statevector:
    """C|psi> for C = factors[0]*factors[1]*...; inverse applies C^dag.

    Each factor (sigma+tau)/sqrt(2) is Hermitian, so the inverse is the same
    factors multiplied in reversed order.
    """
    seq = list(factors) if inverse else list(reversed(list(factors)))
    amps = psi
    for f in seq:
        a = apply_pauli(f.sigma, amps).amplitudes + \
            apply_pauli(f.tau, amps).amplitudes
        amps = Statevector(psi.n, a / np.sqrt(2.0))
    return amps


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: Statevector
    residual: float
    degenerate: bool
    gap: float | None
    method: str
    seed: int | None

    def __iter__(self):
        return iter((self.energy, self.state))


def ground_state(H: PauliSum, tol: float = 1e-9) -> GroundState:
    """Minimum eigenpair; dense for n <= 8, else seeded restarted Lanczos.

    The residual ||H psi - E psi|| is verified against tol*max(1, |E|);
    degeneracy is flagged when the next Ritz value sits within 1e-8.
    """
    n = H.n
    N = 1 << n
    if n <= _DENSE_MAX:
        w, v = np.linalg.eigh(H.to_matrix())
        energy = float(w[0])
        vec = v[:, 0]
        gap = float(w[1] - w[0]) if N > 1 else None
        psi = Statevector(n, vec)
        res = float(np.linalg.norm(
            apply_pauli_sum(H, psi, engine="numpy").amplitudes
            - energy * psi.amplitudes))
        if res > tol * max(1.0, abs(energy)):
            raise ConvergenceError(
                f"residual {res:.3e} exceeds contract at energy "
                f"{energy:.9f}", residual=res)
        return GroundState(energy, psi, res, gap is not None and gap < 1e-8,
                           gap, "dense", None)
    mv, real = _numba_matvec(H)
    dtype = np.float64 if real else np.complex128
    op = spla.LinearOperator((N, N), matvec=mv, dtype=dtype)
    rng = np.random.default_rng(_GROUND_SEED)
    v0 = rng.standard_normal(N)
    if not real:
        v0 = v0 + 1j * rng.standard_normal(N)
    try:
        vals, vecs = spla.eigsh(op, k=2, which="SA", v0=v0.astype(dtype),
                                maxiter=100 * N)
    except spla.ArpackNoConvergence as e:
        raise ConvergenceError(f"Lanczos did not converge: {e}") from e
    energy = float(vals[0])
    vec = vecs[:, 0]
    vec = vec / np.linalg.norm(vec)
    res = float(np.linalg.norm(mv(vec) - energy * vec))
    if res > tol * max(1.0, abs(energy)):
        raise ConvergenceError(
            f"residual {res:.3e} exceeds contract at energy {energy:.9f}",
            residual=res)
    gap = float(vals[1] - vals[0])
    return GroundState(energy, Statevector(n, vec), res, gap < 1e-8, gap,
                       "lanczos", _GROUND_SEED)


def operator_norm(H: PauliSum) -> float:
    """Largest |eigenvalue| of the Hermitian sum H."""
    n = H.n
    if len(H) == 0:
        return 0.0
    if n <= 6:
        return float(np.abs(np.linalg.eigvalsh(H.to_matrix())).max())
    mv, real = _numba_matvec(H)
    dtype = np.float64 if real else np.complex128
    N = 1 << n
    op = spla.LinearOperator((N, N), matvec=mv, dtype=dtype)
    rng = np.random.default_rng(_GROUND_SEED)
    v0 = rng.standard_normal(N)
    if not real:
        v0 = v0 + 1j * rng.standard_normal(N)
    try:
        vals = spla.eigsh(op, k=1, which="LM", v0=v0.astype(dtype),
                          maxiter=100 * N, return_eigenvectors=False)
    except spla.ArpackNoConvergence as e:
        raise ConvergenceError(f"norm estimate did not converge: {e}") from e
    return float(abs(vals[0]))


def _subset_matrix(psi: Statevector, subset) -> np.ndarray:
    subset = list(subset)
    n = psi.n
    if len(set(subset)) != len(subset):
        raise ValueError("subset qubits must be distinct")
    if any(not 0 <= q < n for q in subset):
        raise ValueError("subset qubit out of range")
    rest = [q for q in range(n) if q not in subset]
    T = psi.amplitudes.reshape([2] * n)
    return np.transpose(T, subset + rest).reshape(1 << len(subset), -1)


def reduced_density(psi: Statevector, subset) -> np.ndarray:
    """rho_A by tracing out the complement of ``subset``."""
    if len(list(subset)) > 12:
        raise ValueError("reduced density limited to 12 qubits")
    m = _subset_matrix(psi, subset)
    return m @ m.conj().T


def _entropy_of_singulars(s: np.ndarray) -> float:
    lam = s * s
    lam = lam[lam > _EIG_CLAMP]
    return float(-(lam * np.log(lam)).sum()) if lam.size else 0.0


def entanglement_entropy(psi: Statevector, subset) -> float:
    """Von Neumann entropy of rho_subset in nats, via Schmidt values."""
    s = np.linalg.svd(_subset_matrix(psi, subset), compute_uv=False)
    return _entropy_of_singulars(s)


def entropy_profile(psi: Statevector) -> list[float]:
    """S for contiguous cuts {0..k-1} vs rest, k = 1..n-1, in qubit order."""
    out = []
    for k in range(1, psi.n):
        m = psi.amplitudes.reshape(1 << k, -1)
        out.append(_entropy_of_singulars(
            np.linalg.svd(m, compute_uv=False)))
    return out


def mutual_information(psi: Statevector) -> np.ndarray:
    """I(i,j) = S_i + S_j - S_ij; symmetric with zero diagonal."""
    n = psi.n
    single = [entanglement_entropy(psi, [i]) for i in range(n)]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sij = entanglement_entropy(psi, [i, j])
            out[i, j] = out[j, i] = single[i] + single[j] - sij
    return out


def permute_qubits(x, perm):
    """Relabel qubits: old qubit q becomes perm[q].  Sums and states."""
    if not isinstance(x, (PauliSum, Statevector)):
        raise TypeError("permute_qubits expects a PauliSum or Statevector")
    perm = list(perm)
    n = x.n
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a bijection on qubit indices")
    if isinstance(x, PauliSum):
        out = PauliSum(n, metadata=dict(x.metadata))
        for c, p in x.items():
            nx = nz = 0
            for q in range(n):
                nx |= ((p.x >> q) & 1) << perm[q]
                nz |= ((p.z >> q) & 1) << perm[q]
            out.add_term(c, PauliString(n, nx, nz, p.phase))
        return out
    if isinstance(x, Statevector):
        inv = [0] * n
        for q, p in enumerate(perm):
            inv[p] = q
        T = x.amplitudes.reshape([2] * n)
        return Statevector(n, np.transpose(T, inv).reshape(-1))
    raise TypeError("permute_qubits expects a PauliSum or Statevector")
