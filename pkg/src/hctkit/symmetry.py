"""Z2 Pauli symmetries of a Hamiltonian and the Clifford factors that expose them.

A Pauli P commutes with every term of H iff its symplectic vector lies in the
kernel of the term matrix.  From that kernel we extract a maximal mutually
commuting, independent generating set, assign each generator a symmetry qubit
q(j) carrying a single-qubit partner sigma, and form Clifford factors
C_j = (sigma_j + tau_j)/sqrt(2).  Conjugating H by all factors maps each
tau_j to sigma_j, so eigensectors of the generators become literal qubit
sectors that can be tapered off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gf2 import gf2_kernel_basis, gf2_rref
from .pauli import PauliString, PauliSum

__all__ = [
    "CliffordFactor",
    "SymmetryBasis",
    "find_symmetries",
    "isotropic_generators",
    "conjugate_pauli",
    "conjugate_sum",
    "taper",
]


@dataclass(frozen=True)
class CliffordFactor:
    """Hermitian Clifford unitary (sigma + tau)/sqrt(2) with sigma ⟂ tau."""

    sigma: PauliString
    tau: PauliString

    def __post_init__(self):
        if self.sigma.weight != 1:
            raise ValueError("sigma must be a single-qubit Pauli")
        if self.sigma.commutes(self.tau):
            raise ValueError("sigma and tau must anticommute")


@dataclass
class SymmetryBasis:
    """Independent, mutually commuting symmetry generators with assigned qubits.

    ``qubits[j]`` is the symmetry qubit of ``generators[j]`` and ``sigmas[j]``
    the single-qubit partner living there (X whenever the generator supports
    it, which is always the case for Z-type generators).  ``dropped`` records
    kernel directions for which no valid single-qubit partner exists; they do
    not take part in any transformation.
    """

    n: int
    generators: list = field(default_factory=list)
    qubits: list = field(default_factory=list)
    sigmas: list = field(default_factory=list)
    dropped: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.generators)

    @property
    def factors(self) -> list:
        return [CliffordFactor(s, g) for s, g in zip(self.sigmas, self.generators)]

    def is_z_type(self) -> bool:
        return all(g.x == 0 for g in self.generators)

    def validate(self) -> None:
        """Assert the full anticommutation pattern; cheap, used by tests and callers."""
        assert len(self.generators) == len(self.qubits) == len(self.sigmas)
        assert len(set(self.qubits)) == len(self.qubits), "symmetry qubits collide"
        for j, gj in enumerate(self.generators):
            assert not gj.is_identity()
            for k, gk in enumerate(self.generators):
                if j != k:
                    assert gj.commutes(gk), "generators must mutually commute"
            for k, sk in enumerate(self.sigmas):
                if j == k:
                    assert not sk.commutes(gj), "sigma must anticommute with its tau"
                else:
                    assert sk.commutes(gj), "sigma must commute with other taus"

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n,
            "generators": [g.label() for g in self.generators],
            "qubits": list(self.qubits),
            "sigmas": [s.label() for s in self.sigmas],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SymmetryBasis":
        n = data["n_qubits"]
        return cls(
            n,
            [PauliString.from_label(l) for l in data["generators"]],
            list(data["qubits"]),
            [PauliString.from_label(l) for l in data["sigmas"]],
        )


# -- kernel of the commutation system ---------------------------------------


def _term_rows(H: PauliSum):
    # row r = x | (z << n); unknown w = gz | (gx << n); parity(r & w) = 0
    # encodes the commutation of the term with the candidate generator.
    return [p.x | (p.z << H.n) for _, p in H.items() if not p.is_identity()]


def _sp(u: int, v: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((u & (v >> n)).bit_count() + ((u >> n) & v & mask).bit_count()) & 1


def symmetry_vectors(H: PauliSum):
    """Canonical packed (z | x<<n) vectors of a maximal commuting generator set."""
    return isotropic_generators(gf2_kernel_basis(_term_rows(H), 2 * H.n), H.n)


def isotropic_generators(kernel: list[int], n: int):
    """Maximal mutually commuting independent subset of a commutant kernel.

    The raw kernel of the term system is a symplectic complement and need not
    be mutually commuting (an empty or heavily truncated H commutes with far
    more than 2^n operators).  A symplectic Gram-Schmidt pass splits it into a
    radical plus hyperbolic pairs; keeping the radical and one member per pair
    (favoring pure-Z members) yields a maximal independent commuting family,
    returned canonically (rref, z columns first).
    """
    radical: list[int] = []
    pairs: list[tuple[int, int]] = []
    for v in kernel:
        for a, b in pairs:
            if _sp(v, b, n):
                v ^= a
            if _sp(v, a, n):
                v ^= b
        if v == 0:
            continue
        hit = next((i for i, r in enumerate(radical) if _sp(v, r, n)), None)
        if hit is None:
            radical.append(v)
            continue
        r = radical.pop(hit)
        for i, s in enumerate(radical):
            if _sp(s, v, n):
                radical[i] = s ^ r
        pairs.append((r, v))

    def z_only(vec: int) -> bool:
        return vec >> n == 0

    chosen = list(radical)
    for r, v in pairs:
        # any single nonzero element of span{r, v} extends the commuting
        # family; prefer a pure-Z one when the pair contains it
        chosen.append(next((w for w in (r, v, r ^ v) if z_only(w)), r))
    # z columns sit below the x columns, so this rref maximizes Z-typing and
    # orders generators by pivot
    return gf2_rref(chosen, 2 * n)[0]


def count_symmetries(H: PauliSum) -> int:
    """Number of independent symmetry generators (bare count, no assignment)."""
    return len(symmetry_vectors(H))


# -- qubit / sigma assignment ------------------------------------------------

_SIGMA_TYPES = ("X", "Z", "Y")


def _sigma_ok(kind: str, q: int, vec: int, others, n: int) -> bool:
    gz = vec & ((1 << n) - 1)
    gx = vec >> n
    bit = 1 << q
    if kind == "X":
        if not gz & bit:
            return False
        return all(not ((o & ((1 << n) - 1)) & bit) for o in others)
    if kind == "Z":
        if not gx & bit:
            return False
        return all(not ((o >> n) & bit) for o in others)
    # Y anticommutes with X and Z, commutes with I and Y
    if ((gx ^ gz) >> q) & 1 == 0:
        return False
    return all((((o >> n) ^ o) >> q) & 1 == 0 for o in others)


def _assign(vectors: list[int], n: int):
    qubits: list[int] = []
    sigmas: list[tuple[str, int]] = []
    kept: list[int] = []
    dropped: list[int] = []
    for j, vec in enumerate(vectors):
        others = [v for i, v in enumerate(vectors) if i != j]
        pivot = (vec & -vec).bit_length() - 1
        if pivot < n:
            cand = ("X", pivot)
        else:
            cand = ("Z", pivot - n)
        choice = None
        if cand[1] not in qubits and _sigma_ok(cand[0], cand[1], vec, others, n):
            choice = cand
        else:
            for q in range(n):
                if q in qubits:
                    continue
                for kind in _SIGMA_TYPES:
                    if _sigma_ok(kind, q, vec, others, n):
                        choice = (kind, q)
                        break
                if choice:
                    break
        if choice is None:
            dropped.append(vec)
            continue
        kept.append(vec)
        sigmas.append(choice)
        qubits.append(choice[1])
    return kept, qubits, sigmas, dropped


def _vec_to_pauli(vec: int, n: int) -> PauliString:
    gz = vec & ((1 << n) - 1)
    gx = vec >> n
    return PauliString(n, gx, gz, (gx & gz).bit_count() & 3)


def find_symmetries(H: PauliSum) -> SymmetryBasis:
    """Find symmetry generators of H and assign symmetry qubits and sigmas.

    The generator set is canonical (rref over the z-block first, so Z-type
    forms are preferred and pivots take the lowest qubit index).  An empty H
    yields the n single-qubit Z generators.
    """
    if H.n <= 0:
        raise ValueError("Hamiltonian must act on at least one qubit")
    vectors = symmetry_vectors(H)
    kept, qubits, sigma_specs, dropped = _assign(vectors, H.n)
    basis = SymmetryBasis(
        H.n,
        [_vec_to_pauli(v, H.n) for v in kept],
        qubits,
        [PauliString.from_single(H.n, q, kind) for kind, q in sigma_specs],
        [_vec_to_pauli(v, H.n) for v in dropped],
    )
    basis.validate()
    return basis


# -- conjugation and tapering ------------------------------------------------


def conjugate_pauli(factor: CliffordFactor, p: PauliString) -> tuple[float, PauliString]:
    """Image (sign, P') of P under the Hermitian factor, P' canonical."""
    cs = p.commutes(factor.sigma)
    ct = p.commutes(factor.tau)
    if cs and ct:
        sign, canon = p.canonical()
        return sign, canon
    if not cs and not ct:
        sign, canon = p.canonical()
        return -sign, canon
    prod = p.multiply(factor.sigma).multiply(factor.tau)
    sign, canon = prod.canonical()
    return (sign, canon) if cs else (-sign, canon)


def conjugate_sum(H: PauliSum, factors) -> PauliSum:
    """Conjugate every term by the product C = factors[0] * factors[1] * ...

    Applying the list left to right realizes H -> C^dag H C term by term; each
    image is a signed Pauli, so the sum stays real and the term count never
    grows.
    """
    out = PauliSum(H.n, metadata=dict(H.metadata))
    for c, p in H.items():
        for f in factors:
            s, p = conjugate_pauli(f, p)
            c *= s
        out.add_term(c, p)
    return out


def _compress(mask: int, keep: list[int]) -> int:
    out = 0
    for new, old in enumerate(keep):
        out |= ((mask >> old) & 1) << new
    return out


def taper(H: PauliSum, basis: SymmetryBasis, sector: list[int]) -> PauliSum:
    """Fix the sector of already-exposed symmetry qubits and drop them.

    Every term of H must act as identity or as the sigma letter on each
    symmetry qubit (i.e. H has been conjugated by the basis factors); the
    sigma letter contributes that qubit's sector sign.  Remaining qubits are
    relabeled in their original order.
    """
    qubits = basis.qubits
    if len(qubits) != len(sector) or any(s not in (-1, 1) for s in sector):
        raise ValueError("sector must give +-1 per symmetry qubit")
    if len(set(qubits)) != len(qubits):
        raise ValueError("symmetry qubits must be distinct")
    sign_of = dict(zip(qubits, sector))
    letter_of = {q: s.letter_at(q) for q, s in zip(qubits, basis.sigmas)}
    keep = [q for q in range(H.n) if q not in sign_of]
    out = PauliSum(len(keep), metadata=dict(H.metadata))
    for c, p in H.items():
        for q in qubits:
            letter = p.letter_at(q)
            if letter == letter_of[q]:
                c *= sign_of[q]
            elif letter != "I":
                raise ValueError(
                    f"term acts as {letter} on symmetry qubit {q} (sigma is "
                    f"{letter_of[q]}); conjugate H by the basis factors first")
        x = _compress(p.x, keep)
        z = _compress(p.z, keep)
        out.add_term(c, PauliString(len(keep), x, z, (x & z).bit_count() & 3))
    return out
