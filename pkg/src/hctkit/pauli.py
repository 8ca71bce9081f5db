"""Pauli strings and real-coefficient Pauli sums in the binary symplectic picture.

A Pauli operator on n qubits is stored as ``i**phase * X^x * Z^z`` where ``x``
and ``z`` are integer bitmasks (bit ``i`` acts on qubit ``i``) and ``phase`` is
an exponent of ``i`` modulo 4.  Qubit 0 is the leftmost character of a text
label and the most significant bit of a computational basis index, so labels,
bitmasks and dense matrices all agree on orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PauliString", "PauliSum"]

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
}
_SINGLE[(1, 1)] = _SINGLE[(1, 0)] @ _SINGLE[(0, 1)]  # X @ Z = -iY

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}


def _parity(mask: int) -> int:
    return mask.bit_count() & 1


@dataclass(frozen=True, slots=True)
class PauliString:
    """One n-qubit Pauli operator ``i**phase * X^x * Z^z``."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bitmask outside qubit range")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse an IXYZ label; leftmost character acts on qubit 0.

        The result represents the letter operator itself: each Y contributes
        one factor of i to ``phase`` so that ``i**phase * X^x Z^z`` equals the
        literal tensor product of letters.
        """
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _LETTER_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z, (x & z).bit_count() & 3)

    @classmethod
    def from_single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        if not 0 <= qubit < n:
            raise ValueError("qubit index out of range")
        xb, zb = _LETTER_TO_BITS[letter]
        return cls(n, xb << qubit, zb << qubit, (xb & zb) & 3)

    # -- structure ---------------------------------------------------------

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letter_at(self, qubit: int) -> str:
        return _BITS_TO_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def label(self) -> str:
        """IXYZ label; only defined for the canonical Hermitian phase."""
        if self.phase != self.y_count & 3:
            raise ValueError("label requested for a non-canonical phase; "
                             "call canonical() first and keep the sign")
        return "".join(self.letter_at(q) for q in range(self.n))

    # -- algebra -----------------------------------------------------------

    def multiply(self, other: "PauliString") -> "PauliString":
        """Exact operator product, phase included."""
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        # Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
        k = self.phase + other.phase + 2 * _parity(self.z & other.x)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, k & 3)

    def commutes(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return _parity(self.x & other.z) == _parity(self.z & other.x)

    def canonical(self) -> tuple[float, "PauliString"]:
        """Split into ``sign * letter-form string`` with phase == number of Ys.

        Raises if the stored phase makes the operator anti-Hermitian.
        """
        yc = self.y_count & 3
        s = (self.phase - yc) & 3
        if s == 0:
            return 1.0, PauliString(self.n, self.x, self.z, yc)
        if s == 2:
            return -1.0, PauliString(self.n, self.x, self.z, yc)
        raise ValueError("operator is anti-Hermitian; no canonical Hermitian form")

    def to_matrix(self) -> np.ndarray:
        """Dense matrix with qubit 0 as the most significant index bit."""
        out = np.array([[1.0 + 0.0j]])
        for q in range(self.n):
            out = np.kron(out, _SINGLE[((self.x >> q) & 1, (self.z >> q) & 1)])
        return (1j ** self.phase) * out

    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    def __str__(self):
        sign, canon = self.canonical()
        return ("-" if sign < 0 else "") + canon.label()


@dataclass
class PauliSum:
    """Real linear combination of Hermitian Pauli strings on a fixed register.

    Terms are kept in canonical Hermitian form (phase equal to the Y count);
    signs from products fold into the real coefficients.  Insertion order is
    preserved and equal strings combine.
    """

    n: int
    _coeffs: dict[tuple[int, int], float] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_terms(cls, n: int, terms, metadata: dict | None = None) -> "PauliSum":
        s = cls(n, metadata=dict(metadata or {}))
        for coeff, p in terms:
            s.add_term(coeff, p)
        return s

    @classmethod
    def from_label_terms(cls, terms, n: int | None = None) -> "PauliSum":
        terms = list(terms)
        if n is None:
            if not terms:
                raise ValueError("cannot infer qubit count from an empty list")
            n = len(terms[0][1])
        return cls.from_terms(n, [(c, PauliString.from_label(l)) for c, l in terms])

    def add_term(self, coeff: float, p: PauliString) -> None:
        if p.n != self.n:
            raise ValueError("qubit count mismatch")
        sign, canon = p.canonical()
        k = canon.key()
        c = self._coeffs.get(k, 0.0) + sign * coeff
        if c == 0.0:
            self._coeffs.pop(k, None)
        else:
            self._coeffs[k] = c

    # -- views -------------------------------------------------------------

    def items(self):
        """Yield (coeff, PauliString) pairs in insertion order."""
        for (x, z), c in self._coeffs.items():
            yield c, PauliString(self.n, x, z, (x & z).bit_count() & 3)

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return self.items()

    def coeff(self, p: PauliString) -> float:
        sign, canon = p.canonical()
        return sign * self._coeffs.get(canon.key(), 0.0)

    @property
    def one_norm(self) -> float:
        return sum(abs(c) for c in self._coeffs.values())

    @property
    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def identity_coeff(self) -> float:
        return self._coeffs.get((0, 0), 0.0)

    # -- transforms --------------------------------------------------------

    def truncate(self, eps: float) -> "PauliSum":
        """Keep terms with |coeff| >= eps (the identity term always survives)."""
        if eps < 0:
            raise ValueError("threshold must be nonnegative")
        out = PauliSum(self.n, metadata=dict(self.metadata))
        for (x, z), c in self._coeffs.items():
            if abs(c) >= eps or (x == 0 and z == 0):
                out._coeffs[(x, z)] = c
        return out

    def dropped_by(self, eps: float):
        """Coefficients of non-identity terms removed by truncate(eps)."""
        return [c for (x, z), c in self._coeffs.items()
                if abs(c) < eps and not (x == 0 and z == 0)]

    def chop(self, tol: float) -> "PauliSum":
        """Remove terms with |coeff| < tol (identity included)."""
        out = PauliSum(self.n, metadata=dict(self.metadata))
        out._coeffs = {k: c for k, c in self._coeffs.items() if abs(c) >= tol}
        return out

    def scaled(self, factor: float) -> "PauliSum":
        out = PauliSum(self.n, metadata=dict(self.metadata))
        out._coeffs = {k: factor * c for k, c in self._coeffs.items()}
        return out

    def abs_coeff_values(self):
        """Sorted distinct |coeff| over non-identity terms."""
        return sorted({abs(c) for (x, z), c in self._coeffs.items()
                       if not (x == 0 and z == 0)})

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for c, p in self.items():
            out += c * p.to_matrix()
        return out

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n,
            "terms": [{"pauli": p.label(), "coeff": c} for c, p in self.items()],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PauliSum":
        n = data["n_qubits"]
        if not isinstance(n, int) or n <= 0:
            raise ValueError("n_qubits must be a positive integer")
        s = cls(n, metadata=dict(data.get("metadata", {})))
        for t in data["terms"]:
            label = t["pauli"]
            if len(label) != n:
                raise ValueError(f"pauli label {label!r} has wrong length for n={n}")
            s.add_term(float(t["coeff"]), PauliString.from_label(label))
        return s
