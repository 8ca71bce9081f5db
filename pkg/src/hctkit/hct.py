"""Hierarchical Clifford transformations from coarse-grained symmetries.

Truncating a Hamiltonian at a threshold eps (dropping terms with |h| < eps)
enlarges its symmetry group.  Sweeping eps from zero upward therefore yields a
nested hierarchy: exact symmetries first, then progressively more approximate
ones.  Each stage contributes Clifford factors exposing its new symmetry
qubits; the ordered factor product block-diagonalizes every truncated level
exactly and the full Hamiltonian approximately, with the leftover quantified
by coefficient bounds and commutator norms.

A stage generator found at threshold eps need not commute with the sigma
partners assigned at finer levels, so each one is multiplied by earlier
generators until it does (GF(2) pivot elimination in the symplectic picture).
The reverse direction is weaker: an earlier generator may keep support on a
qubit only assigned later, and clearing that support would multiply it by an
operator that is not a symmetry of the earlier (larger) truncation.  Only the
forward direction is needed for the factor product to map each generator to
its sigma and preserve the level-by-level block structure, so only the
forward direction is enforced and validated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite

from .gf2 import gf2_kernel_basis, gf2_rank
from .pauli import PauliString, PauliSum
from .symmetry import (CliffordFactor, SymmetryBasis, conjugate_sum,
                       find_symmetries, isotropic_generators)

__all__ = [
    "ThresholdSchedule",
    "HctStage",
    "HctTransform",
    "ConsistencyError",
    "fine_grid_schedule",
    "extend_symmetries",
    "build_hct",
    "conjugate_by_hct",
    "scan_symmetries",
    "violation_bound",
    "violation_norm",
]

_EXACT_NORM_MAX_QUBITS = 12


class ConsistencyError(ValueError):
    """A stage generator still anticommutes with a prior sigma after elimination."""

    def __init__(self, threshold: float, generator: PauliString):
        self.threshold = threshold
        self.generator = generator
        super().__init__(
            f"generator {generator} at threshold {threshold:g} cannot be "
            f"reconciled with previously assigned sigmas")


@dataclass(frozen=True)
class ThresholdSchedule:
    """Strictly decreasing positive thresholds; a final implicit level at 0."""

    thresholds: tuple

    def __init__(self, thresholds):
        object.__setattr__(self, "thresholds", tuple(float(e) for e in thresholds))
        for e in self.thresholds:
            if not isfinite(e) or e <= 0:
                raise ValueError("thresholds must be finite and positive")
        for a, b in zip(self.thresholds, self.thresholds[1:]):
            if a <= b:
                raise ValueError("thresholds must be strictly decreasing")

    def __len__(self):
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    def ascending(self):
        return tuple(reversed(self.thresholds))


@dataclass
class HctStage:
    """Symmetries first appearing at one truncation threshold.

    The exact stage has threshold 0.0.  A plateau (no new symmetries) is an
    empty stage, kept so the processed schedule stays visible.  ``skipped``
    records bare generators of this level that could not be reconciled with
    the cumulative commuting family (they anticommute with a prior generator
    even after elimination); they contribute to bare symmetry counts but not
    to the transform.
    """

    threshold: float
    generators: list = field(default_factory=list)
    qubits: list = field(default_factory=list)
    sigmas: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.generators)

    @property
    def factors(self) -> list:
        return [CliffordFactor(s, g) for s, g in zip(self.sigmas, self.generators)]


@dataclass
class HctTransform:
    """Ordered stages of a hierarchical Clifford transformation.

    ``stages[0]`` is the exact stage; later stages carry strictly increasing
    positive thresholds.  The represented Clifford is the ordered product of
    all stage factors, exact stage first.
    """

    n: int
    stages: list = field(default_factory=list)

    @property
    def n_total_syms(self) -> int:
        return sum(st.count for st in self.stages)

    def all_factors(self) -> list:
        return [f for st in self.stages for f in st.factors]

    def entries(self):
        """Yield (stage_index, threshold, qubit, generator, sigma) in order."""
        for i, st in enumerate(self.stages):
            for q, g, s in zip(st.qubits, st.generators, st.sigmas):
                yield i, st.threshold, q, g, s

    def cumulative_qubits(self, eps: float | None = None) -> list[int]:
        """Symmetry qubits of all stages with threshold <= eps (all if None).

        Terms with |h| >= eps commute with exactly these stages' generators,
        so the conjugated truncation is block-diagonal on these qubits.
        """
        out = []
        for st in self.stages:
            if eps is None or st.threshold <= eps:
                out.extend(st.qubits)
        return out

    def qubit_order(self) -> list[int]:
        """Exact qubits, then approximate ones by discovery, then the rest."""
        sym = self.cumulative_qubits()
        rest = [q for q in range(self.n) if q not in set(sym)]
        return sym + rest

    def validate(self) -> None:
        """Assert the ordering pattern that makes the factor product work."""
        seen: list[tuple[PauliString, PauliString]] = []
        qubits: list[int] = []
        packed: list[int] = []
        for _, _, q, g, s in self.entries():
            assert not g.is_identity()
            assert not s.commutes(g), "generator must anticommute with its sigma"
            for ps, pg in seen:
                assert g.commutes(ps), "generator must commute with prior sigmas"
                assert g.commutes(pg), "generators must mutually commute"
            seen.append((s, g))
            qubits.append(q)
            packed.append(g.z | (g.x << self.n))
        assert len(set(qubits)) == len(qubits), "symmetry qubits must be distinct"
        assert gf2_rank(packed, 2 * self.n) == len(packed), \
            "generators must be independent"

    def full_pattern_holds(self) -> bool:
        """True when earlier generators also commute with later sigmas.

        Informational: this direction is not required and not constructible
        in general (see module docstring).
        """
        entries = list(self.entries())
        for a, (_, _, _, g, _) in enumerate(entries):
            for b in range(a + 1, len(entries)):
                if not entries[b][4].commutes(g):
                    return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n,
            "stages": [{
                "threshold": st.threshold,
                "generators": [g.label() for g in st.generators],
                "qubits": list(st.qubits),
                "sigmas": [s.label() for s in st.sigmas],
            } for st in self.stages],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HctTransform":
        n = data["n_qubits"]
        stages = []
        for st in data["stages"]:
            gens = [PauliString.from_label(l) for l in st["generators"]]
            qubits = list(st["qubits"])
            if "sigmas" in st:
                sigmas = [PauliString.from_label(l) for l in st["sigmas"]]
            else:
                sigmas = [PauliString.from_single(n, q, "X") for q in qubits]
            stages.append(HctStage(float(st["threshold"]), gens, qubits, sigmas))
        out = cls(n, stages)
        out.validate()
        return out


def fine_grid_schedule(H: PauliSum, eps0: float) -> ThresholdSchedule:
    """Distinct non-identity |h_i| values in (0, eps0], descending.

    The finest schedule that can change any truncation: every threshold
    between two consecutive values yields the same truncated Hamiltonian.
    """
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    return ThresholdSchedule(
        v for v in reversed(H.abs_coeff_values()) if v <= eps0)


def _as_triples(prior):
    if isinstance(prior, SymmetryBasis):
        return list(zip(prior.qubits, prior.generators, prior.sigmas))
    return list(prior)


def _hermitian(n: int, x: int, z: int) -> PauliString:
    return PauliString(n, x, z, (x & z).bit_count() & 3)


def extend_symmetries(H: PauliSum, eps: float, prior) -> HctStage:
    """One hierarchy stage: new symmetries of truncate(H, eps) beyond ``prior``.

    ``prior`` is the cumulative (qubit, generator, sigma) family, lowest level
    first; a SymmetryBasis is accepted too.  Bare symmetries of the truncation
    are found independently, the ones pivoted on fresh qubits are selected,
    and each is multiplied by earlier generators until it commutes with every
    earlier sigma.  A generator left anticommuting with an earlier generator
    has no such fix (the fixers are not symmetries of the earlier level) and
    is recorded in ``skipped``.
    """
    if eps <= 0:
        raise ValueError("stage threshold must be positive")
    prior = _as_triples(prior)
    bare = find_symmetries(H.truncate(eps))
    prior_qubits = {q for q, _, _ in prior}
    used = set(prior_qubits)
    stage = HctStage(eps)
    kept: list[tuple[int, PauliString, PauliString]] = []
    for g, q, s in zip(bare.generators, bare.qubits, bare.sigmas):
        if q in prior_qubits:
            continue
        t = g
        for _, pg, ps in prior + kept:
            if not t.commutes(ps):
                t = _hermitian(H.n, t.x ^ pg.x, t.z ^ pg.z)
        if any(not t.commutes(ps) for _, _, ps in prior + kept):
            raise ConsistencyError(eps, g)
        if t.is_identity() or any(not t.commutes(pg) for _, pg, _ in prior + kept):
            stage.skipped.append(g)
            continue
        if q in used or t.commutes(s):
            pick = _repick_sigma(t, used, H.n)
            if pick is None:
                stage.skipped.append(g)
                continue
            s, q = pick
        used.add(q)
        kept.append((q, t, s))
    stage.qubits = [q for q, _, _ in kept]
    stage.generators = [t for _, t, _ in kept]
    stage.sigmas = [s for _, _, s in kept]
    return stage


def _repick_sigma(t: PauliString, used, n: int):
    for q in range(n):
        if q in used:
            continue
        for kind in ("X", "Z", "Y"):
            s = PauliString.from_single(n, q, kind)
            if not s.commutes(t):
                return s, q
    return None


def _sorted_rows(H: PauliSum):
    n = H.n
    return sorted(((abs(c), p.x | (p.z << n)) for c, p in H.items()
                   if not p.is_identity()), key=lambda t: -t[0])


def _sweep_pivots(rows, thresholds):
    """Walk thresholds descending, extending a GF(2) pivot set in place.

    Yields (eps, rank_changed, pivot_rows) per threshold.  Rows only
    accumulate as eps decreases, so the pivot set extends monotonically; the
    pivot rows span exactly the term rows of the truncation at eps.
    """
    pivots: list[tuple[int, int]] = []  # (pivot col, row), ascending by col
    idx = 0
    for eps in sorted(set(thresholds), reverse=True):
        changed = False
        while idx < len(rows) and rows[idx][0] >= eps:
            v = rows[idx][1]
            idx += 1
            for pc, pr in pivots:
                if (v >> pc) & 1:
                    v ^= pr
            if v:
                pivots.append(((v & -v).bit_length() - 1, v))
                pivots.sort()
                changed = True
        yield eps, changed, pivots


def build_hct(H: PauliSum, schedule) -> HctTransform:
    """Build the transform for a decreasing positive threshold schedule.

    Stage 0 is the exact stage (full H, the tapering transform); the
    remaining thresholds are processed from the smallest upward so each stage
    extends everything below it.  The truncated term rows are nested across
    levels, so a level whose row rank matches the previous processed level
    spans the same rows, has the identical bare basis, and is recorded as an
    empty plateau stage without recomputation; at most 2n levels need work
    regardless of schedule length.
    """
    if not isinstance(schedule, ThresholdSchedule):
        schedule = ThresholdSchedule(schedule)
    ranks = {eps: len(piv) for eps, _, piv in
             _sweep_pivots(_sorted_rows(H), list(schedule) + [0.0])}
    exact = find_symmetries(H)
    stage0 = HctStage(0.0, list(exact.generators), list(exact.qubits),
                      list(exact.sigmas))
    transform = HctTransform(H.n, [stage0])
    prior = list(zip(stage0.qubits, stage0.generators, stage0.sigmas))
    prev_rank = ranks[0.0]
    for eps in schedule.ascending():
        if ranks[eps] == prev_rank:
            stage = HctStage(eps)
        else:
            stage = extend_symmetries(H, eps, prior)
            prior.extend(zip(stage.qubits, stage.generators, stage.sigmas))
        prev_rank = ranks[eps]
        transform.stages.append(stage)
    transform.validate()
    return transform


def conjugate_by_hct(H: PauliSum, transform: HctTransform) -> PauliSum:
    return conjugate_sum(H, transform.all_factors())


def scan_symmetries(H: PauliSum, grid) -> list[tuple[float, int]]:
    """Bare symmetry count of truncate(H, eps) for every eps in ``grid``.

    Returned in the caller's order.  Counts are recomputed only at thresholds
    where the term-row rank changes; in between, the row span and hence the
    symmetry group is unchanged.
    """
    grid = list(grid)
    if any(e <= 0 or not isfinite(e) for e in grid):
        raise ValueError("grid thresholds must be finite and positive")
    n = H.n
    results: dict[float, int] = {}
    count = None
    for eps, changed, pivots in _sweep_pivots(_sorted_rows(H), grid):
        if changed or count is None:
            kernel = gf2_kernel_basis([r for _, r in pivots], 2 * n)
            count = len(isotropic_generators(kernel, n))
        results[eps] = count
    return [(e, results[e]) for e in grid]


def violation_bound(H: PauliSum, eps: float) -> float:
    """2 * sum of |h| over terms dropped by truncate(H, eps)."""
    return 2.0 * sum(abs(c) for c in H.dropped_by(eps))


def violation_norm(Ht: PauliSum, sigma: PauliString, exact: bool = False) -> float:
    """Size of [sigma, Ht] for a sigma exposed in the conjugated Hamiltonian.

    With A the sub-sum of terms anticommuting with sigma, the commutator is
    2*sigma*A, so its operator norm is 2||A||.  The default returns the
    triangle-inequality bound 2*sum|h| over A's terms; ``exact`` computes
    2||A|| itself (small systems only).
    """
    anti = PauliSum(Ht.n)
    for c, p in Ht.items():
        if not p.commutes(sigma):
            anti.add_term(c, p)
    if not exact:
        return 2.0 * sum(abs(c) for c, _ in anti.items())
    if Ht.n > _EXACT_NORM_MAX_QUBITS:
        raise ValueError(
            f"exact norm limited to {_EXACT_NORM_MAX_QUBITS} qubits")
    if len(anti) == 0:
        return 0.0
    from .solver import operator_norm
    return 2.0 * operator_norm(anti)
