"""Statevector VQE with hierarchy-aware warm starts.

Two ansatz families over a transformed Hamiltonian C^dag H C:

- hardware-efficient: RotY on every current symmetry qubit, and on the free
  qubits d repetitions of [RotY layer, all-to-all controlled-RotX, RotY
  layer].  When the hierarchy releases qubits the circuit is extended, new
  gates evaluate to identity at parameter zero, and the optimized state
  carries over exactly.
- operator pool: RotY sector controls on the stage-0 symmetry qubits plus
  exponentials of conjugated pool elements, activated per stage when every
  term commutes with every remaining stage sigma.

Stages run coarsest truncation first; the final stage always solves the
untruncated sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .hct import HctTransform, ThresholdSchedule, build_hct, conjugate_by_hct
from .pauli import PauliSum
from .solver import Statevector, apply_clifford_to_state, apply_pauli_sum, \
    basis_state, _numba_matvec
from .symmetry import conjugate_sum

__all__ = [
    "AnsatzCircuit",
    "EmbeddingError",
    "Gate",
    "OptimizeResult",
    "PoolAnsatz",
    "VqeRun",
    "VqeStage",
    "apply_exponential",
    "build_hwe_ansatz",
    "build_pool_ansatz",
    "embed_parameters",
    "energy",
    "extend_hwe_ansatz",
    "filter_pool",
    "hct_vqe",
    "optimize",
]

_TAYLOR_TOL = 1e-13
_TAYLOR_MAX = 200


class EmbeddingError(ValueError):
    """Warm-start target circuit does not extend the source circuit."""


# -- gate-level state simulation ------------------------------------------


def _apply_ry(amps: np.ndarray, n: int, q: int, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    T = np.moveaxis(amps.reshape([2] * n), q, 0)
    out = np.stack([c * T[0] - s * T[1], s * T[0] + c * T[1]])
    return np.moveaxis(out, 0, q).reshape(-1)


def _apply_crx(amps: np.ndarray, n: int, ctl: int, tgt: int,
               theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    T = np.moveaxis(amps.reshape([2] * n), (ctl, tgt), (0, 1))
    b0, b1 = T[1, 0], T[1, 1]
    hit = np.stack([c * b0 - 1j * s * b1, -1j * s * b0 + c * b1])
    out = np.stack([T[0], hit])
    return np.moveaxis(out, (0, 1), (ctl, tgt)).reshape(-1)


@dataclass(frozen=True)
class Gate:
    """One parameterized gate; ``tag`` is the stage that introduced it."""

    kind: str          # "ry" or "crx"
    qubits: tuple      # (q,) or (control, target)
    tag: int

    def __post_init__(self):
        if self.kind not in ("ry", "crx"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != (1 if self.kind == "ry" else 2):
            raise ValueError("gate arity mismatch")


def _prelude_state(n, bits, factors) -> Statevector:
    psi = basis_state(n, bits)
    if factors:
        # the fixed preparation is C^dag applied to the reference bitstring
        psi = apply_clifford_to_state(factors, psi, inverse=True)
    return psi


@dataclass(frozen=True)
class AnsatzCircuit:
    """Hardware-efficient circuit over a fixed prelude state.

    One parameter per gate, in gate order.  Current-stage symmetry qubits
    appear only in single RotY gates, never in an entangler.
    """

    n: int
    prelude_bits: str
    prelude_factors: tuple
    sym_qubits: tuple
    gates: tuple

    @property
    def n_parameters(self) -> int:
        return len(self.gates)

    def prelude_state(self) -> Statevector:
        cached = self.__dict__.get("_prelude")
        if cached is None:
            cached = _prelude_state(self.n, self.prelude_bits,
                                    list(self.prelude_factors))
            self.__dict__["_prelude"] = cached
        return cached

    def state(self, params) -> Statevector:
        params = np.asarray(params, dtype=float)
        if params.shape != (len(self.gates),):
            raise ValueError("parameter count mismatch")
        amps = np.array(self.prelude_state().amplitudes)
        for g, th in zip(self.gates, params):
            if th == 0.0:
                continue
            if g.kind == "ry":
                amps = _apply_ry(amps, self.n, g.qubits[0], th)
            else:
                amps = _apply_crx(amps, self.n, g.qubits[0], g.qubits[1], th)
        return Statevector(self.n, amps)


def build_hwe_ansatz(n: int, sym_qubits, depth: int,
                     prelude_bits: str | None = None,
                     prelude_factors=()) -> AnsatzCircuit:
    """Stage-0 circuit: RotY per symmetry qubit; on the free qubits, depth
    repetitions of RotY layer, all-to-all controlled-RotX, RotY layer."""
    sym = list(sym_qubits)
    if len(set(sym)) != len(sym) or any(not 0 <= q < n for q in sym):
        raise ValueError("invalid symmetry qubit set")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    free = [q for q in range(n) if q not in set(sym)]
    gates = [Gate("ry", (q,), 0) for q in sorted(sym)]
    for _ in range(depth):
        gates += [Gate("ry", (q,), 0) for q in free]
        gates += [Gate("crx", (a, b), 0)
                  for i, a in enumerate(free) for b in free[i + 1:]]
        gates += [Gate("ry", (q,), 0) for q in free]
    return AnsatzCircuit(n, prelude_bits if prelude_bits is not None
                         else "0" * n, tuple(prelude_factors), tuple(sym),
                         tuple(gates))


def extend_hwe_ansatz(prev: AnsatzCircuit, sym_qubits, depth: int,
                      tag: int | None = None) -> AnsatzCircuit:
    """Release qubits no longer symmetric and wire them into the entangler.

    New gates: per repetition, RotY on each released qubit, controlled-RotX
    between every free pair touching a released qubit, RotY again.  All new
    gates are identity at parameter zero, so the previous state embeds.
    """
    sym = set(sym_qubits)
    if not sym <= set(prev.sym_qubits):
        raise EmbeddingError("stage symmetry qubits must shrink over stages")
    released = [q for q in prev.sym_qubits if q not in sym]
    free = [q for q in range(prev.n) if q not in sym]
    if tag is None:
        tag = max((g.tag for g in prev.gates), default=0) + 1
    gates = list(prev.gates)
    for _ in range(depth):
        gates += [Gate("ry", (q,), tag) for q in released]
        gates += [Gate("crx", (a, b), tag)
                  for i, a in enumerate(free) for b in free[i + 1:]
                  if a in released or b in released]
        gates += [Gate("ry", (q,), tag) for q in released]
    return AnsatzCircuit(prev.n, prev.prelude_bits, prev.prelude_factors,
                         tuple(sorted(sym)), tuple(gates))


def embed_parameters(prev: AnsatzCircuit, prev_params,
                     next_circuit: AnsatzCircuit) -> np.ndarray:
    """Copy optimized values onto the shared prefix, zero the new gates.

    The embedded start reproduces the previous state exactly; this is
    checked by direct simulation and a mismatch raises.
    """
    prev_params = np.asarray(prev_params, dtype=float)
    if prev_params.shape != (prev.n_parameters,):
        raise ValueError("parameter count mismatch")
    if prev.n != next_circuit.n or prev.prelude_bits != next_circuit.prelude_bits \
            or prev.prelude_factors != next_circuit.prelude_factors:
        raise EmbeddingError("circuits prepare different prelude states")
    if next_circuit.gates[:len(prev.gates)] != prev.gates:
        raise EmbeddingError("next circuit does not extend the previous gates")
    out = np.zeros(next_circuit.n_parameters)
    out[:len(prev_params)] = prev_params
    a = prev.state(prev_params).amplitudes
    b = next_circuit.state(out).amplitudes
    if not np.allclose(a, b, atol=1e-12):
        raise EmbeddingError("embedded parameters failed to reproduce state")
    return out


# -- pool ansatz -----------------------------------------------------------


def apply_exponential(theta: float, O: PauliSum, psi: Statevector) -> Statevector:
    """exp(-i theta O / 2)|psi>.

    Mutually commuting terms factor into exact single-Pauli rotations;
    otherwise a scaled Taylor series is applied to the vector until the term
    norm falls below 1e-13.
    """
    if O.n != psi.n:
        raise ValueError("qubit count mismatch")
    terms = list(O.items())
    if theta == 0.0 or not terms:
        return psi
    commuting = all(p.commutes(q) for i, (_, p) in enumerate(terms)
                    for _, q in terms[i + 1:])
    if commuting:
        amps = psi.amplitudes
        for c, p in terms:
            alpha = theta * c / 2.0
            pamp = _single_pauli(p, amps)
            amps = np.cos(alpha) * amps - 1j * np.sin(alpha) * pamp
        return Statevector(psi.n, amps)
    bound = abs(theta) / 2.0 * O.one_norm
    steps = max(1, int(np.ceil(bound)))
    scale = -1j * theta / (2.0 * steps)
    v = psi.amplitudes
    for _ in range(steps):
        acc = v
        term = v
        for k in range(1, _TAYLOR_MAX + 1):
            term = scale / k * apply_pauli_sum(
                O, Statevector(psi.n, term), engine="numpy").amplitudes
            acc = acc + term
            if np.linalg.norm(term) < _TAYLOR_TOL:
                break
        else:
            raise RuntimeError("exponential series did not converge")
        v = acc
    return Statevector(psi.n, v)


def _single_pauli(p, amps):
    from .solver import apply_pauli
    return apply_pauli(p, Statevector(p.n, amps)).amplitudes


def filter_pool(conjugated_pool, sigmas) -> list[int]:
    """Indices of pool elements whose every term commutes with every sigma."""
    out = []
    for k, (_, O) in enumerate(conjugated_pool):
        if all(p.commutes(s) for _, p in O.items() for s in sigmas):
            out.append(k)
    return out


def _apply_rx(amps: np.ndarray, n: int, q: int, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    T = np.moveaxis(amps.reshape([2] * n), q, 0)
    out = np.stack([c * T[0] - 1j * s * T[1], -1j * s * T[0] + c * T[1]])
    return np.moveaxis(out, 0, q).reshape(-1)


def _sigma_site(sigma) -> tuple[int, str]:
    q = sigma.support.bit_length() - 1
    return q, sigma.letter_at(q)


@dataclass(frozen=True)
class PoolAnsatz:
    """Sector rotations plus exponentials of conjugated pool elements.

    The prelude takes the transformed reference state and rotates each
    symmetry qubit from its sigma eigenstate into the computational state,
    so the sector expectation is sin(phi) for an X sigma and the reference
    state itself sits at the angles ``reference_angles``.  Pool elements
    at angle zero are the identity, keeping warm starts exact.
    """

    n: int
    prelude_bits: str
    prelude_factors: tuple
    sigmas: tuple             # single-qubit symmetry partners, stage order
    sector_signs: tuple       # sigma eigenvalue of the reference per qubit
    pool: tuple               # (label, PauliSum) in the original basis
    conjugated_pool: tuple    # (label, C^dag O C)

    @property
    def sym_qubits(self) -> tuple:
        return tuple(_sigma_site(s)[0] for s in self.sigmas)

    @property
    def reference_angles(self) -> np.ndarray:
        """Sector angles at which the state returns to the reference."""
        out = []
        for s, sign in zip(self.sigmas, self.sector_signs):
            letter = _sigma_site(s)[1]
            if letter == "X":
                out.append(sign * np.pi / 2)
            elif letter == "Y":
                out.append(-sign * np.pi / 2)
            else:
                out.append(0.0)
        return np.array(out)

    def prelude_state(self) -> Statevector:
        cached = self.__dict__.get("_prelude")
        if cached is None:
            psi = _prelude_state(self.n, self.prelude_bits,
                                 list(self.prelude_factors))
            amps = np.array(psi.amplitudes)
            for s, sign in zip(self.sigmas, self.sector_signs):
                q, letter = _sigma_site(s)
                if letter == "X":
                    amps = _apply_ry(amps, self.n, q, -sign * np.pi / 2)
                elif letter == "Y":
                    amps = _apply_rx(amps, self.n, q, sign * np.pi / 2)
            cached = Statevector(self.n, amps)
            self.__dict__["_prelude"] = cached
        return cached

    def state(self, phi, theta, active=None) -> Statevector:
        phi = np.asarray(phi, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if phi.shape != (len(self.sigmas),):
            raise ValueError("one sector angle per symmetry qubit required")
        if theta.shape != (len(self.pool),):
            raise ValueError("one pool angle per element required")
        if active is None:
            active = range(len(self.pool))
        amps = np.array(self.prelude_state().amplitudes)
        for s, a in zip(self.sigmas, phi):
            if a != 0.0:
                q, letter = _sigma_site(s)
                if letter == "Y":
                    amps = _apply_rx(amps, self.n, q, a)
                else:
                    amps = _apply_ry(amps, self.n, q, a)
        psi = Statevector(self.n, amps)
        for k in active:
            psi = apply_exponential(theta[k], self.conjugated_pool[k][1], psi)
        return psi


def build_pool_ansatz(n: int, pool, sigmas, prelude_bits: str,
                      prelude_factors=()) -> PoolAnsatz:
    """Conjugate the pool once and pin the reference symmetry sectors.

    The transformed reference state must be an eigenstate of every X- or
    Y-type sigma; its eigenvalues fix the sector rotations.
    """
    factors = list(prelude_factors)
    conj = tuple((lab, conjugate_sum(O, factors) if factors else O)
                 for lab, O in pool)
    ref = _prelude_state(n, prelude_bits, factors)
    signs = []
    for s in sigmas:
        q, letter = _sigma_site(s)
        if letter == "Z":
            signs.append(1.0)
            continue
        val = np.vdot(ref.amplitudes,
                      _single_pauli(s.canonical()[1], ref.amplitudes)).real
        if abs(abs(val) - 1.0) > 1e-9:
            raise ValueError(
                f"reference state has no definite sector for sigma at "
                f"qubit {q} (<sigma> = {val:.6f})")
        signs.append(float(np.sign(val)))
    return PoolAnsatz(n, prelude_bits, tuple(factors), tuple(sigmas),
                      tuple(signs), tuple(pool), conj)


# -- objective and optimization -------------------------------------------


def energy(psi: Statevector, H: PauliSum) -> float:
    """<psi|H|psi>; the imaginary residue must vanish numerically."""
    hpsi = apply_pauli_sum(H, psi)
    val = np.vdot(psi.amplitudes, hpsi.amplitudes)
    if abs(val.imag) >= 1e-10:
        raise ValueError(f"expectation has imaginary residue {val.imag:.2e}")
    return float(val.real)


def _energy_closure(H: PauliSum):
    """Fast expectation using one precompiled matvec per Hamiltonian."""
    mv, real = _numba_matvec(H)
    if real:
        def ev(amps):
            re, im = np.ascontiguousarray(amps.real), \
                np.ascontiguousarray(amps.imag)
            return float(re @ mv(re) + im @ mv(im))
        return ev

    def ev(amps):
        return float(np.vdot(amps, mv(amps)).real)
    return ev


class _BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class OptimizeResult:
    params: np.ndarray
    energy: float
    trajectory: tuple       # objective value at every evaluation, in order
    n_evals: int
    converged: bool
    method: str


_METHOD_ALIASES = {
    "cobyla": "cobyla", "trust-region": "cobyla",
    "lbfgs": "lbfgs", "l-bfgs-b": "lbfgs", "quasi-newton": "lbfgs",
}


def optimize(objective, init_params, method: str = "cobyla",
             budget: int = 10000, tol: float = 1e-8) -> OptimizeResult:
    """Minimize with a hard evaluation budget and best-so-far tracking.

    Two families: derivative-free linear-approximation trust region
    ("cobyla") and quasi-Newton with finite-difference gradients ("lbfgs").
    Every objective evaluation lands in the trajectory; on budget exhaustion
    the best visited point is returned with converged=False.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    name = _METHOD_ALIASES.get(method.lower())
    if name is None:
        raise ValueError(f"unknown method {method!r}")
    x0 = np.atleast_1d(np.asarray(init_params, dtype=float))
    traj: list[float] = []
    best = {"v": np.inf, "x": x0.copy()}

    def f(x):
        if len(traj) >= budget:
            raise _BudgetExhausted
        v = float(objective(np.asarray(x, dtype=float)))
        traj.append(v)
        if v < best["v"]:
            best["v"] = v
            best["x"] = np.array(x, dtype=float)
        return v

    if x0.size == 0:
        v = float(objective(x0))
        return OptimizeResult(x0, v, (v,), 1, True, name)
    exhausted = False
    try:
        # scipy stopping at the budget itself keeps the guard exception
        # (and the f2py noise it triggers) for the rare overshoot only
        if name == "cobyla":
            minimize(f, x0, method="COBYLA", tol=tol,
                     options={"maxiter": budget})
        else:
            minimize(f, x0, method="L-BFGS-B",
                     options={"maxfun": budget, "ftol": tol * 1e-4,
                              "gtol": tol})
    except _BudgetExhausted:
        exhausted = True
    if not traj:
        f(x0)
    return OptimizeResult(best["x"], best["v"], tuple(traj), len(traj),
                          not exhausted and len(traj) < budget, name)


# -- the staged algorithm --------------------------------------------------


@dataclass(frozen=True)
class VqeStage:
    threshold: float
    sym_qubits: tuple
    n_parameters: int
    energy: float
    n_evals: int
    converged: bool


@dataclass(frozen=True)
class VqeRun:
    n: int
    family: str
    seed: int
    thresholds: tuple
    stages: tuple
    trajectory: tuple       # (stage_index, eval_index, energy)
    final_energy: float
    final_params: np.ndarray
    final_state: Statevector        # in the transformed basis
    transform: HctTransform

    def state_in_original_basis(self) -> Statevector:
        return apply_clifford_to_state(self.transform.all_factors(),
                                       self.final_state)


def _stage_sigmas(T: HctTransform, eps: float) -> list:
    return [s for st in T.stages if st.threshold <= eps for s in st.sigmas]


def hct_vqe(H: PauliSum, schedule: ThresholdSchedule, family: str = "hwe",
            depth: int = 1, pool=None, method: str | None = None,
            budget: int = 10000, tol: float = 1e-8, seed: int = 0,
            hf_bits: str | None = None, noise_std: float = 0.1) -> VqeRun:
    """Warm-started VQE down the truncation hierarchy.

    Builds the transformation once, then optimizes the conjugated truncation
    at each threshold coarsest-first, embedding each solution as the next
    start; the final stage solves the full conjugated sum.  Stage-0 starting
    angles are perturbed by seeded normal noise (variance noise_std^2).
    """
    if family not in ("hwe", "pool"):
        raise ValueError(f"unknown ansatz family {family!r}")
    if family == "pool" and not pool:
        raise ValueError("pool family requires a pool of generators")
    bits = hf_bits if hf_bits is not None else H.metadata.get("hf_bitstring")
    if bits is None:
        raise ValueError("reference bitstring required (hf_bits or metadata)")
    if method is None:
        method = "cobyla" if family == "hwe" else "lbfgs"
    T = build_hct(H, schedule)
    Ht = conjugate_by_hct(H, T)
    factors = T.all_factors()
    thresholds = list(schedule.thresholds) + [0.0]
    rng = np.random.default_rng(seed)

    stages: list[VqeStage] = []
    trajectory: list[tuple] = []
    if family == "hwe":
        circ = None
        params = None
        for i, eps in enumerate(thresholds):
            sym = T.cumulative_qubits(eps)
            if circ is None:
                circ = build_hwe_ansatz(H.n, sym, depth, prelude_bits=bits,
                                        prelude_factors=factors)
                params = rng.normal(0.0, noise_std, size=circ.n_parameters)
            elif set(sym) != set(circ.sym_qubits):
                nxt = extend_hwe_ansatz(circ, sym, depth, tag=i)
                params = embed_parameters(circ, params, nxt)
                circ = nxt
            Hm = Ht.truncate(eps) if eps > 0.0 else Ht
            ev = _energy_closure(Hm)
            res = optimize(lambda x: ev(circ.state(x).amplitudes), params,
                           method=method, budget=budget, tol=tol)
            params = res.params
            trajectory += [(i, k, v) for k, v in enumerate(res.trajectory)]
            stages.append(VqeStage(eps, tuple(sym), circ.n_parameters,
                                   res.energy, res.n_evals, res.converged))
        final_state = circ.state(params)
        final_params = np.asarray(params)
    else:
        sigmas0 = _stage_sigmas(T, thresholds[0])
        ansatz = build_pool_ansatz(H.n, pool, sigmas0, bits, factors)
        nphi, npool = len(sigmas0), len(pool)
        phi = ansatz.reference_angles    # start in the reference sector
        theta = np.zeros(npool)
        for i, eps in enumerate(thresholds):
            active = filter_pool(ansatz.conjugated_pool, _stage_sigmas(T, eps))
            Hm = Ht.truncate(eps) if eps > 0.0 else Ht
            ev = _energy_closure(Hm)

            def obj(x, active=active):
                th = theta.copy()
                th[active] = x[nphi:]
                return ev(ansatz.state(x[:nphi], th, active).amplitudes)

            start = np.concatenate([phi, theta[active]])
            if i == 0:
                start = start + rng.normal(0.0, noise_std, size=start.shape)
            res = optimize(obj, start, method=method, budget=budget, tol=tol)
            phi = res.params[:nphi]
            theta[active] = res.params[nphi:]
            trajectory += [(i, k, v) for k, v in enumerate(res.trajectory)]
            stages.append(VqeStage(eps, ansatz.sym_qubits, nphi + len(active),
                                   res.energy, res.n_evals, res.converged))
        active = filter_pool(ansatz.conjugated_pool,
                             _stage_sigmas(T, thresholds[-1]))
        final_state = ansatz.state(phi, theta, active)
        final_params = np.concatenate([phi, theta])
    return VqeRun(H.n, family, seed, tuple(thresholds), tuple(stages),
                  tuple(trajectory), stages[-1].energy, final_params,
                  final_state, T)
