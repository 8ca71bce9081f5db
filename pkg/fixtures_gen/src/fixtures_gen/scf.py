"""Restricted Hartree-Fock, orbital canonicalization, active-space fold."""

from dataclasses import dataclass

import numpy as np

from . import integrals
from .basis import CHARGES, build_basis


class GenerationError(RuntimeError):
    pass


@dataclass
class ScfResult:
    energy: float          # total RHF energy, nuclear repulsion included
    e_nuc: float
    mo_coeff: np.ndarray   # AO x MO
    mo_energy: np.ndarray
    n_occ: int
    h_ao: np.ndarray
    eri_ao: np.ndarray
    overlap: np.ndarray
    aos: list

    def density(self):
        occ = self.mo_coeff[:, :self.n_occ]
        return 2.0 * occ @ occ.T


def _fock(h, eri_ao, dm):
    j = np.einsum("pqrs,rs->pq", eri_ao, dm)
    k = np.einsum("prqs,rs->pq", eri_ao, dm)
    return h + j - 0.5 * k


def rhf(atoms_bohr, basis_name, conv=1e-10, err_tol=1e-11, max_iter=200,
        dm0=None):
    """Converge RHF for atoms_bohr = [(element, xyz_bohr), ...].

    dm0 seeds the density; without it the core-Hamiltonian guess is
    used, which can land on an excited SCF branch for stretched bonds.
    err_tol gates the DIIS residual norm: a residual r mixes orbitals
    separated by gap d at amplitude ~r/d, so a loose gate leaks parity
    contamination into the MO integrals above the term emission floor.
    """
    aos = build_basis(atoms_bohr, basis_name)
    charges = [(CHARGES[el], np.asarray(xyz, dtype=float))
               for el, xyz in atoms_bohr]
    n_elec = sum(z for z, _ in charges)
    if n_elec % 2:
        raise GenerationError("open shells unsupported")
    n_occ = n_elec // 2

    S = integrals.overlap(aos)
    h = integrals.kinetic(aos) + integrals.nuclear(aos, charges)
    eri_ao = integrals.eri(aos)
    e_nuc = integrals.nuclear_repulsion(charges)

    sval, svec = np.linalg.eigh(S)
    if sval.min() < 1e-8:
        raise GenerationError("near-singular overlap")
    X = svec @ np.diag(sval**-0.5) @ svec.T

    def solve(f):
        fo = X.T @ f @ X
        eps, co = np.linalg.eigh(fo)
        c = X @ co
        occ = c[:, :n_occ]
        return eps, c, 2.0 * occ @ occ.T

    if dm0 is None:
        eps, c, dm = solve(h)
    else:
        dm = dm0
    e_old = 0.0
    errs, focks = [], []
    for it in range(max_iter):
        f = _fock(h, eri_ao, dm)
        err = X.T @ (f @ dm @ S - S @ dm @ f) @ X
        errs.append(err.ravel())
        focks.append(f)
        if len(errs) > 8:
            errs.pop(0)
            focks.pop(0)
        if len(errs) > 1:
            m = len(errs)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for a in range(m):
                for b in range(m):
                    B[a, b] = errs[a] @ errs[b]
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, focks))
            except np.linalg.LinAlgError:
                pass
        eps, c, dm = solve(f)
        e_el = 0.5 * np.einsum("pq,qp->", dm, h + _fock(h, eri_ao, dm))
        if abs(e_el - e_old) < conv and np.linalg.norm(errs[-1]) < err_tol:
            return ScfResult(e_el + e_nuc, e_nuc, c, eps, n_occ,
                             h, eri_ao, S, aos)
        e_old = e_el
    raise GenerationError(f"SCF not converged in {max_iter} iterations")


# distinct weights per axis keep the block diagonalization nondegenerate
_AXIS_WEIGHTS = (1.0, 0.9, 0.81)


def canonicalize(res, adapt=True, degen_tol=1e-6):
    """Resolve degenerate MO blocks against weighted second moments.

    Rotating only within blocks of equal orbital energy keeps the Fock
    matrix diagonal.  With adapt=False the raw eigenvectors are kept and
    only the deterministic sign convention is applied.
    """
    c = res.mo_coeff.copy()
    eps = res.mo_energy
    if adapt:
        q = sum(w * integrals.moment(res.aos, pw)
                for w, pw in zip(_AXIS_WEIGHTS,
                                 ((2, 0, 0), (0, 2, 0), (0, 0, 2))))
        q = 0.5 * (q + q.T)
        start = 0
        for end in range(1, len(eps) + 1):
            if end == len(eps) or eps[end] - eps[end - 1] > degen_tol:
                if end - start > 1:
                    blk = c[:, start:end]
                    qb = blk.T @ q @ blk
                    _, u = np.linalg.eigh(0.5 * (qb + qb.T))
                    c[:, start:end] = blk @ u
                start = end
    for k in range(c.shape[1]):
        lead = np.argmax(np.abs(c[:, k]))
        if c[lead, k] < 0:
            c[:, k] *= -1.0
    return c


def mo_integrals(res, c):
    h1 = c.T @ res.h_ao @ c
    e2 = np.einsum("pqrs,pi,qj,rk,sl->ijkl", res.eri_ao, c, c, c, c,
                   optimize=True)
    return h1, e2


def active_space(h1, e2, n_occ, frozen):
    """Fold frozen (doubly occupied) spatial orbitals into constants.

    Returns (h_eff, eri_active, e_core, active_indices, n_active_electrons).
    """
    frozen = sorted(frozen)
    for f in frozen:
        if f >= n_occ:
            raise GenerationError("frozen orbital not doubly occupied")
    n = h1.shape[0]
    act = [p for p in range(n) if p not in frozen]
    e_core = 0.0
    for c in frozen:
        e_core += 2.0 * h1[c, c]
        for c2 in frozen:
            e_core += 2.0 * e2[c, c, c2, c2] - e2[c, c2, c2, c]
    h_eff = h1[np.ix_(act, act)].copy()
    for a, p in enumerate(act):
        for b, q in enumerate(act):
            for c in frozen:
                h_eff[a, b] += 2.0 * e2[p, q, c, c] - e2[p, c, c, q]
    eri_act = e2[np.ix_(act, act, act, act)].copy()
    n_act_elec = 2 * (n_occ - len(frozen))
    return h_eff, eri_act, e_core, act, n_act_elec
