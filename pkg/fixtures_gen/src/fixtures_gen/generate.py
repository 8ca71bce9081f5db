"""Drivers that turn fixture specs into committed JSON documents."""

import argparse
import json
from pathlib import Path

import numpy as np
from scipy.constants import angstrom, physical_constants

from . import fci, mapping, scf
from .specs import FIXTURES, POOLS

ANG_TO_BOHR = angstrom / physical_constants["Bohr radius"][0]
COEFF_FLOOR = 1e-10

_IRREP_ORDER = ["Ag", "B1u", "B3u", "B2g", "B2u", "B3g", "B1g", "Au"]
_IRREP_BY_PARITY = {
    (1, 1, 1): "Ag", (1, 1, -1): "B1u", (-1, 1, 1): "B3u",
    (1, -1, 1): "B2u", (-1, 1, -1): "B2g", (1, -1, -1): "B3g",
    (-1, -1, 1): "B1g", (-1, -1, -1): "Au",
}


def _to_bohr(atoms):
    return [(el, np.asarray(xyz, float) * ANG_TO_BOHR) for el, xyz in atoms]


def _flip_matrix(aos, axis):
    """AO representation of the reflection r_axis -> -r_axis."""
    n = len(aos)
    W = np.zeros((n, n))
    for b, f in enumerate(aos):
        target = f.center.copy()
        target[axis] *= -1.0
        for b2, g in enumerate(aos):
            if (g.lmn == f.lmn and np.allclose(g.center, target, atol=1e-8)
                    and g.alphas.shape == f.alphas.shape
                    and np.allclose(g.alphas, f.alphas)):
                W[b2, b] = (-1.0) ** f.lmn[axis]
                break
        else:
            raise scf.GenerationError("geometry not mirror symmetric")
    return W


def _irrep_metadata(res, c, act):
    """Reflection parities of the active MOs and the irrep sort order."""
    S = res.overlap
    parities = []
    for k in act:
        ps = []
        for axis in range(3):
            W = _flip_matrix(res.aos, axis)
            v = c[:, k] @ S @ (W @ c[:, k])
            if abs(abs(v) - 1.0) > 1e-6:
                raise scf.GenerationError("MO has no definite parity")
            ps.append(1 if v > 0 else -1)
        parities.append(tuple(ps))
    labels = [_IRREP_BY_PARITY[p] for p in parities]
    order = sorted(range(len(act)),
                   key=lambda i: (_IRREP_ORDER.index(labels[i]), i))
    rank = {p: r for r, p in enumerate(order)}
    perm = []
    for p in range(len(act)):
        perm.extend([2 * rank[p], 2 * rank[p] + 1])
    return labels, perm


def generate(spec, outdir):
    """Build one fixture, validate it, and write <name>.json."""
    atoms_bohr = _to_bohr(spec.atoms)
    dm = None
    for step in spec.guess_chain:
        dm = scf.rhf(_to_bohr(step), spec.basis, dm0=dm).density()
    res = scf.rhf(atoms_bohr, spec.basis, dm0=dm)
    c = scf.canonicalize(res, adapt=spec.adapt)
    h1, e2 = scf.mo_integrals(res, c)
    h_eff, eri_act, e_core, act, n_act_el = scf.active_space(
        h1, e2, res.n_occ, spec.frozen)
    e0 = res.e_nuc + e_core
    n_alpha = n_beta = n_act_el // 2
    n_sp = len(act)

    meta = {
        "molecule": spec.molecule,
        "geometry": [[el, [float(v) for v in xyz]] for el, xyz in spec.atoms],
        "geometry_units": "angstrom",
        "basis": spec.basis,
        "n_frozen_spatial": len(spec.frozen),
        "n_active_electrons": n_act_el,
        "nuclear_repulsion": res.e_nuc,
        "core_energy": e_core,
        "hf_energy": res.energy,
        "coeff_floor": COEFF_FLOOR,
    }
    if spec.mapping == "jw":
        terms = mapping.jordan_wigner_terms(h_eff, eri_act, e0)
        n = 2 * n_sp
        bits = mapping.hf_bitstring_jw(n_sp, n_alpha, n_beta)
        meta["mapping"] = "jordan-wigner-interleaved"
    elif spec.mapping == "parity":
        terms, signs, n = mapping.parity_reduced_terms(
            h_eff, eri_act, e0, n_alpha, n_beta)
        bits = mapping.hf_bitstring_parity_reduced(n_sp, n_alpha, n_beta)
        meta["mapping"] = "parity-two-qubit-reduced"
        meta["parity_sectors"] = [int(signs[0]), int(signs[1])]
    else:
        raise scf.GenerationError(f"unknown mapping {spec.mapping!r}")
    meta["n_spin_orbitals"] = 2 * n_sp
    meta["hf_bitstring"] = bits

    # the qubit operator must reproduce the determinant energies exactly
    e_ref = mapping.expectation_bits(terms, bits)
    if abs(e_ref - res.energy) > 1e-8:
        raise scf.GenerationError(
            f"{spec.name}: HF expectation {e_ref:.10f} != {res.energy:.10f}")
    e_fci = fci.fci_ground_energy(h_eff, eri_act, n_alpha, n_beta, e0)
    if e_fci > res.energy + 1e-10:
        raise scf.GenerationError(f"{spec.name}: CI above HF")
    meta["fci_energy"] = e_fci

    if spec.emit_irrep:
        labels, perm = _irrep_metadata(res, c, act)
        meta["irrep_labels"] = labels
        meta["irrep_sort_permutation"] = perm

    label_terms = mapping.to_label_terms(terms, n, floor=COEFF_FLOOR)
    doc = {
        "n_qubits": n,
        "terms": [{"pauli": lab, "coeff": co} for lab, co in label_terms],
        "metadata": meta,
    }
    path = Path(outdir) / f"{spec.name}.json"
    path.write_text(json.dumps(doc, indent=1))
    return doc


def generate_pool(spec, outdir):
    """Build one excitation pool and write <name>.json."""
    elements, n = mapping.uccsd_pool(spec.n_spatial, spec.n_alpha,
                                     spec.n_beta, spec.mapping)
    rows = []
    for label, op in elements:
        terms = mapping.to_label_terms(op, n, floor=COEFF_FLOOR)
        herm = mapping.op_dagger(op)
        for key, v in op.items():
            if abs(herm[key] - v) > 1e-12:
                raise scf.GenerationError(f"pool element {label} not Hermitian")
        rows.append({"label": label,
                     "terms": [{"pauli": p, "coeff": c} for p, c in terms]})
    doc = {
        "n_qubits": n,
        "elements": rows,
        "metadata": {
            "molecule": spec.molecule,
            "mapping": ("jordan-wigner-interleaved" if spec.mapping == "jw"
                        else "parity-two-qubit-reduced"),
            "n_spatial": spec.n_spatial,
            "n_alpha": spec.n_alpha,
            "n_beta": spec.n_beta,
        },
    }
    path = Path(outdir) / f"{spec.name}.json"
    path.write_text(json.dumps(doc, indent=1))
    return doc


def write_registry(outdir, names):
    reg = {name: f"{name}.json" for name in names}
    (Path(outdir) / "registry.json").write_text(json.dumps(reg, indent=1))
    return reg


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="regenerate the committed Hamiltonian fixtures")
    ap.add_argument("--out", default="fixtures", help="output directory")
    ap.add_argument("--only", default="", help="substring filter on names")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for spec in FIXTURES:
        if args.only and args.only not in spec.name:
            continue
        doc = generate(spec, out)
        names.append(spec.name)
        m = doc["metadata"]
        print(f"{spec.name}: n={doc['n_qubits']} terms={len(doc['terms'])} "
              f"hf={m['hf_energy']:.8f} fci={m['fci_energy']:.8f}")
    for spec in POOLS:
        if args.only and args.only not in spec.name:
            continue
        doc = generate_pool(spec, out)
        names.append(spec.name)
        print(f"{spec.name}: n={doc['n_qubits']} "
              f"elements={len(doc['elements'])}")
    if not args.only:
        write_registry(out, names)
        print(f"registry: {len(names)} entries")


if __name__ == "__main__":
    main()
