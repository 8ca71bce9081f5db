import json

import numpy as np
import pytest

from oracle_helpers import load_fixture, zz_expectation

from fixtures_gen.generate import generate, generate_pool
from fixtures_gen.specs import FIXTURES, POOLS

REGEN = ["h2_sto3g_r0.735", "lih_sto3g_r1.59", "n2_sto3g_r0.9",
         "n2_sto3g_r1.2"]


@pytest.fixture(scope="module")
def regenerated(tmp_path_factory):
    out = tmp_path_factory.mktemp("regen")
    docs = {}
    by_name = {s.name: s for s in FIXTURES}
    for name in REGEN:
        docs[name] = generate(by_name[name], out)
    return docs


@pytest.mark.parametrize("name", REGEN)
def test_regeneration_matches_committed_terms(name, regenerated, fixdir):
    fresh = regenerated[name]
    committed = load_fixture(name)
    assert fresh["n_qubits"] == committed["n_qubits"]
    got = {t["pauli"]: t["coeff"] for t in fresh["terms"]}
    want = {t["pauli"]: t["coeff"] for t in committed["terms"]}
    assert set(got) == set(want)
    for lab, c in want.items():
        assert abs(got[lab] - c) < 1e-8, lab


@pytest.mark.parametrize("name", REGEN)
def test_regeneration_matches_committed_metadata(name, regenerated):
    fresh = regenerated[name]["metadata"]
    committed = load_fixture(name)["metadata"]
    for key in ("hf_energy", "fci_energy", "nuclear_repulsion",
                "core_energy"):
        assert abs(fresh[key] - committed[key]) < 1e-8
    for key in ("mapping", "hf_bitstring", "n_spin_orbitals",
                "n_active_electrons"):
        assert fresh[key] == committed[key]


@pytest.mark.parametrize("name,energy", [
    ("n2_sto3g_r0.9", -107.292712),
    ("n2_sto3g_r1.2", -107.677085),
])
def test_n2_reference_energies(name, energy, regenerated):
    """Freshly generated exact energies against the reference curve."""
    assert abs(regenerated[name]["metadata"]["fci_energy"] - energy) < 1e-5
    assert abs(load_fixture(name)["metadata"]["fci_energy"] - energy) < 1e-5


@pytest.mark.parametrize("name", ["pool_h2_sto3g", "pool_lih_sto3g"])
def test_pool_regeneration_matches_committed(name, tmp_path, fixdir):
    spec = [p for p in POOLS if p.name == name][0]
    fresh = generate_pool(spec, tmp_path)
    committed = load_fixture(name)
    assert fresh["n_qubits"] == committed["n_qubits"]
    assert len(fresh["elements"]) == len(committed["elements"])
    for el_new, el_old in zip(fresh["elements"], committed["elements"]):
        assert el_new["label"] == el_old["label"]
        got = {t["pauli"]: t["coeff"] for t in el_new["terms"]}
        want = {t["pauli"]: t["coeff"] for t in el_old["terms"]}
        assert set(got) == set(want)
        for lab, c in want.items():
            assert abs(got[lab] - c) < 1e-8


ALL_NAMES = [s.name for s in FIXTURES]


@pytest.mark.parametrize("name", ALL_NAMES)
def test_committed_hf_expectation_closes(name, fixdir):
    """Diagonal expectation of the emitted terms must equal hf_energy.

    This revalidates the whole emission chain against the mean-field
    energy recorded at generation time, without rerunning it.
    """
    doc = load_fixture(name)
    meta = doc["metadata"]
    bits = meta["hf_bitstring"]
    assert len(bits) == doc["n_qubits"]
    val = zz_expectation(doc["terms"], bits)
    # dropped sub-floor terms shift the diagonal by at most their count
    assert abs(val - meta["hf_energy"]) < 5e-7


@pytest.mark.parametrize("name", ALL_NAMES)
def test_committed_fixture_shape(name, fixdir):
    doc = load_fixture(name)
    n = doc["n_qubits"]
    meta = doc["metadata"]
    terms = doc["terms"]
    assert terms[0]["pauli"] == "I" * n
    mags = [abs(t["coeff"]) for t in terms[1:]]
    assert mags == sorted(mags, reverse=True)
    assert all(len(t["pauli"]) == n for t in terms)
    assert all(m > meta["coeff_floor"] for m in mags)
    assert meta["fci_energy"] <= meta["hf_energy"] + 1e-10
    if meta["mapping"] == "parity-two-qubit-reduced":
        assert meta["n_spin_orbitals"] - 2 == n
        assert set(meta["parity_sectors"]) <= {-1, 1}
    else:
        assert meta["mapping"] == "jordan-wigner-interleaved"
        assert meta["n_spin_orbitals"] == n


def test_n2_irrep_metadata_is_permutation(fixdir):
    doc = load_fixture("n2_sto3g_r1.2")
    meta = doc["metadata"]
    labels = meta["irrep_labels"]
    perm = meta["irrep_sort_permutation"]
    allowed = {"Ag", "B1u", "B2u", "B3u", "B1g", "B2g", "B3g", "Au"}
    assert set(labels) <= allowed
    assert len(labels) * 2 == doc["n_qubits"]
    assert sorted(perm) == list(range(doc["n_qubits"]))


def test_registry_lists_every_fixture(fixdir):
    reg = json.loads((fixdir / "registry.json").read_text())
    want = {s.name for s in FIXTURES} | {p.name for p in POOLS}
    assert set(reg) == want
    for name, rel in reg.items():
        assert (fixdir / rel).is_file()


def test_lih_parity_sectors_literal(fixdir):
    meta = load_fixture("lih_sto3g_r1.59")["metadata"]
    assert meta["parity_sectors"] == [-1, 1]
    assert meta["hf_bitstring"] == "11110000"
    assert meta["n_frozen_spatial"] == 1
