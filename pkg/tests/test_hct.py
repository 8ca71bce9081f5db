import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hctkit.hct import (ConsistencyError, HctTransform, ThresholdSchedule,
                        build_hct, conjugate_by_hct, extend_symmetries,
                        fine_grid_schedule, scan_symmetries, violation_bound,
                        violation_norm)
from hctkit.pauli import PauliString, PauliSum
from hctkit.symmetry import count_symmetries, find_symmetries

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0 + 0j, -1.0])
MATS = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


def dense(H):
    out = np.zeros((2 ** H.n, 2 ** H.n), dtype=complex)
    for c, p in H.items():
        sign, canon = p.canonical()
        m = np.array([[1.0 + 0j]])
        for q in range(H.n):
            m = np.kron(m, MATS[canon.letter_at(q)])
        out += c * sign * m
    return out


def opnorm(m):
    return np.linalg.svd(m, compute_uv=False)[0]


# staircase: three coefficient scales with a hand-computed hierarchy.
# exact symmetries {Z0Z1, Z2Z3}; dropping the 0.02 term admits XXXX (whose
# only valid sigma is Z-type); dropping 0.1 and 0.3 terms frees Z2/Z3-like
# directions that anticommute with XXXX and cannot join the family.
def staircase():
    return PauliSum.from_label_terms([
        (1.0, "ZZII"), (1.0, "IZZI"), (1.0, "IIZZ"),
        (0.3, "XXII"), (0.1, "IIXX"), (0.02, "ZIII"),
    ])


def test_fine_grid_schedule_values():
    H = staircase()
    assert fine_grid_schedule(H, 1.0).thresholds == (1.0, 0.3, 0.1, 0.02)
    assert fine_grid_schedule(H, 0.25).thresholds == (0.1, 0.02)
    assert fine_grid_schedule(H, 0.005).thresholds == ()


def test_fine_grid_duplicate_magnitudes_collapse():
    H = PauliSum.from_label_terms([(0.5, "ZZ"), (-0.5, "XX"), (0.2, "ZI")])
    assert fine_grid_schedule(H, 1.0).thresholds == (0.5, 0.2)


def test_fine_grid_requires_positive_eps0():
    with pytest.raises(ValueError):
        fine_grid_schedule(staircase(), 0.0)


@pytest.mark.parametrize("bad", [[0.1, 0.2], [0.2, 0.2], [0.1, 0.0], [-1.0],
                                 [float("nan")], [float("inf")]])
def test_schedule_rejects_invalid(bad):
    with pytest.raises(ValueError):
        ThresholdSchedule(bad)


def test_schedule_accepts_empty_and_orders():
    assert ThresholdSchedule([]).ascending() == ()
    assert ThresholdSchedule([0.5, 0.2]).ascending() == (0.2, 0.5)


def test_scan_hand_counts():
    # 1.5: empty sum, n=4; 1.0: ZZ chain; 0.3: chain+XX01; 0.1: +XX23;
    # 0.02 and below: full H
    H = staircase()
    grid = [1.5, 1.0, 0.3, 0.1, 0.02, 0.01]
    assert scan_symmetries(H, grid) == [
        (1.5, 4), (1.0, 4), (0.3, 3), (0.1, 3), (0.02, 2), (0.01, 2)]


def test_scan_matches_count_symmetries_per_threshold():
    H = staircase()
    grid = [2.0, 0.7, 0.3, 0.15, 0.05, 0.01]
    for eps, n_eps in scan_symmetries(H, grid):
        assert n_eps == count_symmetries(H.truncate(eps))


def test_scan_monotone_and_validates_grid():
    H = staircase()
    counts = [c for _, c in scan_symmetries(H, sorted(
        np.linspace(0.01, 1.5, 37).tolist()))]
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    with pytest.raises(ValueError):
        scan_symmetries(H, [0.5, -0.1])


def test_build_staircase_stage_structure():
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    assert [st.threshold for st in T.stages] == [0.0, 0.02, 0.1, 0.3, 1.0]
    # exact stage
    assert [g.label() for g in T.stages[0].generators] == ["ZZII", "IIZZ"]
    assert T.stages[0].qubits == [0, 2]
    assert [s.label() for s in T.stages[0].sigmas] == ["XIII", "IIXI"]
    # 0.02 keeps every term: plateau
    assert T.stages[1].count == 0 and T.stages[1].skipped == []
    # dropping ZIII admits XXXX; only a Z-type sigma anticommutes with it
    assert [g.label() for g in T.stages[2].generators] == ["XXXX"]
    assert T.stages[2].qubits == [1]
    assert [s.label() for s in T.stages[2].sigmas] == ["IZII"]
    # the freed Z-directions anticommute with XXXX: recorded, not added
    assert T.stages[3].count == 0 and len(T.stages[3].skipped) == 1
    assert T.stages[4].count == 0 and len(T.stages[4].skipped) == 1
    assert T.n_total_syms == 3
    assert T.cumulative_qubits() == [0, 2, 1]
    assert T.cumulative_qubits(0.05) == [0, 2]
    assert T.qubit_order() == [0, 2, 1, 3]


def test_build_spectrum_preserved_dense():
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    ev0 = np.linalg.eigvalsh(dense(H))
    ev1 = np.linalg.eigvalsh(dense(conjugate_by_hct(H, T)))
    assert np.allclose(ev0, ev1, atol=1e-12)


def test_conjugated_truncations_block_diagonal():
    # the truncation at each stage threshold, conjugated by the FULL
    # transform, acts as I or the sigma letter on every symmetry qubit
    # assigned at that threshold or below
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    letter = {q: s.letter_at(q) for _, _, q, _, s in T.entries()}
    for st in T.stages:
        sym = T.cumulative_qubits(st.threshold)
        Ht = conjugate_by_hct(H.truncate(st.threshold) if st.threshold else H, T)
        for _, p in Ht.items():
            for q in sym:
                assert p.letter_at(q) in ("I", letter[q])


def test_exact_sigmas_have_zero_violation():
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    Ht = conjugate_by_hct(H, T)
    for s in T.stages[0].sigmas:
        assert violation_norm(Ht, s) == 0.0


def test_staircase_violation_values_and_chain():
    # only the conjugated 0.02 ZIII term anticommutes with the stage sigma:
    # bound and exact norm both 0.04, equal to the global bound at eps=0.1
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    Ht = conjugate_by_hct(H, T)
    sigma = T.stages[2].sigmas[0]
    assert violation_norm(Ht, sigma) == pytest.approx(0.04)
    assert violation_bound(H, 0.1) == pytest.approx(0.04)
    comm = dense(Ht) @ dense(PauliSum.from_terms(H.n, [(1.0, sigma)])) \
        - dense(PauliSum.from_terms(H.n, [(1.0, sigma)])) @ dense(Ht)
    assert opnorm(comm) == pytest.approx(0.04, abs=1e-12)
    assert violation_norm(Ht, sigma, exact=True) == pytest.approx(0.04)


def test_violation_bound_arithmetic():
    H = PauliSum.from_label_terms([(1.0, "ZZ"), (0.1, "XI"), (-0.05, "IZ")])
    assert violation_bound(H, 0.2) == pytest.approx(0.3)
    assert violation_bound(H, 0.0) == 0.0


def test_violation_norm_single_term():
    Ht = PauliSum.from_label_terms([(0.1, "ZI")])
    x0 = PauliString.from_label("XI")
    assert violation_norm(Ht, x0) == pytest.approx(0.2)
    assert violation_norm(Ht, x0, exact=True) == pytest.approx(0.2)
    assert violation_norm(Ht, PauliString.from_label("ZI")) == 0.0


def test_violation_norm_exact_size_cap():
    Ht = PauliSum(13)
    Ht.add_term(0.5, PauliString.from_single(13, 0, "Z"))
    with pytest.raises(ValueError):
        violation_norm(Ht, PauliString.from_single(13, 0, "X"), exact=True)


def test_empty_schedule_equals_tapering():
    H = staircase()
    T = build_hct(H, [])
    basis = find_symmetries(H)
    assert len(T.stages) == 1
    assert [g.label() for g in T.stages[0].generators] == \
        [g.label() for g in basis.generators]
    assert T.stages[0].qubits == basis.qubits


def test_extend_below_min_coeff_is_empty():
    H = staircase()
    prior = find_symmetries(H)
    stage = extend_symmetries(H, 0.001, prior)
    assert stage.count == 0 and stage.skipped == []


def test_extend_requires_positive_threshold():
    with pytest.raises(ValueError):
        extend_symmetries(staircase(), 0.0, [])


def test_extend_two_qubit_example():
    # exact commutant of {ZZ, XX} is already two generators on two qubits,
    # so a full prior leaves nothing to add even though the truncation at
    # 0.5 has kernel dimension 3; against the sub-family {ZZ} alone the
    # freed Z-direction does extend, for 2 total
    H = PauliSum.from_label_terms([(1.0, "ZZ"), (0.1, "XX")])
    exact = find_symmetries(H)
    assert exact.count == 2
    assert count_symmetries(H.truncate(0.5)) == 2
    full = extend_symmetries(H, 0.5, exact)
    assert full.count == 0
    sub = [(exact.qubits[0], exact.generators[0], exact.sigmas[0])]
    stage = extend_symmetries(H, 0.5, sub)
    assert stage.count == 1
    assert len(sub) + stage.count == 2


def test_forward_pattern_without_backward():
    # exact generator keeps support on a qubit assigned at a later stage:
    # the enforced (forward) pattern holds, the unrequired backward
    # direction does not, and the transform still works exactly
    H = PauliSum.from_label_terms([(1.0, "IZ"), (0.1, "XX")])
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    T.validate()
    assert not T.full_pattern_holds()
    assert [g.label() for g in T.stages[0].generators] == ["ZZ"]
    assert T.stages[-1].qubits == [1]
    # factor product still maps each generator to its sigma
    Ht = conjugate_by_hct(H, T)
    ev0 = np.linalg.eigvalsh(dense(H))
    assert np.allclose(ev0, np.linalg.eigvalsh(dense(Ht)), atol=1e-12)
    for _, _, q, g, s in T.entries():
        img = conjugate_by_hct(PauliSum.from_terms(H.n, [(1.0, g)]), T)
        terms = list(img.items())
        assert len(terms) == 1
        assert abs(terms[0][0]) == pytest.approx(1.0)
        assert terms[0][1].label() == s.label()


def test_build_rejects_bad_schedules():
    H = staircase()
    for bad in ([0.1, 0.3], [0.3, 0.3], [0.0]):
        with pytest.raises(ValueError):
            build_hct(H, bad)


def test_plateau_skip_matches_unskipped_reference():
    # reference: run extend_symmetries at every level with no rank shortcut
    H = staircase()
    schedule = fine_grid_schedule(H, 1.0)
    T = build_hct(H, schedule)
    exact = find_symmetries(H)
    prior = list(zip(exact.qubits, exact.generators, exact.sigmas))
    ref_stages = []
    for eps in schedule.ascending():
        stage = extend_symmetries(H, eps, prior)
        prior.extend(zip(stage.qubits, stage.generators, stage.sigmas))
        ref_stages.append(stage)
    for got, ref in zip(T.stages[1:], ref_stages):
        assert got.threshold == ref.threshold
        assert [g.label() for g in got.generators] == \
            [g.label() for g in ref.generators]
        assert got.qubits == ref.qubits
        assert [s.label() for s in got.sigmas] == \
            [s.label() for s in ref.sigmas]


def test_transform_json_roundtrip():
    H = staircase()
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    data = T.to_json_dict()
    back = HctTransform.from_json_dict(data)
    assert back.to_json_dict() == data


def test_transform_json_default_x_sigmas():
    H = PauliSum.from_label_terms([(1.0, "IZ"), (0.1, "XX")])
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    data = T.to_json_dict()
    assert all(set(s) <= set("IX") for st in data["stages"]
               for s in st["sigmas"])
    for st in data["stages"]:
        del st["sigmas"]
    back = HctTransform.from_json_dict(data)
    assert back.to_json_dict() == T.to_json_dict()


def test_consistency_error_reports_context():
    err = ConsistencyError(0.25, PauliString.from_label("ZZ"))
    assert err.threshold == 0.25
    assert "0.25" in str(err)


_POOL = ["ZZII", "IZZI", "IIZZ", "XXII", "IXXI", "IIXX", "ZIII", "IIIZ",
         "YYII", "IIYY", "XIIX", "ZIIZ"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(list(enumerate(_POOL))), min_size=1,
                max_size=6, unique_by=lambda t: t[0]),
       st.lists(st.sampled_from([1.0, 0.6, 0.3, 0.15, 0.07, 0.03]),
                min_size=0, max_size=4, unique=True),
       st.randoms(use_true_random=False))
def test_random_builds_validate_and_preserve_spectrum(idx_labels, grid, rng):
    coeffs = [1.0, 0.6, 0.3, 0.15, 0.07, 0.03]
    H = PauliSum.from_label_terms([
        (rng.choice(coeffs) * rng.choice([1, -1]), lab)
        for _, lab in idx_labels])
    if len(H) == 0:
        return
    T = build_hct(H, sorted(grid, reverse=True))
    T.validate()
    Ht = conjugate_by_hct(H, T)
    assert np.allclose(np.linalg.eigvalsh(dense(H)),
                       np.linalg.eigvalsh(dense(Ht)), atol=1e-9)
    # every generator maps to its sigma through the full factor product
    for _, _, q, g, s in T.entries():
        img = conjugate_by_hct(PauliSum.from_terms(H.n, [(1.0, g)]), T)
        ((c, p),) = list(img.items())
        assert p.label() == s.label() and abs(c) == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(list(enumerate(_POOL))), min_size=1,
                max_size=6, unique_by=lambda t: t[0]),
       st.randoms(use_true_random=False))
def test_random_truncation_blocks(idx_labels, rng):
    coeffs = [1.0, 0.45, 0.2, 0.09, 0.04]
    H = PauliSum.from_label_terms([
        (rng.choice(coeffs) * rng.choice([1, -1]), lab)
        for _, lab in idx_labels])
    if len(H) == 0:
        return
    T = build_hct(H, fine_grid_schedule(H, 1.0))
    letter = {q: s.letter_at(q) for _, _, q, _, s in T.entries()}
    for stg in T.stages:
        sym = T.cumulative_qubits(stg.threshold)
        Ht = conjugate_by_hct(
            H.truncate(stg.threshold) if stg.threshold else H, T)
        for _, p in Ht.items():
            for q in sym:
                assert p.letter_at(q) in ("I", letter[q])
        # violation chain at this level, bound mode
        Hfull = conjugate_by_hct(H, T)
        for j, s in enumerate(stg.sigmas):
            assert violation_norm(Hfull, s) <= \
                violation_bound(H, stg.threshold) + 1e-12
