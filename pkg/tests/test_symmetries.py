import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdesigns import (
    ChargeSector,
    CompositeSector,
    ContractError,
    EmptyProjectionError,
    ParityFlipSector,
    ReflectionSector,
    ResourceBudgetError,
    TranslationSector,
    build_projector,
    partial_trace_translation_power,
    project_state,
    reflect,
    rng_stream,
    sample_haar_state,
    sample_symmetric_state,
    sample_t_invariant_unitary,
    sector_rank,
    sector_trace,
    spin_flip,
    translate,
    translation_operator,
    translation_reflection_sector,
)
from symdesigns.symmetries import site_permutation_operator

TOL = 1e-12


def basis_vec(index, dim):
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


# --- site permutations -----------------------------------------------------

def test_translate_moves_pattern_one_site():
    # |100> -> |010>: index 4 -> index 2 on three qubits
    out = translate(basis_vec(4, 8), 3)
    assert np.abs(out - basis_vec(2, 8)).max() < TOL
    out2 = translate(out, 3)
    assert np.abs(out2 - basis_vec(1, 8)).max() < TOL
    out3 = translate(out2, 3)
    assert np.abs(out3 - basis_vec(4, 8)).max() < TOL


def test_translate_qutrit():
    # |120> -> |012> for local_dim 3: index 15 -> index 5
    out = translate(basis_vec(15, 27), 3, local_dim=3)
    assert np.abs(out - basis_vec(5, 27)).max() < TOL


@given(st.integers(2, 5), st.integers(0, 2**16))
def test_translate_full_cycle_is_identity(n, seed):
    vec = sample_haar_state(2**n, rng_stream(seed))
    out = vec
    for _ in range(n):
        out = translate(out, n)
    assert np.abs(out - vec).max() < 1e-12


def test_translate_negative_power_inverts():
    vec = sample_haar_state(32, rng_stream(3))
    out = translate(translate(vec, 5, power=1), 5, power=-1)
    assert np.abs(out - vec).max() < TOL


def test_spin_flip_involution_and_action():
    assert np.abs(spin_flip(basis_vec(0, 8)) - basis_vec(7, 8)).max() < TOL
    vec = sample_haar_state(16, rng_stream(4))
    assert np.abs(spin_flip(spin_flip(vec)) - vec).max() < TOL


def test_reflect_about_first_site():
    # site 0 stays put, its neighbors swap: |110> -> |101>
    out = reflect(basis_vec(6, 8), 3, site=0)
    assert np.abs(out - basis_vec(5, 8)).max() < TOL


def test_reflect_mirror_reverses_string():
    # |110> -> |011>
    out = reflect(basis_vec(6, 8), 3, mirror=True)
    assert np.abs(out - basis_vec(3, 8)).max() < TOL


@given(st.integers(2, 5), st.integers(0, 6), st.booleans())
def test_reflect_is_an_involution(n, site, mirror):
    vec = sample_haar_state(2**n, rng_stream(17, n, site, int(mirror)))
    out = reflect(reflect(vec, n, site=site, mirror=mirror), n, site=site, mirror=mirror)
    assert np.abs(out - vec).max() < 1e-12


def test_translation_operator_matches_translate():
    n = 4
    op = translation_operator(n)
    vec = sample_haar_state(16, rng_stream(5))
    assert np.abs(op @ vec - translate(vec, n)).max() < TOL
    assert np.abs(op @ op.conj().T - np.eye(16)).max() < TOL


def test_translation_operator_budget():
    with pytest.raises(ResourceBudgetError):
        translation_operator(20)


# --- sector projectors -----------------------------------------------------

def dense_of(sector):
    return sector.dense()


PROJECTOR_CASES = [
    TranslationSector(4, 2, k=0),
    TranslationSector(4, 2, k=1),
    TranslationSector(5, 2, k=2),
    ParityFlipSector(4, 2, parity=0),
    ParityFlipSector(4, 2, parity=1),
    ReflectionSector(5, 2, site=1, sign=1),
    ReflectionSector(6, 2, mirror=True, sign=-1),
    ChargeSector(4, 2, charge=0),
    ChargeSector(5, 2, charge=-1),
    translation_reflection_sector(4, 2, k=0),
    # commuting factors, so the product scale is the product of scales
    CompositeSector([TranslationSector(4, 2, k=0), ParityFlipSector(4, 2, parity=0)],
                    scale=8.0),
]
CASE_IDS = [f"{s.kind}{i}" for i, s in enumerate(PROJECTOR_CASES)]


@pytest.mark.parametrize("sector", PROJECTOR_CASES, ids=CASE_IDS)
def test_projector_algebra(sector):
    p = dense_of(sector)
    c = sector.scale
    assert np.abs(p - p.conj().T).max() < 1e-9
    assert np.abs(p @ p - c * p).max() < 1e-9
    eigs = np.linalg.eigvalsh(p)
    # spectrum sits on {0, c} only
    assert np.all((np.abs(eigs) < 1e-9) | (np.abs(eigs - c) < 1e-9))
    assert abs(np.trace(p) - sector.trace()) < 1e-9
    assert sector_rank(sector) == int(round(np.trace(p).real / c))


@pytest.mark.parametrize("sector", PROJECTOR_CASES, ids=CASE_IDS)
def test_apply_matches_dense(sector):
    p = dense_of(sector)
    vec = sample_haar_state(sector.dim, rng_stream(6, sector.dim))
    assert np.abs(sector.apply(vec) - p @ vec).max() < 1e-10


def test_translation_trace_prime_sizes():
    # tr(sum_j w^jk T^j) = 2^N + 2(N-1) at k=0 and 2^N - 2 otherwise when
    # N is prime, since every nonzero power is a single N-cycle.
    for n in (5, 7, 11):
        assert abs(sector_trace(TranslationSector(n, 2, k=0)) - (2**n + 2 * (n - 1))) < 1e-9
        for k in range(1, n):
            assert abs(sector_trace(TranslationSector(n, 2, k=k)) - (2**n - 2)) < 1e-9


def test_translation_trace_composite_sizes_match_dense():
    for n in (4, 6):
        for k in range(n):
            sector = TranslationSector(n, 2, k=k)
            dense_trace = np.trace(dense_of(sector))
            assert abs(sector_trace(sector) - dense_trace) < 1e-9


def test_translation_momentum_resolution():
    # sectors resolve the identity and are mutually orthogonal
    n = 5
    dim = 32
    total = np.zeros((dim, dim), dtype=np.complex128)
    denses = []
    for k in range(n):
        p = dense_of(TranslationSector(n, 2, k=k))
        denses.append(p)
        total += p / n
    assert np.abs(total - np.eye(dim)).max() < 1e-9
    for k in range(n):
        for kp in range(k + 1, n):
            assert abs(np.trace(denses[k] @ denses[kp])) < 1e-9


def test_translation_rank_counts_necklaces():
    # k=0 rank = number of binary necklaces
    for n, count in ((4, 6), (5, 8), (6, 14)):
        assert sector_rank(TranslationSector(n, 2, k=0)) == count


def test_bracelet_ranks():
    # joint translation+reflection sector at k=0 counts binary bracelets
    for n, count in ((4, 6), (5, 8), (6, 13)):
        assert sector_rank(translation_reflection_sector(n, 2, k=0)) == count


def test_translation_reflection_nonzero_momentum_has_no_scale():
    # reflections connect momenta k and -k, so the k != 0 product is not
    # proportional to a projector and cannot report a rank
    sector = translation_reflection_sector(4, 2, k=1)
    assert sector.scale is None
    with pytest.raises(ContractError):
        sector.rank()


def test_charge_sector_ranks():
    assert sector_rank(ChargeSector(4, 2, charge=0)) == 6
    assert sector_rank(ChargeSector(4, 2, charge=2)) == 4
    assert sector_rank(ChargeSector(5, 2, charge=5)) == 1


def test_charge_sector_rejects_impossible_charge():
    with pytest.raises(ContractError):
        ChargeSector(4, 2, charge=1)  # parity mismatch
    with pytest.raises(ContractError):
        ChargeSector(4, 2, charge=6)  # out of range


def test_reflection_trace_fixed_points():
    # reflection about a site fixes (n+1)/2 positions on odd rings and
    # n/2 + 1 on even rings; each cycle contributes a factor of 2
    assert abs(sector_trace(ReflectionSector(5, 2, site=0)) - (32 + 8)) < TOL
    assert abs(sector_trace(ReflectionSector(6, 2, site=0)) - (64 + 16)) < TOL
    assert abs(sector_trace(ReflectionSector(6, 2, mirror=True)) - (64 + 8)) < TOL
    assert abs(sector_trace(ReflectionSector(6, 2, mirror=True, sign=-1)) - (64 - 8)) < TOL


def test_reflection_site_is_translated_conjugate():
    # R_j = T^j R_0 T^(-j)
    n = 5
    t = translation_operator(n)
    r0 = dense_of(ReflectionSector(n, 2, site=0)) - np.eye(2**n)
    for j in (1, 2, 3):
        rj = dense_of(ReflectionSector(n, 2, site=j)) - np.eye(2**n)
        tj = np.linalg.matrix_power(t, j)
        assert np.abs(rj - tj @ r0 @ tj.conj().T).max() < 1e-10


def test_composite_sector_applies_first_factor_first():
    trans = TranslationSector(4, 2, k=0)
    par = ParityFlipSector(4, 2, parity=0)
    comp = CompositeSector([trans, par])
    vec = sample_haar_state(16, rng_stream(7))
    assert np.abs(comp.apply(vec) - par.apply(trans.apply(vec))).max() < TOL
    # no scale unless the caller supplies one
    assert comp.scale is None
    with pytest.raises(ContractError):
        comp.rank()


def test_build_projector_dispatch():
    sector = build_projector("translation", 6, k=2)
    assert isinstance(sector, TranslationSector)
    assert sector.params["k"] == 2
    sector = build_projector("composite", 4, factors=[
        {"kind": "translation", "k": 0},
        {"kind": "parity_flip", "parity": 1},
    ])
    assert isinstance(sector, CompositeSector)
    with pytest.raises(ContractError):
        build_projector("rotation", 4)


def test_project_state_lands_in_sector():
    sector = TranslationSector(6, 2, k=1)
    state = project_state(sample_haar_state(64, rng_stream(8)), sector)
    assert abs(np.linalg.norm(state) - 1.0) < TOL
    shifted = translate(state, 6)
    phase = np.exp(-2j * np.pi * 1 / 6)
    assert np.abs(shifted - phase * state).max() < 1e-10


def test_project_state_empty_projection():
    # a state of even magnetization has no overlap with an odd sector
    sector = ChargeSector(4, 2, charge=4)
    state = basis_vec(1, 16)  # |0001>, magnetization -2
    with pytest.raises(EmptyProjectionError):
        project_state(state, sector)


@pytest.mark.parametrize("sector", PROJECTOR_CASES, ids=CASE_IDS)
def test_sample_symmetric_state_charge_deviation(sector):
    sample = sample_symmetric_state(sector, rng_stream(9, sector.dim))
    assert abs(np.linalg.norm(sample.state) - 1.0) < TOL
    assert sample.charge_deviation() < 1e-9


def test_sample_symmetric_state_deterministic():
    sector = TranslationSector(5, 2, k=0)
    a = sample_symmetric_state(sector, rng_stream(10)).state
    b = sample_symmetric_state(sector, rng_stream(10)).state
    assert np.array_equal(a, b)


# --- translation-invariant unitaries ---------------------------------------

def test_t_invariant_unitary_properties():
    n = 5
    t = translation_operator(n)
    u = sample_t_invariant_unitary(n, 2, rng_stream(11))
    assert np.abs(u @ u.conj().T - np.eye(2**n)).max() < 1e-9
    assert np.abs(u @ t - t @ u).max() < 1e-9


def test_t_invariant_unitary_deterministic_and_budget():
    a = sample_t_invariant_unitary(4, 2, rng_stream(12))
    b = sample_t_invariant_unitary(4, 2, rng_stream(12))
    assert np.array_equal(a, b)
    with pytest.raises(ResourceBudgetError):
        sample_t_invariant_unitary(11, 2, rng_stream(13))


# --- partial trace of translation powers ------------------------------------

def brute_force_partial_trace(n, n_a, power):
    op = translation_operator(n, power=power)
    dim_a, dim_b = 2**n_a, 2 ** (n - n_a)
    tensor = op.reshape(dim_a, dim_b, dim_a, dim_b)
    return np.einsum("abcb->ac", tensor)


def test_partial_trace_translation_power_brute_force():
    for n in range(2, 8):
        for n_a in range(1, n):
            for power in range(n):
                result = partial_trace_translation_power(n, n_a, power)
                expected = brute_force_partial_trace(n, n_a, power)
                assert np.abs(result.matrix() - expected).max() < TOL, (n, n_a, power)
                assert result.kind in ("permutation", "scaled_identity")


def test_partial_trace_classification_rule():
    # free B-summations appear exactly when n_a < gcd(n, power)
    for n in range(2, 9):
        for n_a in range(1, n):
            for power in range(n):
                result = partial_trace_translation_power(n, n_a, power)
                if n_a < math.gcd(n, power) or power == 0:
                    assert result.kind == "scaled_identity", (n, n_a, power)
                    assert result.constant == 2.0 ** (math.gcd(n, power) - n_a if power else n - n_a)
                else:
                    assert result.kind == "permutation", (n, n_a, power)


def test_partial_trace_of_single_shift_is_shift_on_a():
    result = partial_trace_translation_power(6, 3, 1)
    assert result.kind == "permutation"
    expected = site_permutation_operator(3, 2, (2, 0, 1))
    assert np.abs(result.matrix() - expected).max() < TOL


def test_partial_trace_rejects_bad_split():
    with pytest.raises(ContractError):
        partial_trace_translation_power(4, 0, 1)
    with pytest.raises(ContractError):
        partial_trace_translation_power(4, 4, 1)
