import numpy as np
import pytest

from symdesigns import (
    ContractError,
    ParityFlipSector,
    ReflectionSector,
    SystemGeometry,
    computational_basis,
    condition_check,
    delta_prime_t,
    delta_t,
    ensemble_moment,
    global_haar_basis,
    haar_moment,
    mixed_last_site_basis,
    projected_ensemble,
    rng_stream,
    sample_haar_state,
    sigma_x_basis,
    translation_eigenbasis,
    violation,
)


def test_ghz_projected_ensemble_exact():
    geom = SystemGeometry(n_total=4, n_a=2)
    state = np.zeros(16)
    state[0] = state[15] = 1.0 / np.sqrt(2.0)
    ens = projected_ensemble(state, computational_basis(2), geom)
    assert ens.n_kept == 2
    assert ens.kept_indices.tolist() == [0, 3]
    assert np.allclose(ens.probabilities, 0.5)
    assert ens.dropped_mass == 0.0
    assert abs(ens.states[0, 0] - 1.0) < 1e-12
    assert abs(ens.states[3, 1] - 1.0) < 1e-12


def test_product_state_ensemble_single_conditional_state():
    geom = SystemGeometry(n_total=4, n_a=2)
    phi = sample_haar_state(4, rng_stream(7))
    state = np.kron(phi, np.full(4, 0.5))
    ens = projected_ensemble(state, computational_basis(2), geom)
    assert ens.n_kept == 4
    assert np.allclose(ens.probabilities, 0.25)
    for col in ens.states.T:
        assert abs(abs(np.vdot(phi, col)) - 1.0) < 1e-12
    # ensemble is a single pure state, so the first-moment distance from
    # the maximally mixed state is 2 (1 - 1/dim_a)
    assert abs(delta_t(state, computational_basis(2), 1, geom) - 1.5) < 1e-12


def test_probabilities_sum_to_one_minus_dropped():
    geom = SystemGeometry(n_total=6, n_a=2)
    state = sample_haar_state(64, rng_stream(8))
    ens = projected_ensemble(state, computational_basis(4), geom)
    assert abs(ens.probabilities.sum() + ens.dropped_mass - 1.0) < 1e-12
    assert ens.n_outcomes == 16


def test_cutoff_drop_accounting():
    geom = SystemGeometry(n_total=2, n_a=1)
    eps = 1e-8
    state = np.array([np.sqrt(1.0 - eps**2), 0.0, 0.0, eps])
    ens = projected_ensemble(state, computational_basis(1), geom)
    assert ens.n_kept == 1
    assert ens.kept_indices.tolist() == [0]
    assert abs(ens.dropped_mass - eps**2) < 1e-20
    full = projected_ensemble(state, computational_basis(1), geom, cutoff=0.0)
    assert full.n_kept == 2
    assert full.dropped_mass == 0.0


def test_moment_trace_equals_kept_mass():
    geom = SystemGeometry(n_total=5, n_a=2)
    state = sample_haar_state(32, rng_stream(9))
    ens = projected_ensemble(state, computational_basis(3), geom, cutoff=0.05)
    assert ens.dropped_mass > 0.0
    moment = ensemble_moment(ens, 2)
    assert abs(np.trace(moment).real - ens.probabilities.sum()) < 1e-12


def test_delta1_is_basis_independent():
    geom = SystemGeometry(n_total=5, n_a=2)
    state = sample_haar_state(32, rng_stream(10))
    bases = [computational_basis(3), sigma_x_basis(3),
             global_haar_basis(3, seed=4), translation_eigenbasis(3)]
    values = [delta_t(state, b, 1, geom) for b in bases]
    for value in values[1:]:
        assert abs(value - values[0]) < 1e-9


def test_sparse_basis_projection_path():
    geom = SystemGeometry(n_total=14, n_a=1)
    state = sample_haar_state(geom.dim, rng_stream(11))
    basis = translation_eigenbasis(13)
    assert basis.is_sparse
    ens = projected_ensemble(state, basis, geom)
    assert abs(ens.probabilities.sum() + ens.dropped_mass - 1.0) < 1e-10
    assert np.abs(np.linalg.norm(ens.states, axis=0) - 1.0).max() < 1e-10
    d1_sparse = delta_t(state, basis, 1, geom)
    d1_comp = delta_t(state, computational_basis(13), 1, geom)
    assert abs(d1_sparse - d1_comp) < 1e-9


def test_delta_prime_reference_contract():
    geom = SystemGeometry(n_total=4, n_a=2)
    state = sample_haar_state(16, rng_stream(12))
    with pytest.raises(ContractError):
        delta_prime_t(state, computational_basis(2), 2, np.eye(4), geom)
    ref = haar_moment(4, 2)
    against_ref = delta_prime_t(state, computational_basis(2), 2, ref, geom)
    against_haar = delta_t(state, computational_basis(2), 2, geom)
    assert abs(against_ref - against_haar) < 1e-12


# --- violation of the identity-block condition -------------------------------

@pytest.mark.parametrize("n,n_a", [(4, 1), (5, 2), (6, 3)])
def test_parity_violation_exact_values(n, n_a):
    geom = SystemGeometry(n_total=n, n_a=n_a)
    sector = ParityFlipSector(n)
    comp = violation(sector, computational_basis(n - n_a), geom)
    assert comp.average <= 1e-12
    flip = violation(sector, sigma_x_basis(n - n_a), geom)
    assert abs(flip.average - 2.0**n_a) < 1e-9
    assert np.abs(flip.profile - 2.0**n_a).max() < 1e-9


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.8, 1.0])
def test_mixed_last_site_violation_closed_form(alpha):
    # every outcome block is I +- w X...X on A with w = (1 - alpha) / r,
    # r the eigenvalue magnitude of the interpolated last-site operator
    geom = SystemGeometry(n_total=5, n_a=2)
    res = violation(ParityFlipSector(5), mixed_last_site_basis(3, alpha), geom)
    weight = 0.0 if alpha == 1.0 else (1.0 - alpha) / np.hypot(alpha, 1.0 - alpha)
    assert abs(res.average - 4.0 * weight) < 1e-9


def test_reflection_violation_aggregates():
    # odd chain, reflection about a site: profile sum / 2^n = 2^{-(n-1)/2}
    n, n_a = 7, 2
    geom = SystemGeometry(n_total=n, n_a=n_a)
    res = violation(ReflectionSector(n, site=0), computational_basis(n - n_a), geom)
    assert abs(res.average / 2.0**n_a - 2.0 ** (-(n - 1) / 2)) < 1e-9
    # even chain, mirror reflection: profile sum / 2^n = 2^{-n/2}
    n = 8
    geom = SystemGeometry(n_total=n, n_a=n_a)
    res = violation(ReflectionSector(n, mirror=True), computational_basis(n - n_a), geom)
    assert abs(res.average / 2.0**n_a - 2.0 ** (-n / 2)) < 1e-9


def test_violation_matches_dense_sandwich():
    geom = SystemGeometry(n_total=4, n_a=2)
    sector = ReflectionSector(4, mirror=True)
    dense = sector.dense().reshape(4, 4, 4, 4)
    for basis in (computational_basis(2), sigma_x_basis(2)):
        res = violation(sector, basis, geom)
        cols = np.eye(4) if basis.is_computational else basis.matrix
        for b in range(4):
            v = cols[:, b]
            block = np.einsum("i,aicj,j->ac", v.conj(), dense, v)
            expected = np.linalg.svd(block - np.eye(4), compute_uv=False).sum()
            assert abs(res.profile[b] - expected) < 1e-10


def test_condition_check():
    geom = SystemGeometry(n_total=4, n_a=2)
    sector = ParityFlipSector(4)
    ok, worst = condition_check(sector, computational_basis(2), geom)
    assert ok
    assert worst <= 1e-12
    ok, worst = condition_check(sector, sigma_x_basis(2), geom)
    assert not ok
    assert abs(worst - 4.0) < 1e-9


def test_dimension_and_norm_contracts():
    geom = SystemGeometry(n_total=4, n_a=2)
    with pytest.raises(ContractError):
        projected_ensemble(np.ones(16), computational_basis(2), geom)
    with pytest.raises(ContractError):
        projected_ensemble(sample_haar_state(16, rng_stream(1)),
                           computational_basis(3), geom)
    with pytest.raises(ContractError):
        violation(ParityFlipSector(5), computational_basis(2), geom)
    with pytest.raises(ContractError):
        violation(ParityFlipSector(4), computational_basis(3), geom)
