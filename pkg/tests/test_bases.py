import numpy as np
import pytest

from symdesigns import (
    ContractError,
    NumericalError,
    ResourceBudgetError,
    build_basis,
    computational_basis,
    global_haar_basis,
    local_product_basis,
    mixed_last_site_basis,
    rng_stream,
    sigma_x_basis,
    translate,
    translation_eigenbasis,
)
from symdesigns.bases import custom_basis
from symdesigns.linalg import sample_haar_unitary
from symdesigns.symmetries import translation_operator

TOL = 1e-12
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def test_computational_basis_is_identity():
    basis = computational_basis(3)
    assert basis.is_computational
    assert basis.n_vectors == 8
    vec = basis.vector(5)
    assert vec[5] == 1.0 and np.abs(vec).sum() == 1.0
    assert basis.gram_deviation() == 0.0


def test_sigma_x_basis_is_hadamard_product():
    basis = sigma_x_basis(2)
    expected = np.kron(HADAMARD, HADAMARD)
    assert np.abs(basis.matrix - expected).max() < TOL


def test_mixed_last_site_alpha_limits():
    # alpha 0 keeps the X basis everywhere; alpha 1 switches the last
    # site back to the computational basis
    basis0 = mixed_last_site_basis(2, 0.0)
    assert np.abs(basis0.matrix - np.kron(HADAMARD, HADAMARD)).max() < TOL
    basis1 = mixed_last_site_basis(2, 1.0)
    assert np.abs(basis1.matrix - np.kron(HADAMARD, np.eye(2))).max() < TOL
    with pytest.raises(ContractError):
        mixed_last_site_basis(2, 1.5)


def test_local_product_basis_orthonormal_and_deterministic():
    a = local_product_basis(3, seed=5)
    b = local_product_basis(3, seed=5)
    c = local_product_basis(3, seed=6)
    assert a.gram_deviation() < 1e-10
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, c.matrix)
    with pytest.raises(ContractError):
        local_product_basis(3)


def test_global_haar_basis_orthonormal():
    basis = global_haar_basis(3, seed=9)
    assert basis.gram_deviation() < 1e-10
    assert basis.matrix.shape == (8, 8)


def test_custom_basis_validation():
    with pytest.raises(NumericalError):
        custom_basis(np.ones((4, 4)) / 2.0)
    with pytest.raises(ContractError):
        custom_basis(np.ones((4, 3)))
    basis = custom_basis(np.eye(4)[:, ::-1])
    assert basis.vector(0)[3] == 1.0


# --- shift eigenbasis --------------------------------------------------------

def test_translation_eigenbasis_two_sites_worked_example():
    # shift eigenvectors on two qubits: |00>, |11>, and the symmetric and
    # antisymmetric combinations of |01>, |10>
    basis = translation_eigenbasis(2)
    m = basis.matrix
    inv = 1.0 / np.sqrt(2.0)
    expected_cols = [
        np.array([1.0, 0.0, 0.0, 0.0]),
        np.array([0.0, inv, inv, 0.0]),
        np.array([0.0, 0.0, 0.0, 1.0]),
        np.array([0.0, inv, -inv, 0.0]),
    ]
    for col, expected in zip(m.T, expected_cols):
        assert abs(abs(np.vdot(col, expected)) - 1.0) < 1e-12


@pytest.mark.parametrize("n_b,power", [(3, 1), (4, 1), (5, 2), (6, 3)])
def test_translation_eigenbasis_diagonalizes_shift(n_b, power):
    basis = translation_eigenbasis(n_b, power=power)
    m = basis.matrix
    assert basis.gram_deviation() < 1e-9
    for idx in range(0, basis.n_vectors, max(1, basis.n_vectors // 7)):
        col = m[:, idx]
        shifted = translate(col, n_b, power=power)
        # eigenvector: the shifted column only picks up a phase
        assert abs(abs(np.vdot(col, shifted)) - 1.0) < 1e-9


def test_translation_eigenbasis_sparse_above_dense_cap():
    basis = translation_eigenbasis(13)
    assert basis.is_sparse
    assert basis.gram_deviation() < 1e-9
    col = basis.vector(100)
    shifted = translate(col, 13)
    assert abs(abs(np.vdot(col, shifted)) - 1.0) < 1e-9


def test_translation_eigenbasis_dense_and_sparse_agree(monkeypatch):
    import symdesigns.bases as bases_mod

    dense = translation_eigenbasis(6).matrix
    monkeypatch.setattr(bases_mod, "BASIS_DENSE_MAX_DIM", 8)
    sparse = translation_eigenbasis(6)
    assert sparse.is_sparse
    assert np.abs(sparse.matrix.toarray() - dense).max() < TOL


def test_translation_eigenbasis_insertion_variant():
    n_b = 4
    seed = 11
    basis = translation_eigenbasis(n_b, insertion_seed=seed)
    u = sample_haar_unitary(2, rng_stream(seed))
    op = np.kron(u, np.eye(2 ** (n_b - 1))) @ translation_operator(n_b)
    m = basis.matrix
    eigenvalues = np.diag(m.conj().T @ op @ m)
    residual = np.abs(op @ m - m @ np.diag(eigenvalues)).max()
    assert residual < 1e-9
    assert np.abs(np.abs(eigenvalues) - 1.0).max() < 1e-9


def test_translation_eigenbasis_insertion_budget():
    with pytest.raises(ResourceBudgetError):
        translation_eigenbasis(13, insertion_seed=3)


def test_translation_eigenbasis_deterministic():
    a = translation_eigenbasis(5).matrix
    b = translation_eigenbasis(5).matrix
    assert np.array_equal(a, b)
    c = translation_eigenbasis(5, insertion_seed=7).matrix
    d = translation_eigenbasis(5, insertion_seed=7).matrix
    assert np.array_equal(c, d)


# --- dispatch ----------------------------------------------------------------

def test_build_basis_dispatch():
    assert build_basis("computational", 3).is_computational
    xx = build_basis("sigma_x", 2).matrix
    assert np.abs(xx - np.kron(HADAMARD, HADAMARD)).max() < TOL
    assert build_basis("shift_eigenbasis", 4, power=2).n_vectors == 16
    assert build_basis("mixed_last_site", 2, alpha=0.5).gram_deviation() < 1e-10
    with pytest.raises(ContractError):
        build_basis("fourier", 3)
    with pytest.raises(ContractError):
        build_basis("sigma_x", 3, alpha=0.2)
    with pytest.raises(ContractError):
        build_basis("global_haar", 3)
    with pytest.raises(ContractError):
        build_basis("sigma_x", 3, local_dim=3)


def test_basis_budget_errors():
    with pytest.raises(ResourceBudgetError):
        local_product_basis(13, seed=1)
    with pytest.raises(ResourceBudgetError):
        translation_eigenbasis(19)
