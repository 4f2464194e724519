import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdesigns import ContractError, SystemGeometry
from symdesigns.geometry import digit_table, index_weights


def test_geometry_basic_dimensions():
    geom = SystemGeometry(n_total=5, n_a=2)
    assert geom.n_b == 3
    assert geom.dim == 32
    assert geom.dim_a == 4
    assert geom.dim_b == 8


def test_geometry_local_dim_three():
    geom = SystemGeometry(n_total=3, n_a=1, local_dim=3)
    assert geom.dim == 27
    assert geom.dim_b == 9


def test_geometry_rejects_bad_split():
    with pytest.raises(ContractError):
        SystemGeometry(n_total=4, n_a=0)
    with pytest.raises(ContractError):
        SystemGeometry(n_total=4, n_a=4)
    with pytest.raises(ContractError):
        SystemGeometry(n_total=0, n_a=0)
    with pytest.raises(ContractError):
        SystemGeometry(n_total=3, n_a=1, local_dim=1)


def test_state_matrix_index_convention():
    # Row index is the A-side label (most significant digits), column the
    # B-side label, so entry [a, b] holds amplitude a*dim_b + b.
    geom = SystemGeometry(n_total=3, n_a=1)
    state = np.arange(8, dtype=np.complex128)
    mat = geom.state_matrix(state)
    assert mat.shape == (2, 4)
    assert mat[1, 2] == 6.0
    assert mat[0, 3] == 3.0


def test_state_matrix_rejects_wrong_length():
    geom = SystemGeometry(n_total=3, n_a=1)
    with pytest.raises(ContractError):
        geom.state_matrix(np.zeros(7, dtype=np.complex128))


@given(st.integers(2, 4), st.integers(2, 3))
def test_digit_table_weights_roundtrip(n_sites, local_dim):
    table = digit_table(n_sites, local_dim)
    weights = index_weights(n_sites, local_dim)
    labels = table @ weights
    assert np.array_equal(labels, np.arange(local_dim**n_sites))


def test_digit_table_first_site_most_significant():
    table = digit_table(3, 2)
    # index 4 = binary 100: digit 1 at the first site
    assert list(table[4]) == [1, 0, 0]
    assert list(table[1]) == [0, 0, 1]
