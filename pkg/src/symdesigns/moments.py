"""Moment operators on replicated Hilbert spaces.

The t-th moment of an ensemble of pure states lives on t replicas of the
single-system space.  Permutation operators on replicas are digit-position
permutations in base dim, so they reuse the same index machinery as the
ring symmetries, and right-multiplying by one is a column gather rather
than a matrix product.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from .errors import ContractError, NumericalError, ResourceBudgetError
from .symmetries import SectorProjector, _site_perm_indices, site_permutation_operator

__all__ = [
    "REPLICA_DIM_MAX",
    "perm_sym_projector",
    "haar_moment",
    "right_multiply_perm_sym",
    "symmetric_ensemble_moment",
    "z2_sigmax_projected_moment",
    "columnwise_tensor_power",
    "assert_moment_operator",
]

REPLICA_DIM_MAX = 4096


def _check_replica_budget(dim: int, t: int, max_replica_dim: int) -> int:
    if t < 1:
        raise ContractError(f"t must be >= 1, got {t}")
    replica_dim = dim**t
    if replica_dim > max_replica_dim:
        raise ResourceBudgetError(
            f"replica dimension {dim}**{t} = {replica_dim} exceeds budget {max_replica_dim}"
        )
    return replica_dim


def perm_sym_projector(dim: int, t: int, max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """Sum of all t! replica permutation operators on the t-fold tensor power.

    Unnormalized: the result squares to t! times itself and its trace is
    dim (dim+1) ... (dim+t-1).
    """
    replica_dim = _check_replica_budget(dim, t, max_replica_dim)
    total = np.zeros((replica_dim, replica_dim), dtype=np.complex128)
    for perm in permutations(range(t)):
        total += site_permutation_operator(t, dim, perm, max_dim=replica_dim)
    return total


def haar_moment(dim: int, t: int, max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """t-th moment of uniformly random pure states on C^dim.

    This is the permutation symmetrizer normalized to unit trace by
    dim (dim+1) ... (dim+t-1).
    """
    norm = 1.0
    for i in range(t):
        norm *= dim + i
    return perm_sym_projector(dim, t, max_replica_dim) / norm


def right_multiply_perm_sym(matrix: np.ndarray, dim: int, t: int) -> np.ndarray:
    """matrix @ perm_sym_projector(dim, t) using column gathers only."""
    matrix = np.asarray(matrix)
    replica_dim = dim**t
    if matrix.shape != (replica_dim, replica_dim):
        raise ContractError(
            f"expected a {replica_dim} x {replica_dim} matrix, got {matrix.shape}"
        )
    out = np.zeros_like(matrix, dtype=np.complex128)
    for perm in permutations(range(t)):
        _, label = _site_perm_indices(t, dim, perm)
        out += matrix[:, label]
    return out


def _tensor_power(matrix: np.ndarray, t: int) -> np.ndarray:
    out = matrix
    for _ in range(t - 1):
        out = np.kron(out, matrix)
    return out


def symmetric_ensemble_moment(sector, t: int,
                              max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """t-th moment of Haar states projected into a symmetry sector.

    For a sector with projector proportional to P the moment is
    kron(P, ..., P) Pi_sym / trace(kron(P, ..., P) Pi_sym), where Pi_sym is the
    replica symmetrizer.  Accepts a SectorProjector or a dense matrix.
    """
    if isinstance(sector, SectorProjector):
        dense = sector.dense(max_dim=max_replica_dim)
    else:
        dense = np.asarray(sector, dtype=np.complex128)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ContractError(f"expected a square matrix, got shape {dense.shape}")
    dim = dense.shape[0]
    _check_replica_budget(dim, t, max_replica_dim)
    unnormalized = right_multiply_perm_sym(_tensor_power(dense, t), dim, t)
    trace = complex(np.trace(unnormalized))
    if abs(trace) < 1e-12:
        raise NumericalError("moment normalization vanished; sector appears empty")
    return unnormalized / trace


def z2_sigmax_projected_moment(n_a: int, t: int, parity: int = 0,
                               max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """Closed-form moment of the ensemble projected from a spin-flip sector
    by measuring the rest of the chain in the local X basis.

    Both flip sectors on the kept n_a qubits enter symmetrically:
    (kron of t copies of Z_+ plus kron of t copies of Z_-) times Pi_sym,
    normalized to unit trace.
    The measured outcome's parity only relabels which bitstrings couple to
    which sector, so the parity argument does not change the result; it is
    accepted to mirror the measurement interface.
    """
    if parity % 2 not in (0, 1):
        raise ContractError(f"parity must be an integer, got {parity}")
    dim = 2**n_a
    _check_replica_budget(dim, t, max_replica_dim)
    flip = np.eye(dim, dtype=np.complex128)[::-1]
    plus = np.eye(dim, dtype=np.complex128) + flip
    minus = np.eye(dim, dtype=np.complex128) - flip
    kernel = _tensor_power(plus, t) + _tensor_power(minus, t)
    unnormalized = right_multiply_perm_sym(kernel, dim, t)
    trace = complex(np.trace(unnormalized))
    return unnormalized / trace


def columnwise_tensor_power(states: np.ndarray, t: int,
                            max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """Map each column v to its t-fold tensor power; (dim, n) becomes (dim**t, n)."""
    states = np.asarray(states, dtype=np.complex128)
    if states.ndim != 2:
        raise ContractError(f"expected a (dim, n) array, got shape {states.shape}")
    dim, n = states.shape
    _check_replica_budget(dim, t, max_replica_dim)
    out = states
    for _ in range(t - 1):
        out = np.einsum("ib,jb->ijb", out, states).reshape(-1, n)
    return out


def assert_moment_operator(moment: np.ndarray, atol: float = 1e-9):
    """Check the moment contract: Hermitian, positive semidefinite, unit trace."""
    moment = np.asarray(moment)
    herm = np.abs(moment - moment.conj().T).max()
    if herm > atol:
        raise NumericalError(f"moment deviates from Hermiticity by {herm:.3e}")
    eigenvalues = np.linalg.eigvalsh(0.5 * (moment + moment.conj().T))
    if eigenvalues.min() < -atol:
        raise NumericalError(f"moment has negative eigenvalue {eigenvalues.min():.3e}")
    trace_err = abs(np.trace(moment) - 1.0)
    if trace_err > atol:
        raise NumericalError(f"moment trace deviates from 1 by {trace_err:.3e}")
