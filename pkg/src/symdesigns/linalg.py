"""Dense complex linear algebra on bipartite statevectors.

All routines follow the SystemGeometry index convention: site 1 is the most
significant digit, so a full-system vector reshapes row-major to an
amplitude matrix whose rows are A labels and whose columns are B labels.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError
from .geometry import SystemGeometry

__all__ = [
    "NORM_ATOL",
    "HERMITICITY_ATOL",
    "rng_stream",
    "as_state",
    "trace_norm",
    "trace_distance",
    "partial_trace_b",
    "partial_project",
    "schmidt_spectrum",
    "sample_haar_state",
    "sample_haar_unitary",
]

NORM_ATOL = 1e-10
HERMITICITY_ATOL = 1e-10


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one unit of work.

    Streams are derived from (seed, *key) so that per-item randomness does
    not depend on scheduling order.  seed and key entries must be
    non-negative integers.
    """
    entropy = [int(seed), *[int(k) for k in key]]
    if any(e < 0 for e in entropy):
        raise ContractError(f"seed material must be non-negative, got {entropy}")
    return np.random.default_rng(np.random.SeedSequence(entropy))


def as_state(vec, dim: int | None = None) -> np.ndarray:
    """Coerce to a 1-D complex vector, optionally checking its length."""
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.ndim != 1:
        raise ContractError(f"expected a 1-D statevector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ContractError(f"expected a vector of length {dim}, got {arr.shape[0]}")
    return arr


def _checked_hermitian(matrix, atol: float) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {arr.shape}")
    deviation = np.abs(arr - arr.conj().T).max() if arr.size else 0.0
    if deviation > atol:
        raise ContractError(f"matrix is not Hermitian: max |M - M^dag| = {deviation:.3e}")
    # Symmetrize so eigvalsh sees an exactly Hermitian operand.
    return 0.5 * (arr + arr.conj().T)


def trace_norm(matrix, atol: float = HERMITICITY_ATOL) -> float:
    """Trace norm ||M||_1 of a Hermitian matrix, as the sum of |eigenvalues|.

    Raises ContractError if the input deviates from Hermiticity by more
    than atol in any entry.
    """
    arr = _checked_hermitian(matrix, atol)
    eigenvalues = np.linalg.eigvalsh(arr)
    return float(np.abs(eigenvalues).sum())


def trace_distance(a, b, atol: float = HERMITICITY_ATOL) -> float:
    """Trace norm of the difference of two Hermitian matrices."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ContractError(f"shape mismatch: {a.shape} vs {b.shape}")
    return trace_norm(a - b, atol)


def partial_trace_b(state, geom: SystemGeometry) -> np.ndarray:
    """Reduced density matrix on A after tracing out B from a pure state."""
    psi = geom.state_matrix(as_state(state, geom.dim))
    return psi @ psi.conj().T


def partial_project(state, b_vector, geom: SystemGeometry) -> tuple[np.ndarray, float]:
    """Apply (I_A otimes <b|) to a state.

    Returns the unnormalized A-side vector and its squared norm, which is
    the Born probability of outcome b when |b> is a unit vector.
    """
    psi = geom.state_matrix(as_state(state, geom.dim))
    b = as_state(b_vector, geom.dim_b)
    phi = psi @ b.conj()
    weight = float(np.real(np.vdot(phi, phi)))
    return phi, weight


def schmidt_spectrum(state, geom: SystemGeometry) -> np.ndarray:
    """Squared Schmidt coefficients across the A|B cut, nonincreasing.

    The returned vector has length min(dim_a, dim_b) and sums to the
    squared norm of the state.
    """
    psi = geom.state_matrix(as_state(state, geom.dim))
    singular_values = np.linalg.svd(psi, compute_uv=False)
    return singular_values**2


def sample_haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector drawn from the unitarily invariant measure on C^dim."""
    if dim < 1:
        raise ContractError(f"dim must be >= 1, got {dim}")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R diagonal is rephased to be positive, which makes the QR factor
    Haar rather than merely unitary.
    """
    if dim < 1:
        raise ContractError(f"dim must be >= 1, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
