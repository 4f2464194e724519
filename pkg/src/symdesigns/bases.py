"""Measurement bases on the measured part of the chain.

A MeasurementBasis holds an orthonormal set of vectors on B as matrix
columns, ordered deterministically so runs reproduce bit for bit.  The
computational basis is kept implicit (no dense identity matrix) because it
is the one family used at sizes where the dense matrix would not fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import ContractError, NumericalError, ResourceBudgetError
from .linalg import rng_stream, sample_haar_unitary
from .symmetries import _site_perm_indices, _translation_src

__all__ = [
    "BASIS_DENSE_MAX_DIM",
    "BASIS_GRAM_ATOL",
    "MeasurementBasis",
    "computational_basis",
    "sigma_x_basis",
    "local_product_basis",
    "global_haar_basis",
    "mixed_last_site_basis",
    "translation_eigenbasis",
    "custom_basis",
    "build_basis",
]

BASIS_DENSE_MAX_DIM = 2**12
BASIS_GRAM_ATOL = 1e-9
EIGENBASIS_MAX_SITES = 12
ORBIT_EIGENBASIS_MAX_SITES = 18
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


@dataclass
class MeasurementBasis:
    """Orthonormal measurement vectors on B, stored as matrix columns.

    A None matrix means the computational basis: vector b is the b-th
    standard unit vector, kept implicit so large systems never materialize
    an identity matrix.
    """

    family: str
    dim: int
    params: dict = field(default_factory=dict)
    _matrix: np.ndarray | scipy.sparse.csc_array | None = field(default=None, repr=False)

    @property
    def is_computational(self) -> bool:
        return self._matrix is None

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self._matrix)

    @property
    def n_vectors(self) -> int:
        return self.dim if self._matrix is None else self._matrix.shape[1]

    @property
    def matrix(self) -> np.ndarray | scipy.sparse.csc_array:
        """Column matrix of basis vectors; sparse for large orbit bases."""
        if self._matrix is None:
            if self.dim > BASIS_DENSE_MAX_DIM:
                raise ResourceBudgetError(
                    f"dense form of a computational basis of dim {self.dim} "
                    f"exceeds budget {BASIS_DENSE_MAX_DIM}"
                )
            return np.eye(self.dim, dtype=np.complex128)
        return self._matrix

    def vector(self, index: int) -> np.ndarray:
        if not 0 <= index < self.n_vectors:
            raise ContractError(f"basis index {index} out of range 0..{self.n_vectors - 1}")
        if self._matrix is None:
            out = np.zeros(self.dim, dtype=np.complex128)
            out[index] = 1.0
            return out
        if self.is_sparse:
            return self._matrix[:, [index]].toarray().ravel()
        return self._matrix[:, index].copy()

    def gram_deviation(self) -> float:
        """Max entrywise deviation of the Gram matrix from the identity."""
        if self._matrix is None:
            return 0.0
        if self.is_sparse:
            gram = (self._matrix.conj().T @ self._matrix).tocsr()
            gram = gram - scipy.sparse.identity(self.n_vectors, format="csr")
            return float(np.abs(gram.data).max()) if gram.nnz else 0.0
        gram = self._matrix.conj().T @ self._matrix
        return float(np.abs(gram - np.eye(self.n_vectors)).max())

    def describe(self) -> dict:
        return {"family": self.family, "dim": self.dim, **self.params}


def _checked(basis: MeasurementBasis, atol: float = BASIS_GRAM_ATOL) -> MeasurementBasis:
    dev = basis.gram_deviation()
    if dev > atol:
        raise NumericalError(f"{basis.family} basis is not orthonormal: deviation {dev:.3e}")
    return basis


def _check_budget(n_sites: int, local_dim: int) -> int:
    dim = local_dim**n_sites
    if dim > BASIS_DENSE_MAX_DIM:
        raise ResourceBudgetError(
            f"dense basis of dim {dim} exceeds budget {BASIS_DENSE_MAX_DIM}"
        )
    return dim


def computational_basis(n_sites: int, local_dim: int = 2) -> MeasurementBasis:
    """Product basis of local states |0>, |1>, ..., ordered by integer label."""
    return MeasurementBasis(family="computational", dim=local_dim**n_sites)


def _kron_chain(factors: list[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def sigma_x_basis(n_sites: int) -> MeasurementBasis:
    """Product basis of X eigenstates on every measured qubit.

    Ordered by binary counting with the +1 eigenstate in the 0 slot, so
    column b is the Hadamard transform of computational column b.
    """
    _check_budget(n_sites, 2)
    matrix = _kron_chain([_HADAMARD] * n_sites)
    return _checked(MeasurementBasis(family="sigma_x", dim=2**n_sites, _matrix=matrix))


def local_product_basis(n_sites: int, local_dim: int = 2,
                        seed: int | None = None,
                        unitaries: list[np.ndarray] | None = None) -> MeasurementBasis:
    """Product basis from one random (or given) unitary per measured site.

    Column b is the tensor product of the per-site columns selected by the
    digits of b.  Pass unitaries to pin the rotations, for example the
    same single-qubit unitary at every site.
    """
    dim = _check_budget(n_sites, local_dim)
    if unitaries is None:
        if seed is None:
            raise ContractError("local_product_basis needs a seed or explicit unitaries")
        rng = rng_stream(seed)
        unitaries = [sample_haar_unitary(local_dim, rng) for _ in range(n_sites)]
    if len(unitaries) != n_sites:
        raise ContractError(f"expected {n_sites} unitaries, got {len(unitaries)}")
    factors = []
    for u in unitaries:
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (local_dim, local_dim):
            raise ContractError(f"per-site unitary has shape {u.shape}")
        factors.append(u)
    matrix = _kron_chain(factors)
    params = {"seed": seed} if seed is not None else {}
    return _checked(MeasurementBasis(family="local_product", dim=dim,
                                     params=params, _matrix=matrix))


def global_haar_basis(n_sites: int, seed: int, local_dim: int = 2) -> MeasurementBasis:
    """Columns of a single Haar unitary on all of B: a nonlocal basis."""
    dim = _check_budget(n_sites, local_dim)
    matrix = sample_haar_unitary(dim, rng_stream(seed))
    return _checked(MeasurementBasis(family="global_haar", dim=dim,
                                     params={"seed": seed}, _matrix=matrix))


def _interpolated_qubit_basis(alpha: float) -> np.ndarray:
    """Eigenbasis of alpha * Z + (1 - alpha) * X, descending eigenvalue.

    At alpha = 0 this is {|+>, |->}; at alpha = 1 it is {|0>, |1>}.  Each
    column's first significant entry is made real positive so the basis is
    a deterministic function of alpha.
    """
    operator = np.array(
        [[alpha, 1.0 - alpha], [1.0 - alpha, -alpha]], dtype=np.complex128
    )
    eigenvalues, vectors = np.linalg.eigh(operator)
    vectors = vectors[:, ::-1]  # descending eigenvalue
    for col in range(2):
        pivot = vectors[np.argmax(np.abs(vectors[:, col]) > 1e-12), col]
        if abs(pivot) > 0:
            vectors[:, col] *= np.conj(pivot) / abs(pivot)
    return vectors


def mixed_last_site_basis(n_sites: int, alpha: float) -> MeasurementBasis:
    """X-eigenstate products with the final measured site interpolated.

    Every site but the last is measured in the X basis; the last site uses
    the eigenbasis of alpha * Z + (1 - alpha) * X.  alpha = 0 reduces to
    the all-X basis, alpha = 1 keeps the last site computational.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError(f"alpha must lie in [0, 1], got {alpha}")
    dim = _check_budget(n_sites, 2)
    factors = [_HADAMARD] * (n_sites - 1) + [_interpolated_qubit_basis(float(alpha))]
    matrix = _kron_chain(factors)
    return _checked(MeasurementBasis(family="mixed_last_site", dim=dim,
                                     params={"alpha": float(alpha)}, _matrix=matrix))


def _translation_eigenvectors_by_orbit(n_sites: int, local_dim: int, power: int):
    """Eigenvectors of the cyclic shift to the given power from its orbits.

    Each orbit of length L under the shift yields L eigenvectors with
    eigenvalue phases m/L, m = 0..L-1.  Within an orbit the discrete
    Fourier coefficients run along the orbit starting from its smallest
    label.  Vectors are ordered by exact phase fraction, then by smallest
    label, making the basis deterministic.  Sparse above the dense budget:
    each vector touches at most n_sites labels.
    """
    dim = local_dim**n_sites
    _, label = _site_perm_indices(n_sites, local_dim, _translation_src(n_sites, power % n_sites))
    seen = np.zeros(dim, dtype=bool)
    entries = []  # (phase fraction, orbit representative, labels, coefficients)
    for start in range(dim):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        nxt = int(label[start])
        while nxt != start:
            orbit.append(nxt)
            seen[nxt] = True
            nxt = int(label[nxt])
        length = len(orbit)
        orbit_arr = np.array(orbit, dtype=np.int64)
        for m in range(length):
            coeffs = np.exp(-2j * np.pi * m * np.arange(length) / length) / np.sqrt(length)
            entries.append((Fraction(m, length), start, orbit_arr, coeffs))
    entries.sort(key=lambda item: (item[0], item[1]))
    if dim <= BASIS_DENSE_MAX_DIM:
        vectors = np.zeros((dim, dim), dtype=np.complex128)
        for col, (_, _, labels, coeffs) in enumerate(entries):
            vectors[labels, col] = coeffs
        return vectors
    indptr = np.zeros(dim + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(item[2]) for item in entries])
    indices = np.concatenate([item[2] for item in entries])
    data = np.concatenate([item[3] for item in entries])
    return scipy.sparse.csc_array((data, indices, indptr), shape=(dim, dim))


def translation_eigenbasis(n_sites: int, power: int = 1, local_dim: int = 2,
                           insertion_seed: int | None = None) -> MeasurementBasis:
    """Eigenbasis of the shift on B raised to a power, optionally scrambled.

    Without insertion the basis comes from shift orbits and is exact; its
    sparse form keeps it usable well past the dense budget.  With
    insertion_seed set, a Haar single-site unitary is applied to B's
    first site before the shift and the eigenbasis of that composite is
    computed densely; columns are ordered by eigenvalue phase, then by the
    smallest index carrying support.
    """
    params = {"power": int(power)}
    if insertion_seed is None:
        if n_sites > ORBIT_EIGENBASIS_MAX_SITES:
            raise ResourceBudgetError(
                f"shift eigenbasis limited to {ORBIT_EIGENBASIS_MAX_SITES} sites, "
                f"got {n_sites}"
            )
        dim = local_dim**n_sites
        matrix = _translation_eigenvectors_by_orbit(n_sites, local_dim, power)
        return _checked(MeasurementBasis(family="shift_eigenbasis", dim=dim,
                                         params=params, _matrix=matrix))
    if n_sites > EIGENBASIS_MAX_SITES:
        raise ResourceBudgetError(
            f"shift eigenbasis with insertion limited to {EIGENBASIS_MAX_SITES} "
            f"sites, got {n_sites}"
        )
    dim = _check_budget(n_sites, local_dim)
    params["insertion_seed"] = int(insertion_seed)
    shift = np.zeros((dim, dim), dtype=np.complex128)
    _, label = _site_perm_indices(n_sites, local_dim, _translation_src(n_sites, power % n_sites))
    shift[label, np.arange(dim)] = 1.0
    u_site = sample_haar_unitary(local_dim, rng_stream(insertion_seed))
    composite = np.kron(u_site, np.eye(dim // local_dim, dtype=np.complex128)) @ shift
    # A unitary is normal, so its Schur form is diagonal with orthonormal
    # Schur vectors even when eigenvalues collide.
    triangular, vectors = scipy.linalg.schur(composite, output="complex")
    eigenvalues = np.diagonal(triangular)
    off_diag = np.abs(triangular - np.diag(eigenvalues)).max()
    if off_diag > 1e-9:
        raise NumericalError(f"Schur form of a unitary was not diagonal: {off_diag:.3e}")
    phases = np.mod(np.angle(eigenvalues) / (2.0 * np.pi), 1.0)
    phases = np.round(phases, 12) % 1.0
    support = [int(np.argmax(np.abs(vectors[:, c]) > 1e-8)) for c in range(dim)]
    order = sorted(range(dim), key=lambda c: (phases[c], support[c]))
    matrix = vectors[:, order]
    return _checked(MeasurementBasis(family="shift_eigenbasis", dim=dim,
                                     params=params, _matrix=matrix))


def custom_basis(matrix, label: str = "custom") -> MeasurementBasis:
    """Wrap explicit orthonormal columns, validating the Gram matrix."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractError(f"expected square column matrix, got shape {matrix.shape}")
    return _checked(MeasurementBasis(family=label, dim=matrix.shape[0], _matrix=matrix))


def build_basis(family: str, n_sites: int, local_dim: int = 2, **params) -> MeasurementBasis:
    """Construct a measurement basis family by name.

    Families: computational, sigma_x, local_product (seed), global_haar
    (seed), mixed_last_site (alpha), shift_eigenbasis (power,
    insertion_seed), custom (matrix).
    """
    if family == "computational":
        _reject_unknown(params, set())
        return computational_basis(n_sites, local_dim)
    if family == "sigma_x":
        _reject_unknown(params, set())
        if local_dim != 2:
            raise ContractError("sigma_x basis is defined for qubits only")
        return sigma_x_basis(n_sites)
    if family == "local_product":
        _reject_unknown(params, {"seed", "unitaries"})
        return local_product_basis(n_sites, local_dim, **params)
    if family == "global_haar":
        _reject_unknown(params, {"seed"})
        if "seed" not in params:
            raise ContractError("global_haar basis requires a seed")
        return global_haar_basis(n_sites, params["seed"], local_dim)
    if family == "mixed_last_site":
        _reject_unknown(params, {"alpha"})
        if local_dim != 2:
            raise ContractError("mixed_last_site basis is defined for qubits only")
        if "alpha" not in params:
            raise ContractError("mixed_last_site basis requires alpha")
        return mixed_last_site_basis(n_sites, params["alpha"])
    if family == "shift_eigenbasis":
        _reject_unknown(params, {"power", "insertion_seed"})
        return translation_eigenbasis(n_sites, local_dim=local_dim, **params)
    if family == "custom":
        _reject_unknown(params, {"matrix"})
        if "matrix" not in params:
            raise ContractError("custom basis requires an explicit matrix")
        return custom_basis(params["matrix"])
    raise ContractError(f"unknown basis family {family!r}")


def _reject_unknown(params: dict, allowed: set):
    unknown = set(params) - allowed
    if unknown:
        raise ContractError(f"unknown basis parameters {sorted(unknown)}")
