"""Projected ensembles and their distance to uniformly random states.

Measuring part B of a pure state in an orthonormal basis leaves, for each
outcome b, a conditional pure state on A with Born weight p_b.  The
ensemble of these conditional states is compared against the uniform
(Haar) ensemble through trace distances of moment operators, and a
measurement basis is scored against a sector operator through the
deviation of its sandwiched blocks from the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import MeasurementBasis
from .errors import ContractError
from .geometry import SystemGeometry
from .linalg import as_state, trace_distance
from .moments import (
    REPLICA_DIM_MAX,
    columnwise_tensor_power,
    haar_moment,
)
from .symmetries import SectorProjector

__all__ = [
    "PROB_CUTOFF",
    "ProjectedEnsemble",
    "projected_ensemble",
    "ensemble_moment",
    "delta_t",
    "delta_prime_t",
    "ViolationResult",
    "violation",
    "condition_check",
]

PROB_CUTOFF = 1e-12
STATE_NORM_ATOL = 1e-9
MOMENT_CHUNK = 4096


@dataclass
class ProjectedEnsemble:
    """Conditional states on A from measuring B, one column per outcome.

    probabilities are the raw Born weights of the kept outcomes, so they
    sum to 1 - dropped_mass; states columns are unit vectors.
    """

    probabilities: np.ndarray
    states: np.ndarray
    kept_indices: np.ndarray
    dropped_mass: float
    n_outcomes: int
    dim_a: int
    basis_family: str = "computational"

    @property
    def n_kept(self) -> int:
        return int(self.probabilities.shape[0])


def projected_ensemble(state, basis: MeasurementBasis, geom: SystemGeometry,
                       cutoff: float = PROB_CUTOFF) -> ProjectedEnsemble:
    """Measure B in the basis and collect conditional states on A.

    Outcomes with Born weight at or below cutoff are dropped and their
    total weight reported as dropped_mass.  Pass cutoff=0.0 to keep every
    outcome with strictly positive weight.
    """
    vec = as_state(state, geom.dim)
    norm_err = abs(np.linalg.norm(vec) - 1.0)
    if norm_err > STATE_NORM_ATOL:
        raise ContractError(f"state norm deviates from 1 by {norm_err:.3e}")
    if basis.dim != geom.dim_b:
        raise ContractError(
            f"basis dimension {basis.dim} does not match dim_b {geom.dim_b}"
        )
    psi = geom.state_matrix(vec)
    if basis.is_computational:
        amplitudes = psi.copy()
    elif basis.is_sparse:
        amplitudes = (basis.matrix.conj().T @ psi.T).T
    else:
        amplitudes = psi @ basis.matrix.conj()
    weights = np.einsum("ab,ab->b", amplitudes.conj(), amplitudes).real
    keep = weights > cutoff
    kept_indices = np.nonzero(keep)[0]
    kept_weights = weights[keep]
    states = amplitudes[:, keep] / np.sqrt(kept_weights)
    return ProjectedEnsemble(
        probabilities=kept_weights,
        states=states,
        kept_indices=kept_indices,
        dropped_mass=float(weights[~keep].sum()),
        n_outcomes=basis.n_vectors,
        dim_a=geom.dim_a,
        basis_family=basis.family,
    )


def ensemble_moment(ensemble: ProjectedEnsemble, t: int,
                    max_replica_dim: int = REPLICA_DIM_MAX) -> np.ndarray:
    """t-th moment of the ensemble: sum_b p_b times the t-fold tensor
    power of |phi_b><phi_b|.

    Accumulated outcome-block by outcome-block so the t-fold column powers
    never exceed a fixed working-set size.  The trace equals the kept
    probability mass.
    """
    dim_a = ensemble.dim_a
    replica_dim = dim_a**t
    if replica_dim > max_replica_dim:
        from .errors import ResourceBudgetError
        raise ResourceBudgetError(
            f"replica dimension {dim_a}**{t} = {replica_dim} exceeds {max_replica_dim}"
        )
    moment = np.zeros((replica_dim, replica_dim), dtype=np.complex128)
    n = ensemble.n_kept
    for lo in range(0, n, MOMENT_CHUNK):
        hi = min(lo + MOMENT_CHUNK, n)
        block = columnwise_tensor_power(ensemble.states[:, lo:hi], t, max_replica_dim)
        moment += (block * ensemble.probabilities[lo:hi]) @ block.conj().T
    return moment


def delta_t(state, basis: MeasurementBasis, t: int, geom: SystemGeometry,
            cutoff: float = PROB_CUTOFF) -> float:
    """Trace distance between the ensemble's t-th moment and the uniform one.

    Lies in [0, 2]; zero means the projected ensemble reproduces uniform
    random states up to the t-th moment.
    """
    ensemble = projected_ensemble(state, basis, geom, cutoff)
    moment = ensemble_moment(ensemble, t)
    return trace_distance(moment, haar_moment(geom.dim_a, t))


def delta_prime_t(state, basis: MeasurementBasis, t: int, reference: np.ndarray,
                  geom: SystemGeometry, cutoff: float = PROB_CUTOFF) -> float:
    """Trace distance between the ensemble's t-th moment and a given reference."""
    reference = np.asarray(reference, dtype=np.complex128)
    expected = (geom.dim_a**t, geom.dim_a**t)
    if reference.shape != expected:
        raise ContractError(f"reference moment must have shape {expected}, got {reference.shape}")
    ensemble = projected_ensemble(state, basis, geom, cutoff)
    moment = ensemble_moment(ensemble, t)
    return trace_distance(moment, reference)


@dataclass
class ViolationResult:
    """Per-outcome deviations of sandwiched sector blocks from the identity.

    profile[b] is the trace norm of <b| P |b> - I on A for basis vector b;
    average is the profile mean, i.e. the profile sum over the number of
    basis vectors.
    """

    average: float
    profile: np.ndarray = field(repr=False)

    @property
    def max_deviation(self) -> float:
        return float(self.profile.max())


def violation(sector: SectorProjector, basis: MeasurementBasis,
              geom: SystemGeometry) -> ViolationResult:
    """Score a basis against a sector operator.

    The ensemble projected from the sector matches the sector's own moment
    structure exactly when every sandwiched block <b| P |b> is the
    identity on A; the profile measures how far each outcome is from that.
    """
    if sector.dim != geom.dim:
        raise ContractError(
            f"sector dimension {sector.dim} does not match system dimension {geom.dim}"
        )
    if basis.dim != geom.dim_b:
        raise ContractError(
            f"basis dimension {basis.dim} does not match dim_b {geom.dim_b}"
        )
    dim_a, dim_b = geom.dim_a, geom.dim_b
    identity = np.eye(dim_a, dtype=np.complex128)
    rows = np.arange(dim_a)
    profile = np.empty(basis.n_vectors, dtype=np.float64)
    for b in range(basis.n_vectors):
        b_vec = basis.vector(b)
        # Columns of block are (I_A tensor |b>) applied to each A unit vector.
        block = np.zeros((dim_a, dim_b, dim_a), dtype=np.complex128)
        block[rows, :, rows] = b_vec
        sandwiched = sector.apply(block.reshape(geom.dim, dim_a))
        sandwiched = sandwiched.reshape(dim_a, dim_b, dim_a)
        m_b = np.einsum("b,abc->ac", b_vec.conj(), sandwiched)
        singulars = np.linalg.svd(m_b - identity, compute_uv=False)
        profile[b] = singulars.sum()
    return ViolationResult(average=float(profile.mean()), profile=profile)


def condition_check(sector: SectorProjector, basis: MeasurementBasis,
                    geom: SystemGeometry, atol: float = 1e-10) -> tuple[bool, float]:
    """Whether every sandwiched block is the identity to within atol.

    Returns (ok, worst deviation).  ok=True certifies that projecting
    sector states through this basis reproduces the sector moment
    structure exactly, independent of the state.
    """
    result = violation(sector, basis, geom)
    worst = result.max_deviation
    return bool(worst <= atol), worst
