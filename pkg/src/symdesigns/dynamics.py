"""Chaotic Ising dynamics and relaxation of projected ensembles.

The Hamiltonian is an XX-coupled chain with transverse and longitudinal
fields chosen at a standard strongly nonintegrable point,

    H = sum_i J_i X_i X_{i+1} + h_x sum_i X_i + h_y sum_i Y_i,

with h_x = (sqrt(5)+1)/4 and h_y = (sqrt(5)+5)/8.  On a ring H commutes
with the cyclic shift and with every site reflection, so evolution from
|00...0> stays in the fully symmetric sector.  Boundaries or bond noise
break those symmetries selectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.linalg
import scipy.sparse

from .bases import MeasurementBasis, computational_basis
from .ensembles import ensemble_moment, projected_ensemble
from .errors import ContractError, NumericalError, ResourceBudgetError
from .geometry import SystemGeometry
from .linalg import as_state, rng_stream, schmidt_spectrum, trace_distance
from .moments import haar_moment
from .symmetries import (
    SectorProjector,
    TranslationSector,
    sample_symmetric_state,
    translation_reflection_sector,
)

__all__ = [
    "CHAOS_FIELD_X",
    "CHAOS_FIELD_Y",
    "DENSE_EVOLVE_MAX_SITES",
    "IsingSpec",
    "IsingHamiltonian",
    "build_ising",
    "EvolutionPlan",
    "DensePropagator",
    "KrylovPropagator",
    "evolve",
    "evolve_trajectory",
    "relaxation_time_grid",
    "ScanResult",
    "deep_thermalization_scan",
    "BaselineResult",
    "rmt_baseline",
    "PowerLawFit",
    "fit_power_law",
]

CHAOS_FIELD_X = (math.sqrt(5.0) + 1.0) / 4.0
CHAOS_FIELD_Y = (math.sqrt(5.0) + 5.0) / 8.0
DENSE_EVOLVE_MAX_SITES = 12
_BOUNDARIES = ("periodic", "open", "weak_link")


@dataclass(frozen=True)
class IsingSpec:
    """Parameters of the chain; the defaults sit at the chaotic point.

    boundary selects periodic coupling, an open chain (the bond closing
    the ring removed), or a weakened closing bond.  disorder_variance > 0
    adds independent Gaussian noise of that variance to every bond
    coupling and every transverse-axis field, drawn reproducibly from
    disorder_seed.
    """

    n_sites: int
    h_x: float = CHAOS_FIELD_X
    h_y: float = CHAOS_FIELD_Y
    coupling: float = 1.0
    boundary: str = "periodic"
    weak_link_coupling: float = 0.5
    disorder_variance: float = 0.0
    disorder_seed: int | None = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise ContractError(f"need at least 2 sites, got {self.n_sites}")
        if self.boundary not in _BOUNDARIES:
            raise ContractError(f"boundary must be one of {_BOUNDARIES}, got {self.boundary!r}")
        if self.disorder_variance < 0:
            raise ContractError(f"disorder_variance must be >= 0, got {self.disorder_variance}")
        if self.disorder_variance > 0 and self.disorder_seed is None:
            raise ContractError("disorder requires disorder_seed for reproducibility")


@dataclass
class IsingHamiltonian:
    """Sparse Hamiltonian plus the realized couplings and fields."""

    spec: IsingSpec
    matrix: scipy.sparse.csr_array = field(repr=False)
    bond_couplings: np.ndarray
    site_fields_y: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.spec.n_sites

    @property
    def dim(self) -> int:
        return 2**self.spec.n_sites

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def dense(self, max_sites: int = DENSE_EVOLVE_MAX_SITES) -> np.ndarray:
        if self.n_sites > max_sites:
            raise ResourceBudgetError(
                f"dense Hamiltonian limited to {max_sites} sites, got {self.n_sites}"
            )
        return self.matrix.toarray()

    def expectation(self, state: np.ndarray) -> float:
        state = as_state(state, self.dim)
        return float(np.real(np.vdot(state, self.matrix @ state)))


def build_ising(spec: IsingSpec) -> IsingHamiltonian:
    """Assemble the sparse Hamiltonian.

    Site m (0-indexed from the most significant digit) lives on bit
    n_sites-1-m of the basis label.  Bond m couples sites m and m+1 mod n;
    bond n-1 is the one affected by the boundary choice.  With disorder,
    bond noise is drawn before field noise.
    """
    n = spec.n_sites
    dim = 2**n
    couplings = np.full(n, spec.coupling, dtype=np.float64)
    fields_y = np.full(n, spec.h_y, dtype=np.float64)
    if spec.disorder_variance > 0:
        rng = rng_stream(spec.disorder_seed)
        std = math.sqrt(spec.disorder_variance)
        couplings += std * rng.standard_normal(n)
        fields_y += std * rng.standard_normal(n)
    if spec.boundary == "open":
        couplings[n - 1] = 0.0
    elif spec.boundary == "weak_link":
        couplings[n - 1] = spec.weak_link_coupling

    labels = np.arange(dim, dtype=np.int64)
    rows, cols, data = [], [], []
    site_mask = [1 << (n - 1 - m) for m in range(n)]
    for m in range(n):
        mask = site_mask[m] | site_mask[(m + 1) % n]
        if couplings[m] != 0.0:
            rows.append(labels ^ mask)
            cols.append(labels)
            data.append(np.full(dim, couplings[m], dtype=np.complex128))
    for m in range(n):
        bits = (labels >> (n - 1 - m)) & 1
        rows.append(labels ^ site_mask[m])
        cols.append(labels)
        data.append(spec.h_x + 1j * fields_y[m] * (1.0 - 2.0 * bits))
    matrix = scipy.sparse.coo_array(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    return IsingHamiltonian(spec=spec, matrix=matrix,
                            bond_couplings=couplings, site_fields_y=fields_y)


@dataclass(frozen=True)
class EvolutionPlan:
    """How to carry a state through time.

    method auto uses dense diagonalization up to 8 sites and the Krylov
    stepper beyond.  local_tol bounds the a posteriori error estimate of
    each accepted Krylov substep.
    """

    method: str = "auto"
    krylov_dim: int = 30
    local_tol: float = 1e-9
    dt_max: float = 0.5

    def __post_init__(self):
        if self.method not in ("auto", "dense", "krylov"):
            raise ContractError(f"unknown evolution method {self.method!r}")
        if self.krylov_dim < 2:
            raise ContractError(f"krylov_dim must be >= 2, got {self.krylov_dim}")


class DensePropagator:
    """Exact evolution through one full diagonalization; small systems only."""

    def __init__(self, ham: IsingHamiltonian, initial_state: np.ndarray):
        dense = ham.dense()
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(dense)
        self._coeffs = self.eigenvectors.conj().T @ as_state(initial_state, ham.dim)

    def state_at(self, tau: float) -> np.ndarray:
        phases = np.exp(-1j * tau * self.eigenvalues)
        return self.eigenvectors @ (phases * self._coeffs)


class KrylovPropagator:
    """Adaptive short-time stepper in Krylov subspaces.

    Each substep builds a fully reorthogonalized Lanczos basis and applies
    the tridiagonal exponential; the residual coupling out of the subspace
    gives the error estimate.  Steps that miss local_tol are halved.
    """

    def __init__(self, ham: IsingHamiltonian, initial_state: np.ndarray,
                 krylov_dim: int = 30, local_tol: float = 1e-9, dt_max: float = 0.5):
        self.ham = ham
        self.state = as_state(initial_state, ham.dim).copy()
        self.tau = 0.0
        self.krylov_dim = krylov_dim
        self.local_tol = local_tol
        self.dt = dt_max
        self.dt_max = dt_max
        self.steps_taken = 0

    def _step_once(self, dt: float) -> tuple[np.ndarray, float]:
        """One Lanczos exponential step; returns (new state, error estimate)."""
        m = self.krylov_dim
        dim = self.state.shape[0]
        basis = np.empty((m, dim), dtype=np.complex128)
        alphas = np.empty(m)
        betas = np.zeros(m)
        norm0 = float(np.linalg.norm(self.state))
        if norm0 < 1e-12:
            raise NumericalError("Krylov step started from a zero state")
        basis[0] = self.state / norm0
        work = self.ham.apply(basis[0])
        alphas[0] = float(np.real(np.vdot(basis[0], work)))
        work = work - alphas[0] * basis[0]
        m_eff = m
        residual = 0.0
        for j in range(1, m + 1):
            # Full reorthogonalization keeps the basis orthonormal in
            # finite precision, at O(m * dim) per vector.
            overlaps = basis[:j].conj() @ work
            work = work - basis[:j].T @ overlaps
            beta = float(np.linalg.norm(work))
            if j == m:
                residual = beta
                break
            betas[j] = beta
            if beta < 1e-12:
                m_eff = j
                residual = 0.0
                break
            basis[j] = work / beta
            work = self.ham.apply(basis[j]) - beta * basis[j - 1]
            alphas[j] = float(np.real(np.vdot(basis[j], work)))
            work = work - alphas[j] * basis[j]
        eigenvalues, eigenvectors = scipy.linalg.eigh_tridiagonal(
            alphas[:m_eff], betas[1:m_eff]
        )
        coeffs = eigenvectors @ (np.exp(-1j * dt * eigenvalues) * eigenvectors[0, :])
        new_state = norm0 * (basis[:m_eff].T @ coeffs)
        error = residual * abs(coeffs[-1])
        return new_state, error

    def advance_to(self, tau_target: float):
        if tau_target < self.tau - 1e-12:
            raise ContractError(
                f"cannot evolve backwards: at tau={self.tau}, asked for {tau_target}"
            )
        while self.tau < tau_target - 1e-12:
            dt = min(self.dt, tau_target - self.tau)
            new_state, error = self._step_once(dt)
            if error > self.local_tol:
                self.dt = dt / 2.0
                if self.dt < 1e-7:
                    raise NumericalError(
                        f"Krylov step failed to converge at tau={self.tau}: "
                        f"dt={dt:.3e}, error estimate {error:.3e}"
                    )
                continue
            self.state = new_state
            self.tau += dt
            self.steps_taken += 1
            if error < 0.01 * self.local_tol and dt >= self.dt - 1e-15:
                self.dt = min(self.dt * 1.5, self.dt_max)


def _default_initial(ham: IsingHamiltonian) -> np.ndarray:
    state = np.zeros(ham.dim, dtype=np.complex128)
    state[0] = 1.0
    return state


def evolve(ham: IsingHamiltonian, tau: float, initial_state=None,
           plan: EvolutionPlan | None = None) -> np.ndarray:
    """State at a single time, starting from |00...0> unless given."""
    for _, state in evolve_trajectory(ham, [tau], initial_state, plan):
        return state
    raise ContractError("empty time list")


def evolve_trajectory(ham: IsingHamiltonian, times, initial_state=None,
                      plan: EvolutionPlan | None = None) -> Iterator[tuple[float, np.ndarray]]:
    """Yield (tau, state) along nondecreasing times, starting from |00...0>.

    States are yielded in time order so long trajectories never hold more
    than one statevector at once.
    """
    plan = plan or EvolutionPlan()
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ContractError("times must be nonnegative")
    if any(b < a - 1e-12 for a, b in zip(times, times[1:])):
        raise ContractError("times must be nondecreasing")
    initial = _default_initial(ham) if initial_state is None else as_state(initial_state, ham.dim)
    method = plan.method
    if method == "auto":
        method = "dense" if ham.n_sites <= 8 else "krylov"
    if method == "dense":
        prop = DensePropagator(ham, initial)
        for t in times:
            yield t, prop.state_at(t)
    else:
        stepper = KrylovPropagator(ham, initial, plan.krylov_dim, plan.local_tol, plan.dt_max)
        for t in times:
            stepper.advance_to(t)
            yield t, stepper.state.copy()


def relaxation_time_grid(log_start: float = 0.1, log_stop: float = 10.0, n_log: int = 25,
                         linear_start: float = 12.0, linear_stop: float = 50.0,
                         linear_step: float = 2.0) -> np.ndarray:
    """Log-spaced early times joined to a linear late-time tail."""
    early = np.geomspace(log_start, log_stop, n_log)
    late = np.arange(linear_start, linear_stop + 0.5 * linear_step, linear_step)
    return np.concatenate([early, late])


@dataclass
class ScanResult:
    """Relaxation curves of one evolution.

    deltas maps each moment order t to the trace distance from the uniform
    moment at every time.  schmidt_identity_gap records, per time, the
    difference between the t=1 distance computed from the ensemble and the
    same quantity computed directly from the Schmidt spectrum across the
    cut; the two agree for any complete product measurement of B.
    """

    times: np.ndarray
    t_values: tuple[int, ...]
    deltas: dict[int, np.ndarray]
    schmidt_delta1: np.ndarray
    schmidt_identity_gap: np.ndarray
    energy: np.ndarray
    norm_drift: np.ndarray
    dropped_mass: np.ndarray

    def long_time_average(self, t: int, tail_fraction: float = 0.3) -> float:
        """Mean of the last tail_fraction of sampled times for moment order t."""
        values = self.deltas[t]
        n_tail = max(1, int(round(tail_fraction * len(values))))
        return float(values[-n_tail:].mean())


def deep_thermalization_scan(ham: IsingHamiltonian, geom: SystemGeometry,
                             t_values=(1, 2, 3), times=None,
                             basis: MeasurementBasis | None = None,
                             cutoff: float = 0.0,
                             plan: EvolutionPlan | None = None,
                             initial_state=None) -> ScanResult:
    """Track moment distances of the projected ensemble along an evolution.

    cutoff defaults to 0.0 here, unlike one-shot ensemble calls: at early
    times almost all outcome weights are tiny, and dropping them would
    bias the distances by more than the evolution error.
    """
    if geom.n_total != ham.n_sites or geom.local_dim != 2:
        raise ContractError("geometry does not match the Hamiltonian")
    times = relaxation_time_grid() if times is None else np.asarray(times, dtype=np.float64)
    basis = computational_basis(geom.n_b) if basis is None else basis
    t_values = tuple(int(t) for t in t_values)
    uniform = {t: haar_moment(geom.dim_a, t) for t in t_values}
    deltas = {t: np.empty(len(times)) for t in t_values}
    schmidt_delta1 = np.empty(len(times))
    gap = np.empty(len(times))
    energy = np.empty(len(times))
    norm_drift = np.empty(len(times))
    dropped = np.empty(len(times))
    for i, (tau, raw_state) in enumerate(
        evolve_trajectory(ham, times, initial_state, plan)
    ):
        norm = float(np.linalg.norm(raw_state))
        norm_drift[i] = abs(norm - 1.0)
        # The exact flow is unitary; renormalizing strips accumulated
        # floating-point drift before the ensemble contract checks norms.
        state = raw_state / norm
        energy[i] = ham.expectation(state)
        ensemble = projected_ensemble(state, basis, geom, cutoff)
        dropped[i] = ensemble.dropped_mass
        for t in t_values:
            moment = ensemble_moment(ensemble, t)
            deltas[t][i] = trace_distance(moment, uniform[t])
        spectrum = schmidt_spectrum(state, geom)
        schmidt_delta1[i] = float(np.abs(spectrum - 1.0 / geom.dim_a).sum())
        gap[i] = abs(schmidt_delta1[i] - deltas[1][i]) if 1 in deltas else np.nan
    return ScanResult(
        times=times, t_values=t_values, deltas=deltas,
        schmidt_delta1=schmidt_delta1, schmidt_identity_gap=gap,
        energy=energy, norm_drift=norm_drift, dropped_mass=dropped,
    )


@dataclass
class BaselineResult:
    """Moment distances of random sector states, the floor dynamics reach."""

    t_values: tuple[int, ...]
    samples: dict[int, np.ndarray]

    def mean(self, t: int) -> float:
        return float(self.samples[t].mean())

    def stderr(self, t: int) -> float:
        values = self.samples[t]
        if len(values) < 2:
            return float("nan")
        return float(values.std(ddof=1) / math.sqrt(len(values)))


def rmt_baseline(geom: SystemGeometry, sector: str = "translation_reflection",
                 k: int = 0, t_values=(1, 2, 3), n_samples: int = 10,
                 seed: int = 0, basis: MeasurementBasis | None = None,
                 cutoff: float = 0.0) -> BaselineResult:
    """Ensemble distances for Haar states of a symmetry sector.

    sector is "translation" for a single momentum sector or
    "translation_reflection" for the fully symmetric sector that chaotic
    ring evolution from |00...0> explores.
    """
    if sector == "translation":
        projector: SectorProjector = TranslationSector(geom.n_total, geom.local_dim, k=k)
    elif sector == "translation_reflection":
        projector = translation_reflection_sector(geom.n_total, geom.local_dim, k=k)
    else:
        raise ContractError(f"unknown baseline sector {sector!r}")
    basis = computational_basis(geom.n_b) if basis is None else basis
    t_values = tuple(int(t) for t in t_values)
    uniform = {t: haar_moment(geom.dim_a, t) for t in t_values}
    samples = {t: np.empty(n_samples) for t in t_values}
    for i in range(n_samples):
        rng = rng_stream(seed, i)
        sample = sample_symmetric_state(projector, rng, source_seed=seed)
        ensemble = projected_ensemble(sample.state, basis, geom, cutoff)
        for t in t_values:
            moment = ensemble_moment(ensemble, t)
            samples[t][i] = trace_distance(moment, uniform[t])
    return BaselineResult(t_values=t_values, samples=samples)


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of log(value) against log(time)."""

    exponent: float
    exponent_stderr: float
    amplitude: float
    r_squared: float
    n_points: int
    window: tuple[float, float]


def fit_power_law(times, values, window: tuple[float, float] = (1.0, 4.0)) -> PowerLawFit:
    """Fit value = amplitude * time**exponent inside the window.

    Needs at least 4 strictly positive samples with times inside the
    closed window; the stderr comes from the linear fit's covariance.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.shape != values.shape:
        raise ContractError(f"shape mismatch: {times.shape} vs {values.shape}")
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 4:
        raise ContractError(
            f"need at least 4 samples in window [{lo}, {hi}], found {int(mask.sum())}"
        )
    sel_t = times[mask]
    sel_v = values[mask]
    if (sel_v <= 0).any():
        raise ContractError("power-law fit requires strictly positive values")
    log_t = np.log(sel_t)
    log_v = np.log(sel_v)
    coeffs, cov = np.polyfit(log_t, log_v, 1, cov=True)
    slope, intercept = coeffs
    predicted = slope * log_t + intercept
    ss_res = float(((log_v - predicted) ** 2).sum())
    ss_tot = float(((log_v - log_v.mean()) ** 2).sum())
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(
        exponent=float(slope),
        exponent_stderr=float(np.sqrt(cov[0, 0])),
        amplitude=float(np.exp(intercept)),
        r_squared=r_squared,
        n_points=int(mask.sum()),
        window=(float(lo), float(hi)),
    )
