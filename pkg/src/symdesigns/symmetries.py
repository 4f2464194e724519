"""Symmetry sectors of a qudit ring, applied without dense matrices.

A sector operator here is an unnormalized sum of symmetry unitaries

    P = sum_g chi(g) U_g,      P @ P = scale * P,

so P / scale is the orthogonal projector onto the sector and
rank = trace(P) / scale.  All operators act on full-system vectors (or on
batches stacked as columns) through index gathers, so memory stays at a
few copies of the state even when a dense matrix would not fit.

Conventions: translate moves the last digit to the front,
T |i_1 i_2 ... i_N> = |i_N i_1 ... i_{N-1}>, and a reflection about
position m0 sends digit position m to (2*m0 - m) mod N.  Positions are
0-indexed from the most significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    ContractError,
    EmptyProjectionError,
    NumericalError,
    ResourceBudgetError,
)
from .geometry import digit_table, index_weights
from .linalg import as_state, sample_haar_state

__all__ = [
    "DENSE_MAX_DIM",
    "PROJECTION_MIN_NORM",
    "RANK_INTEGRALITY_ATOL",
    "translate",
    "spin_flip",
    "reflect",
    "translation_operator",
    "site_permutation_operator",
    "SectorProjector",
    "TranslationSector",
    "ParityFlipSector",
    "ReflectionSector",
    "ChargeSector",
    "CompositeSector",
    "translation_reflection_sector",
    "build_projector",
    "sector_trace",
    "sector_rank",
    "SymmetricStateSample",
    "project_state",
    "sample_symmetric_state",
    "sample_t_invariant_unitary",
    "TranslationPowerTrace",
    "partial_trace_translation_power",
]

DENSE_MAX_DIM = 4096
PROJECTION_MIN_NORM = 1e-10
RANK_INTEGRALITY_ATOL = 1e-6
COMMUTANT_MAX_DIM = 1024


# --- site permutations as index maps -----------------------------------

@lru_cache(maxsize=None)
def _site_perm_indices(n_sites: int, local_dim: int, src: tuple[int, ...]):
    """Index maps of the unitary that permutes digit positions.

    src defines the action digit-wise: out_digit[m] = in_digit[src[m]].
    Returns (gather, label) with (U psi)[y] = psi[gather[y]] and
    U e_x = e_[label[x]].
    """
    if sorted(src) != list(range(n_sites)):
        raise ContractError(f"src must be a permutation of 0..{n_sites - 1}, got {src}")
    table = digit_table(n_sites, local_dim)
    weights = index_weights(n_sites, local_dim)
    src_arr = np.asarray(src)
    gather = table @ (local_dim ** (n_sites - 1 - src_arr))
    label = table[:, src_arr] @ weights
    return gather, label


def _translation_src(n_sites: int, power: int) -> tuple[int, ...]:
    return tuple((m - power) % n_sites for m in range(n_sites))


def _reflection_src(n_sites: int, axis: int) -> tuple[int, ...]:
    # axis = 2*m0 for a reflection about position m0; odd axis values give
    # the bond-centered reflections that exist for even rings.
    return tuple((axis - m) % n_sites for m in range(n_sites))


def translate(state, n_sites: int, local_dim: int = 2, power: int = 1) -> np.ndarray:
    """Cyclic shift of digit positions, last digit to the front, power times."""
    arr = np.asarray(state, dtype=np.complex128)
    gather, _ = _site_perm_indices(n_sites, local_dim, _translation_src(n_sites, power % n_sites))
    return arr[gather]

def spin_flip(state) -> np.ndarray:
    """All-site spin flip for qubits: |0> <-> |1> everywhere.

    Complementing every bit reverses the integer ordering, so this is an
    index reversal.
    """
    arr = np.asarray(state, dtype=np.complex128)
    return arr[::-1].copy()


def reflect(state, n_sites: int, local_dim: int = 2, site: int | None = 0,
            mirror: bool = False) -> np.ndarray:
    """Reflection of digit positions, either about a site or the full mirror.

    With mirror=True the digit string is reversed (position m to N-1-m).
    Otherwise the reflection fixes the given 0-indexed position.
    """
    arr = np.asarray(state, dtype=np.complex128)
    axis = (n_sites - 1) if mirror else (2 * (site % n_sites)) % n_sites
    gather, _ = _site_perm_indices(n_sites, local_dim, _reflection_src(n_sites, axis))
    return arr[gather]


def site_permutation_operator(n_sites: int, local_dim: int, src,
                              max_dim: int = DENSE_MAX_DIM) -> np.ndarray:
    """Dense matrix of the digit-position permutation out[m] = in[src[m]]."""
    dim = local_dim**n_sites
    if dim > max_dim:
        raise ResourceBudgetError(f"dense operator of dim {dim} exceeds budget {max_dim}")
    _, label = _site_perm_indices(n_sites, local_dim, tuple(src))
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[label, np.arange(dim)] = 1.0
    return matrix


def translation_operator(n_sites: int, local_dim: int = 2, power: int = 1,
                         max_dim: int = DENSE_MAX_DIM) -> np.ndarray:
    """Dense matrix of the cyclic shift, mostly for small-system checks."""
    return site_permutation_operator(
        n_sites, local_dim, _translation_src(n_sites, power % n_sites), max_dim
    )


def _cycle_count(src: tuple[int, ...]) -> int:
    seen = [False] * len(src)
    cycles = 0
    for start in range(len(src)):
        if seen[start]:
            continue
        cycles += 1
        m = start
        while not seen[m]:
            seen[m] = True
            m = src[m]
    return cycles


# --- sector projectors --------------------------------------------------

class SectorProjector:
    """Base class: an unnormalized sector operator with P @ P = scale * P."""

    kind = "abstract"

    def __init__(self, n_sites: int, local_dim: int, scale: float | None, params: dict):
        if n_sites < 1:
            raise ContractError(f"n_sites must be >= 1, got {n_sites}")
        self.n_sites = int(n_sites)
        self.local_dim = int(local_dim)
        self.scale = scale
        self.params = dict(params)

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    def apply(self, arr: np.ndarray) -> np.ndarray:
        """Apply P to a vector of length dim or to columns of a (dim, k) array."""
        raise NotImplementedError

    def dense(self, max_dim: int = DENSE_MAX_DIM) -> np.ndarray:
        if self.dim > max_dim:
            raise ResourceBudgetError(f"dense sector of dim {self.dim} exceeds budget {max_dim}")
        return self.apply(np.eye(self.dim, dtype=np.complex128))

    def trace(self) -> complex:
        raise NotImplementedError

    def rank(self) -> int:
        """trace / scale, required to land on an integer."""
        if self.scale is None:
            raise ContractError(f"{self.kind} sector has no established idempotency scale")
        value = complex(self.trace()) / self.scale
        if abs(value.imag) > RANK_INTEGRALITY_ATOL:
            raise NumericalError(f"sector rank has imaginary part {value.imag:.3e}")
        nearest = round(value.real)
        if abs(value.real - nearest) > RANK_INTEGRALITY_ATOL:
            raise NumericalError(f"sector rank {value.real!r} is not within tolerance of an integer")
        return int(nearest)

    def charge_checks(self) -> list[tuple[str, "callable", complex]]:
        """(label, unitary apply, eigenvalue) triples a projected state must satisfy."""
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind, "n_sites": self.n_sites, "local_dim": self.local_dim,
                **self.params}


class TranslationSector(SectorProjector):
    """Momentum sector: P = sum_j exp(2 pi i j k / N) T^j, scale N."""

    kind = "translation"

    def __init__(self, n_sites: int, local_dim: int = 2, k: int = 0):
        k = int(k) % n_sites
        super().__init__(n_sites, local_dim, float(n_sites), {"k": k})
        self.k = k
        self._gathers = [
            _site_perm_indices(n_sites, local_dim, _translation_src(n_sites, j))[0]
            for j in range(n_sites)
        ]
        self._coeffs = np.exp(2j * np.pi * self.k * np.arange(n_sites) / n_sites)

    def apply(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.complex128)
        out = np.zeros_like(arr)
        for coeff, gather in zip(self._coeffs, self._gathers):
            out += coeff * arr[gather]
        return out

    def trace(self) -> complex:
        n, d = self.n_sites, self.local_dim
        return complex(sum(
            np.exp(2j * np.pi * self.k * j / n) * d ** math.gcd(n, j) for j in range(n)
        ))

    def charge_checks(self):
        gather = self._gathers[1]
        eig = np.exp(-2j * np.pi * self.k / self.n_sites)
        return [("translation", lambda v: np.asarray(v)[gather], eig)]


class ParityFlipSector(SectorProjector):
    """Global spin-flip sector for qubits: P = I + (-1)^parity X...X, scale 2."""

    kind = "parity_flip"

    def __init__(self, n_sites: int, local_dim: int = 2, parity: int = 0):
        if local_dim != 2:
            raise ContractError("the spin-flip sector is defined for qubits only")
        parity = int(parity) % 2
        super().__init__(n_sites, local_dim, 2.0, {"parity": parity})
        self.parity = parity
        self.sign = 1.0 if parity == 0 else -1.0

    def apply(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.complex128)
        return arr + self.sign * arr[::-1]

    def trace(self) -> complex:
        # The flip complements every bit, which has no fixed basis state.
        return complex(self.dim)

    def charge_checks(self):
        return [("spin_flip", lambda v: np.asarray(v)[::-1], complex(self.sign))]


class ReflectionSector(SectorProjector):
    """Reflection sector: P = I + sign * R, scale 2.

    site selects the reflection fixing that 0-indexed digit position;
    mirror=True uses the full string reversal instead, which for even rings
    is the bond-centered reflection.
    """

    kind = "reflection"

    def __init__(self, n_sites: int, local_dim: int = 2, site: int = 0,
                 sign: int = 1, mirror: bool = False):
        if sign not in (1, -1):
            raise ContractError(f"sign must be +1 or -1, got {sign}")
        axis = (n_sites - 1) if mirror else (2 * (int(site) % n_sites)) % n_sites
        params = {"sign": sign, "mirror": bool(mirror)}
        if not mirror:
            params["site"] = int(site) % n_sites
        super().__init__(n_sites, local_dim, 2.0, params)
        self.sign = float(sign)
        self.axis = axis
        self._src = _reflection_src(n_sites, axis)
        self._gather = _site_perm_indices(n_sites, local_dim, self._src)[0]

    def apply(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.complex128)
        return arr + self.sign * arr[self._gather]

    def trace(self) -> complex:
        return complex(self.dim + self.sign * self.local_dim ** _cycle_count(self._src))

    def charge_checks(self):
        gather = self._gather
        return [(f"reflection_axis_{self.axis}", lambda v: np.asarray(v)[gather],
                 complex(self.sign))]


class ChargeSector(SectorProjector):
    """Magnetization sector for qubits: diagonal projector, scale 1.

    charge counts up spins minus down spins, so it must match the ring
    length in parity and lie in [-n_sites, n_sites]; anything else selects
    an empty sector and is rejected.
    """

    kind = "charge"

    def __init__(self, n_sites: int, local_dim: int = 2, charge: int = 0):
        if local_dim != 2:
            raise ContractError("the magnetization sector is defined for qubits only")
        charge = int(charge)
        if abs(charge) > n_sites or (charge - n_sites) % 2 != 0:
            raise ContractError(
                f"magnetization {charge} selects an empty sector on {n_sites} qubits"
            )
        super().__init__(n_sites, local_dim, 1.0, {"charge": charge})
        self.charge = charge
        ones = digit_table(n_sites, 2).sum(axis=1)
        self._mask = (2 * ones - n_sites) == charge

    def apply(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.complex128)
        mask = self._mask.reshape((-1,) + (1,) * (arr.ndim - 1))
        return arr * mask

    def trace(self) -> complex:
        return complex(math.comb(self.n_sites, (self.n_sites + self.charge) // 2))

    def charge_checks(self):
        mask = self._mask
        def project(v):
            v = np.asarray(v)
            return v * mask.reshape((-1,) + (1,) * (v.ndim - 1))
        return [("magnetization", project, 1.0 + 0.0j)]


class CompositeSector(SectorProjector):
    """Ordered product of sector operators, applied first factor first.

    The product of non-commuting factors is generally not proportional to
    a projector, so the idempotency scale must be supplied by whoever
    knows it; rank() is unavailable otherwise.
    """

    kind = "composite"

    def __init__(self, factors: list[SectorProjector], scale: float | None = None):
        if not factors:
            raise ContractError("a composite sector needs at least one factor")
        n_sites = factors[0].n_sites
        local_dim = factors[0].local_dim
        for f in factors:
            if (f.n_sites, f.local_dim) != (n_sites, local_dim):
                raise ContractError("composite factors must share the same ring")
        super().__init__(n_sites, local_dim, scale,
                         {"factors": [f.describe() for f in factors]})
        self.factors = list(factors)

    def apply(self, arr: np.ndarray) -> np.ndarray:
        out = np.asarray(arr, dtype=np.complex128)
        for factor in self.factors:
            out = factor.apply(out)
        return out

    def trace(self) -> complex:
        dense = self.dense()
        return complex(np.trace(dense))

    def charge_checks(self):
        checks = []
        for factor in self.factors:
            checks.extend(factor.charge_checks())
        return checks


def translation_reflection_sector(n_sites: int, local_dim: int = 2, k: int = 0) -> CompositeSector:
    """Zero-momentum translation factor followed by every site reflection.

    Application order is the translation sector first, then the reflection
    sectors about positions 0, 1, ..., N-1.  For k = 0 the product squares
    to N * 2^N times itself: the reflection sum collapses to
    2^(N-1) (I + R_0) after full translation averaging because any two
    site reflections differ by a translation.
    """
    factors: list[SectorProjector] = [TranslationSector(n_sites, local_dim, k=k)]
    factors.extend(
        ReflectionSector(n_sites, local_dim, site=j, sign=1) for j in range(n_sites)
    )
    scale = float(n_sites) * 2.0**n_sites if k % n_sites == 0 else None
    return CompositeSector(factors, scale=scale)


_SECTOR_BUILDERS = {
    "translation": TranslationSector,
    "parity_flip": ParityFlipSector,
    "reflection": ReflectionSector,
    "charge": ChargeSector,
}


def build_projector(kind: str, n_sites: int, local_dim: int = 2, **params) -> SectorProjector:
    """Construct a sector operator by name.

    kind is one of translation (k), parity_flip (parity), reflection
    (site or mirror, sign), charge (charge), composite (factors: list of
    parameter dicts, optional scale), or translation_reflection (k).
    """
    if kind == "composite":
        specs = params.pop("factors", None)
        scale = params.pop("scale", None)
        if params:
            raise ContractError(f"unknown composite parameters {sorted(params)}")
        if not specs:
            raise ContractError("composite sector requires a non-empty factors list")
        factors = []
        for spec in specs:
            spec = dict(spec)
            sub_kind = spec.pop("kind", None)
            if sub_kind is None:
                raise ContractError("each composite factor needs a kind")
            factors.append(build_projector(sub_kind, n_sites, local_dim, **spec))
        return CompositeSector(factors, scale=scale)
    if kind == "translation_reflection":
        return translation_reflection_sector(n_sites, local_dim, **params)
    builder = _SECTOR_BUILDERS.get(kind)
    if builder is None:
        raise ContractError(
            f"unknown sector kind {kind!r}; expected one of "
            f"{sorted(_SECTOR_BUILDERS) + ['composite', 'translation_reflection']}"
        )
    return builder(n_sites, local_dim, **params)


def sector_trace(projector: SectorProjector) -> complex:
    return projector.trace()


def sector_rank(projector: SectorProjector) -> int:
    return projector.rank()


# --- symmetric state sampling -------------------------------------------

@dataclass
class SymmetricStateSample:
    """A normalized state in a symmetry sector plus its provenance."""

    state: np.ndarray
    sector: SectorProjector
    source_seed: int | None = None

    def charge_deviation(self) -> float:
        """Worst-case entrywise deviation from the sector's eigenvalue equations."""
        worst = 0.0
        for _, apply_fn, eigenvalue in self.sector.charge_checks():
            delta = np.abs(apply_fn(self.state) - eigenvalue * self.state).max()
            worst = max(worst, float(delta))
        return worst


def project_state(state, sector: SectorProjector,
                  min_norm: float = PROJECTION_MIN_NORM) -> np.ndarray:
    """Project into the sector and renormalize.

    Raises EmptyProjectionError if the projected norm falls below min_norm,
    which signals a state orthogonal to the sector.
    """
    vec = as_state(state, sector.dim)
    projected = sector.apply(vec)
    norm = float(np.linalg.norm(projected))
    if norm < min_norm:
        raise EmptyProjectionError(
            f"projection onto {sector.kind} sector left norm {norm:.3e} < {min_norm:g}"
        )
    return projected / norm


def sample_symmetric_state(sector: SectorProjector, rng: np.random.Generator,
                           source_seed: int | None = None,
                           max_attempts: int = 16) -> SymmetricStateSample:
    """Haar state projected into the sector, retried on null projections."""
    for _ in range(max_attempts):
        raw = sample_haar_state(sector.dim, rng)
        try:
            state = project_state(raw, sector)
        except EmptyProjectionError:
            continue
        return SymmetricStateSample(state=state, sector=sector, source_seed=source_seed)
    raise ContractError(
        f"no usable projection after {max_attempts} attempts; the {sector.kind} "
        "sector appears to be empty"
    )


def sample_t_invariant_unitary(n_sites: int, local_dim: int, rng: np.random.Generator,
                               max_attempts: int = 16, atol: float = 1e-9) -> np.ndarray:
    """Random unitary commuting with the cyclic shift.

    Draws a Ginibre matrix, averages it over translation conjugations, and
    takes the unitary polar factor.  The average commutes with the shift
    and the polar factor inherits that exactly; ill-conditioned draws are
    resampled.  Limited to dimension 1024.
    """
    dim = local_dim**n_sites
    if dim > COMMUTANT_MAX_DIM:
        raise ResourceBudgetError(
            f"commutant sampling needs a dense {dim} x {dim} matrix, budget is {COMMUTANT_MAX_DIM}"
        )
    labels = [
        _site_perm_indices(n_sites, local_dim, _translation_src(n_sites, j))[1]
        for j in range(n_sites)
    ]
    shift = labels[1]
    for _ in range(max_attempts):
        z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        averaged = np.zeros_like(z)
        for tau in labels:
            averaged += z[tau[:, None], tau[None, :]]
        u_left, singulars, vh = np.linalg.svd(averaged)
        if singulars[-1] < 1e-12 * singulars[0]:
            continue
        unitary = u_left @ vh
        unitarity = np.abs(unitary @ unitary.conj().T - np.eye(dim)).max()
        commutator = np.abs(unitary - unitary[shift[:, None], shift[None, :]]).max()
        if unitarity > atol or commutator > atol:
            raise NumericalError(
                f"polar factor failed checks: unitarity {unitarity:.3e}, "
                f"shift commutator {commutator:.3e}"
            )
        return unitary
    raise NumericalError(f"no well-conditioned draw in {max_attempts} attempts")


# --- partial trace of translation powers ---------------------------------

@dataclass
class TranslationPowerTrace:
    """Structure of Tr_B(T^power) on a ring split as A = first n_a sites.

    kind is one of:
      permutation     a digit-position permutation of A, entries 0 and 1
      scaled_identity constant * I on A
      dense           anything else (not expected for translation powers)
    """

    kind: str
    n_a: int
    local_dim: int
    power: int
    site_map: tuple[int, ...] | None = None
    constant: float | None = None
    dense_matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim_a(self) -> int:
        return self.local_dim**self.n_a

    def matrix(self, max_dim: int = DENSE_MAX_DIM) -> np.ndarray:
        if self.kind == "permutation":
            return site_permutation_operator(self.n_a, self.local_dim, self.site_map, max_dim)
        if self.kind == "scaled_identity":
            if self.dim_a > max_dim:
                raise ResourceBudgetError(f"dense matrix of dim {self.dim_a} exceeds {max_dim}")
            return self.constant * np.eye(self.dim_a, dtype=np.complex128)
        return self.dense_matrix

    def trace_norm_value(self) -> float:
        """Trace norm without building the matrix; permutations are unitary."""
        if self.kind == "permutation":
            return float(self.dim_a)
        if self.kind == "scaled_identity":
            return float(abs(self.constant) * self.dim_a)
        from .linalg import trace_norm
        return trace_norm(self.dense_matrix)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int):
        self.parent[self.find(x)] = self.find(y)


def partial_trace_translation_power(n_total: int, n_a: int, power: int,
                                    local_dim: int = 2) -> TranslationPowerTrace:
    """Classify Tr_B(T^power) combinatorially, without building T.

    Matching digit constraints of <a b| T^power |a' b> site by site links
    the kept positions of bra and ket through chains of measured
    positions.  Chains pair one bra position with one ket position, giving
    a digit permutation; measured positions closing among themselves give
    free summations, a factor of local_dim each.  The latter happens
    exactly when n_a < gcd(n_total, power), in which case the permutation
    part is the identity.
    """
    if not (1 <= n_a < n_total):
        raise ContractError(f"need 1 <= n_a < n_total, got n_a={n_a}, n_total={n_total}")
    power = power % n_total
    n_b = n_total - n_a
    # Node ids: bra A positions, then ket A positions, then B positions.
    bra = lambda m: m
    ket = lambda m: n_a + m
    measured = lambda m: 2 * n_a + m
    uf = _UnionFind(2 * n_a + n_b)
    for m in range(n_total):
        p = (m - power) % n_total
        left = bra(m) if m < n_a else measured(m - n_a)
        right = ket(p) if p < n_a else measured(p - n_a)
        uf.union(left, right)

    groups: dict[int, dict[str, list[int]]] = {}
    for m in range(n_a):
        groups.setdefault(uf.find(bra(m)), {"bra": [], "ket": []})["bra"].append(m)
        groups.setdefault(uf.find(ket(m)), {"bra": [], "ket": []})["ket"].append(m)
    pure_b_roots = set()
    for m in range(n_b):
        root = uf.find(measured(m))
        if root not in groups:
            pure_b_roots.add(root)
    pure_b = len(pure_b_roots)

    site_map = [-1] * n_a
    ok = True
    for members in groups.values():
        n_bra, n_ket = len(members["bra"]), len(members["ket"])
        if (n_bra, n_ket) == (0, 0):
            continue
        if (n_bra, n_ket) != (1, 1):
            ok = False
            break
        site_map[members["bra"][0]] = members["ket"][0]
    if ok and all(p >= 0 for p in site_map):
        if pure_b == 0:
            return TranslationPowerTrace(
                kind="permutation", n_a=n_a, local_dim=local_dim, power=power,
                site_map=tuple(site_map),
            )
        if site_map == list(range(n_a)):
            return TranslationPowerTrace(
                kind="scaled_identity", n_a=n_a, local_dim=local_dim, power=power,
                constant=float(local_dim**pure_b),
            )
    # Fallback: materialize by brute force under the dense budget.
    dim = local_dim**n_total
    if dim > DENSE_MAX_DIM:
        raise ResourceBudgetError(
            f"unstructured partial trace would need a dense {dim} x {dim} operator"
        )
    full = translation_operator(n_total, local_dim, power, max_dim=dim)
    dim_a, dim_b = local_dim**n_a, local_dim**n_b
    reduced = np.einsum(
        "abcb->ac", full.reshape(dim_a, dim_b, dim_a, dim_b)
    )
    return TranslationPowerTrace(
        kind="dense", n_a=n_a, local_dim=local_dim, power=power, dense_matrix=reduced,
    )
