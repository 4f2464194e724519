"""Bipartite geometry of a qudit ring.

Sites are numbered 1..N, and site 1 is the most significant digit of the
computational index, so a basis label reads left to right:

    |i_1 i_2 ... i_N>   <->   index = sum_m i_m * d**(N - m).

Subsystem A holds sites 1..N_A and subsystem B holds sites N_A+1..N.  With
this layout a full-system vector of length d**N reshapes row-major to a
(d**N_A, d**N_B) amplitude matrix without copying: rows are A labels,
columns are B labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

__all__ = ["SystemGeometry", "digit_table", "index_weights"]


@dataclass(frozen=True)
class SystemGeometry:
    """A chain of n_total qudits split into parts A (kept) and B (measured)."""

    n_total: int
    n_a: int
    n_b: int = -1  # filled in from n_total - n_a when left at the sentinel
    local_dim: int = 2

    def __post_init__(self):
        if self.n_b == -1:
            object.__setattr__(self, "n_b", self.n_total - self.n_a)
        if self.n_total < 1 or self.n_a < 1 or self.n_b < 1:
            raise ContractError(
                f"need n_total, n_a, n_b all >= 1, got {self.n_total}, {self.n_a}, {self.n_b}"
            )
        if self.n_a + self.n_b != self.n_total:
            raise ContractError(
                f"n_a + n_b must equal n_total, got {self.n_a} + {self.n_b} != {self.n_total}"
            )
        if self.local_dim < 2:
            raise ContractError(f"local_dim must be >= 2, got {self.local_dim}")

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_total

    @property
    def dim_a(self) -> int:
        return self.local_dim**self.n_a

    @property
    def dim_b(self) -> int:
        return self.local_dim**self.n_b

    def state_matrix(self, state: np.ndarray) -> np.ndarray:
        """View a full-system vector as a (dim_a, dim_b) amplitude matrix."""
        state = np.asarray(state)
        if state.shape != (self.dim,):
            raise ContractError(f"expected state of shape ({self.dim},), got {state.shape}")
        return state.reshape(self.dim_a, self.dim_b)


def digit_table(n_sites: int, local_dim: int) -> np.ndarray:
    """(dim, n_sites) array D with D[x, m] = m-th digit of x, site 1 first.

    Digit m (0-indexed array position, site m+1) carries place value
    local_dim**(n_sites - 1 - m).
    """
    dim = local_dim**n_sites
    idx = np.arange(dim)
    table = np.empty((dim, n_sites), dtype=np.int64)
    for m in range(n_sites):
        table[:, m] = (idx // local_dim ** (n_sites - 1 - m)) % local_dim
    return table


def index_weights(n_sites: int, local_dim: int) -> np.ndarray:
    """Place values [d**(n-1), ..., d, 1] so that index = digits @ weights."""
    return local_dim ** np.arange(n_sites - 1, -1, -1, dtype=np.int64)
