"""Dense linear algebra kernel: index sets, sub-matrix selection and
consistency-detecting solves for possibly rank-deficient systems.

Everything here is deliberately dense and deterministic.  Matrices and
vectors are plain numpy arrays of float64; ``as_matrix``/``as_vector``
coerce and validate them (finite entries only).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

# Residual threshold for declaring a linear system consistent:
# ||M x - rhs||_inf <= CONSISTENCY_TOL * (1 + ||rhs||_inf).
CONSISTENCY_TOL = 1e-9


def as_vector(v, name: str = "vector") -> np.ndarray:
    out = np.asarray(v, dtype=float)
    if out.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing 0-based positions inside a universe {0..universe-1}."""

    indices: tuple[int, ...]
    universe: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.universe):
            raise ValueError(f"index out of range for universe {self.universe}")

    @staticmethod
    def from_iterable(items: Iterable[int], universe: int) -> "IndexSet":
        return IndexSet(tuple(sorted(set(int(i) for i in items))), universe)

    @staticmethod
    def from_mask(mask) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return IndexSet(tuple(int(i) for i in np.flatnonzero(mask)), mask.size)

    @staticmethod
    def empty(universe: int) -> "IndexSet":
        return IndexSet((), universe)

    @staticmethod
    def full(universe: int) -> "IndexSet":
        return IndexSet(tuple(range(universe)), universe)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.indices, dtype=int)

    def complement(self) -> "IndexSet":
        inside = set(self.indices)
        return IndexSet(tuple(i for i in range(self.universe) if i not in inside),
                        self.universe)

    def union(self, other: "IndexSet | Iterable[int]") -> "IndexSet":
        other_idx = other.indices if isinstance(other, IndexSet) else other
        return IndexSet.from_iterable(list(self.indices) + list(other_idx), self.universe)

    def difference(self, other: "IndexSet | Iterable[int]") -> "IndexSet":
        drop = set(other.indices if isinstance(other, IndexSet) else other)
        return IndexSet(tuple(i for i in self.indices if i not in drop), self.universe)

    def intersection(self, other: "IndexSet | Iterable[int]") -> "IndexSet":
        keep = set(other.indices if isinstance(other, IndexSet) else other)
        return IndexSet(tuple(i for i in self.indices if i in keep), self.universe)

    def __contains__(self, i: int) -> bool:
        return i in set(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)


@dataclass
class SolveReport:
    """Outcome of a consistency-detecting linear solve.

    ``solution`` is None when the system is inconsistent; ``residual_norm``
    is always the sup-norm residual at the least-squares point.
    """

    solution: np.ndarray | None
    residual_norm: float
    consistent: bool


def submatrix(a: np.ndarray, rows: IndexSet, cols: IndexSet) -> np.ndarray:
    a = as_matrix(a)
    if rows.universe != a.shape[0] or cols.universe != a.shape[1]:
        raise ValueError("index set universe does not match matrix shape")
    return a[np.ix_(rows.array, cols.array)]


def solve_consistent(m, rhs, tol: float = CONSISTENCY_TOL) -> SolveReport:
    """Solve M x = rhs if a solution exists within tolerance.

    M may be rectangular and rank-deficient.  Uses an SVD-based
    least-squares factorization; when the system is consistent and
    underdetermined the minimum-2-norm solution is returned, which keeps
    repeated calls on identical inputs bit-for-bit reproducible.
    """
    m = as_matrix(m, "M")
    rhs = as_vector(rhs, "rhs")
    if m.shape[0] != rhs.shape[0]:
        raise ValueError(f"dimension mismatch: M has {m.shape[0]} rows, rhs has {rhs.shape[0]}")
    rhs_scale = 1.0 + (np.max(np.abs(rhs)) if rhs.size else 0.0)

    if m.shape[1] == 0:
        resid = float(np.max(np.abs(rhs))) if rhs.size else 0.0
        ok = resid <= tol * rhs_scale
        return SolveReport(np.zeros(0) if ok else None, resid, ok)
    if m.shape[0] == 0:
        return SolveReport(np.zeros(m.shape[1]), 0.0, True)

    sol, _, _, _ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = float(np.max(np.abs(m @ sol - rhs)))
    ok = resid <= tol * rhs_scale
    return SolveReport(sol if ok else None, resid, ok)
