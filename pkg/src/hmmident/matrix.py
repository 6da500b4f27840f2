"""Dense real matrices and the tolerance policy used for every rank decision."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class InputError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute thresholds for treating a pivot or residual as zero."""

    rel_eps: float = 1e-9
    abs_eps: float = 1e-12

    def __post_init__(self):
        if not (self.rel_eps > 0):
            raise InputError(f"rel_eps must be positive, got {self.rel_eps}")
        if not (self.abs_eps >= 0):
            raise InputError(f"abs_eps must be non-negative, got {self.abs_eps}")

    def threshold(self, scale: float) -> float:
        return max(self.abs_eps, self.rel_eps * float(scale))


DEFAULT_TOL = Tolerance()


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Coerce `x` to a finite, non-empty 2-D float array.

    A 1-D input is read as a single row.
    """
    m = np.array(x, dtype=float)
    if m.ndim == 1:
        m = m[None, :]
    if m.ndim != 2:
        raise InputError(f"{name}: expected a 2-D array, got shape {m.shape}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise InputError(f"{name}: empty dimension in shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name}: entries must be finite")
    return m


@dataclass(frozen=True)
class RankInfo:
    rank: int
    # smallest pivot that was accepted (inf when rank == 0)
    smallest_accepted: float
    # largest nonzero candidate pivot rejected as numerically zero (0.0 if none)
    largest_rejected: float


def rank_info(m, tol: Tolerance = DEFAULT_TOL) -> RankInfo:
    """Row reduction with partial pivoting, keeping pivot diagnostics."""
    work = as_matrix(m).copy()
    nrows, ncols = work.shape
    thr = tol.threshold(np.abs(work).max())
    r = 0
    smallest = np.inf
    rejected = 0.0
    for c in range(ncols):
        if r == nrows:
            break
        col = np.abs(work[r:, c])
        p = r + int(np.argmax(col))
        val = col[p - r]
        if val <= thr:
            rejected = max(rejected, float(val))
            continue
        if p != r:
            work[[r, p]] = work[[p, r]]
        factors = work[r + 1:, c] / work[r, c]
        work[r + 1:, c:] -= np.outer(factors, work[r, c:])
        smallest = min(smallest, float(val))
        r += 1
    return RankInfo(r, smallest, rejected)


def rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    return rank_info(m, tol).rank


def _check_subset(nrows: int, subset: Sequence[int]) -> list[int]:
    idx = [int(i) for i in subset]
    if len(set(idx)) != len(idx):
        raise InputError(f"duplicate row index in {list(subset)}")
    for i in idx:
        if not 0 <= i < nrows:
            raise InputError(f"row index {i} out of range for {nrows} rows")
    return idx


def rows_dependent(m, subset: Sequence[int], tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the selected rows are linearly dependent under `tol`."""
    m = as_matrix(m)
    idx = _check_subset(m.shape[0], subset)
    if not idx:
        return False
    return rank(m[idx], tol) < len(idx)


def solve_left_factor(product, factor, tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """Solve ``X @ factor = product`` for X.

    `factor` must have full row rank; otherwise the solution is not unique and
    InputError is raised. Returns None when the system is inconsistent.
    """
    P = as_matrix(product, "product")
    F = as_matrix(factor, "factor")
    if P.shape[1] != F.shape[1]:
        raise InputError(f"column mismatch: product {P.shape} vs factor {F.shape}")
    if rank(F, tol) < F.shape[0]:
        raise InputError("factor is rank deficient: left factor is not unique")
    X = np.linalg.lstsq(F.T, P.T, rcond=None)[0].T
    scale = np.abs(P).max() + F.shape[0] * np.abs(X).max() * np.abs(F).max()
    if np.abs(X @ F - P).max() > tol.threshold(scale):
        return None
    return X
