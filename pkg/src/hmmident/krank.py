"""Kruskal rank with certificates, coherence lower bounds and row-tensor bounds.

The Kruskal rank of a matrix is the largest K such that every set of K rows
is linearly independent. It is computed by enumerating row subsets in
ascending size, stopping at the first dependent one; the lexicographically
smallest minimal dependent subset is kept as the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .matrix import DEFAULT_TOL, InputError, Tolerance, as_matrix, rank_info
from .tensor import row_tensor, row_tensor_power

# Gram-matrix diagonal dominance margin below which the coherence bound is not
# trusted to skip subset sizes in the exact search.
_SKIP_MARGIN = 1e-6


@dataclass(frozen=True)
class KrankResult:
    value: int
    # minimal dependent row subset (size value+1), or None when every row set is independent
    certificate: tuple[int, ...] | None
    # largest rejected pivot in the certifying dependence test (0.0 if none)
    near_threshold: float = 0.0
    # smallest accepted pivot over the independence tests that were run
    weakest_pivot: float = math.inf

    @property
    def is_full(self) -> bool:
        return self.certificate is None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "certificate": "full" if self.certificate is None else list(self.certificate),
            "near_threshold": self.near_threshold,
        }


@dataclass(frozen=True)
class KrankBound:
    lower: int
    upper: int
    method: str  # exact | coherence | sylvester-sum | trivial
    detail: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise InputError(f"bound lower {self.lower} exceeds upper {self.upper}")

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "method": self.method,
                "detail": self.detail}


def _zero_rows(m: np.ndarray, tol: Tolerance) -> np.ndarray:
    thr = tol.threshold(np.abs(m).max())
    return np.flatnonzero(np.abs(m).max(axis=1) <= thr)


def _normalized_rows(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def coherence(m) -> float:
    """Largest absolute cosine between two distinct rows (0.0 for one row)."""
    m = as_matrix(m)
    if m.shape[0] < 2:
        return 0.0
    u = _normalized_rows(m)
    g = np.abs(u @ u.T)
    np.fill_diagonal(g, 0.0)
    return float(g.max())


def _coherence_size(mu: float, margin: float) -> int:
    """Largest s with (s - 1) * mu < 1 - margin: every s rows are then independent."""
    return math.ceil((1.0 - margin) / mu)


def krank_lower_coherence(m) -> KrankBound:
    m = as_matrix(m)
    rows, cols = m.shape
    upper = min(rows, cols)
    if len(_zero_rows(m, DEFAULT_TOL)):
        return KrankBound(0, upper, "coherence", detail="zero row present")
    mu = coherence(m)
    if mu == 0.0:
        return KrankBound(min(rows, upper), upper, "coherence", detail="mu=0")
    lower = min(_coherence_size(mu, 1e-12), upper)
    return KrankBound(lower, upper, "coherence", detail=f"mu={mu:.6g}")


def krank(m, tol: Tolerance = DEFAULT_TOL, *, limit: int | None = None) -> KrankResult:
    """Exact Kruskal rank with a lexicographically first minimal certificate.

    With ``limit`` only subsets up to that size are tested; if all pass the
    result is ``min(krank, limit)`` with no certificate.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    zeros = _zero_rows(m, tol)
    if len(zeros):
        return KrankResult(0, (int(zeros[0]),))
    if rows == 1:
        return KrankResult(1, None)

    u = _normalized_rows(m)
    g = np.abs(u @ u.T)
    np.fill_diagonal(g, 0.0)
    mu = float(g.max())
    # sizes up to `safe` are certified independent by diagonal dominance of the Gram matrix
    safe = rows if mu == 0.0 else _coherence_size(mu, _SKIP_MARGIN)
    safe = max(1, min(safe, rows, cols))

    top = min(rows, cols + 1)
    if limit is not None:
        if limit < 1:
            raise InputError(f"limit must be >= 1, got {limit}")
        if limit <= safe:
            return KrankResult(limit, None)
        top = min(top, limit)
    weakest = math.inf
    for s in range(safe + 1, top + 1):
        for subset in combinations(range(rows), s):
            info = rank_info(u[list(subset)], tol)
            if info.rank < s:
                return KrankResult(s - 1, subset, info.largest_rejected, weakest)
            weakest = min(weakest, info.smallest_accepted)
    if limit is not None and top == limit:
        return KrankResult(limit, None, 0.0, weakest)
    if rows > cols:
        # unreachable: any cols+1 rows are dependent
        raise AssertionError("no dependent subset found among cols+1 rows")
    return KrankResult(rows, None, 0.0, weakest)


def krank_bound_row_tensor(krank_a: int, krank_b: int, q: int) -> int:
    """Guaranteed lower bound on krank(B (x)row A) from the factors' Kruskal ranks."""
    if krank_a < 0 or krank_b < 0:
        raise InputError("Kruskal ranks are non-negative")
    if krank_a == 0 or krank_b == 0:
        return 0
    return min(krank_a + krank_b - 1, q)


def krank_bound_multi(kranks: Sequence[int], q: int) -> int:
    if len(kranks) == 0:
        raise InputError("need at least one Kruskal rank")
    if any(k < 0 for k in kranks):
        raise InputError("Kruskal ranks are non-negative")
    if any(k == 0 for k in kranks):
        return 0
    return min(sum(kranks) - (len(kranks) - 1), q)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    witness: str


def _column_permutation(p: int, r: int) -> np.ndarray:
    # column c = i*r + j of (a (x)row b) equals column j*p + i of (b (x)row a)
    return np.array([j * p + i for i in range(p) for j in range(r)])


def verify_krank_properties(a, b, tol: Tolerance = DEFAULT_TOL,
                            powers: Sequence[int] = (2, 3)) -> list[PropertyCheck]:
    """Check the four row-tensor Kruskal-rank properties on a concrete pair."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise InputError(f"row count mismatch: {a.shape[0]} vs {b.shape[0]}")
    p, r = a.shape[1], b.shape[1]
    ab = row_tensor(a, b)
    ba = row_tensor(b, a)
    cols = _column_permutation(p, r)
    checks = []

    ok = bool(np.array_equal(ab, ba[:, cols]))
    checks.append(PropertyCheck("column-permutation", ok, f"perm={cols.tolist()}"))

    k_ab, k_ba = krank(ab, tol), krank(ba, tol)
    checks.append(PropertyCheck("krank-symmetry", k_ab.value == k_ba.value,
                                f"krank(a.b)={k_ab.value} krank(b.a)={k_ba.value}"))

    # the Kronecker product has q^2 rows; compare at the row tensor's q rows
    q = a.shape[0]
    k_kron = krank(np.kron(a, b), tol, limit=q)
    checks.append(PropertyCheck("row-vs-kronecker", k_ab.value >= k_kron.value,
                                f"krank(row)={k_ab.value} min(krank(kron),{q})={k_kron.value}"))

    parts = []
    ok = True
    for name, x in (("a", a), ("b", b)):
        base = krank(x, tol).value
        for k in powers:
            kk = krank(row_tensor_power(x, k), tol).value
            ok &= kk >= base
            parts.append(f"krank({name}^{k})={kk}>={base}")
    checks.append(PropertyCheck("power-monotone", ok, " ".join(parts)))
    return checks
