"""Row-wise tensor products, letter selectors and permutation/scaling matching.

Letters are 1-based throughout (``k = 1..kappa``) to line up with the
``D_k(B)`` / ``E(k)`` notation; row (state) indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .matrix import DEFAULT_TOL, InputError, Tolerance, as_matrix


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def row_tensor(a, b) -> np.ndarray:
    """Row ``i`` of the result is ``kron(a[i], b[i])``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise InputError(f"row count mismatch: {a.shape[0]} vs {b.shape[0]}")
    return np.einsum("ij,ik->ijk", a, b).reshape(a.shape[0], -1)


def row_tensor_multi(ms: Sequence) -> np.ndarray:
    if len(ms) == 0:
        raise InputError("row_tensor_multi needs at least one matrix")
    if len(ms) == 1:
        return as_matrix(ms[0])
    return reduce(row_tensor, ms)


def row_tensor_power(b, k: int) -> np.ndarray:
    if k < 1:
        raise InputError(f"power must be >= 1, got {k}")
    return row_tensor_multi([b] * k)


def selector_E(k: int, q: int, total_letters: int) -> np.ndarray:
    """(total_letters*q) x q matrix with I_q in the k-th row partition."""
    if not 1 <= k <= total_letters:
        raise InputError(f"letter {k} out of range 1..{total_letters}")
    E = np.zeros((total_letters * q, q))
    E[(k - 1) * q:k * q] = np.eye(q)
    return E


def diag_column(b, k: int) -> np.ndarray:
    b = as_matrix(b, "b")
    if not 1 <= k <= b.shape[1]:
        raise InputError(f"column {k} out of range 1..{b.shape[1]}")
    return np.diag(b[:, k - 1])


@dataclass(frozen=True)
class LetterCodec:
    """Mixed-radix lexicographic encoding of per-observer letters.

    Observer 1 is the most significant digit, which matches the factor order
    of ``B1 (x)row B2 (x)row ... (x)row A``.
    """

    alphabet_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.alphabet_sizes)
        if not sizes:
            raise InputError("codec needs at least one observer")
        if any(k < 2 for k in sizes):
            raise InputError(f"every alphabet size must be >= 2, got {sizes}")
        object.__setattr__(self, "alphabet_sizes", sizes)

    @property
    def total_letters(self) -> int:
        return int(np.prod(self.alphabet_sizes))

    def encode(self, letters: Sequence[int]) -> int:
        return encode_letter(self, letters)

    def decode(self, idx: int) -> tuple[int, ...]:
        return decode_letter(self, idx)


def encode_letter(codec: LetterCodec, letters: Sequence[int]) -> int:
    if len(letters) != len(codec.alphabet_sizes):
        raise InputError(
            f"expected {len(codec.alphabet_sizes)} letters, got {len(letters)}")
    flat = 0
    for y, k in zip(letters, codec.alphabet_sizes):
        if not 1 <= y <= k:
            raise InputError(f"letter {y} out of range 1..{k}")
        flat = flat * k + (y - 1)
    return flat + 1


def decode_letter(codec: LetterCodec, idx: int) -> tuple[int, ...]:
    if not 1 <= idx <= codec.total_letters:
        raise InputError(f"index {idx} out of range 1..{codec.total_letters}")
    rest = idx - 1
    out = []
    for k in reversed(codec.alphabet_sizes):
        rest, d = divmod(rest, k)
        out.append(d + 1)
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class PermScale:
    """``h_bar[i] == scale[i] * h[perm[i]]``, i.e. ``h_bar = Pi @ Lambda @ h``."""

    perm: np.ndarray
    scale: np.ndarray

    @property
    def perm_matrix(self) -> np.ndarray:
        n = len(self.perm)
        P = np.zeros((n, n))
        P[np.arange(n), self.perm] = 1.0
        return P

    @property
    def scale_matrix(self) -> np.ndarray:
        # Lambda acts on h's row order, before the permutation
        lam = np.empty(len(self.perm))
        lam[self.perm] = self.scale
        return np.diag(lam)


def _row_threshold(tol: Tolerance, u: np.ndarray, v: np.ndarray) -> float:
    return tol.threshold(max(np.abs(u).max(), np.abs(v).max()))


def find_perm_scale(h, h_bar, tol: Tolerance = DEFAULT_TOL) -> PermScale | None:
    """Find Pi, Lambda with ``h_bar ~= Pi Lambda h``, or None if none exist.

    Candidate partners are rows whose directions agree within the tolerance
    band; ambiguous candidates are resolved by backtracking and the final
    assignment is re-verified on the whole matrix.
    """
    h = as_matrix(h, "h")
    h_bar = as_matrix(h_bar, "h_bar")
    if h.shape != h_bar.shape:
        raise InputError(f"shape mismatch: {h.shape} vs {h_bar.shape}")
    row_max = np.abs(h).max(axis=1)
    zero = row_max <= tol.threshold(np.abs(h).max())
    if zero.any():
        raise InputError(f"h has an identically zero row: {int(np.argmax(zero))}")
    n = h.shape[0]

    norms = np.einsum("ij,ij->i", h, h)
    candidates: list[list[tuple[int, float]]] = []
    for i in range(n):
        row = h_bar[i]
        opts = []
        for j in range(n):
            lam = float(row @ h[j]) / norms[j]
            if abs(lam) <= tol.abs_eps:
                continue
            if np.abs(row - lam * h[j]).max() <= _row_threshold(tol, row, lam * h[j]):
                opts.append((j, lam))
        if not opts:
            return None
        candidates.append(opts)

    order = sorted(range(n), key=lambda i: len(candidates[i]))
    perm = np.full(n, -1)
    scale = np.zeros(n)
    used = np.zeros(n, dtype=bool)

    def assign(pos: int) -> bool:
        if pos == n:
            return True
        i = order[pos]
        for j, lam in candidates[i]:
            if used[j]:
                continue
            used[j] = True
            perm[i], scale[i] = j, lam
            if assign(pos + 1):
                return True
            used[j] = False
        return False

    if not assign(0):
        return None
    recon = scale[:, None] * h[perm]
    if np.abs(recon - h_bar).max() > tol.threshold(max(np.abs(h_bar).max(), np.abs(recon).max())):
        return None
    return PermScale(perm.copy(), scale.copy())
