"""HMM parameter sets, joint sequence probabilities and the equivalence oracle.

The joint probability of ``y_1..y_N`` is evaluated in matrix form as
``pi W E(y_1) W E(y_2) ... W E(y_N) 1`` with ``W = B (x)row A``, so that
``W E(k) = D_k(B) A``: the state emits, then transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .matrix import DEFAULT_TOL, InputError, Tolerance, as_matrix, rank
from .tensor import LetterCodec, row_tensor, row_tensor_multi


class ConvergenceError(RuntimeError):
    """The chain has no unique limiting distribution."""


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


def _as_vector(x, name: str) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise InputError(f"{name}: empty vector")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name}: entries must be finite")
    return v


@dataclass(frozen=True, eq=False)
class HmmParams:
    """Single-observer HMM ``{pi; q, kappa, A, B}``."""

    pi: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(_as_vector(self.pi, "pi")))
        object.__setattr__(self, "A", _frozen(as_matrix(self.A, "A")))
        object.__setattr__(self, "B", _frozen(as_matrix(self.B, "B")))

    @property
    def q(self) -> int:
        return self.A.shape[0]

    @property
    def kappa(self) -> int:
        return self.B.shape[1]

    @property
    def kappas(self) -> tuple[int, ...]:
        return (self.kappa,)

    @classmethod
    def stationary(cls, A, B, tol: Tolerance = DEFAULT_TOL) -> "HmmParams":
        return cls(stationary_distribution(A, tol), A, B)


@dataclass(frozen=True, eq=False)
class MultiHmmParams:
    """``m`` conditionally independent observers of one hidden chain."""

    pi: np.ndarray
    A: np.ndarray
    Bs: tuple
    homogeneous: bool

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(_as_vector(self.pi, "pi")))
        object.__setattr__(self, "A", _frozen(as_matrix(self.A, "A")))
        object.__setattr__(self, "Bs", tuple(
            _frozen(as_matrix(b, f"Bs[{j}]")) for j, b in enumerate(self.Bs)))
        object.__setattr__(self, "homogeneous", bool(self.homogeneous))

    @property
    def q(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return len(self.Bs)

    @property
    def kappas(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.Bs)

    @property
    def codec(self) -> LetterCodec:
        return LetterCodec(self.kappas)

    def observer(self, j: int) -> HmmParams:
        """Single-observer model seen by observer ``j`` (0-based)."""
        return HmmParams(self.pi, self.A, self.Bs[j])

    @classmethod
    def stationary(cls, A, Bs, homogeneous: bool, tol: Tolerance = DEFAULT_TOL):
        return cls(stationary_distribution(A, tol), A, tuple(Bs), homogeneous)


@dataclass(frozen=True, eq=False)
class QuasiHmm:
    """Algebraic parameterization ``pi W E(y_1) ... W E(y_N) one``.

    No stochasticity is assumed: entries may be negative and ``one`` need not
    be the all-ones vector. ``W`` holds the per-letter blocks side by side.
    ``tensor_factors`` optionally records ``(B_tilde, A_tilde)`` when the
    construction came with an explicit row-tensor factorization.
    """

    pi: np.ndarray
    W: np.ndarray
    one: np.ndarray
    kappas: tuple[int, ...]
    provenance: str = ""
    tensor_factors: tuple | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(_as_vector(self.pi, "pi")))
        object.__setattr__(self, "W", _frozen(as_matrix(self.W, "W")))
        object.__setattr__(self, "one", _frozen(_as_vector(self.one, "one_vector")))
        object.__setattr__(self, "kappas", tuple(int(k) for k in self.kappas))
        if self.tensor_factors is not None:
            object.__setattr__(self, "tensor_factors",
                               tuple(_frozen(as_matrix(f)) for f in self.tensor_factors))
        q = self.pi.size
        if self.one.size != q:
            raise InputError(f"one_vector length {self.one.size} != q={q}")
        if self.W.shape != (q, self.n_letters * q):
            raise InputError(
                f"W shape {self.W.shape} != ({q}, {self.n_letters * q}) for kappas {self.kappas}")

    @property
    def q(self) -> int:
        return self.pi.size

    @property
    def n_letters(self) -> int:
        return int(np.prod(self.kappas))

    @property
    def codec(self) -> LetterCodec:
        return LetterCodec(self.kappas)

    def letter_matrix(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.n_letters:
            raise InputError(f"letter {k} out of range 1..{self.n_letters}")
        q = self.q
        return self.W[:, (k - 1) * q:k * q]

    def alt_row_tensor(self) -> np.ndarray | None:
        if self.tensor_factors is None:
            return None
        return row_tensor(*self.tensor_factors)


Model = Union[HmmParams, MultiHmmParams, QuasiHmm]


def _stochastic_eps(tol: Tolerance, n: int) -> float:
    return max(tol.abs_eps, tol.rel_eps) * max(1, n)


def _check_stochastic(name: str, M: np.ndarray, tol: Tolerance) -> list[str]:
    out = []
    eps = _stochastic_eps(tol, M.shape[1])
    if (M < -eps).any():
        i, j = np.argwhere(M < -eps)[0]
        out.append(f"{name}: negative entry at ({i}, {j}) = {M[i, j]!r}")
    sums = M.sum(axis=1)
    for i in np.flatnonzero(np.abs(sums - 1.0) > eps):
        out.append(f"{name}: row {i} sums to {sums[i]!r}, expected 1")
    return out


def validate(h: HmmParams | MultiHmmParams, tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Return the list of violated invariants (empty when ``h`` is valid)."""
    out = []
    q = h.A.shape[0]
    if h.A.shape != (q, q):
        out.append(f"A: expected a square matrix, got shape {h.A.shape}")
    if q < 2:
        out.append(f"q: need at least 2 hidden states, got {q}")
    if h.pi.size != q:
        out.append(f"pi: length {h.pi.size} != q={q}")
    else:
        eps = _stochastic_eps(tol, q)
        if (h.pi < -eps).any():
            out.append("pi: negative entry")
        if abs(h.pi.sum() - 1.0) > eps:
            out.append(f"pi: sums to {h.pi.sum()!r}, expected 1")
    if h.A.shape == (q, q):
        out += _check_stochastic("A", h.A, tol)

    if isinstance(h, HmmParams):
        Bs = [("B", h.B)]
    else:
        Bs = [(f"Bs[{j}]", b) for j, b in enumerate(h.Bs)]
        if h.m < 2:
            out.append(f"m: need at least 2 observers, got {h.m}")
    for name, B in Bs:
        if B.shape[0] != q:
            out.append(f"{name}: has {B.shape[0]} rows, expected q={q}")
            continue
        if B.shape[1] < 2:
            out.append(f"{name}: need at least 2 observation letters, got {B.shape[1]}")
        out += _check_stochastic(name, B, tol)

    if isinstance(h, MultiHmmParams) and h.m >= 2:
        same = all(b.shape == h.Bs[0].shape and np.array_equal(b, h.Bs[0]) for b in h.Bs)
        if h.homogeneous and not same:
            out.append("homogeneous: flag set but observation matrices differ")
        if not h.homogeneous and same:
            out.append("homogeneous: flag unset but all observation matrices are identical")
    return out


def require_valid(h: HmmParams | MultiHmmParams, tol: Tolerance = DEFAULT_TOL) -> None:
    problems = validate(h, tol)
    if problems:
        raise InputError("invalid model: " + "; ".join(problems))


def stationary_distribution(A, tol: Tolerance = DEFAULT_TOL, *,
                            squarings: int = 64, residual: float = 1e-10) -> np.ndarray:
    """Unique limiting distribution of a row-stochastic ``A``.

    Convergence of ``A^(2^k)`` to a rank-one matrix is the acceptance test;
    chains with several closed classes or a periodic closed class are
    rejected with ConvergenceError.
    """
    A = as_matrix(A, "A")
    q = A.shape[0]
    if A.shape != (q, q):
        raise InputError(f"A must be square, got {A.shape}")
    bad = _check_stochastic("A", A, tol)
    if bad:
        raise InputError("; ".join(bad))

    P = A.copy()
    for _ in range(squarings):
        P = P @ P
        P /= P.sum(axis=1, keepdims=True)
    spread = float((P.max(axis=0) - P.min(axis=0)).max())
    if spread > 1e-8:
        if rank(A.T - np.eye(q), tol) < q - 1:
            cause = "reducible chain: several closed classes, stationary distribution not unique"
        else:
            cause = "periodic chain: powers of A do not converge"
        raise ConvergenceError(f"no unique limiting distribution ({cause})")

    lhs = np.vstack([A.T - np.eye(q), np.ones((1, q))])
    rhs = np.zeros(q + 1)
    rhs[-1] = 1.0
    pi = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    pi[np.abs(pi) < 1e-15] = 0.0
    if (pi < -1e-12).any() or np.abs(pi @ A - pi).max() >= residual:
        pi = P.mean(axis=0)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    res = np.abs(pi @ A - pi).max()
    if res >= residual:
        raise ConvergenceError(f"fixed-point residual {res:.3g} above {residual:g}")
    return pi


def build_W(h: HmmParams) -> np.ndarray:
    """``B (x)row A``: q x (kappa q), blocks ``[D_1(B)A ... D_kappa(B)A]``."""
    return row_tensor(h.B, h.A)


def build_W_multi(h: MultiHmmParams) -> np.ndarray:
    return row_tensor_multi([*h.Bs, h.A])


def joint_observation(h: MultiHmmParams) -> np.ndarray:
    """Row tensor of all observation matrices, one column per joint letter."""
    return row_tensor_multi(list(h.Bs))


def as_quasi(h: Model) -> QuasiHmm:
    if isinstance(h, QuasiHmm):
        return h
    if isinstance(h, HmmParams):
        return QuasiHmm(h.pi, build_W(h), np.ones(h.q), h.kappas, "hmm")
    if isinstance(h, MultiHmmParams):
        tag = "multi-hmm homogeneous" if h.homogeneous else "multi-hmm heterogeneous"
        return QuasiHmm(h.pi, build_W_multi(h), np.ones(h.q), h.kappas, tag)
    raise TypeError(f"not a model: {type(h).__name__}")


def _flat_letters(model: QuasiHmm, ys: Sequence) -> list[int]:
    if len(ys) == 0:
        raise InputError("empty observation sequence")
    codec = model.codec
    multi = len(model.kappas) > 1
    out = []
    for y in ys:
        if isinstance(y, (tuple, list, np.ndarray)):
            if len(y) != len(model.kappas):
                raise InputError(f"letter tuple {tuple(y)} has arity {len(y)}, "
                                 f"expected {len(model.kappas)}")
            out.append(codec.encode([int(v) for v in y]))
        else:
            if multi:
                raise InputError(f"multi-observer model needs letter tuples, got {y!r}")
            k = int(y)
            if not 1 <= k <= model.n_letters:
                raise InputError(f"letter {k} out of range 1..{model.n_letters}")
            out.append(k)
    return out


def quasi_sequence_prob(h: Model, ys: Sequence, pi_override=None) -> float:
    model = as_quasi(h)
    letters = _flat_letters(model, ys)
    v = model.pi if pi_override is None else _as_vector(pi_override, "pi_override")
    if v.size != model.q:
        raise InputError(f"pi_override length {v.size} != q={model.q}")
    for k in letters:
        v = v @ model.letter_matrix(k)
    return float(v @ model.one)


def sequence_prob(h: HmmParams, y: Sequence[int], pi_override=None) -> float:
    if not isinstance(h, HmmParams):
        raise TypeError("sequence_prob expects HmmParams")
    return quasi_sequence_prob(h, list(y), pi_override)


def sequence_prob_multi(h: MultiHmmParams, ys: Sequence, pi_override=None) -> float:
    if not isinstance(h, MultiHmmParams):
        raise TypeError("sequence_prob_multi expects MultiHmmParams")
    for y in ys:
        if not isinstance(y, (tuple, list, np.ndarray)) or len(y) != h.m:
            raise InputError(f"each observation must be a tuple of {h.m} letters, got {y!r}")
    return quasi_sequence_prob(h, list(ys), pi_override)


def all_sequence_probs(h: Model, n: int, pi_override=None) -> np.ndarray:
    """Probabilities of every length-``n`` sequence, in lexicographic order."""
    if n < 1:
        raise InputError("sequence length must be >= 1")
    model = as_quasi(h)
    q = model.q
    F = (model.pi if pi_override is None else _as_vector(pi_override, "pi_override"))[None, :]
    for _ in range(n):
        F = (F @ model.W).reshape(-1, q)
    return F @ model.one


def sequence_at(model: QuasiHmm, n: int, index: int) -> tuple:
    """Letters of the ``index``-th length-``n`` sequence (0-based lexicographic)."""
    L = model.n_letters
    flat = []
    for _ in range(n):
        index, d = divmod(index, L)
        flat.append(d + 1)
    flat.reverse()
    if len(model.kappas) > 1:
        return tuple(model.codec.decode(k) for k in flat)
    return tuple(flat)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    max_len: int
    max_abs_diff: tuple[float, ...]  # per length 1..checked
    witness: tuple | None = None
    p1: float | None = None
    p2: float | None = None

    def to_dict(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "max_len": self.max_len,
            "max_abs_diff": list(self.max_abs_diff),
            "witness": None if self.witness is None else [
                list(y) if isinstance(y, tuple) else y for y in self.witness],
            "p1": self.p1,
            "p2": self.p2,
        }


def equivalent(h1: Model, h2: Model, max_len: int = 5, tol: float = 1e-10) -> EquivalenceResult:
    """Compare joint probabilities of all sequences of length 1..max_len.

    A positive answer means "equivalent up to length max_len". On a negative
    answer the lexicographically first disagreeing sequence (shortest length
    first) is returned with both probabilities.
    """
    m1, m2 = as_quasi(h1), as_quasi(h2)
    if m1.kappas != m2.kappas:
        raise InputError(f"alphabet mismatch: {m1.kappas} vs {m2.kappas}")
    if max_len < 1:
        raise InputError("max_len must be >= 1")
    diffs = []
    for n in range(1, max_len + 1):
        p1 = all_sequence_probs(m1, n)
        p2 = all_sequence_probs(m2, n)
        d = np.abs(p1 - p2)
        diffs.append(float(d.max()))
        bad = np.flatnonzero(d > tol)
        if bad.size:
            i = int(bad[0])
            return EquivalenceResult(False, max_len, tuple(diffs), sequence_at(m1, n, i),
                                     float(p1[i]), float(p2[i]))
    return EquivalenceResult(True, max_len, tuple(diffs))


def permute_states(h: HmmParams, perm: Sequence[int]) -> HmmParams:
    """Relabel states: new state ``i`` is old state ``perm[i]``."""
    p = np.asarray(perm)
    return HmmParams(h.pi[p], h.A[np.ix_(p, p)], h.B[p])


def random_hmm(q: int, kappa: int, rng: np.random.Generator, *,
               concentration: float = 1.0) -> HmmParams:
    """Dense random HMM with its stationary initial distribution."""
    A = rng.dirichlet(np.full(q, concentration), size=q)
    B = rng.dirichlet(np.full(kappa, concentration), size=q)
    return HmmParams.stationary(A, B)


def random_multi_hmm(q: int, kappas: Sequence[int], rng: np.random.Generator, *,
                     homogeneous: bool = False) -> MultiHmmParams:
    A = rng.dirichlet(np.ones(q), size=q)
    if homogeneous:
        B = rng.dirichlet(np.ones(kappas[0]), size=q)
        Bs = [B] * len(kappas)
    else:
        Bs = [rng.dirichlet(np.ones(k), size=q) for k in kappas]
    return MultiHmmParams.stationary(A, Bs, homogeneous)


def proportional_pairs(M, tol: Tolerance = DEFAULT_TOL) -> list[tuple[int, int]]:
    """All row pairs (i < j) of ``M`` that are parallel under ``tol``."""
    M = as_matrix(M)
    out = []
    for i, j in combinations(range(M.shape[0]), 2):
        if rank(M[[i, j]], tol) < 2:
            out.append((i, j))
    return out
