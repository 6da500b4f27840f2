"""Identifiability verdicts and explicit equivalent-model constructions.

Single observer and homogeneous observers: the per-letter matrix
``B (x)row A`` must have full Kruskal rank q, and neither A nor B may contain
a pair of proportional rows (Kruskal rank >= 2). Heterogeneous observers:
``B1 (x)row ... (x)row Bm (x)row A`` must have full Kruskal rank q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hmm import (
    HmmParams,
    MultiHmmParams,
    QuasiHmm,
    as_quasi,
    build_W,
    build_W_multi,
    joint_observation,
    require_valid,
    validate,
)
from .krank import KrankBound, KrankResult, krank, krank_bound_multi, krank_bound_row_tensor
from .matrix import DEFAULT_TOL, InputError, Tolerance, as_matrix, rows_dependent
from .tensor import row_tensor, row_tensor_power


class ConstructionError(RuntimeError):
    """An equivalence construction failed its numerical self-check."""


SETTINGS = ("single", "multi-homogeneous", "multi-heterogeneous", "non-stationary")


@dataclass(frozen=True, eq=False)
class Verdict:
    setting: str
    condition_value: KrankResult  # Kruskal rank of the governing row-tensor matrix
    required: int
    identifiable: bool
    factor_kranks: dict = field(default_factory=dict)
    sufficient_sum_check: KrankBound | None = None
    counterexample: QuasiHmm | None = None
    reasons: tuple[str, ...] = ()

    @property
    def sum_route_fired(self) -> bool:
        s = self.sufficient_sum_check
        return s is not None and s.lower >= self.required

    def to_dict(self) -> dict:
        return {
            "setting": self.setting,
            "identifiable": self.identifiable,
            "required": self.required,
            "condition": self.condition_value.to_dict(),
            "factor_kranks": {k: v.to_dict() for k, v in self.factor_kranks.items()},
            "sufficient_sum_check": None if self.sufficient_sum_check is None else {
                **self.sufficient_sum_check.to_dict(), "fired": self.sum_route_fired},
            "counterexample_available": self.counterexample is not None,
            "reasons": list(self.reasons),
        }


def _rows1(cert) -> str:
    return "{" + ",".join(str(i + 1) for i in cert) + "}"


def _factor_gate(kA: KrankResult, kB: KrankResult, q: int,
                 kW: KrankResult) -> tuple[bool, tuple[str, ...]]:
    reasons = []
    if kW.value < q:
        reasons.append(f"krank of the per-letter matrix is {kW.value} < q={q}; "
                       f"dependent rows {_rows1(kW.certificate)}")
    if kB.value < 2:
        reasons.append(f"observation matrix has Kruskal rank {kB.value}; "
                       f"rows {_rows1(kB.certificate)} are proportional")
    if kA.value < 2:
        reasons.append(f"transition matrix has Kruskal rank {kA.value}; "
                       f"rows {_rows1(kA.certificate)} are proportional")
    return not reasons, tuple(reasons)


def _single_condition(A: np.ndarray, B: np.ndarray, tol: Tolerance, setting: str,
                      W: np.ndarray | None = None) -> Verdict:
    q = A.shape[0]
    kA, kB = krank(A, tol), krank(B, tol)
    kW = krank(row_tensor(B, A) if W is None else W, tol)
    bound = krank_bound_row_tensor(kA.value, kB.value, q)
    sum_check = KrankBound(bound, q, "sylvester-sum",
                           f"min({kA.value}+{kB.value}-1, {q}) = {bound}")
    ok, reasons = _factor_gate(kA, kB, q, kW)
    return Verdict(setting, kW, q, ok, {"A": kA, "B": kB}, sum_check, None, reasons)


def verdict_single(h: HmmParams, tol: Tolerance = DEFAULT_TOL, *,
                   construct: bool = True) -> Verdict:
    require_valid(h, tol)
    v = _single_condition(h.A, h.B, tol, "single", build_W(h))
    if not v.identifiable and construct:
        ce = construct_rank1_recombination(h, tol)
        if ce is not None:
            v = _with_counterexample(v, ce)
    return v


def _with_counterexample(v: Verdict, ce: QuasiHmm) -> Verdict:
    return Verdict(v.setting, v.condition_value, v.required, v.identifiable,
                   v.factor_kranks, v.sufficient_sum_check, ce, v.reasons)


def verdict_homogeneous(h: MultiHmmParams, tol: Tolerance = DEFAULT_TOL, *,
                        construct: bool = True) -> Verdict:
    """Homogeneous observers add nothing: the single-observer condition decides."""
    if not h.homogeneous:
        raise InputError("verdict_homogeneous needs a homogeneous model")
    require_valid(h, tol)
    B = h.Bs[0]
    v = _single_condition(h.A, B, tol, "multi-homogeneous")
    stacked = krank(build_W_multi(h), tol)
    reasons = v.reasons + (
        f"collapses to the single-observer condition; krank of the {h.m}-observer "
        f"stack is {stacked.value}",)
    factors = {**v.factor_kranks, "stack": stacked}
    ce = None
    if not v.identifiable and construct:
        ce = construct_rank1_recombination(h, tol)
    return Verdict(v.setting, v.condition_value, v.required, v.identifiable, factors,
                   v.sufficient_sum_check, ce, reasons)


def verdict_heterogeneous(h: MultiHmmParams, tol: Tolerance = DEFAULT_TOL) -> Verdict:
    if h.homogeneous:
        raise InputError("verdict_heterogeneous needs a heterogeneous model")
    require_valid(h, tol)
    q = h.q
    kW = krank(build_W_multi(h), tol)
    factors = {"A": krank(h.A, tol)}
    for j, B in enumerate(h.Bs, start=1):
        factors[f"B{j}"] = krank(B, tol)
    kranks = [f.value for f in factors.values()]
    bound = krank_bound_multi(kranks, q)
    total = sum(kranks)
    detail = f"{'+'.join(map(str, kranks))} = {total} {'>=' if total >= q + h.m else '<'} {q + h.m}"
    sum_check = KrankBound(bound, q, "sylvester-sum", detail)
    ok = kW.value == q
    reasons = () if ok else (
        f"krank of the multi-letter matrix is {kW.value} < q={q}; "
        f"dependent rows {_rows1(kW.certificate)}",)
    return Verdict("multi-heterogeneous", kW, q, ok, factors, sum_check, None, reasons)


def verdict_multi(h: MultiHmmParams, tol: Tolerance = DEFAULT_TOL) -> Verdict:
    return verdict_homogeneous(h, tol) if h.homogeneous else verdict_heterogeneous(h, tol)


def verdict_nonstationary(schedule: Sequence[tuple], tol: Tolerance = DEFAULT_TOL) -> list[Verdict]:
    """Per-step verdicts for time-varying ``(A_t, B_t)``; all must pass."""
    if len(schedule) == 0:
        raise InputError("empty schedule")
    out = []
    q = kappa = None
    for t, (A, B) in enumerate(schedule):
        A, B = as_matrix(A, f"A[{t}]"), as_matrix(B, f"B[{t}]")
        if q is None:
            q, kappa = A.shape[0], B.shape[1]
        if A.shape != (q, q) or B.shape != (q, kappa):
            raise InputError(f"step {t}: shapes A{A.shape} B{B.shape} drift from "
                             f"q={q}, kappa={kappa}")
        step = HmmParams(np.full(q, 1.0 / q), A, B)
        problems = validate(step, tol)
        if problems:
            raise InputError(f"step {t}: " + "; ".join(problems))
        out.append(_single_condition(A, B, tol, "non-stationary"))
    return out


def check_minimality_necessary(h: HmmParams, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``krank(A) == q``; False rules out a minimal q-state representation."""
    return krank(h.A, tol).value == h.q


def _recombine(pi: np.ndarray, JB: np.ndarray, A: np.ndarray, kappas: tuple,
               i: int, j: int, side: str, tol: Tolerance, note: str) -> QuasiHmm:
    """Merge row ``j`` into row ``i`` of ``JB (x)row A`` as one rank-1 row.

    With ``W = C^T W~`` and ``C^T = I - c e_i e_j^T`` the quasi model is
    ``pi C^T``, blocks ``W~ E(k) C^T`` and ``(C^T)^{-1} 1``.
    """
    q = A.shape[0]
    W = row_tensor(JB, A)
    c = 1.0
    if rows_dependent(W, [i, j], tol):
        # parallel rows: w_i + c w_j can only stay parallel, so cancel it instead
        c = -float(W[i] @ W[j]) / float(W[j] @ W[j])
    JBt, At = JB.copy(), A.copy()
    if side == "B":
        # JB_i = s JB_j  =>  w_i + c w_j = JB_j (x) (s A_i + c A_j)
        s = float(JB[i] @ JB[j]) / float(JB[j] @ JB[j])
        JBt[i], At[i] = JB[j], s * A[i] + c * A[j]
    else:
        # A_i = s A_j  =>  w_i + c w_j = (s JB_i + c JB_j) (x) A_j
        s = float(A[i] @ A[j]) / float(A[j] @ A[j])
        JBt[i], At[i] = s * JB[i] + c * JB[j], A[j]
    Wt = row_tensor(JBt, At)
    Ct = np.eye(q)
    Ct[i, j] = -c
    Ct_inv = np.eye(q)
    Ct_inv[i, j] = c
    if np.abs(Ct @ Wt - W).max() > tol.threshold(np.abs(W).max()) * 10:
        raise ConstructionError("rank-1 recombination does not reproduce B (x)row A")
    n_letters = int(np.prod(kappas))
    blocks = Wt.reshape(q, n_letters, q) @ Ct
    return QuasiHmm(pi @ Ct, blocks.reshape(q, -1), Ct_inv @ np.ones(q), kappas,
                    f"rank-1 recombination: {note}; merged row {j + 1} into row {i + 1} "
                    f"({side}-side proportional pair, c={c:.17g})",
                    tensor_factors=(JBt, At))


def construct_rank1_recombination(h: HmmParams | MultiHmmParams,
                                  tol: Tolerance = DEFAULT_TOL) -> QuasiHmm | None:
    """Equivalent quasi-model built from a proportional row pair, or None.

    The pair is taken from the Kruskal-rank certificate of the observation
    matrix (joint observation matrix for homogeneous observers), falling back
    to the transition matrix.
    """
    if isinstance(h, MultiHmmParams):
        if not h.homogeneous:
            raise InputError("recombination is defined for single or homogeneous observers")
        JB = joint_observation(h)
    elif isinstance(h, HmmParams):
        JB = h.B
    else:
        raise TypeError(f"not a model: {type(h).__name__}")
    kB, kA = krank(JB, tol), krank(h.A, tol)
    if kB.value == 1:
        (i, j), side, src = kB.certificate, "B", kB
    elif kA.value == 1:
        (i, j), side, src = kA.certificate, "A", kA
    else:
        return None
    note = f"{side} rows {_rows1(src.certificate)} proportional"
    return _recombine(h.pi, JB, h.A, h.kappas, i, j, side, tol, note)


def _inflation_maps(q: int, q_tilde: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``Phi = [U^T V]`` (q x q~) and ``Psi = [U; Wn]`` (q~ x q) with ``Phi Psi = I``."""
    extra = q_tilde - q
    U, _ = np.linalg.qr(rng.standard_normal((q, q)))
    if extra == 1:
        V, Wn = rng.standard_normal((q, 1)), np.zeros((1, q))
    else:
        r = rng.standard_normal(extra)
        V = np.outer(rng.standard_normal(q), r)
        proj = np.eye(extra) - np.outer(r, r) / (r @ r)
        Wn = proj @ rng.standard_normal((extra, q))
    return np.hstack([U.T, V]), np.vstack([U, Wn])


def construct_state_inflation(h: HmmParams | MultiHmmParams, q_tilde: int,
                              tol: Tolerance = DEFAULT_TOL, *,
                              rng: np.random.Generator | None = None,
                              randomize_perm_scale: bool = False) -> QuasiHmm:
    """Equivalent quasi-model on ``q_tilde >= q`` states.

    ``pi~ = pi (Pi Lam)^-1 Phi``, ``M~(k) = Psi (Pi Lam) D_k(B) A (Pi Lam)^-1 Phi``
    and ``one~ = Psi (Pi Lam) 1``. Pi and Lam are identity unless
    ``randomize_perm_scale`` is set.
    """
    base = as_quasi(h)
    q = base.q
    if q_tilde < q:
        raise InputError(f"q_tilde={q_tilde} must be >= q={q}")
    if q_tilde == q:
        return QuasiHmm(base.pi, base.W, base.one, base.kappas, "state inflation: identity")
    rng = np.random.default_rng(0) if rng is None else rng
    Phi, Psi = _inflation_maps(q, q_tilde, rng)
    if np.abs(Phi @ Psi - np.eye(q)).max() > tol.threshold(1.0) * 1e3:
        raise ConstructionError("Phi Psi != I within tolerance")
    if randomize_perm_scale:
        P = np.eye(q)[rng.permutation(q)]
        T = P @ np.diag(rng.uniform(0.5, 2.0, q))
    else:
        T = np.eye(q)
    T_inv = np.linalg.inv(T)
    L = base.n_letters
    blocks = base.W.reshape(q, L, q).transpose(1, 0, 2)  # (L, q, q): D_k(B) A
    new = np.stack([Psi @ T @ M @ T_inv @ Phi for M in blocks])  # (L, q~, q~)
    W_tilde = new.transpose(1, 0, 2).reshape(q_tilde, L * q_tilde)
    return QuasiHmm(base.pi @ T_inv @ Phi, W_tilde, Psi @ T @ base.one, base.kappas,
                    f"state inflation: q={q} -> q_tilde={q_tilde}"
                    + (" with random permutation/scaling" if randomize_perm_scale else ""))
