"""Seven-state SSH attack model observed by noisy ISPs.

The published transition matrix has two rows that do not sum to one (0.999
and 0.959); ``ssh_A()`` row-normalizes it. The published observation matrix
lists state 4 as ``(1-2e, e, 1-2e)``, which is not a distribution; state 4 is
taken as ``(1-2e, e, e)``, which keeps the first column
``(e, 1-2e, e, 1-2e, e, 1-2e, 1-2e)``.
"""

from __future__ import annotations

import time

import numpy as np

from .hmm import HmmParams, MultiHmmParams, build_W, equivalent, stationary_distribution
from .identifiability import (
    construct_rank1_recombination,
    verdict_heterogeneous,
    verdict_homogeneous,
    verdict_single,
)
from .krank import krank
from .matrix import DEFAULT_TOL, InputError, Tolerance
from .tensor import find_perm_scale

SSH_A_RAW = np.array([
    [0.6170, 0.3780, 0.0040, 0, 0, 0, 0.0010],
    [0.1860, 0.8130, 0.0010, 0, 0, 0, 0],
    [0, 0, 0.7230, 0.2350, 0.0400, 0, 0.0010],
    [0, 0, 0.2140, 0.7570, 0.0290, 0, 0],
    [0, 0, 0, 0.0220, 0.6670, 0.2670, 0.0030],
    [0, 0, 0, 0, 0.1520, 0.8480, 0],
    [0, 0, 0, 0, 0, 0, 1.0000],
])

# letter emitted with probability 1-2e for each state (1-based)
_SSH_MAIN_LETTER = (2, 1, 3, 1, 2, 1, 1)

EPS_GRID = (0.05, 0.1, 0.15, 0.2)
HETERO_EPS = (0.05, 0.1)


def ssh_A() -> np.ndarray:
    return SSH_A_RAW / SSH_A_RAW.sum(axis=1, keepdims=True)


def ssh_B(eps: float) -> np.ndarray:
    if not 0 < eps < 0.5:
        raise InputError(f"eps must lie in (0, 0.5), got {eps}")
    B = np.full((7, 3), eps)
    for s, k in enumerate(_SSH_MAIN_LETTER):
        B[s, k - 1] = 1 - 2 * eps
    return B


def ssh_single(eps: float = 0.1, pi=None) -> HmmParams:
    A = ssh_A()
    return HmmParams(stationary_distribution(A) if pi is None else pi, A, ssh_B(eps))


def ssh_multi(eps: tuple[float, ...], pi=None) -> MultiHmmParams:
    """Homogeneous when all ``eps`` are equal, heterogeneous otherwise."""
    if len(eps) < 2:
        raise InputError("need at least two observers")
    A = ssh_A()
    homogeneous = len(set(eps)) == 1
    return MultiHmmParams(stationary_distribution(A) if pi is None else pi, A,
                          tuple(ssh_B(e) for e in eps), homogeneous)


def _check(name: str, passed: bool, detail: str) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _rows1(cert) -> str:
    return "full" if cert is None else "{" + ",".join(str(i + 1) for i in cert) + "}"


def run_casestudy(tol: Tolerance = DEFAULT_TOL, *, timing: bool = False) -> dict:
    """Reproduce the SSH identifiability analysis.

    Returns a JSON-ready report; with ``timing=False`` it is deterministic.
    """
    t0 = time.perf_counter()
    checks = []
    A = ssh_A()
    kA = krank(A, tol)
    checks.append(_check("krank(A) = 7", kA.value == 7, f"krank(A) = {kA.value}"))

    for eps in EPS_GRID + (1 / 3,):
        kB = krank(ssh_B(eps), tol)
        checks.append(_check(f"krank(B(eps={eps:.6g})) = 1", kB.value == 1,
                             f"krank = {kB.value}, dependent rows {_rows1(kB.certificate)}"))

    for eps in EPS_GRID:
        v = verdict_single(ssh_single(eps), tol, construct=False)
        checks.append(_check(f"single observer eps={eps:g} not identifiable",
                             not v.identifiable,
                             f"krank(B (x)row A) = {v.condition_value.value}; "
                             f"krank(B) = {v.factor_kranks['B'].value}"))

    for m in (2, 3):
        v = verdict_homogeneous(ssh_multi((0.1,) * m), tol, construct=False)
        checks.append(_check(f"homogeneous m={m} not identifiable", not v.identifiable,
                             f"krank(B) = {v.factor_kranks['B'].value}; stack krank "
                             f"{v.factor_kranks['stack'].value}"))

    het = ssh_multi(HETERO_EPS)
    vh = verdict_heterogeneous(het, tol)
    W_shape = (het.q, int(np.prod(het.kappas)) * het.q)
    checks.append(_check("heterogeneous (0.05, 0.1) identifiable", vh.identifiable,
                         f"exact krank of the {W_shape[0]}x{W_shape[1]} stack = "
                         f"{vh.condition_value.value}"))
    checks.append(_check("sum check 7+1+1 = 9 >= 9", vh.sufficient_sum_check.detail == "7+1+1 = 9 >= 9",
                         vh.sufficient_sum_check.detail))

    single = ssh_single(0.1)
    ce = construct_rank1_recombination(single, tol)
    checks.append(_check("recombination counterexample built", ce is not None,
                         ce.provenance if ce is not None else "none"))
    if ce is not None:
        eq_stat = equivalent(single, ce, max_len=3, tol=1e-9)
        uniform = np.full(7, 1 / 7)
        single_u = ssh_single(0.1, pi=uniform)
        ce_u = construct_rank1_recombination(single_u, tol)
        eq_unif = equivalent(single_u, ce_u, max_len=3, tol=1e-9)
        checks.append(_check("counterexample equivalent to length 3 (stationary pi)",
                             eq_stat.equivalent, f"max diff {max(eq_stat.max_abs_diff):.3g}"))
        checks.append(_check("counterexample equivalent to length 3 (uniform pi)",
                             eq_unif.equivalent, f"max diff {max(eq_unif.max_abs_diff):.3g}"))
        ps = find_perm_scale(build_W(single), ce.alt_row_tensor(), tol)
        checks.append(_check("counterexample not a permutation/scaling of B (x)row A",
                             ps is None, "no (Pi, Lambda) found" if ps is None else "related"))

    report = {
        "model": {"q": 7, "kappa": 3, "A_row_sums_published": SSH_A_RAW.sum(axis=1).round(6).tolist(),
                  "pi_stationary": stationary_distribution(A).round(12).tolist()},
        "krank_A": kA.to_dict(),
        "heterogeneous": vh.to_dict(),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
    if timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    return report
