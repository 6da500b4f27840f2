"""Observation-length bounds for generic identifiability and Vandermonde witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, prod
from typing import Sequence

import numpy as np

from .krank import krank
from .matrix import DEFAULT_TOL, InputError, Tolerance, rank
from .tensor import row_tensor_multi

VARIANTS = ("single-strong", "single-weak", "homogeneous", "heterogeneous")
_ALIASES = {"strong": "single-strong", "weak": "single-weak", "homo": "homogeneous",
            "hetero": "heterogeneous"}

# Largest integer magnitude that float64 represents exactly.
SAFE_MAGNITUDE = 2 ** 53


def canonical_variant(variant: str) -> str:
    v = _ALIASES.get(variant, variant)
    if v not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
    return v


@dataclass(frozen=True)
class NStarBound:
    variant: str
    q: int
    kappas: tuple[int, ...]
    m: int
    n_star: int
    binomial_trace: tuple[tuple[int, int], ...]  # (N, binomial) for N = 0..n_star

    def to_dict(self) -> dict:
        return {"variant": self.variant, "q": self.q, "kappas": list(self.kappas),
                "m": self.m, "n_star": self.n_star,
                "binomial_trace": [list(t) for t in self.binomial_trace]}


def binomial_count(variant: str, N: int, kappas: Sequence[int], m: int = 1) -> int:
    """Left-hand side of the variant's binomial condition at length N."""
    variant = canonical_variant(variant)
    if variant == "single-strong":
        k = kappas[0]
        return comb(N + k - 1, k - 1)
    if variant == "single-weak":
        k = kappas[0]
        return comb(N + k - 2, k - 1) if N + k - 2 >= 0 else 0
    if variant == "homogeneous":
        k = kappas[0]
        return comb(N * m + k - 1, k - 1)
    kp = prod(kappas)
    return comb(N * m + kp - 1, kp - 1)


def n_star(variant: str, q: int, kappa: int | Sequence[int], m: int | None = None) -> NStarBound:
    """Smallest N >= 1 whose binomial count reaches q.

    Heterogeneous observers use ``kappa' = prod(kappa_j)``.
    """
    variant = canonical_variant(variant)
    kappas = (kappa,) if isinstance(kappa, (int, np.integer)) else tuple(kappa)
    kappas = tuple(int(k) for k in kappas)
    if q < 2:
        raise InputError(f"q must be >= 2, got {q}")
    if not kappas or any(k < 2 for k in kappas):
        raise InputError(f"alphabet sizes must be >= 2, got {kappas}")
    if variant == "heterogeneous":
        m = len(kappas) if m is None else m
        if len(kappas) != m:
            raise InputError(f"heterogeneous variant needs {m} alphabet sizes, got {len(kappas)}")
    elif variant == "homogeneous":
        if len(kappas) != 1:
            raise InputError("homogeneous variant takes a single alphabet size")
        m = 2 if m is None else m
    else:
        if len(kappas) != 1:
            raise InputError("single-observer variants take a single alphabet size")
        m = 1
    if variant in ("homogeneous", "heterogeneous") and m < 2:
        raise InputError(f"multi-observer variants need m >= 2, got {m}")

    trace = [(0, binomial_count(variant, 0, kappas, m))]
    N = 0
    while trace[-1][1] < q or N == 0:
        N += 1
        trace.append((N, binomial_count(variant, N, kappas, m)))
    return NStarBound(variant, q, kappas, m, N, tuple(trace))


def vandermonde(generators: Sequence[int], q: int) -> np.ndarray:
    """q x kappa matrix with entry (i, j) = generators[j] ** i."""
    g = np.asarray(generators, dtype=float)
    return g[None, :] ** np.arange(q)[:, None]


@dataclass(frozen=True)
class WitnessReport:
    q: int
    kappas: tuple[int, ...]
    N: int
    m: int
    generators: tuple[tuple[int, ...], ...]
    columns: int
    rank: int
    krank: int
    distinct_monomials: int
    binomial_count: int

    @property
    def full_rank(self) -> bool:
        return self.rank == self.q

    def to_dict(self) -> dict:
        return {"q": self.q, "kappas": list(self.kappas), "N": self.N, "m": self.m,
                "generators": [list(g) for g in self.generators], "columns": self.columns,
                "rank": self.rank, "krank": self.krank, "full_rank": self.full_rank,
                "distinct_monomials": self.distinct_monomials,
                "binomial_count": self.binomial_count}


def first_primes(n: int) -> list[int]:
    from sympy import prime
    return [int(prime(i)) for i in range(1, n + 1)]


def vandermonde_witness(q: int, kappa: int | Sequence[int], N: int, m: int | None = None,
                        generators: Sequence[int] | None = None,
                        tol: Tolerance = DEFAULT_TOL) -> WitnessReport:
    """Rank of the row-tensor stack of Vandermonde observation matrices.

    One alphabet size: ``B`` is raised to the row-tensor power ``N*m``
    (``m`` defaults to 1). Several alphabet sizes: one Vandermonde matrix per
    observer, each with its own distinct primes, and the per-step product is
    raised to the row-tensor power N.
    """
    from sympy import isprime

    kappas = (kappa,) if isinstance(kappa, (int, np.integer)) else tuple(kappa)
    kappas = tuple(int(k) for k in kappas)
    if N < 1:
        raise InputError("N must be >= 1")
    hetero = len(kappas) > 1
    m = len(kappas) if hetero else (1 if m is None else m)
    if hetero and m != len(kappas):
        raise InputError(f"m={m} does not match {len(kappas)} alphabet sizes")
    n_gen = sum(kappas)
    gens = list(first_primes(n_gen)) if generators is None else [int(g) for g in generators]
    if len(gens) != n_gen:
        raise InputError(f"need {n_gen} generators, got {len(gens)}")
    if len(set(gens)) != len(gens) or not all(g > 0 and isprime(g) for g in gens):
        raise InputError(f"generators must be distinct positive primes, got {gens}")
    degree = N * m if not hetero else N * len(kappas)
    if max(gens) ** (degree * (q - 1)) >= SAFE_MAGNITUDE:
        raise InputError(
            f"entries up to {max(gens)}^{degree * (q - 1)} exceed 2^53; "
            "use smaller primes, smaller N or fewer states")

    groups, pos = [], 0
    for k in kappas:
        groups.append(tuple(gens[pos:pos + k]))
        pos += k
    if hetero:
        per_step = [vandermonde(g, q) for g in groups]
        stack = row_tensor_multi(per_step * N)
    else:
        stack = row_tensor_multi([vandermonde(groups[0], q)] * degree)

    # distinct column generators, counted exactly as integer monomials
    if hetero:
        factors = [groups[j] for _ in range(N) for j in range(len(kappas))]
    else:
        factors = [groups[0]] * degree
    distinct = len({prod(t) for t in product(*factors)})

    normed = stack / np.abs(stack).max(axis=1, keepdims=True)
    r = rank(normed, tol)
    kr = krank(normed, tol).value
    if hetero:
        bcount = binomial_count("heterogeneous", N, kappas, m)
    else:
        bcount = comb(degree + kappas[0] - 1, kappas[0] - 1)
    return WitnessReport(q, kappas, N, m, tuple(groups), stack.shape[1], r, kr,
                         distinct, bcount)
