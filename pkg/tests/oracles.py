"""Independent reference implementations used as test oracles."""

from itertools import product

import numpy as np


def kron_by_definition(a, b):
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    m, n = a.shape
    p, q = b.shape
    out = np.zeros((m * p, n * q))
    for i in range(m):
        for j in range(n):
            out[i * p:(i + 1) * p, j * q:(j + 1) * q] = a[i, j] * b
    return out


def path_sum_prob(pi, A, B, ys):
    """Sum over hidden paths of pi_x1 b_x1,y1 a_x1,x2 b_x2,y2 ... (letters 1-based)."""
    q = len(pi)
    total = 0.0
    for xs in product(range(q), repeat=len(ys)):
        p = pi[xs[0]]
        for t, (x, y) in enumerate(zip(xs, ys)):
            p *= B[x, y - 1]
            if t + 1 < len(xs):
                p *= A[x, xs[t + 1]]
        total += p
    return total


def forward_prob(pi, A, Bs, ys):
    """Classic forward recursion; ``Bs`` is a list of observers, ``ys`` tuples of letters."""
    alpha = np.asarray(pi, dtype=float).copy()
    for t, y in enumerate(ys):
        y = (y,) if np.isscalar(y) else tuple(y)
        emit = np.ones(len(alpha))
        for B, k in zip(Bs, y):
            emit = emit * B[:, k - 1]
        alpha = alpha * emit
        if t + 1 < len(ys):
            alpha = alpha @ A
    return float(alpha.sum())


def lexicographic_tuples(sizes):
    return list(product(*[range(1, k + 1) for k in sizes]))
