"""Measure how tight krank(B (x)row A) >= min(krank A + krank B - 1, q) is on random pairs."""

import argparse
from collections import Counter

import numpy as np

from hmmident.krank import krank, krank_bound_row_tensor, krank_lower_coherence
from hmmident.tensor import row_tensor


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--qmax", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    slack = Counter()
    coh_gap = Counter()
    violations = 0
    for _ in range(args.trials):
        q = int(rng.integers(2, args.qmax + 1))
        A = rng.integers(0, 2, (q, q)).astype(float)
        B = rng.integers(0, 2, (q, int(rng.integers(2, 4)))).astype(float)
        A[A.sum(axis=1) == 0, 0] = 1
        B[B.sum(axis=1) == 0, 0] = 1
        W = row_tensor(B, A)
        kW = krank(W).value
        bound = krank_bound_row_tensor(krank(A).value, krank(B).value, q)
        violations += kW < bound
        slack[kW - bound] += 1
        coh_gap[kW - krank_lower_coherence(W).lower] += 1
    print(f"trials {args.trials}, bound violations {violations}")
    print("exact - bound:", dict(sorted(slack.items())))
    print("exact - coherence:", dict(sorted(coh_gap.items())))
    return 1 if violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
