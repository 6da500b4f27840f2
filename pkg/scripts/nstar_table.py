"""Tabulate N* for each variant, with Vandermonde witnesses where they fit in float64."""

import argparse

from hmmident.matrix import InputError
from hmmident.nstar import n_star, vandermonde_witness


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qmax", type=int, default=10)
    ap.add_argument("--kappas", default="2,3,4")
    ap.add_argument("--m", type=int, default=2)
    args = ap.parse_args(argv)
    kappas = [int(k) for k in args.kappas.split(",")]

    print(f"{'q':>3} {'kappa':>5} {'strong':>6} {'weak':>5} {'homog':>5} {'hetero':>6} witness")
    for q in range(2, args.qmax + 1):
        for k in kappas:
            s = n_star("single-strong", q, k).n_star
            w = n_star("single-weak", q, k).n_star
            h = n_star("homogeneous", q, k, args.m).n_star
            x = n_star("heterogeneous", q, (k,) * args.m, args.m).n_star
            try:
                wit = vandermonde_witness(q, k, s)
                note = f"rank {wit.rank}/{q}"
            except InputError:
                note = "overflow"
            print(f"{q:>3} {k:>5} {s:>6} {w:>5} {h:>5} {x:>6} {note}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
