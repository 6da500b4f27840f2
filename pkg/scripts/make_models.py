"""Write the example model files under models/."""

import argparse
from pathlib import Path

import numpy as np

from hmmident import io
from hmmident.casestudy import ssh_A, ssh_B, ssh_multi, ssh_single
from hmmident.hmm import HmmParams, MultiHmmParams, random_hmm


def toy_models() -> dict:
    rng = np.random.default_rng(7)
    out = {"random-q3k2.json": random_hmm(3, 2, rng)}
    # identical emission rows for states 1 and 2: not identifiable
    A = np.array([[0.7, 0.2, 0.1], [0.1, 0.6, 0.3], [0.3, 0.3, 0.4]])
    B = np.array([[0.8, 0.2], [0.8, 0.2], [0.1, 0.9]])
    out["toy-equal-emissions.json"] = HmmParams.stationary(A, B)
    # distinct emissions, invertible transitions: identifiable
    B2 = np.array([[0.8, 0.2], [0.5, 0.5], [0.1, 0.9]])
    out["toy-identifiable.json"] = HmmParams.stationary(A, B2)
    # two equal observers, each blind to one state pair: homogeneous
    out["toy-homog-2obs.json"] = MultiHmmParams.stationary(A, (B, B), True)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", type=Path, default=Path(__file__).resolve().parents[1] / "models")
    args = ap.parse_args(argv)
    args.dir.mkdir(exist_ok=True)
    models = {
        "ssh-single.json": ssh_single(0.1),
        "ssh-homog-2obs.json": ssh_multi((0.1, 0.1)),
        "ssh-homog-3obs.json": ssh_multi((0.1, 0.1, 0.1)),
        "ssh-hetero-2obs.json": ssh_multi((0.05, 0.1)),
        "ssh-schedule.json": [(ssh_A(), ssh_B(e)) for e in (0.05, 0.1, 0.15)],
        **toy_models(),
    }
    for name, model in models.items():
        io.dump(model, args.dir / name)
        print(f"wrote {args.dir / name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
