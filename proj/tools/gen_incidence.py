"""Generate the bundled plant-animal incidence matrix.

Nested connection probabilities give heterogeneous degrees; every species
gets at least one partner. Output is deterministic for a given seed.
"""
import argparse

import numpy as np


def generate(plants, animals, seed):
    rng = np.random.default_rng(seed)
    u = (np.arange(plants)[:, None] + 0.5) / plants
    v = (np.arange(animals)[None, :] + 0.5) / animals
    prob = np.clip(0.9 * np.exp(-2.5 * (u + v)) + 0.04, 0.0, 1.0)
    y = (rng.random((plants, animals)) < prob).astype(int)
    for i in np.flatnonzero(y.sum(axis=1) == 0):
        y[i, rng.integers(animals)] = 1
    for j in np.flatnonzero(y.sum(axis=0) == 0):
        y[rng.integers(plants), j] = 1
    return y


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plants", type=int, default=30)
    ap.add_argument("--animals", type=int, default=40)
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("out")
    args = ap.parse_args()
    y = generate(args.plants, args.animals, args.seed)
    with open(args.out, "w") as f:
        f.write("," + ",".join(f"a{j + 1}" for j in range(args.animals)) + "\n")
        for i, row in enumerate(y):
            f.write(f"p{i + 1}," + ",".join(str(c) for c in row) + "\n")


if __name__ == "__main__":
    main()
