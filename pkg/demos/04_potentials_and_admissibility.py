"""Non-negative potentials: truncation ladders and admissible bounds.

The perturbed evolution e^{-t(L-V)} is approximated from below by
truncating V at levels k; the trajectories increase monotonically in
k and the limiting decay rate is the generalised ground state energy
lambda0(L, V).  A bound E is "admissible" when the three readings --
operator norm, pairings, variational -- agree that e^{-Et} dominates
the evolution; they flip together as E crosses lambda0.
"""
import json
from pathlib import Path

import numpy as np

from heatlab import (
    TimeGrid,
    admissibility_check,
    assemble,
    lambda0,
    load_graph,
    truncation_ladder,
)

DATA = Path(__file__).parent / "data"


def main():
    g = load_graph(DATA / "path3.json")
    op = assemble(g)
    with open(DATA / "well_potential.json") as fh:
        V = json.load(fh)
    lam = lambda0(op, V)
    print(f"potential: {V}")
    print(f"lambda0(L, V) = {lam:.8f}")

    f = np.ones(g.n)
    grid = TimeGrid.geometric(0.5, 1.5, 6)
    ladder = truncation_ladder(op, V, f, grid, ks=(0.5, 1.0, 2.0, 3.0))
    print(f"\nladder at t = {grid.times[-1]:.3f} "
          "(entrywise nondecreasing in k):")
    for k, traj in zip(ladder.ks, ladder.trajectories):
        print(f"  k = {k}: {np.round(traj[-1], 6)}")

    for offset in (-0.25, 0.25):
        E = lam + offset
        v = admissibility_check(op, V, E, f, f, grid, ks=(1.0, 3.0))
        print(f"\nE = lambda0 {offset:+.2f} = {E:.6f}: "
              f"admissible = {v.admissible}")
        print(f"  operator norm: {v.holds_i},  pairings: {v.holds_ii},  "
              f"variational: {v.holds_iii}")


if __name__ == "__main__":
    main()
