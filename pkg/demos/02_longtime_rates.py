"""Exponential decay rates of <f, e^{-tL} g> read off a time grid.

For positive f and g on a connected graph the pairing decays exactly
like e^{-t E0}; for a signed f against itself the rate is the bottom
of the spectral support of f, which can be any eigenvalue.  The
differenced estimator locks on once the spectral gap has burned off
the excited states; the Cesaro mean -log/t limps behind at O(1/t).
"""
from pathlib import Path

import numpy as np

from heatlab import (
    TimeGrid,
    assemble,
    eigendecompose,
    load_graph,
    rate_inner,
    spectral_measure,
)

DATA = Path(__file__).parent / "data"


def show(label, est):
    print(f"\n{label}: target = {est.target:.8f}")
    print(f"  {'t':>10}  {'cesaro':>12}  {'differenced':>12}")
    for t, c, d in list(zip(est.times, est.cesaro_history,
                            est.differenced_history))[-6:]:
        print(f"  {t:10.1f}  {c:12.8f}  {d:12.8f}")


def main():
    g = load_graph(DATA / "cycle8.json")
    op = assemble(g)
    sd = eigendecompose(op)
    grid = TimeGrid.geometric(1.0, 1.5, 16)

    ones = np.ones(g.n)
    show("positive pair (ones, ones)", rate_inner(op, ones, ones, grid))

    # project the ground state out of a generic probe: with no mass at
    # E0 the decay is governed by the bottom of what remains
    v = np.cos(2 * np.pi * np.arange(g.n) / g.n)
    phi0 = sd.vectors[:, 0]
    f = v - phi0 * float(np.sum(phi0 * v * op.m))
    measure = spectral_measure(sd, f)
    print(f"\nspectral measure of the signed probe: "
          f"inf support = {measure.inf_support:.8f}")
    show("signed probe (f, f)", rate_inner(op, f, f, grid))


if __name__ == "__main__":
    main()
