"""Emulating infinite models by growing finite restrictions.

Two experiments on segments of the half-line.  First, plain Dirichlet
restrictions: E0 = O(1/n^2) drains to zero and the ground state
flattens, the signature of a spectral bottom that stops being an
eigenvalue in the limit.  Second, a potential V(j) = j^2 growing along
the line: lambda0(L, V) drops without bound as the segments grow, and
the probe flags the divergence while the truncated energies E0(L - V^k)
stay finite, k by k.
"""
import numpy as np

from heatlab import (
    assemble,
    build_graph,
    eigendecompose,
    exhaustion_divergence_probe,
    lambda0,
)


def segment(n, boundary_kill=1.0):
    c = np.zeros(n)
    c[0] = c[-1] = boundary_kill  # Dirichlet edge folded into c
    return build_graph([str(i) for i in range(n)],
                       [(str(i), str(i + 1), 1.0) for i in range(n - 1)],
                       c=c)


def main():
    print("Dirichlet segments of the half-line:")
    print(f"  {'n':>4}  {'E0':>12}  {'phi0 at origin':>15}")
    for n in (25, 50, 100, 200):
        sd = eigendecompose(assemble(segment(n)))
        print(f"  {n:4d}  {sd.E0:12.6e}  {sd.vectors[0, 0]:15.6e}")
    print("  (both drain to zero: no surviving ground state)")

    print("\ngrowing potential V(j) = j^2 on growing segments:")
    stages = []
    for n in (10, 20, 40, 80):
        g = segment(n, boundary_kill=0.0)
        V = np.arange(n, dtype=float) ** 2
        stages.append((g, V))
        print(f"  n = {n:3d}: lambda0 = {lambda0(assemble(g), V):.3f}")
    probe = exhaustion_divergence_probe(stages, margin=1.0, ks=(4.0, 16.0))
    print(f"\ndivergence probe: diverging = {probe.diverging}, "
          f"limit = {probe.lambda0_limit}")
    print("truncated upper bounds E0(L - V^k) stay finite:")
    for n, row in zip(probe.sizes, probe.truncation_energies):
        print(f"  n = {n:3d}: " + "  ".join(f"{b:8.4f}" for b in row))


if __name__ == "__main__":
    main()
