"""Build a weighted graph, look at its spectrum, and evaluate the kernel.

The heat kernel p_t(x,y) is the matrix of e^{-tL} against the vertex
measure m.  Two structural identities pin it down: symmetry in (x,y)
and the Chapman-Kolmogorov composition rule.  Both are checked here on
a small path with a killing term on one end.
"""
from pathlib import Path

from heatlab import (
    assemble,
    chapman_kolmogorov_defect,
    eigendecompose,
    heat_kernel,
    kernel_symmetry_defect,
    load_graph,
)

DATA = Path(__file__).parent / "data"


def main():
    g = load_graph(DATA / "path3.json")
    op = assemble(g)
    sd = eigendecompose(op)
    print(f"graph: {g.n} vertices, E0 = {sd.E0:.6f}, gap = {sd.gap:.6f}")
    print(f"eigenvalues: {[round(float(e), 6) for e in sd.eigenvalues]}")

    for t in (0.1, 1.0, 10.0):
        K = heat_kernel(op, t)
        print(f"\np_t at t = {t}:")
        for i, x in enumerate(g.vertices):
            row = "  ".join(f"{K.p[i, j]:10.3e}" for j in range(g.n))
            print(f"  {x}: {row}")

    print(f"\nsymmetry defect at t = 1: "
          f"{kernel_symmetry_defect(heat_kernel(op, 1.0)):.2e}")
    print(f"composition defect p_0.3 * p_1.7 vs p_2: "
          f"{chapman_kolmogorov_defect(op, 0.3, 1.7):.2e}")


if __name__ == "__main__":
    main()
