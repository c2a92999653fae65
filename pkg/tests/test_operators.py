import numpy as np
import numpy.testing as npt
import pytest

from heatlab import assemble, build_graph, dirichlet_energy
from heatlab.errors import ZeroVector
from heatlab.operators import (
    coefficients,
    eigendecompose,
    shift_by_potential,
    spectral_measure,
)
from heatlab.verify import random_graph, random_vector


def test_assemble_single_edge(single_edge_op):
    npt.assert_allclose(single_edge_op.A, [[1.0, -1.0], [-1.0, 1.0]])
    npt.assert_allclose(single_edge_op.S, single_edge_op.A)
    assert single_edge_op.lower_bound == 0.0


def test_assemble_pure_potential():
    g = build_graph(["1", "2", "3"], [], m=[1.0, 2.0, 4.0], c=[3.0, 0.0, 2.0])
    op = assemble(g)
    npt.assert_allclose(op.A, np.diag([3.0, 0.0, 0.5]))
    sd = eigendecompose(op)
    npt.assert_allclose(sd.eigenvalues, [0.0, 0.5, 3.0], atol=1e-14)


def test_doubling_measure_halves_operator(rng):
    g = random_graph(rng, n_max=12, c_scale=1.0)
    g2 = build_graph(g.vertices,
                     [(g.vertices[i], g.vertices[j], w) for i, j, w in g.edges],
                     m=2.0 * g.m, c=g.c)
    op, op2 = assemble(g), assemble(g2)
    npt.assert_allclose(op2.A, 0.5 * op.A, rtol=1e-13, atol=1e-13)
    npt.assert_allclose(eigendecompose(op2).eigenvalues,
                        0.5 * eigendecompose(op).eigenvalues,
                        rtol=1e-10, atol=1e-12)


def test_form_identity_random(rng):
    # <Au, v>_m recovers the quadratic form, both on the basis and on
    # random vectors
    for _ in range(20):
        g = random_graph(rng, n_max=30, c_scale=1.0)
        op = assemble(g)
        u = rng.standard_normal(g.n)
        v = rng.standard_normal(g.n)
        q = dirichlet_energy(g, u, v)
        assert abs(op.inner(op.A @ u, v) - q) <= 1e-10 * (1 + abs(q))


def test_s_symmetric_and_bounded_below(rng):
    for _ in range(10):
        op = assemble(random_graph(rng, n_max=25, c_scale=1.0))
        defect = np.linalg.norm(op.S - op.S.T) / max(np.linalg.norm(op.S), 1)
        assert defect <= 1e-12
        assert op.lower_bound <= eigendecompose(op).E0 + 1e-12


def test_eigendecompose_single_edge(single_edge_op):
    sd = eigendecompose(single_edge_op)
    npt.assert_allclose(sd.eigenvalues, [0.0, 2.0], atol=1e-14)
    npt.assert_allclose(sd.vectors[:, 0], [2 ** -0.5, 2 ** -0.5])
    assert sd.E0 == pytest.approx(0.0, abs=1e-14)
    assert sd.gap == pytest.approx(2.0)


def test_trace_identity(rng):
    for _ in range(10):
        op = assemble(random_graph(rng, n_max=30, c_scale=0.7))
        sd = eigendecompose(op)
        assert np.sum(sd.eigenvalues) == pytest.approx(
            np.trace(op.S), rel=1e-10, abs=1e-10)


def test_m_orthonormality_and_projection(rng):
    for _ in range(10):
        op = assemble(random_graph(rng, n_max=25))
        sd = eigendecompose(op)
        G = sd.vectors.T @ np.diag(op.m) @ sd.vectors
        npt.assert_allclose(G, np.eye(op.n), atol=1e-10)
        P = sd.P
        npt.assert_allclose(P @ P, P, atol=1e-10)
        # m-selfadjoint: D_m P symmetric
        npt.assert_allclose(np.diag(op.m) @ P, (np.diag(op.m) @ P).T,
                            atol=1e-10)


def test_perron_ground_state(rng):
    for _ in range(15):
        op = assemble(random_graph(rng, n_max=40, c_scale=0.5))
        sd = eigendecompose(op)
        ground = sd.vectors[:, 0]
        assert np.all(ground > 0)
        assert ground.min() >= 1e-12 * ground.max()
        assert sd.groups[0] == (0, 1)


def test_disconnected_direct_sum_spectrum(rng):
    g1 = random_graph(rng, n_max=10)
    g2 = random_graph(rng, n_max=10)
    verts = [f"L{v}" for v in g1.vertices] + [f"R{v}" for v in g2.vertices]
    edges = ([(f"L{g1.vertices[i]}", f"L{g1.vertices[j]}", w)
              for i, j, w in g1.edges]
             + [(f"R{g2.vertices[i]}", f"R{g2.vertices[j]}", w)
                for i, j, w in g2.edges])
    g = build_graph(verts, edges,
                    m=np.concatenate([g1.m, g2.m]),
                    c=np.concatenate([g1.c, g2.c]))
    ev = eigendecompose(assemble(g)).eigenvalues
    parts = np.sort(np.concatenate([
        eigendecompose(assemble(g1)).eigenvalues,
        eigendecompose(assemble(g2)).eigenvalues]))
    npt.assert_allclose(ev, parts, atol=1e-9)


def test_variational_characterization(rng, single_edge_op):
    op = assemble(random_graph(rng, n_max=20, c_scale=1.0))
    sd = eigendecompose(op)
    for _ in range(1000):
        u = rng.standard_normal(op.n)
        u /= op.norm(u)
        assert op.inner(op.A @ u, u) >= sd.E0 - 1e-12
    ground = sd.vectors[:, 0]
    assert op.inner(op.A @ ground, ground) == pytest.approx(sd.E0, abs=1e-10)


def test_eigendecompose_cached(single_edge_op):
    assert eigendecompose(single_edge_op) is eigendecompose(single_edge_op)


def test_spectral_measure_eigenvector_single_atom(rng):
    # atoms enumerate every eigenvalue group; an eigenvector charges
    # exactly one of them
    op = assemble(random_graph(rng, n_max=15))
    sd = eigendecompose(op)
    k = 2
    sm = spectral_measure(sd, sd.vectors[:, k])
    heavy = [(e, w) for e, w in sm.atoms if w > 1e-12]
    assert len(heavy) == 1
    e, w = heavy[0]
    assert e == pytest.approx(sd.eigenvalues[k])
    assert w == pytest.approx(1.0, rel=1e-10)
    assert sm.inf_support == pytest.approx(sd.eigenvalues[k])


def test_spectral_measure_delta_on_edge(single_edge_op):
    sd = eigendecompose(single_edge_op)
    sm = spectral_measure(sd, np.array([1.0, 0.0]))
    assert len(sm.atoms) == 2
    npt.assert_allclose([a[0] for a in sm.atoms], [0.0, 2.0], atol=1e-14)
    npt.assert_allclose([a[1] for a in sm.atoms], [0.5, 0.5], rtol=1e-12)
    assert sm.inf_support == pytest.approx(0.0, abs=1e-12)


def test_spectral_measure_parseval(rng):
    for _ in range(10):
        op = assemble(random_graph(rng, n_max=25))
        f = random_vector(rng, op.n)
        sm = spectral_measure(eigendecompose(op), f)
        assert sm.total_mass == pytest.approx(op.norm(f) ** 2, rel=1e-10)
        assert sum(a[1] for a in sm.atoms) == pytest.approx(
            sm.total_mass, rel=1e-10)


def test_spectral_measure_rejects_zero(single_edge_op):
    with pytest.raises(ZeroVector):
        spectral_measure(eigendecompose(single_edge_op), np.zeros(2))


def test_coefficients_reconstruct(rng):
    op = assemble(random_graph(rng, n_max=15))
    sd = eigendecompose(op)
    f = rng.standard_normal(op.n)
    npt.assert_allclose(sd.vectors @ coefficients(sd, f), f, atol=1e-10)


def test_shift_by_potential_lowers_diagonal(single_edge_op):
    shifted = shift_by_potential(single_edge_op, np.array([3.0, 0.0]))
    npt.assert_allclose(shifted.A, [[-2.0, -1.0], [-1.0, 1.0]])
    assert shifted.lower_bound <= eigendecompose(shifted).E0


def test_dense_solver_size_cutoff():
    from heatlab.operators import DENSE_LIMIT, OperatorRep

    n = DENSE_LIMIT + 1
    d = np.ones(n)
    op = OperatorRep(n=n, A=np.diag(d), S=np.diag(d), m=np.ones(n),
                     lower_bound=0.0, graph=None)
    with pytest.raises(ValueError):
        eigendecompose(op)
