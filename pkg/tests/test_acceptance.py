"""The acceptance gate: ten numbered criteria, one verdict line each.

Each criterion is its own test, so the ``-v`` summary doubles as the
scoreboard; run with ``-s`` to see the explicit verdict lines as well.
Tolerances here are contractual -- do not loosen them to make a
failing build pass.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
from numpy.random import default_rng

from heatlab import (
    TimeGrid,
    admissibility_check,
    apply,
    approximated_solution,
    assemble,
    build_graph,
    closed_orbit,
    counterexample_rate,
    discretize,
    dump_graph,
    eigendecompose,
    groundstate_limit,
    lambda0,
    rate_inner,
    rate_kernel,
    run_suite,
    shift_by_potential,
    shift_model,
    shift_orbit,
    spectral_measure,
    sv_limit,
    truncation_ladder,
    validate_metric_graph,
)
from heatlab.cli import main
from heatlab.errors import PositivityConnectivityMismatch
from heatlab.verify import (
    kernel_axioms_section,
    positivity_section,
    random_graph,
    random_vector,
    rayleigh_section,
    taylor_agreement_section,
)


@contextmanager
def verdict(num, name):
    try:
        yield
    except BaseException:
        print(f"[criterion {num:02d}] {name}: FAIL")
        raise
    print(f"[criterion {num:02d}] {name}: PASS")


def path_graph(n, c0=0.0):
    c = np.zeros(n)
    c[0] = c0
    return build_graph([str(i) for i in range(n)],
                       [(str(i), str(i + 1), 1.0) for i in range(n - 1)],
                       c=c)


def test_criterion_01_kernel_axioms():
    with verdict(1, "kernel axioms on 100 random graphs"):
        start = time.perf_counter()
        section = kernel_axioms_section(seed=0, count=100)
        elapsed = time.perf_counter() - start
        assert section.passed
        assert len(section.reports) == 300  # symmetry once, composition twice
        assert max(r.production for r in section.reports) <= 1e-10
        assert elapsed <= 30.0


def test_criterion_02_semigroup_converges_to_ground_projection():
    with verdict(2, "||e^{tE0}e^{-tL}f - Pf|| within the gap envelope"):
        rng = default_rng(2)
        times = TimeGrid.geometric(0.5, 2.0, 5).times
        for _ in range(100):
            op = assemble(random_graph(rng, 30))
            sd = eigendecompose(op)
            f = random_vector(rng, op.n)
            norm_f = op.norm(f)
            for t in times:
                lhs = op.norm(math.exp(sd.E0 * t) * apply(op, t, f)
                              - sd.P @ f)
                assert lhs <= norm_f * math.exp(-sd.gap * t) + 1e-10


def test_criterion_03_pairing_rates_match_spectral_support():
    with verdict(3, "differenced pairing rates hit the spectral bottom"):
        rng = default_rng(3)
        for i in range(40):
            op = assemble(random_graph(rng, 20))
            sd = eigendecompose(op)
            # positive pair: the rate is the bottom of the full spectrum
            f = random_vector(rng, op.n, positive=True)
            g = random_vector(rng, op.n, positive=True)
            t_end = 40.0 / sd.gap
            grid = TimeGrid.geometric(t_end / 1.3 ** 14, 1.3, 15)
            est = rate_inner(op, f, g, grid)
            assert est.target == sd.E0
            assert abs(est.differenced - est.target) <= 1e-6

            # arbitrary signed f against itself: inf supp of its measure
            u = random_vector(rng, op.n)
            measure = spectral_measure(sd, u)
            heavy = [(E, w) for E, w in measure.atoms
                     if w > 1e-12 * measure.total_mass]
            if len(heavy) > 1:
                # horizon where the bottom atom dominates by e^{-40}
                geff = heavy[1][0] - heavy[0][0]
                pad = max(math.log(max(w for _, w in heavy) / heavy[0][1]),
                          0.0)
                t_end = (40.0 + pad) / geff
                grid = TimeGrid.geometric(t_end / 1.3 ** 14, 1.3, 15)
            est = rate_inner(op, u, u, grid)
            assert est.target == measure.inf_support
            assert abs(est.differenced - est.target) <= 1e-6


def test_criterion_04_kernel_product_limit():
    with verdict(4, "e^{tE0} p_t factorizes through the ground state"):
        instances = (path_graph(12), path_graph(12, c0=0.5),
                     build_graph([str(i) for i in range(16)],
                                 [(str(i), str((i + 1) % 16), 1.0)
                                  for i in range(16)]))
        for g in instances:
            op = assemble(g)
            sd = eigendecompose(op)
            gap = sd.gap
            grid = TimeGrid.geometric(1.0, 1.5,
                                      int(np.ceil(np.log(50.0 / gap)
                                                  / np.log(1.5))) + 1)
            profile = groundstate_limit(op, grid)
            late = gap * grid.times >= 40.0
            assert late.any()
            assert np.all(profile.residual_history[late] <= 1e-8)
            assert np.max(np.abs(profile.Phi - sd.vectors[:, 0])) <= 1e-8

            # kernel-entry rate at t = 1e3/gap; the profile term
            # log Phi(x)Phi(y) must sit inside the 1e-3 budget
            phi = sd.vectors[:, 0]
            x, y = 0, op.n - 1
            assert abs(math.log(phi[x] * phi[y])) <= 1.0 / gap
            t_star = 1e3 / gap
            grid = TimeGrid.geometric(t_star / 1.5 ** 9, 1.5, 10)
            est = rate_kernel(op, g.vertices[x], g.vertices[y], grid)
            assert abs(est.cesaro - sd.E0) <= 1e-3
            assert abs(est.differenced - sd.E0) <= 1e-6


def test_criterion_05_positivity_iff_connectivity(tmp_path, monkeypatch,
                                                 capsys):
    with verdict(5, "positivity improving == connected on 200 graphs"):
        section = positivity_section(seed=5, count=200)
        assert section.passed
        assert len(section.reports) == 200
        assert {r.oracle for r in section.reports} == {0.0, 1.0}

        # a mismatch must leave through exit code 3
        import heatlab.cli as cli_mod

        def mismatch(op):
            raise PositivityConnectivityMismatch("forced")

        monkeypatch.setattr(cli_mod, "positivity_improving", mismatch)
        data = tmp_path / "g.json"
        dump_graph(path_graph(2), data)
        assert main(["positivity", "--graph", str(data),
                     "--out", str(tmp_path)]) == 3
        capsys.readouterr()


def test_criterion_06_shift_counterexample_rates():
    with verdict(6, "shift-model growth rates reproduce lambda"):
        start = time.perf_counter()
        model = shift_model(0.25, 200)
        x = model.geometric(0.5)
        grid = TimeGrid(np.linspace(1.0, 60.0, 60))
        for lam in (0.6, 0.75):
            est = counterexample_rate(model, lam, x, grid)
            assert abs(est.differenced - lam) <= 1e-2
        for t in (1.0, 5.0, 10.0, 20.0, 40.0):
            exact = closed_orbit(model, 0.75, t)
            numeric = shift_orbit(model, 0.75, t)
            rel = (np.linalg.norm(numeric - exact)
                   / np.linalg.norm(exact))
            assert rel <= 1e-8
        assert time.perf_counter() - start <= 10.0


def test_criterion_07_admissibility_trichotomy():
    with verdict(7, "admissibility verdicts agree on both sides of "
                    "lambda0"):
        rng = default_rng(7)
        margins = (1e-3, 0.05, 0.7)
        grid = TimeGrid.geometric(0.5, 1.5, 8)
        for i in range(50):
            op = assemble(random_graph(rng, 12))
            V = rng.uniform(0.0, 2.0, size=op.n)
            f = rng.uniform(0.25, 1.0, size=op.n)
            lam = lambda0(op, V)
            for sign in (-1.0, 1.0):
                E = lam + sign * margins[i % 3]
                v = admissibility_check(op, V, E, f, f, grid, (1.0, 2.0))
                expected = E <= lam
                assert v.holds_i == v.holds_ii == v.holds_iii == expected
            if i % 5:
                continue
            ks = (0.5, 1.0, 2.0, float(np.max(V)) + 1.0)
            ladder = truncation_ladder(op, V, f, grid, ks)
            assert float(np.min(np.diff(ladder.trajectories, axis=0))) \
                >= -1e-11
            report = sv_limit(op, V, 1.0, f, ks)
            assert report.semigroup_law_residual <= 1e-10
            full = shift_by_potential(op, V)
            scale = max(1.0, op.norm(f) ** 2)
            for tau in (0.25, 0.1, 0.04):
                u_v = apply(full, tau, f)
                u_free = apply(op, tau, f)
                lhs = op.norm(u_v - u_free) ** 2
                rhs = op.inner(u_v, u_v) - op.inner(u_free, u_free)
                assert lhs <= rhs + 1e-12 * scale


def test_criterion_08_approximated_solutions():
    with verdict(8, "approximated solutions solve the ODE within the "
                    "exponential bound"):
        rng = default_rng(8)
        grid = TimeGrid.geometric(0.25, 1.5, 10)
        for _ in range(10):
            op = assemble(random_graph(rng, 10))
            V = rng.uniform(0.0, 3.0, size=op.n)
            f = rng.uniform(0.1, 1.0, size=op.n)
            sol = approximated_solution(op, V, f, grid,
                                        (1.0, 2.0, float(np.max(V)) + 1.0))
            assert np.max(sol.ode_residuals) <= 1e-6
            norm_f = op.norm(f)
            for j, t in enumerate(sol.times):
                assert op.norm(sol.values[j]) <= (
                    norm_f * math.exp(-sol.lambda0 * t) * (1.0 + 1e-9))


def test_criterion_09_metric_graph_eigenvalues():
    with verdict(9, "discretized metric graphs hit the continuum "
                    "eigenvalues"):
        dirichlet = validate_metric_graph({
            "vertices": [{"id": "a", "bc": "dirichlet"},
                         {"id": "b", "bc": "dirichlet"}],
            "edges": [{"id": "e", "i": "a", "j": "b", "l": 1.0}],
        })
        e0 = eigendecompose(assemble(discretize(dirichlet, 1 / 200))).E0
        assert abs(e0 - math.pi ** 2) <= 0.01 * math.pi ** 2
        errs = [abs(eigendecompose(assemble(discretize(dirichlet, h))).E0
                    - math.pi ** 2) for h in (1 / 50, 1 / 100)]
        assert abs(errs[0] / errs[1] - 4.0) <= 1.2  # order 2 in h

        circumference = 2.0 * math.pi
        circle = validate_metric_graph({
            "vertices": [{"id": "o"}],
            "edges": [{"id": "loop", "i": "o", "j": "o",
                       "l": circumference}],
        })
        sd = eigendecompose(assemble(discretize(circle, circumference / 400)))
        target = (2.0 * math.pi / circumference) ** 2
        assert abs(sd.eigenvalues[1] - target) <= 0.01 * target

        kirchhoff = validate_metric_graph({
            "vertices": [{"id": "a"}, {"id": "b"}],
            "edges": [{"id": "e", "i": "a", "j": "b", "l": 1.0}],
        })
        assert abs(eigendecompose(assemble(
            discretize(kirchhoff, 1 / 100))).E0) <= 1e-10


def test_criterion_10_oracle_equivalence():
    with verdict(10, "production evaluators match the independent "
                     "oracles"):
        section = taylor_agreement_section(seed=10, count=100)
        assert section.passed
        assert max(r.production for r in section.reports) <= 1e-9
        ray = rayleigh_section(seed=11, count=60)
        assert ray.passed
        assert max(r.abs_dev for r in ray.reports) <= 1e-6
        suite = run_suite(0)
        assert suite.passed
        assert suite.elapsed <= 300.0
