"""End-to-end runs of the command-line surface on the bundled data."""
import csv
import json

import numpy as np
import pytest

from heatlab import assemble, eigendecompose, heat_kernel, load_graph
from heatlab.cli import main, parse_vector
from heatlab.errors import (
    PositivityConnectivityMismatch,
    UnknownVertex,
    ValidationError,
)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_spectrum_artifact(tmp_path, data_dir):
    assert main(["spectrum", "--graph", str(data_dir / "path3.json"),
                 "--out", str(tmp_path)]) == 0
    with open(tmp_path / "spectrum.json") as fh:
        d = json.load(fh)
    assert d["vertices"] == ["1", "2", "3"]
    sd = eigendecompose(assemble(load_graph(data_dir / "path3.json")))
    assert d["E0"] == pytest.approx(sd.E0, abs=1e-15)
    assert d["spectral_gap"] == pytest.approx(sd.gap, abs=1e-15)
    assert sorted(i for grp in d["groups"] for i in grp) == [0, 1, 2]
    assert len(d["eigenvalues"]) == 3


def test_kernel_artifact_matches_library(tmp_path, data_dir):
    assert main(["kernel", "--graph", str(data_dir / "k2.json"),
                 "--t", "0.7", "--method", "expm",
                 "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "kernel.csv")
    assert header == ["x", "y", "p"]
    assert len(rows) == 4
    g = load_graph(data_dir / "k2.json")
    K = heat_kernel(assemble(g), 0.7)
    for x, y, p in rows:
        i, j = g.vertex_index(x), g.vertex_index(y)
        assert float(p) == pytest.approx(K.p[i, j], rel=1e-12)


def test_rate_inner_artifact(tmp_path, data_dir):
    assert main(["rate", "--graph", str(data_dir / "path3.json"),
                 "--count", "30", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "rate.csv")
    assert header == ["t", "log_value", "cesaro", "differenced",
                      "residual", "target"]
    assert len(rows) == 30
    e0 = eigendecompose(assemble(load_graph(data_dir / "path3.json"))).E0
    # ones has ground-state mass, so the target is the bottom energy
    assert float(rows[0][5]) == pytest.approx(e0, abs=1e-12)
    assert float(rows[-1][3]) == pytest.approx(e0, abs=1e-6)


def test_rate_rerun_is_byte_identical(tmp_path, data_dir):
    args = ["rate", "--graph", str(data_dir / "path3.json"),
            "--f", "random:11", "--g", "perron"]
    for sub in ("a", "b"):
        assert main(args + ["--out", str(tmp_path / sub)]) == 0
    assert (tmp_path / "a" / "rate.csv").read_bytes() == \
        (tmp_path / "b" / "rate.csv").read_bytes()


def test_rate_kernel_mode(tmp_path, data_dir):
    assert main(["rate", "--graph", str(data_dir / "path3.json"),
                 "--x", "1", "--y", "3", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "rate.csv")
    e0 = eigendecompose(assemble(load_graph(data_dir / "path3.json"))).E0
    assert float(rows[0][5]) == pytest.approx(e0, abs=1e-12)


def test_rate_kernel_mode_needs_both_endpoints(tmp_path, data_dir):
    assert main(["rate", "--graph", str(data_dir / "path3.json"),
                 "--x", "1", "--out", str(tmp_path)]) == 1


def test_groundstate_artifact(tmp_path, data_dir):
    assert main(["groundstate", "--graph", str(data_dir / "path3.json"),
                 "--out", str(tmp_path)]) == 0
    with open(tmp_path / "groundstate.json") as fh:
        d = json.load(fh)
    assert set(d) == {"E0", "spectral_gap", "eigenvalue_detected", "Phi"}
    assert d["eigenvalue_detected"] is True
    assert all(v > 0 for v in d["Phi"].values())
    _, rows = read_csv(tmp_path / "groundstate.csv")
    assert float(rows[-1][1]) <= float(rows[0][1])


def test_groundstate_without_gap_exits_2(tmp_path, data_dir, capsys):
    code = main(["groundstate", "--graph",
                 str(data_dir / "two_triangles.json"),
                 "--out", str(tmp_path)])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "NoSpectralGap"
    assert err["exit_code"] == 2


def test_positivity_verdicts(tmp_path, data_dir):
    assert main(["positivity", "--graph", str(data_dir / "path3.json"),
                 "--out", str(tmp_path / "conn")]) == 0
    assert main(["positivity", "--graph",
                 str(data_dir / "two_triangles.json"),
                 "--out", str(tmp_path / "disc")]) == 0
    with open(tmp_path / "conn" / "positivity.json") as fh:
        conn = json.load(fh)
    with open(tmp_path / "disc" / "positivity.json") as fh:
        disc = json.load(fh)
    assert conn == {"improving": True, "connected": True, "components": 1}
    assert disc == {"improving": False, "connected": False, "components": 2}


def test_forced_invariant_violation_exits_3(tmp_path, data_dir, capsys,
                                            monkeypatch):
    import heatlab.cli as cli_mod

    def broken(op):
        raise PositivityConnectivityMismatch("forced for the exit path")

    monkeypatch.setattr(cli_mod, "positivity_improving", broken)
    code = main(["positivity", "--graph", str(data_dir / "path3.json"),
                 "--out", str(tmp_path)])
    assert code == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "PositivityConnectivityMismatch"
    assert not (tmp_path / "positivity.json").exists()


def test_perturb_artifacts(tmp_path, data_dir):
    assert main(["perturb", "--graph", str(data_dir / "path3.json"),
                 "--potential", str(data_dir / "well_potential.json"),
                 "--E", "-3.0", "--ks", "1,2,4",
                 "--out", str(tmp_path)]) == 0
    with open(tmp_path / "perturb.json") as fh:
        d = json.load(fh)
    assert d["admissibility"]["admissible"] is True
    assert d["admissibility"]["E"] == -3.0
    assert d["lambda0"] > -3.0
    header, rows = read_csv(tmp_path / "ladder.csv")
    assert header == ["k", "t", "log_norm"]
    by_t = {}
    for k, t, ln in rows:
        by_t.setdefault(float(t), []).append((float(k), float(ln)))
    for pairs in by_t.values():
        lns = [ln for _, ln in sorted(pairs)]
        assert all(b >= a - 1e-9 for a, b in zip(lns, lns[1:]))


def test_solve_artifacts(tmp_path, data_dir):
    assert main(["solve", "--graph", str(data_dir / "path3.json"),
                 "--potential", str(data_dir / "well_potential.json"),
                 "--out", str(tmp_path)]) == 0
    with open(tmp_path / "solve.json") as fh:
        d = json.load(fh)
    assert set(d) == {"lambda0", "max_ode_residual", "max_log_bound_margin"}
    assert d["max_ode_residual"] <= 1e-6
    assert d["max_log_bound_margin"] <= 1e-9
    _, rows = read_csv(tmp_path / "solve.csv")
    assert len(rows) == 10 * 3  # grid times x vertices


def test_counterexample_artifacts(tmp_path):
    assert main(["counterexample", "--lambda2", "0.6",
                 "--out", str(tmp_path)]) == 0
    with open(tmp_path / "counterexample.json") as fh:
        d = json.load(fh)
    assert d["mu"] == 0.25 and d["N"] == 200
    assert d["rates"]["0.75"] == pytest.approx(0.75, abs=0.05)
    assert d["rates"]["0.6"] == pytest.approx(0.6, abs=0.05)
    assert d["orbit_defect"] <= 1e-8
    header, rows = read_csv(tmp_path / "counterexample.csv")
    assert header == ["t", "lambda", "log_pairing", "differenced_rate"]
    assert len(rows) == 2 * 60


def test_counterexample_rejects_short_tail(tmp_path, capsys):
    assert main(["counterexample", "--N", "40",
                 "--out", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == \
        "TruncationInsufficient"


def test_metric_then_delegates(tmp_path, data_dir):
    assert main(["metric", "--graph", str(data_dir / "star.json"),
                 "--mesh", "0.1", "--out", str(tmp_path),
                 "--then", "spectrum", "--out", str(tmp_path)]) == 0
    g = load_graph(tmp_path / "discretized.json")
    assert g.n > 4  # interior points added
    with open(tmp_path / "spectrum.json") as fh:
        d = json.load(fh)
    assert len(d["eigenvalues"]) == g.n


def test_verify_artifact_and_seed_fallback(tmp_path, monkeypatch):
    assert main(["verify", "--seed", "5",
                 "--out", str(tmp_path / "flag")]) == 0
    monkeypatch.setenv("HEATLAB_SEED", "5")
    assert main(["verify", "--out", str(tmp_path / "env")]) == 0
    flag = (tmp_path / "flag" / "verify.json").read_bytes()
    assert flag == (tmp_path / "env" / "verify.json").read_bytes()
    d = json.loads(flag)
    assert d["seed"] == 5 and d["passed"] is True
    assert "elapsed" not in d
    assert all("elapsed" not in s for s in d["sections"])


@pytest.mark.parametrize("argv", [
    ["spectrum", "--graph", "/nonexistent/graph.json"],
    ["rate", "--graph", "DATA/path3.json", "--f", "bogus"],
    ["kernel", "--graph", "DATA/path3.json", "--t", "-1"],
    ["frobnicate"],
    ["rate", "--graph", "DATA/path3.json", "--t0", "-2"],
])
def test_bad_input_exits_1(tmp_path, data_dir, capsys, argv):
    argv = [a.replace("DATA", str(data_dir)) for a in argv]
    assert main(argv + ["--out", str(tmp_path)]
                if argv[0] != "frobnicate" else argv) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 1


def test_schema_flag_prints_without_artifacts(tmp_path, capsys):
    assert main(["rate", "--schema", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "rate.csv" in out and "differenced" in out
    assert list(tmp_path.iterdir()) == []


def test_parse_vector_shorthands(data_dir):
    g = load_graph(data_dir / "two_triangles.json")
    op = assemble(g)
    np.testing.assert_array_equal(parse_vector("ones", g, op), np.ones(6))
    delta = parse_vector("deltad", g, op)
    assert delta[g.vertex_index("d")] == 1.0 and delta.sum() == 1.0
    # numeric label falls back to 0-based position when no id matches
    by_pos = parse_vector("delta0", g, op)
    assert by_pos[0] == 1.0 and by_pos.sum() == 1.0
    r1 = parse_vector("random:7", g, op)
    np.testing.assert_array_equal(r1, parse_vector("random:7", g, op))
    assert np.all(r1 > 0)
    perron = parse_vector("perron", g, op)
    np.testing.assert_allclose(perron,
                               eigendecompose(op).vectors[:, 0])
    with pytest.raises(ValidationError):
        parse_vector("bogus", g, op)
    with pytest.raises(UnknownVertex):
        parse_vector("deltanope", g, op)
