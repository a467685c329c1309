import math
import pathlib

import numpy as np
import pytest

import multibang as mb

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"
PHASES = [-math.pi, -math.pi / 3, math.pi / 3]


def test_radial_prox_matches_oracle():
    pen = mb.Penalty.radial(1.0, PHASES, 0.1)
    rng = np.random.default_rng(0)
    for q in rng.uniform(-5, 5, size=(200, 2)):
        w = pen.prox(q, 0.1)
        ref = mb.prox_oracle(q, pen.points(), 0.1, 0.1)
        assert np.linalg.norm(w - ref) <= 1e-6
        assert np.allclose(pen.my(q, 0.1), (q - w) / 0.1, atol=1e-10)


def test_concentric_values():
    pen = mb.Penalty.concentric(1e-3)
    assert np.allclose(pen.my(np.array([10.0, 10.0]), 1e-2), [2.0, 2.0])
    assert np.allclose(pen.newton_derivative(np.zeros(2), 1e-2), np.eye(2) / 1e-2)
    assert pen.count_nonmultibang(np.zeros((5, 2)), 1e-2) == 5
    assert pen.value(np.array([1.0, 1.0])) == pytest.approx(pen.min_cost())


def test_bloch_gradient_direction():
    prob = mb.BlochProblem([2.6751], 5.0, 200)
    rng = np.random.default_rng(1)
    u = rng.normal(size=(200, 2))
    phi = rng.normal(size=(200, 2))
    p = mb.reduced_gradient(prob, u)
    eps = 1e-5
    fd = (mb.objective(prob, u + eps * phi) - mb.objective(prob, u - eps * phi)) / (2 * eps)
    assert -prob.dt * np.sum(p * phi) == pytest.approx(fd, rel=1e-6, abs=1e-9)
    traj = mb.forward_solve(prob, u)
    assert np.allclose(np.linalg.norm(traj.reshape(-1, 3), axis=1), 1.0, atol=1e-12)


def test_assembly_symmetric():
    sys = mb.assemble(5, 9)
    A = sys["A"].toarray()
    assert np.array_equal(A, A.T)


def test_small_elasticity_solve():
    out = mb.solve_elasticity(9, 17, mb.Penalty.concentric(1e-3), gamma_min=1e-3)
    assert out["u"].shape == (9 * 17, 2)
    assert out["report"]["completed"]
    assert np.all(out["y"][:9] == 0.0)


def test_config_round_trip_and_run(tmp_path):
    text = (CONFIGS / "bloch_m3.cfg").read_text()
    echoed = mb.parse_config(text)
    assert mb.parse_config(echoed) == echoed
    code, _ = mb.run(str(CONFIGS / "elast_small.cfg"), str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "report.csv").exists()
