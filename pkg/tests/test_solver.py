import numpy as np
import pytest

from relu2.core import Tolerances
from relu2.solver import (BUDGET_EXHAUSTED, OPTIMAL, ClsProblem, solve_cls, solve_cone_lsq,
                          solve_linear_feasibility)


def test_unconstrained_identity():
    b = np.array([1.0, -2.0, 3.0])
    out = solve_cls(ClsProblem(np.eye(3), b))
    np.testing.assert_allclose(out.z_star, b, atol=1e-12)
    assert out.objective == pytest.approx(0.0, abs=1e-20)
    assert out.ok


def test_halfspace_projection_1d():
    out = solve_cls(ClsProblem([[1.0]], [1.0], [([1.0], "<=")]))
    assert out.z_star[0] == pytest.approx(0.0, abs=1e-14)
    assert out.objective == pytest.approx(0.5)


def test_ge_sense():
    out = solve_cls(ClsProblem([[1.0]], [-1.0], [([1.0], ">=")]))
    assert out.z_star[0] == pytest.approx(0.0, abs=1e-14)


def test_random_problem_one_active_halfspace_matches_closed_form():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((5, 3))
    b = rng.standard_normal(5)
    z0 = np.linalg.lstsq(A, b, rcond=None)[0]
    g = z0 / np.linalg.norm(z0) + 0.1 * rng.standard_normal(3)
    assert g @ z0 > 0
    H = A.T @ A
    Hg = np.linalg.solve(H, g)
    expected = z0 - (g @ z0) / (g @ Hg) * Hg
    out = solve_cls(ClsProblem(A, b, [(g, "<=")]))
    np.testing.assert_allclose(out.z_star, expected, atol=1e-8)
    assert out.kkt_residual <= 1e-8


def test_ball_block_scales_target():
    out = solve_cls(ClsProblem(np.eye(4), [3.0, 4.0, 0.1, 0.0], ball_blocks=[([0, 1], 1.0), ([2, 3], 1.0)]))
    np.testing.assert_allclose(out.z_star, [0.6, 0.8, 0.1, 0.0], atol=1e-10)
    assert out.ok


def test_problem_validation():
    with pytest.raises(ValueError):
        ClsProblem(np.eye(2), [1.0])
    with pytest.raises(ValueError):
        ClsProblem(np.eye(2), [1.0, 2.0], [([1.0], "<=")])
    with pytest.raises(ValueError):
        ClsProblem(np.eye(2), [1.0, 2.0], [([1.0, 0.0], "<")])
    with pytest.raises(ValueError):
        ClsProblem(np.eye(2), [1.0, 2.0], ball_blocks=[([0], 1.0), ([0, 1], 1.0)])
    with pytest.raises(ValueError):
        ClsProblem(np.eye(2), [1.0, 2.0], ball_blocks=[([0], 0.0)])


def test_budget_exhaustion_is_reported():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 4))
    G = rng.standard_normal((8, 4))
    out = solve_cone_lsq(A, rng.standard_normal(6), G, max_iter=1)
    if out.status == BUDGET_EXHAUSTED:
        assert np.all(G @ out.z_star <= 1e-9)
    full = solve_cone_lsq(A, rng.standard_normal(6), G)
    assert full.status == OPTIMAL


def test_degenerate_apex_terminates():
    # many nearly parallel constraints through the origin used to cycle
    rng = np.random.default_rng(11)
    base = rng.standard_normal(4)
    G = base + 1e-3 * rng.standard_normal((12, 4))
    G[::2] *= -1
    A = rng.standard_normal((6, 4))
    A[:, 3] = A[:, 2]
    out = solve_cone_lsq(A, rng.standard_normal(6), G, max_iter=2000)
    assert out.ok and out.iterations < 2000


def test_deterministic():
    rng = np.random.default_rng(8)
    A, b, G = rng.standard_normal((5, 4)), rng.standard_normal(5), rng.standard_normal((6, 4))
    p = ClsProblem(A, b, [(g, "<=") for g in G], [([0, 1], 0.5), ([2, 3], 0.7)])
    o1, o2 = solve_cls(p), solve_cls(p)
    assert o1.z_star.tobytes() == o2.z_star.tobytes()
    assert o1.objective == o2.objective


def test_dump_json_contains_problem():
    p = ClsProblem(np.eye(2), [1.0, 0.0], [([1.0, 0.0], ">=")], [([0, 1], 1.0)])
    text = p.dump_json()
    assert '"ball_blocks"' in text and '"inequalities"' in text


def test_linear_feasibility_examples():
    res = solve_linear_feasibility([([1.0, 0.0, 0.0], 1.0)])
    assert res.feasible
    np.testing.assert_allclose(res.point, [1.0, 0.0, 0.0], atol=1e-9)
    res = solve_linear_feasibility([([1.0], 1.0)], [([1.0], "<=")])
    assert not res.feasible
    # realizable single unit for {(e1, 0.7), (e2, 0)}
    res = solve_linear_feasibility([([1.0, 0.0], 0.7)], [([0.0, 1.0], "<=")])
    assert res.feasible
    assert res.point[0] == pytest.approx(0.7, abs=1e-9) and res.point[1] <= 1e-9


def test_tolerance_controls_ok_flag():
    out = solve_cls(ClsProblem(np.eye(2), [1.0, -1.0], [([0.0, 1.0], ">=")]), Tolerances(kkt_tol=1e-8))
    assert out.ok and out.kkt_residual <= 1e-8
