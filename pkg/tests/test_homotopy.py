import numpy as np
import pytest

from l1linf.homotopy import (ProblemInstance, check_alternatives,
                             check_optimal_pair, duality_gap, eval_path,
                             solve_path)


def test_check_optimal_pair_scalar():
    inst = ProblemInstance([[1.0]], [2.0], 1.0)
    assert check_optimal_pair(inst, [1.0], [-1.0], 1.0)
    assert not check_optimal_pair(inst, [1.0], [1.0], 1.0)


def test_scalar_path():
    inst = ProblemInstance([[1.0]], [2.0], 0.0)
    path = solve_path(inst)
    assert path.terminated == "target-reached"
    assert len(path.breakpoints) == 2
    assert path.breakpoints[0].delta_k == pytest.approx(2.0)
    np.testing.assert_allclose(path.breakpoints[1].x, [2.0], atol=1e-12)
    np.testing.assert_allclose(path.breakpoints[1].y, [-1.0], atol=1e-12)


def test_identity_soft_threshold_path():
    inst = ProblemInstance(np.eye(2), [3.0, -0.5], 0.0)
    path = solve_path(inst)
    deltas = [bp.delta_k for bp in path.breakpoints]
    np.testing.assert_allclose(deltas, [3.0, 0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(path.breakpoints[1].x, [2.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(path.breakpoints[2].x, [3.0, -0.5], atol=1e-12)


def test_trivial_instance_when_delta_dominates():
    inst = ProblemInstance(np.eye(2), [1.0, -2.0], 5.0)
    path = solve_path(inst)
    assert path.terminated == "target-reached"
    assert len(path.breakpoints) == 1
    np.testing.assert_array_equal(path.breakpoints[0].x, [0.0, 0.0])


def test_eval_path_scalar():
    inst = ProblemInstance([[1.0]], [2.0], 0.0)
    path = solve_path(inst)
    x, y = eval_path(path, 1.0)
    np.testing.assert_allclose(x, [1.0], atol=1e-12)
    np.testing.assert_allclose(y, [-1.0], atol=1e-12)
    # exact breakpoint returns the stored pair
    x, y = eval_path(path, 2.0)
    np.testing.assert_array_equal(x, [0.0])
    with pytest.raises(ValueError):
        eval_path(path, 2.5)
    with pytest.raises(ValueError):
        eval_path(path, -0.1)


def random_instance(rng, delta_zero=False):
    m = int(rng.integers(4, 13))
    n = 2 * m
    a = rng.standard_normal((m, n))
    b = rng.standard_normal(m) * float(rng.uniform(0.5, 4.0))
    delta = 0.0 if delta_zero else float(rng.uniform(0.05, 0.95) * np.max(np.abs(b)))
    return ProblemInstance(a, b, delta)


def test_random_paths_certified_and_strictly_progressing():
    rng = np.random.default_rng(51)
    for trial in range(25):
        inst = random_instance(rng, delta_zero=(trial % 5 == 0))
        path = solve_path(inst)
        assert path.terminated == "target-reached", path.failure_reason
        assert len(path.breakpoints) - 1 <= 20 * (inst.m + inst.n)
        assert path.breakpoints[-1].delta_k == inst.delta
        for prev, cur in zip(path.breakpoints, path.breakpoints[1:]):
            assert cur.delta_k < prev.delta_k
            assert cur.t_step > 1e-12
        for bp in path.breakpoints:
            assert check_optimal_pair(inst, bp.x, bp.y, bp.delta_k)
            assert duality_gap(inst, bp.x, bp.y, bp.delta_k) <= \
                1e-8 * (1 + np.sum(np.abs(bp.x)))
            assert set(bp.sets.J_P.indices) <= set(bp.sets.J_D.indices)
            assert set(bp.sets.I_D.indices) <= set(bp.sets.I_P.indices)


def test_interpolated_points_are_optimal():
    rng = np.random.default_rng(52)
    for _ in range(8):
        inst = random_instance(rng)
        path = solve_path(inst)
        assert path.terminated == "target-reached"
        for upper, lower in zip(path.breakpoints, path.breakpoints[1:]):
            for w in (0.25, 0.5, 0.75):
                q = lower.delta_k + w * (upper.delta_k - lower.delta_k)
                x, y = eval_path(path, q)
                assert check_optimal_pair(inst, x, y, q)
                np.testing.assert_array_equal(y, lower.y)


def test_warm_and_cold_paths_agree():
    rng = np.random.default_rng(53)
    for _ in range(10):
        inst = random_instance(rng)
        warm = solve_path(inst)
        cold = solve_path(inst, use_warm_starts=False)
        assert warm.terminated == cold.terminated == "target-reached"
        assert abs(warm.objective - cold.objective) <= 1e-9 * (1 + cold.objective)


def test_alternatives_on_post_dual_pairs():
    # (x_k, y_{k+1}) admits primal progress: system 2 feasible, system 1 not
    rng = np.random.default_rng(54)
    inst = random_instance(rng)
    path = solve_path(inst)
    bps = path.breakpoints
    for prev, cur in zip(bps[:3], bps[1:4]):
        if prev.delta_k <= 1e-9:
            continue
        s1, s2 = check_alternatives(inst, prev.x, cur.y, prev.delta_k)
        assert not s1 and s2


def test_alternatives_on_recorded_breakpoints():
    # at a recorded mid-path pair the primal subproblem is fully converged:
    # only the dual can improve (system 1)
    rng = np.random.default_rng(55)
    inst = random_instance(rng)
    path = solve_path(inst)
    mids = path.breakpoints[1:-1]
    assert mids, "need a mid-path breakpoint for this instance"
    for bp in mids[:3]:
        s1, s2 = check_alternatives(inst, bp.x, bp.y, bp.delta_k)
        assert s1 and not s2


def test_alternatives_exclusive_on_random_pairs():
    rng = np.random.default_rng(56)
    checked = 0
    while checked < 40:
        inst = random_instance(rng)
        path = solve_path(inst)
        if path.terminated != "target-reached":
            continue
        for bp in path.breakpoints[1:]:
            if bp.delta_k <= 1e-9 or checked >= 40:
                break
            s1, s2 = check_alternatives(inst, bp.x, bp.y, bp.delta_k)
            assert s1 != s2
            checked += 1


def test_alternatives_precondition():
    inst = ProblemInstance([[1.0]], [2.0], 1.0)
    with pytest.raises(ValueError):
        check_alternatives(inst, [0.0], [0.9], 1.0)


def test_zero_row_reports_failure_not_hang():
    # a zero row makes the dual subproblem unbounded once it activates
    inst = ProblemInstance([[0.0], [1.0]], [2.0, 1.0], 0.0)
    path = solve_path(inst)
    assert path.terminated == "failure"
    assert path.failure_reason
    assert len(path.breakpoints) >= 1


def test_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance(np.zeros((0, 2)), [], 0.0)
    with pytest.raises(ValueError):
        ProblemInstance([[1.0]], [1.0], -0.5)
    with pytest.raises(ValueError):
        ProblemInstance([[np.inf]], [1.0], 0.5)


def test_overdetermined_feasible_target_solves():
    # more rows than columns: the path exists down to the least feasible
    # bound min_x ||Ax-b||_inf and the solver certifies the whole way
    rng = np.random.default_rng(57)
    a = rng.standard_normal((10, 4))
    b = rng.standard_normal(10) * 2
    ls = np.linalg.lstsq(a, b, rcond=None)[0]
    target = float(np.max(np.abs(a @ ls - b)))  # >= Chebyshev minimum
    inst = ProblemInstance(a, b, target)
    path = solve_path(inst)
    assert path.terminated == "target-reached"
    for bp in path.breakpoints:
        assert check_optimal_pair(inst, bp.x, bp.y, bp.delta_k)


def test_overdetermined_infeasible_target_fails_with_diagnosis():
    rng = np.random.default_rng(58)
    a = rng.standard_normal((12, 4))
    b = rng.standard_normal(12) * 2
    inst = ProblemInstance(a, b, 0.0)  # 0 < min_x ||Ax-b||_inf almost surely
    path = solve_path(inst)
    assert path.terminated == "failure"
    assert "minimal feasible bound" in path.failure_reason


def test_all_rows_tied_at_start():
    rng = np.random.default_rng(59)
    a = rng.standard_normal((5, 10))
    b = rng.choice([-1.0, 1.0], 5) * 2.0
    inst = ProblemInstance(a, b, 0.7)
    path = solve_path(inst)
    assert path.terminated == "target-reached"
    assert len(path.breakpoints[0].sets.I_P) == 5
    for bp in path.breakpoints:
        assert check_optimal_pair(inst, bp.x, bp.y, bp.delta_k)


def test_exact_low_rank_matrix():
    rng = np.random.default_rng(60)
    u = rng.standard_normal((6, 2))
    a = u @ rng.standard_normal((2, 10))
    b = u @ rng.standard_normal(2)  # in range(A): delta = 0 stays feasible
    inst = ProblemInstance(a, b, 0.0)
    path = solve_path(inst)
    assert path.terminated == "target-reached"
    for bp in path.breakpoints:
        assert check_optimal_pair(inst, bp.x, bp.y, bp.delta_k)
