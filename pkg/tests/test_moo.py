import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from lgtmoo.moo import (
    combine,
    descent_step,
    frank_wolfe_weights,
    kkt_residual,
    mgda_step,
    solve_alpha_two_task,
)

GRID = np.linspace(0.0, 1.0, 10001)
vectors = hnp.arrays(float, 4, elements=st.floats(-10, 10))


def grid_alpha(g1, g2):
    norms = np.linalg.norm(GRID[:, None] * g1 + (1 - GRID[:, None]) * g2, axis=1) ** 2
    return norms.min()


def objective(g1, g2, a):
    return float(np.linalg.norm(combine(g1, g2, a)) ** 2)


def test_alpha_examples():
    assert solve_alpha_two_task([1, 0], [0, 1]) == pytest.approx(0.5)
    a = solve_alpha_two_task([2, 0], [-1, 0])
    assert a == pytest.approx(1 / 3)
    assert np.allclose(combine([2, 0], [-1, 0], a), 0)
    assert solve_alpha_two_task([1, 1], [3, 3]) == 1.0
    assert solve_alpha_two_task([1, 1], [1, 1]) == 0.5


def test_alpha_length_mismatch():
    with pytest.raises(ValueError):
        solve_alpha_two_task([1, 0], [1, 0, 0])


@given(vectors, vectors)
def test_alpha_beats_grid(g1, g2):
    a = solve_alpha_two_task(g1, g2)
    assert 0.0 <= a <= 1.0
    assert objective(g1, g2, a) <= grid_alpha(g1, g2) + 1e-9


@given(vectors, vectors)
def test_frank_wolfe_two_tasks_matches_closed_form(g1, g2):
    w = frank_wolfe_weights([g1, g2], max_iters=2000, tol=1e-14)
    a = solve_alpha_two_task(g1, g2)
    assert objective(g1, g2, w[0]) == pytest.approx(objective(g1, g2, a), abs=1e-6)


def test_frank_wolfe_zero_vector():
    rng = np.random.default_rng(0)
    w = frank_wolfe_weights([rng.normal(size=3), rng.normal(size=3), np.zeros(3)], max_iters=5000, tol=0)
    assert w[2] == pytest.approx(1.0, abs=1e-3)
    assert kkt_residual([rng.normal(size=3), rng.normal(size=3), np.zeros(3)], [0, 0, 1]) == 0.0


@given(st.lists(vectors, min_size=3, max_size=3))
def test_frank_wolfe_below_vertices_and_samples(gs):
    w, hist = frank_wolfe_weights(gs, return_history=True)
    assert w.sum() == pytest.approx(1.0) and np.all(w >= 0)
    assert np.all(np.diff(hist) <= 1e-9)
    r = kkt_residual(gs, w)
    for v in np.eye(3):
        assert r <= kkt_residual(gs, v) + 1e-9
    rng = np.random.default_rng(0)
    for a in rng.dirichlet(np.ones(3), 20):
        assert r <= kkt_residual(gs, a) + 1e-6 * (1 + r)


def test_frank_wolfe_needs_two():
    with pytest.raises(ValueError):
        frank_wolfe_weights([[1.0, 2.0]])
    with pytest.raises(ValueError):
        frank_wolfe_weights([])


def test_kkt_examples():
    assert kkt_residual([[1, 2], [-1, -2]], [0.5, 0.5]) == 0.0
    assert kkt_residual([[3, 4], [1, 0]], [1, 0]) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        kkt_residual([[3, 4], [1, 0]], [1, 0, 0])


def test_descent_examples():
    p = np.arange(4.0)
    assert np.array_equal(descent_step(p, [[1, -1, 0, 0], [-1, 1, 0, 0]], 0.5, 0.02), p)
    out = descent_step(p, [[1, -1, 0, 0], [0, 0, 0, 0]], [1, 0], 0.02)
    assert np.allclose(out - p, [-0.02, 0.02, 0, 0])
    g = np.array([0.3, -1.0, 2.0, 0.5])
    two = descent_step(descent_step(p, [g, g], 0.4, 0.02), [g, g], 0.4, 0.02)
    assert np.allclose(two - p, -2 * 0.02 * g)
    with pytest.raises(ValueError):
        descent_step(p, [g, g], 0.5, 0.0)


@given(vectors, vectors)
def test_mgda_direction_decreases_both(g1, g2):
    _, rep = mgda_step(np.zeros(4), g1, g2, 0.02)
    d = combine(g1, g2, rep.alpha[0])
    # the min-norm point d satisfies d . g_t >= |d|^2 for both tasks
    assert d @ g1 >= d @ d - 1e-8 * (1 + d @ d)
    assert d @ g2 >= d @ d - 1e-8 * (1 + d @ d)
    assert rep.combined_gradient_norm == pytest.approx(np.linalg.norm(d))
