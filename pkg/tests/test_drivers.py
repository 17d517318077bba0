import numpy as np
import pytest

from lgtmoo.drivers import (
    RunConfig,
    run_temperature_sweep,
    run_vqe,
    run_vqe_penalty,
    run_vqt,
    run_vqt_penalty,
)
from lgtmoo.lgt_model import ModelSpec, ed_thermal

N2 = ModelSpec(2)


@pytest.fixture(scope="module")
def converged_vqe():
    return run_vqe(RunConfig(N2, restarts=1, seed=1, max_iters=3000))


@pytest.mark.parametrize("kw", [
    {"mode": "nope"}, {"eta": 0.0}, {"max_iters": 0}, {"restarts": 0},
    {"temperature": -1.0}, {"mu": -0.5}, {"mu_grid": (0.0, -1.0)}, {"t_grid": (1.0, 0.0)},
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        RunConfig(N2, **kw)


def test_defaults():
    c = RunConfig(N2)
    assert (c.n_blocks, c.eta, c.max_iters, c.kkt_tol, c.l2_tol, c.restarts) == (3, 0.02, 20000, 1e-4, 1e-2, 5)
    assert (c.model.t, c.model.h) == (1.0, 0.5)


def test_mode_checked():
    with pytest.raises(ValueError):
        run_vqe(RunConfig(N2, mode="vqt_moo", temperature=1.0))
    with pytest.raises(ValueError):
        run_vqt(RunConfig(N2, mode="vqt_moo"))


def test_converged_run(converged_vqe):
    s = converged_vqe.summary
    assert converged_vqe.converged
    assert s["iterations"] == len(converged_vqe.records)
    assert converged_vqe.final.kkt_residual < 1e-4
    assert converged_vqe.final.l2 < 1e-2
    assert s["abs_error"] == pytest.approx(abs(s["l1"] - s["oracle_energy"]))
    assert abs(s["l1"] - (-1.0)) < 1e-2


def test_fixed_point_restart(converged_vqe):
    theta = converged_vqe.summary["theta"]
    tr = run_vqe(RunConfig(N2, restarts=1), theta0=theta)
    assert tr.records[0].kkt_residual < 1e-4
    assert tr.summary["iterations"] == 1


def test_vacuum_start_is_stationary():
    # |0...0> is physical and an eigenstate of H: both gradients vanish at theta = 0
    tr = run_vqe(RunConfig(N2, restarts=1, max_iters=50), theta0=np.zeros(24))
    assert tr.records[0].l2 == 0.0
    assert np.all(np.diff(tr.l1_series()) <= 1e-12)
    assert tr.converged


def test_constraint_progress_window():
    tr = run_vqe(RunConfig(N2, restarts=1, seed=4, max_iters=1500, theta_scale=0.6))
    l2 = tr.l2_series()
    alpha = np.array([r.alpha for r in tr.records])
    for i in range(len(l2) - 50):
        if l2[i] > 1e-2 and alpha[i] < 1:
            assert l2[i + 50] <= l2[i] + 1e-3


def test_deterministic_and_batch_independent():
    a = run_vqe(RunConfig(N2, restarts=2, seed=9, max_iters=200))
    b = run_vqe(RunConfig(N2, restarts=2, seed=9, max_iters=200))
    assert a.records == b.records
    rows = [r["l1"] for r in a.summary["restarts"]]
    single = run_vqe(RunConfig(N2, restarts=1, seed=9, max_iters=200))
    assert single.summary["restarts"][0]["l1"] == pytest.approx(rows[0], abs=1e-12)


def test_unconverged_is_flagged():
    tr = run_vqe(RunConfig(N2, restarts=2, max_iters=5))
    assert not tr.converged and tr.summary["iterations"] == 5


def test_penalty_records():
    traces = run_vqe_penalty(RunConfig(N2, mode="vqe_penalty", restarts=1, max_iters=30, mu_grid=(0.0, 1.0)))
    assert [t.summary["mu"] for t in traces] == [0.0, 1.0]
    assert traces[1].records[0].alpha == pytest.approx(0.5)
    assert traces[0].summary["unconstrained_energy"] < traces[0].summary["oracle_energy"]


def test_penalty_default_grid():
    traces = run_vqe_penalty(RunConfig(N2, mode="vqe_penalty", restarts=1, max_iters=1))
    assert [t.summary["mu"] for t in traces] == [0.25 * k for k in range(13)]


def test_vqt_maximally_mixed_start():
    rng = np.random.default_rng(0)
    x0 = np.concatenate([rng.uniform(-1, 1, 24), np.full(4, np.pi / 4)])
    tr = run_vqt(RunConfig(N2, mode="vqt_moo", temperature=0.7, restarts=1, max_iters=1), x0=x0)
    assert tr.records[0].l1 == pytest.approx(-0.7 * 4 * np.log(2), abs=1e-12)
    assert tr.records[0].l2 == pytest.approx(2.0, abs=1e-12)
    assert tr.summary["oracle_free_energy"] == pytest.approx(ed_thermal(N2, 0.7).free_energy)


def test_vqt_penalty_and_sweep_shapes():
    cfg = RunConfig(N2, mode="vqt_penalty", temperature=1.0, restarts=1, max_iters=3, mu_grid=(0.0, 2.0))
    assert [t.summary["mu"] for t in run_vqt_penalty(cfg)] == [0.0, 2.0]
    sweep = RunConfig(N2, mode="vqt_moo", temperature=1.0, t_grid=(0.5, 2.0), restarts=1, max_iters=3)
    out = run_temperature_sweep(sweep)
    assert [t.summary["temperature"] for t in out] == [0.5, 2.0]


def test_single_temperature_sweep_is_run_vqt():
    cfg = RunConfig(N2, mode="vqt_moo", temperature=1.5, restarts=1, max_iters=4)
    (swept,) = run_temperature_sweep(cfg)
    assert swept.records == run_vqt(cfg).records


def test_vqt_low_temperature_reaches_ground():
    # near T = 0 the free energy starts above the oracle and descent reaches the ground state
    tr = run_vqt(RunConfig(N2, mode="vqt_moo", temperature=1e-3))
    assert tr.converged
    assert abs(tr.summary["l1"] - (-1.0)) < 5e-2


def test_large_penalty_reaches_constrained_ground():
    (tr,) = run_vqe_penalty(RunConfig(N2, mode="vqe_penalty", restarts=2, mu=10.0))
    assert tr.converged
    assert abs(tr.summary["l1"] - tr.summary["oracle_energy"]) < 2e-2


def test_theta_scale_defaults_per_mode():
    assert RunConfig(N2).theta_scale == 0.1
    assert RunConfig(N2, mode="vqe_penalty").theta_scale == pytest.approx(np.pi)
    assert RunConfig(N2, mode="vqe_penalty", theta_scale=0.3).theta_scale == 0.3
    with pytest.raises(ValueError):
        RunConfig(N2, theta_scale=-1.0)
