"""Experiment loops: MGDA and penalty variants of VQE and VQT, plus sweeps.

Every run draws its initial parameters from one ``numpy.random.Generator``
seeded by ``RunConfig.seed``; restarts consume that generator in order, so a
trace is a deterministic function of (config, seed).
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from . import lgt_model
from .ansatz import build_ansatz
from .lgt_model import ModelSpec
from .moo import kkt_residual, solve_alpha_two_task
from .objectives import VQEProblem, VQTProblem

MODES = ("vqe_moo", "vqe_penalty", "vqt_moo", "vqt_penalty")
DEFAULT_MU_GRID = tuple(np.round(np.arange(0.0, 3.0001, 0.25), 10))
# MGDA runs start near the physical vacuum. Penalty runs start anywhere on the
# full period: the vacuum is an eigenstate of H, so a small-angle start would
# pin weak-penalty runs at that critical point whatever mu is.
THETA_SCALE = {"vqe_moo": 0.1, "vqt_moo": 0.1, "vqe_penalty": np.pi, "vqt_penalty": np.pi}


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    mode: str = "vqe_moo"
    n_blocks: int = 3
    eta: float = 0.02
    max_iters: int = 20000
    kkt_tol: float = 1e-4
    l2_tol: float = 1e-2
    seed: int = 0
    restarts: int = 5
    temperature: float | None = None
    mu: float | None = None
    mu_grid: tuple[float, ...] | None = None
    t_grid: tuple[float, ...] | None = None
    ring: bool = True
    theta_scale: float | None = None  # None: the per-mode default in THETA_SCALE
    phi_center: float = np.pi / 4
    phi_width: float = 0.3

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.theta_scale is None:
            object.__setattr__(self, "theta_scale", float(THETA_SCALE[self.mode]))
        if self.theta_scale <= 0:
            raise ValueError(f"theta_scale must be positive, got {self.theta_scale}")
        if self.eta <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.n_blocks < 1:
            raise ValueError(f"n_blocks must be >= 1, got {self.n_blocks}")
        if self.temperature is not None and self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.mu is not None and self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.mu_grid is not None and any(m < 0 for m in self.mu_grid):
            raise ValueError("mu_grid entries must be >= 0")
        if self.t_grid is not None and any(t <= 0 for t in self.t_grid):
            raise ValueError("t_grid entries must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = asdict(self.model)
        return d


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    l1: float
    l2: float
    alpha: float
    kkt_residual: float


@dataclass
class RunTrace:
    records: list[IterationRecord]
    summary: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.summary.get("converged", False))

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def l1_series(self) -> np.ndarray:
        return np.array([r.l1 for r in self.records])

    def l2_series(self) -> np.ndarray:
        return np.array([r.l2 for r in self.records])


def _init_theta(rng: np.random.Generator, count: int, scale: float) -> np.ndarray:
    return rng.uniform(-scale, scale, count)


def _init_phi(rng: np.random.Generator, n: int, config: RunConfig) -> np.ndarray:
    return rng.uniform(config.phi_center - config.phi_width, config.phi_center + config.phi_width, n)


def _step_rule(ev, config: RunConfig, mu: float | None):
    """(alpha, weights, residual, done) for one iterate."""
    if mu is None:
        alpha = solve_alpha_two_task(ev.grad_l1, ev.grad_l2)
        weights = (alpha, 1.0 - alpha)
        residual = kkt_residual([ev.grad_l1, ev.grad_l2], weights)
        return alpha, weights, residual, residual < config.kkt_tol and ev.l2 < config.l2_tol
    # L1 + mu L2 is the alpha = 1/(1+mu) scalarization up to a factor 1+mu
    residual = float(np.linalg.norm(ev.grad_l1 + mu * ev.grad_l2))
    return 1.0 / (1.0 + mu), (1.0, mu), residual, residual < config.kkt_tol


def _descend(evaluate_many, x0: np.ndarray, config: RunConfig, mu: float | None = None):
    """Fixed-step descent of every row of ``x0`` in lockstep.

    ``mu=None`` runs MGDA, otherwise the penalty sum. Each row stops on its
    own stopping rule; rows never interact, so the result for a row does not
    depend on which other rows share the batch.
    """
    x = np.array(x0, dtype=float)
    records = [[] for _ in x]
    converged = [False] * len(x)
    active = list(range(len(x)))
    for it in range(config.max_iters):
        if not active:
            break
        still = []
        for i, ev in zip(active, evaluate_many(x[active])):
            alpha, weights, residual, done = _step_rule(ev, config, mu)
            records[i].append(IterationRecord(it, ev.l1, ev.l2, alpha, residual))
            if done:
                converged[i] = True
                continue
            x[i] = x[i] - config.eta * (weights[0] * ev.grad_l1 + weights[1] * ev.grad_l2)
            still.append(i)
        active = still
    return [(x[i], records[i], converged[i]) for i in range(len(x))]


def _best(candidates: list[tuple], l2_tol: float, penalty_mu: float | None) -> int:
    """Index of the best restart: physical runs first (L2 below tolerance), then lowest L1."""
    def key(i):
        rec = candidates[i][1][-1]
        if penalty_mu is not None:
            return (0.0, rec.l1 + penalty_mu * rec.l2)
        return (rec.l2 if rec.l2 >= l2_tol else 0.0, rec.l1)

    return min(range(len(candidates)), key=key)


def _l1_at_first_l2_below(records, level: float = 0.5) -> float | None:
    for r in records:
        if r.l2 < level:
            return r.l1
    return None


def _restart_rows(candidates) -> list[dict]:
    return [
        {
            "restart": i,
            "iterations": len(recs),
            "l1": recs[-1].l1,
            "l2": recs[-1].l2,
            "kkt_residual": recs[-1].kkt_residual,
            "converged": conv,
            "l1_at_first_l2_below_half": _l1_at_first_l2_below(recs),
        }
        for i, (_, recs, conv) in enumerate(candidates)
    ]


def _run(config: RunConfig, problem, split: int | None, n_phi: int, mu: float | None,
         x0: Sequence[float] | None = None):
    rng = np.random.default_rng(config.seed)
    if split is None:
        evaluate_many = problem.evaluate_many
    else:
        evaluate_many = lambda x: problem.evaluate_many(x[:, :split], x[:, split:])  # noqa: E731
    p = problem.template.parameter_count
    inits = []
    for r in range(config.restarts):
        if x0 is not None and r == 0:
            inits.append(np.asarray(x0, dtype=float))
            continue
        init = _init_theta(rng, p, config.theta_scale)
        if n_phi:
            init = np.concatenate([init, _init_phi(rng, n_phi, config)])
        inits.append(init)
    start = time.perf_counter()
    candidates = _descend(evaluate_many, np.stack(inits), config, mu)
    wall = time.perf_counter() - start
    best_index = _best(candidates, config.l2_tol, mu)
    x, recs, conv = candidates[best_index]
    summary = {
        "mode": config.mode,
        "converged": conv,
        "iterations": len(recs),
        "l1": recs[-1].l1,
        "l2": recs[-1].l2,
        "alpha": recs[-1].alpha,
        "kkt_residual": recs[-1].kkt_residual,
        "seed": config.seed,
        "best_restart": best_index,
        "restarts": _restart_rows(candidates),
        "theta": x[:p].tolist(),
        "wall_clock_s": wall,
    }
    if n_phi:
        summary["phi"] = x[p:].tolist()
    return RunTrace(recs, summary)


def _template(config: RunConfig):
    return build_ansatz(config.model.n_qubits, config.n_blocks, ring=config.ring)


def run_vqe(config: RunConfig, theta0: Sequence[float] | None = None) -> RunTrace:
    """Two-objective VQE: energy and Gauss violation, weighted by min-norm alpha."""
    if config.mode != "vqe_moo":
        raise ValueError(f"run_vqe needs mode 'vqe_moo', got {config.mode!r}")
    problem = VQEProblem(config.model, _template(config))
    trace = _run(config, problem, None, 0, None, theta0)
    e0, _ = lgt_model.ed_ground(config.model)
    trace.summary.update(oracle_energy=e0, abs_error=abs(trace.summary["l1"] - e0))
    return trace


def _mu_grid(config: RunConfig) -> tuple[float, ...]:
    if config.mu_grid is not None:
        return tuple(config.mu_grid)
    if config.mu is not None:
        return (config.mu,)
    return DEFAULT_MU_GRID


def run_vqe_penalty(config: RunConfig) -> list[RunTrace]:
    """One penalty descent on ``<H> + mu * violation`` per mu in the grid."""
    if config.mode != "vqe_penalty":
        raise ValueError(f"run_vqe_penalty needs mode 'vqe_penalty', got {config.mode!r}")
    problem = VQEProblem(config.model, _template(config))
    e0, _ = lgt_model.ed_ground(config.model)
    e_free = lgt_model.unconstrained_ground_energy(config.model)
    traces = []
    for mu in _mu_grid(config):
        trace = _run(config, problem, None, 0, mu)
        trace.summary.update(
            mu=mu,
            oracle_energy=e0,
            unconstrained_energy=e_free,
            abs_error=abs(trace.summary["l1"] - e0),
        )
        traces.append(trace)
    return traces


def _vqt_oracle(trace: RunTrace, model: ModelSpec, temperature: float) -> None:
    oracle = lgt_model.ed_thermal(model, temperature)
    for row in trace.summary["restarts"]:
        first = row["l1_at_first_l2_below_half"]
        row["abs_error"] = abs(row["l1"] - oracle.free_energy)
        row["free_energy_rose"] = first is not None and row["l1"] > first
    f_first = _l1_at_first_l2_below(trace.records)
    trace.summary.update(
        temperature=temperature,
        oracle_free_energy=oracle.free_energy,
        abs_error=abs(trace.summary["l1"] - oracle.free_energy),
        l1_at_first_l2_below_half=f_first,
        free_energy_rose=(f_first is not None and trace.summary["l1"] > f_first),
    )


def run_vqt(config: RunConfig, x0: Sequence[float] | None = None) -> RunTrace:
    """Two-objective VQT over (theta, phi); ``x0`` is theta followed by phi."""
    if config.mode != "vqt_moo":
        raise ValueError(f"run_vqt needs mode 'vqt_moo', got {config.mode!r}")
    if config.temperature is None:
        raise ValueError("run_vqt needs a temperature")
    problem = VQTProblem(config.model, _template(config), config.temperature)
    p = problem.template.parameter_count
    trace = _run(config, problem, p, config.model.n_qubits, None, x0)
    _vqt_oracle(trace, config.model, config.temperature)
    return trace


def run_vqt_penalty(config: RunConfig) -> list[RunTrace]:
    if config.mode != "vqt_penalty":
        raise ValueError(f"run_vqt_penalty needs mode 'vqt_penalty', got {config.mode!r}")
    if config.temperature is None:
        raise ValueError("run_vqt_penalty needs a temperature")
    problem = VQTProblem(config.model, _template(config), config.temperature)
    p = problem.template.parameter_count
    traces = []
    for mu in _mu_grid(config):
        trace = _run(config, problem, p, config.model.n_qubits, mu)
        _vqt_oracle(trace, config.model, config.temperature)
        trace.summary["mu"] = mu
        traces.append(trace)
    return traces


def run_temperature_sweep(config: RunConfig) -> list[RunTrace]:
    grid = config.t_grid if config.t_grid is not None else (config.temperature,)
    if not grid or grid[0] is None:
        raise ValueError("temperature sweep needs t_grid or temperature")
    return [run_vqt(replace(config, mode="vqt_moo", temperature=float(t))) for t in grid]
