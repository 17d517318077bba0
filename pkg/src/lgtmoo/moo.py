"""Min-norm weights for multiple-gradient descent (MGDA) and the update step."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEGENERATE_TOL = 1e-18


@dataclass(frozen=True)
class MooStepReport:
    alpha: np.ndarray
    combined_gradient_norm: float
    step_taken: bool


def _as_pair(g1, g2) -> tuple[np.ndarray, np.ndarray]:
    g1 = np.asarray(g1, dtype=float).ravel()
    g2 = np.asarray(g2, dtype=float).ravel()
    if g1.shape != g2.shape:
        raise ValueError(f"gradient length mismatch: {g1.size} vs {g2.size}")
    return g1, g2


def solve_alpha_two_task(g1, g2) -> float:
    """argmin over alpha in [0, 1] of ||alpha g1 + (1 - alpha) g2||^2."""
    g1, g2 = _as_pair(g1, g2)
    diff = g1 - g2
    denom = float(diff @ diff)
    if denom < DEGENERATE_TOL:
        return 0.5
    return float(np.clip((g2 - g1) @ g2 / denom, 0.0, 1.0))


def _stack(gradients: Sequence) -> np.ndarray:
    if len(gradients) == 0:
        raise ValueError("need at least one gradient")
    rows = [np.asarray(g, dtype=float).ravel() for g in gradients]
    if len({r.size for r in rows}) != 1:
        raise ValueError("gradients have different lengths")
    return np.vstack(rows)


def frank_wolfe_weights(gradients: Sequence, max_iters: int = 250, tol: float = 1e-10,
                        return_history: bool = False):
    """Min-norm point of the convex hull of ``gradients`` by Frank-Wolfe.

    Works on the Gram matrix with exact line search, starting from uniform
    weights. Each step moves weight from the worst active vertex to the best
    vertex (pairwise variant), which converges linearly on the simplex even
    when the optimum lies inside a face. Returns the weight vector (and the
    objective per iterate when ``return_history`` is set).
    """
    g = _stack(gradients)
    if g.shape[0] < 2:
        raise ValueError("need at least two gradients")
    gram = g @ g.T
    k = gram.shape[0]
    alpha = np.full(k, 1.0 / k)
    history = [float(alpha @ gram @ alpha)]
    for _ in range(max_iters):
        grad = gram @ alpha
        toward = int(np.argmin(grad))
        support = np.flatnonzero(alpha > 0)
        away = int(support[np.argmax(grad[support])])
        d = np.zeros(k)
        d[toward] += 1.0
        d[away] -= 1.0
        dgd = float(d @ gram @ d)
        slope = float(grad @ d)
        if dgd <= 0 or slope >= 0:
            break
        # exact line search, capped by the weight available on the away vertex
        gamma = min(-slope / dgd, alpha[away])
        if gamma * np.sqrt(dgd) < tol:
            break
        alpha = alpha + gamma * d
        alpha[away] = max(alpha[away], 0.0)
        history.append(float(alpha @ gram @ alpha))
    alpha = np.clip(alpha, 0.0, None)
    alpha /= alpha.sum()
    return (alpha, history) if return_history else alpha


def kkt_residual(gradients: Sequence, alpha) -> float:
    """||sum_t alpha_t g_t||: zero exactly at a Pareto-stationary point."""
    g = _stack(gradients)
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.size != g.shape[0]:
        raise ValueError(f"{alpha.size} weights for {g.shape[0]} gradients")
    return float(np.linalg.norm(alpha @ g))


def combine(g1, g2, alpha: float) -> np.ndarray:
    g1, g2 = _as_pair(g1, g2)
    return alpha * g1 + (1.0 - alpha) * g2


def descent_step(params, gradients: Sequence, alpha, eta: float) -> np.ndarray:
    if eta <= 0:
        raise ValueError(f"step size eta must be positive, got {eta}")
    g = _stack(gradients)
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.size == 1 and g.shape[0] == 2:
        alpha = np.array([alpha[0], 1.0 - alpha[0]])
    if alpha.size != g.shape[0]:
        raise ValueError(f"{alpha.size} weights for {g.shape[0]} gradients")
    return np.asarray(params, dtype=float) - eta * (alpha @ g)


def mgda_step(params, g1, g2, eta: float) -> tuple[np.ndarray, MooStepReport]:
    alpha = solve_alpha_two_task(g1, g2)
    weights = np.array([alpha, 1.0 - alpha])
    norm = kkt_residual([g1, g2], weights)
    new = descent_step(params, [g1, g2], weights, eta)
    return new, MooStepReport(weights, norm, bool(norm > 0))
