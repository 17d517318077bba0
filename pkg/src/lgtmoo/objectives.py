"""Cost functions for constrained VQE and VQT, with exact gradients.

Circuit parameters are differentiated by the +-pi/2 parameter-shift rule; the
latent angles of the product mixed state are differentiated analytically
through the diagonal input distribution. VQE simulates all shifted circuits of
one gradient as a single batch; VQT sweeps the density matrix forward through
the circuit once and pulls the observables back through it once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ansatz import ROTATIONS, AnsatzTemplate, evolve_batch
from .lgt_model import ModelSpec, build_hamiltonian, gauss_operators
from .sim_core import expectations, product_probabilities

SHIFT = np.pi / 2
# rotation R(theta) = exp(-i theta P / 2) for these generators P
GENERATORS = {
    "RY": np.array([[0, -1j], [1j, 0]]),
    "RZ": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class ThetaPhi:
    theta: np.ndarray
    phi: np.ndarray | None = None

    def flat(self) -> np.ndarray:
        if self.phi is None:
            return np.asarray(self.theta, dtype=float)
        return np.concatenate([self.theta, self.phi])

    def unflat(self, vec: np.ndarray) -> ThetaPhi:
        p = len(self.theta)
        return ThetaPhi(vec[:p], None if self.phi is None else vec[p:])


@dataclass(frozen=True)
class Evaluation:
    """Both objectives and their gradients at one parameter point."""

    l1: float
    l2: float
    grad_l1: np.ndarray
    grad_l2: np.ndarray
    # raw expectations: [<H>, <G_0>, <G_1>, ...]
    observables: np.ndarray


def entropy(phi) -> float:
    phi = np.asarray(phi, dtype=float)
    s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = -np.where(s2 > 0, s2 * np.log(s2), 0.0) - np.where(c2 > 0, c2 * np.log(c2), 0.0)
    return float(np.sum(terms))


def entropy_gradient(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    s2 = np.sin(phi) ** 2
    c2 = np.cos(phi) ** 2
    ok = (s2 > 0) & (c2 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # difference of logs: the ratio overflows once sin^2 is subnormal
        g = np.sin(2 * phi) * (np.log(c2) - np.log(s2))
    return np.where(ok, g, 0.0)


def _probability_gradients(phi: np.ndarray) -> np.ndarray:
    """d p_x / d phi_i, shape (n, 2**n)."""
    n = phi.size
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    factors = np.where(bits == 0, s2, c2)  # (dim, n)
    deriv = np.where(bits == 0, np.sin(2 * phi), -np.sin(2 * phi))
    out = np.empty((n, 1 << n))
    for i in range(n):
        others = np.prod(np.delete(factors, i, axis=1), axis=1)
        out[i] = deriv[:, i] * others
    return out


def _shift_batch(theta: np.ndarray) -> np.ndarray:
    p = theta.size
    eye = np.eye(p) * SHIFT
    return np.vstack([theta[None, :], theta + eye, theta - eye])


def _violation(gauss_values: np.ndarray, gauss_grads: np.ndarray) -> tuple[float, np.ndarray]:
    dev = gauss_values - 1.0
    # sign(0) = 0: satisfied constraints contribute no subgradient
    return float(np.sum(np.abs(dev))), np.sign(dev) @ gauss_grads


class _Problem:
    def __init__(self, spec: ModelSpec, template: AnsatzTemplate):
        if template.n_qubits != spec.n_qubits:
            raise ValueError(
                f"ansatz has {template.n_qubits} qubits but the model needs {spec.n_qubits}"
            )
        self.spec = spec
        self.template = template
        self.hamiltonian = build_hamiltonian(spec)
        self.gauss = gauss_operators(spec)
        n = spec.n_qubits
        self.actions = [op.diagonal_action(n) for op in [self.hamiltonian, *self.gauss]]

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.template.parameter_count,):
            raise ValueError(
                f"theta must have length {self.template.parameter_count}, got shape {theta.shape}"
            )
        return theta

    def _observe(self, psi: np.ndarray) -> np.ndarray:
        """Real expectations of [H, G...] along the last axis -> (..., n_obs)."""
        return np.stack([expectations(psi, a).real for a in self.actions], axis=-1)


class VQEProblem(_Problem):
    """Energy ``<H>`` and Gauss violation ``sum_j |<G_j> - 1|`` of ``U(theta)|0...0>``."""

    def _initial(self) -> np.ndarray:
        psi0 = np.zeros((1, 1 << self.spec.n_qubits), dtype=complex)
        psi0[0, 0] = 1.0
        return psi0

    def observables(self, theta) -> np.ndarray:
        theta = self._check_theta(theta)
        psi = evolve_batch(self.template, theta[None, :], self._initial())[0, 0]
        return self._observe(psi)

    def energy(self, theta) -> float:
        return float(self.observables(theta)[0])

    def violation(self, theta) -> float:
        return float(np.sum(np.abs(self.observables(theta)[1:] - 1.0)))

    def evaluate(self, theta) -> Evaluation:
        return self.evaluate_many(self._check_theta(theta)[None, :])[0]

    def evaluate_many(self, thetas) -> list[Evaluation]:
        """Evaluate a batch of parameter vectors (shape (B, P)) in one simulation."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        for theta in thetas:
            self._check_theta(theta)
        b, p = thetas.shape
        shifted = np.concatenate([_shift_batch(t) for t in thetas])
        obs = self._observe(evolve_batch(self.template, shifted, self._initial())[:, 0])
        out = []
        for o in obs.reshape(b, 2 * p + 1, -1):
            grads = 0.5 * (o[1 : p + 1] - o[p + 1 :]).T  # (n_obs, P)
            l2, g2 = _violation(o[0, 1:], grads[1:])
            out.append(Evaluation(float(o[0, 0]), l2, grads[0], g2, o[0]))
        return out


def _rows_1q(m: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    """Apply a one-qubit gate to the row index of ``m`` (shape (..., dim, dim)).

    ``u`` is (2, 2) or a batch (..., 2, 2) broadcasting against the leading
    axes of ``m``.
    """
    dim, cols = m.shape[-2], m.shape[-1]
    v = m.reshape(m.shape[:-2] + (dim >> (q + 1), 2, (1 << q) * cols))
    out = np.matmul(u[..., None, :, :], v)
    return out.reshape(out.shape[:-3] + (dim, cols))


def _conjugate(m: np.ndarray, slot, u: np.ndarray | None) -> np.ndarray:
    """``g m g^dag`` for a Hermitian ``m`` and the slot's gate ``g``."""
    if slot.kind == "ENTANGLE":
        perm = _cnot_perm(slot.targets, m.shape[-1])
        return m[..., perm, :][..., perm]
    q = slot.targets[0]
    half = _rows_1q(m, u, q)
    # (g m)^dag = m g^dag, so applying g to its rows again gives g m g^dag
    return _rows_1q(np.conj(np.swapaxes(half, -1, -2)), u, q)


def _cnot_perm(targets, dim: int) -> np.ndarray:
    control, target = targets
    idx = np.arange(dim)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


class VQTProblem(_Problem):
    """Free energy ``Tr(rho H) - T S`` and violation ``sum_j |Tr(rho G_j) - 1|``.

    ``rho = U(theta) rho(phi) U(theta)^dag`` with diagonal ``rho(phi)``. Values
    come from one forward sweep of ``rho`` through the circuit. Gradients pull
    the observables back gate by gate (Heisenberg picture). For a rotation
    ``exp(-i theta P / 2)`` with output state ``sigma`` and pulled-back
    observable ``O``, the two +-pi/2 shifted traces differ by
    ``Tr(O (-i)[P, sigma])``, so half their difference is ``Im Tr(O P sigma)``.
    The latent-angle gradient reweights the diagonal of the fully pulled-back
    observable.
    """

    def __init__(self, spec: ModelSpec, template: AnsatzTemplate, temperature: float):
        if temperature <= 0:
            raise ValueError(f"temperature must be positive, got {temperature}")
        super().__init__(spec, template)
        self.temperature = float(temperature)
        n = spec.n_qubits
        self.h_matrix = self.hamiltonian.to_matrix(n)
        # Gauss strings are diagonal
        self.g_diagonals = np.array([np.diag(g.to_matrix(n)).real for g in self.gauss])

    def _check_phi(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (self.spec.n_qubits,):
            raise ValueError(f"phi must have length {self.spec.n_qubits}, got shape {phi.shape}")
        return phi

    def _gates(self, thetas: np.ndarray) -> list:
        """Per slot: None for a CNOT, else the (B, 2, 2) batch of rotations."""
        return [
            None if s.kind == "ENTANGLE" else ROTATIONS[s.kind](thetas[:, s.param])
            for s in self.template.slots
        ]

    def _forward(self, thetas, phis, keep: bool = False):
        """Final states, plus the state right after each rotation when ``keep``."""
        probs = np.stack([product_probabilities(phi) for phi in phis])
        rho = probs[:, :, None] * np.eye(probs.shape[1])[None].astype(complex)
        stored = []
        for slot, u in zip(self.template.slots, self._gates(thetas)):
            rho = _conjugate(rho, slot, u)
            if keep and slot.param is not None:
                stored.append(rho)
        return rho, stored

    def _traces(self, rho: np.ndarray) -> np.ndarray:
        e = np.einsum("bij,ji->b", rho, self.h_matrix).real
        g = np.diagonal(rho, axis1=1, axis2=2).real @ self.g_diagonals.T
        return np.concatenate([e[:, None], g], axis=1)

    def _single(self, theta, phi):
        return self._check_theta(theta)[None, :], self._check_phi(phi)[None, :]

    def traces(self, theta, phi) -> np.ndarray:
        thetas, phis = self._single(theta, phi)
        return self._traces(self._forward(thetas, phis)[0])[0]

    def density(self, theta, phi) -> np.ndarray:
        thetas, phis = self._single(theta, phi)
        return self._forward(thetas, phis)[0][0]

    def free_energy(self, theta, phi) -> float:
        return float(self.traces(theta, phi)[0]) - self.temperature * entropy(phi)

    def violation(self, theta, phi) -> float:
        return float(np.sum(np.abs(self.traces(theta, phi)[1:] - 1.0)))

    def evaluate(self, theta, phi) -> Evaluation:
        return self.evaluate_many(*self._single(theta, phi))[0]

    def evaluate_many(self, thetas, phis) -> list[Evaluation]:
        """Evaluate a batch: ``thetas`` (B, P) and ``phis`` (B, n)."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        phis = np.atleast_2d(np.asarray(phis, dtype=float))
        for theta, phi in zip(thetas, phis, strict=True):
            self._check_theta(theta)
            self._check_phi(phi)
        b, p = thetas.shape
        rho, stored = self._forward(thetas, phis, keep=True)
        tr = self._traces(rho)
        dev = tr[:, 1:] - 1.0
        signs = np.sign(dev)
        # L2 = sum_j sign_j (Tr rho G_j - 1): its gradient is that of Tr(rho sum_j sign_j G_j)
        dim = self.h_matrix.shape[0]
        obs = np.zeros((b, 2, dim, dim), dtype=complex)
        obs[:, 0] = self.h_matrix
        obs[:, 1] = (signs @ self.g_diagonals)[:, :, None] * np.eye(dim)
        grad_theta = np.zeros((b, 2, p))
        gates = self._gates(thetas)
        k = len(stored)
        for slot, u in zip(reversed(self.template.slots), reversed(gates)):
            if slot.param is not None:
                k -= 1
                p_sigma = _rows_1q(stored[k], GENERATORS[slot.kind], slot.targets[0])
                grad_theta[:, :, slot.param] = np.einsum("bij,boji->bo", p_sigma, obs).imag
            # pull back: obs -> g^dag obs g; the (B, 2, 2) gate batch gains an axis for the observable index
            ud = None if u is None else np.conj(np.swapaxes(u, -1, -2))[:, None]
            obs = _conjugate(obs, slot, ud)
        t = self.temperature
        out = []
        for i in range(b):
            grad_phi = np.diagonal(obs[i], axis1=1, axis2=2).real @ _probability_gradients(phis[i]).T
            g1 = np.concatenate([grad_theta[i, 0], grad_phi[0] - t * entropy_gradient(phis[i])])
            g2 = np.concatenate([grad_theta[i, 1], grad_phi[1]])
            l1 = float(tr[i, 0]) - t * entropy(phis[i])
            out.append(Evaluation(l1, float(np.sum(np.abs(dev[i]))), g1, g2, tr[i]))
        return out


# functional surface -------------------------------------------------------

def vqe_energy(spec: ModelSpec, template: AnsatzTemplate, theta) -> float:
    return VQEProblem(spec, template).energy(theta)


def gauss_violation(spec: ModelSpec, template: AnsatzTemplate, theta) -> float:
    return VQEProblem(spec, template).violation(theta)


def _check_mu(mu: float) -> float:
    if mu < 0:
        raise ValueError(f"penalty strength mu must be >= 0, got {mu}")
    return float(mu)


def penalty_cost(spec: ModelSpec, template: AnsatzTemplate, theta, mu: float) -> float:
    mu = _check_mu(mu)
    obs = VQEProblem(spec, template).observables(theta)
    return float(obs[0] + mu * np.sum(np.abs(obs[1:] - 1.0)))


def vqt_free_energy(spec: ModelSpec, template: AnsatzTemplate, theta, phi, temperature: float) -> float:
    return VQTProblem(spec, template, temperature).free_energy(theta, phi)


def vqt_gauss_violation(spec: ModelSpec, template: AnsatzTemplate, theta, phi) -> float:
    # the temperature does not enter the traces
    return VQTProblem(spec, template, 1.0).violation(theta, phi)


def vqt_penalty_cost(spec, template, theta, phi, temperature: float, mu: float) -> float:
    mu = _check_mu(mu)
    prob = VQTProblem(spec, template, temperature)
    return prob.free_energy(theta, phi) + mu * prob.violation(theta, phi)


# objectives as (value, gradient) pairs over ThetaPhi ----------------------

@dataclass(frozen=True)
class Objective:
    name: str
    value: Callable[[ThetaPhi], float]
    grad: Callable[[ThetaPhi], np.ndarray]

    def __call__(self, params: ThetaPhi) -> float:
        return self.value(params)


@dataclass(frozen=True)
class ObjectivePair:
    l1: Objective
    l2: Objective
    evaluate: Callable[[ThetaPhi], Evaluation]


def vqe_objectives(spec: ModelSpec, template: AnsatzTemplate) -> ObjectivePair:
    prob = VQEProblem(spec, template)
    ev = lambda x: prob.evaluate(x.theta)  # noqa: E731
    return ObjectivePair(
        Objective("energy", lambda x: prob.energy(x.theta), lambda x: ev(x).grad_l1),
        Objective("gauss_violation", lambda x: prob.violation(x.theta), lambda x: ev(x).grad_l2),
        ev,
    )


def vqt_objectives(spec: ModelSpec, template: AnsatzTemplate, temperature: float) -> ObjectivePair:
    prob = VQTProblem(spec, template, temperature)
    ev = lambda x: prob.evaluate(x.theta, x.phi)  # noqa: E731
    return ObjectivePair(
        Objective("free_energy", lambda x: prob.free_energy(x.theta, x.phi), lambda x: ev(x).grad_l1),
        Objective("gauss_violation", lambda x: prob.violation(x.theta, x.phi), lambda x: ev(x).grad_l2),
        ev,
    )


def penalty_objective(pair: ObjectivePair, mu: float) -> Objective:
    mu = _check_mu(mu)

    def grad(x):
        e = pair.evaluate(x)
        return e.grad_l1 + mu * e.grad_l2

    return Objective(f"penalty(mu={mu:g})", lambda x: pair.l1(x) + mu * pair.l2(x), grad)


def entropy_objective() -> Objective:
    """S(phi) as an objective over ThetaPhi; its theta-gradient is zero."""

    def grad(x):
        return np.concatenate([np.zeros(len(x.theta)), entropy_gradient(x.phi)])

    return Objective("entropy", lambda x: entropy(x.phi), grad)


def gradient(objective: Objective, params: ThetaPhi) -> np.ndarray:
    return objective.grad(params)
