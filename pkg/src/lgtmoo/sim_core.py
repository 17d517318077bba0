"""Dense state-vector and density-matrix simulation.

Basis index ``b`` encodes qubit ``q`` in bit ``q`` (little-endian). A gate on
targets ``(q0, q1, ...)`` is a ``2**k x 2**k`` matrix whose local index is
``bit(q0) + 2*bit(q1) + ...``; so ``CNOT`` with targets ``(c, t)`` flips ``t``
when ``c`` is set.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import PauliSum

MAX_QUBITS = 14
UNITARY_ATOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        dim = 1 << self.n_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
        object.__setattr__(self, "entries", rho)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    targets: tuple[int, ...]
    name: str = ""


Circuit = Sequence[Gate]


def new_statevector(n_qubits: int) -> StateVector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_gate(gate: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    gate = np.asarray(gate, dtype=complex)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate targets {tuple(targets)}")
    if any(not 0 <= q < n_qubits for q in targets):
        raise IndexError(f"targets {tuple(targets)} out of range for {n_qubits} qubits")
    if gate.shape != (1 << k, 1 << k):
        raise ValueError(f"gate shape {gate.shape} does not match {k} targets")
    if not np.allclose(gate.conj().T @ gate, np.eye(1 << k), atol=UNITARY_ATOL, rtol=0):
        raise ValueError("gate is not unitary")
    return gate


def _axis(q: int, n_qubits: int, offset: int = 0) -> int:
    # C-order reshape puts the most significant bit first
    return offset + n_qubits - 1 - q


def apply_on_axes(tensor: np.ndarray, gate: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract a ``2**k`` gate into the given tensor axes (axes[0] = local LSB)."""
    k = len(axes)
    g = gate.reshape((2,) * (2 * k))
    # local index in C order is (bit_{k-1}, ..., bit_0)
    in_axes = list(reversed(axes))
    out = np.tensordot(g, tensor, axes=(list(range(k, 2 * k)), in_axes))
    return np.moveaxis(out, list(range(k)), in_axes)


def apply_gate(state: StateVector, gate: np.ndarray, targets: Sequence[int]) -> StateVector:
    n = state.n_qubits
    gate = _check_gate(gate, targets, n)
    psi = state.amplitudes.reshape((2,) * n)
    psi = apply_on_axes(psi, gate, [_axis(q, n) for q in targets])
    return StateVector(n, psi.reshape(-1))


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n)
    for g in circuit:
        psi = apply_on_axes(psi, g.matrix, [_axis(q, n) for q in g.targets])
    return StateVector(n, psi.reshape(-1))


def circuit_unitary(circuit: Circuit, n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    # columns are U|x>; evolve the identity with one trailing batch axis
    u = np.eye(dim, dtype=complex).reshape((2,) * n_qubits + (dim,))
    for g in circuit:
        u = apply_on_axes(u, g.matrix, [_axis(q, n_qubits) for q in g.targets])
    return u.reshape(dim, dim)


def apply_observable(amplitudes: np.ndarray, action: list[tuple[int, np.ndarray]]) -> np.ndarray:
    """Compute O|psi> along the last axis from ``PauliSum.diagonal_action``."""
    idx = np.arange(amplitudes.shape[-1])
    out = np.zeros_like(amplitudes)
    for x_mask, vec in action:
        # (O psi)[b ^ x] += v[b] psi[b]  <=>  (O psi)[c] = v[c ^ x] psi[c ^ x]
        src = idx ^ x_mask
        out += vec[src] * amplitudes[..., src]
    return out


def expectations(amplitudes: np.ndarray, action: list[tuple[int, np.ndarray]]) -> np.ndarray:
    """Complex <psi|O|psi> over the last axis, for any leading batch shape."""
    return np.einsum("...i,...i->...", amplitudes.conj(), apply_observable(amplitudes, action))


def _check_hermitian_value(value: complex, observable: PauliSum) -> float:
    if abs(value.imag) >= 1e-10 and observable.is_hermitian():
        raise ArithmeticError(f"Hermitian observable gave complex expectation {value}")
    return float(value.real)


def pauli_expectation(state: StateVector, observable: PauliSum) -> float:
    action = observable.diagonal_action(state.n_qubits)
    return _check_hermitian_value(complex(expectations(state.amplitudes, action)), observable)


def density_from_angles(phi: Sequence[float]) -> DensityMatrix:
    phi = np.asarray(phi, dtype=float)
    return DensityMatrix(len(phi), np.diag(product_probabilities(phi)).astype(complex))


def product_probabilities(phi: np.ndarray) -> np.ndarray:
    """Diagonal of the product state: prod_i sin^2(phi_i) (bit 0) or cos^2(phi_i) (bit 1)."""
    phi = np.asarray(phi, dtype=float)
    n = phi.size
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    return np.prod(np.where(bits == 0, s2, c2), axis=1)


def evolve_density(rho: DensityMatrix, circuit: Circuit) -> DensityMatrix:
    n = rho.n_qubits
    t = rho.entries.reshape((2,) * (2 * n))
    for g in circuit:
        if any(not 0 <= q < n for q in g.targets):
            raise IndexError(f"gate targets {g.targets} out of range for {n} qubits")
        t = apply_on_axes(t, g.matrix, [_axis(q, n) for q in g.targets])
        t = apply_on_axes(t, g.matrix.conj(), [_axis(q, n, offset=n) for q in g.targets])
    dim = 1 << n
    return DensityMatrix(n, t.reshape(dim, dim))


def density_expectation(rho: DensityMatrix, observable: PauliSum) -> float:
    action = observable.diagonal_action(rho.n_qubits)
    # Tr(rho O) = sum_b (O rho)[b, b]; apply O to each column of rho
    o_rho = apply_observable(rho.entries.T, action)  # rows here are columns of rho
    value = complex(np.einsum("ii->", o_rho))
    return _check_hermitian_value(value, observable)
