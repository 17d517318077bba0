"""Layered hardware-efficient ansatz: per block an R_y layer, an R_z layer, a CNOT ring."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .sim_core import Gate, Circuit

CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]],
    dtype=complex,
)


def _mat2(a, b, c, d) -> np.ndarray:
    """Assemble entries into (..., 2, 2) so array angles give a batch of gates."""
    out = np.empty(np.shape(a) + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = a, b, c, d
    return out


def ry(theta) -> np.ndarray:
    c, s = np.cos(np.asarray(theta) / 2), np.sin(np.asarray(theta) / 2)
    return _mat2(c, -s, s, c)


def rz(theta) -> np.ndarray:
    e = np.exp(-0.5j * np.asarray(theta))
    zero = np.zeros_like(e)
    return _mat2(e, zero, zero, e.conj())


ROTATIONS = {"RY": ry, "RZ": rz}


@dataclass(frozen=True)
class Slot:
    kind: str  # "RY", "RZ" or "ENTANGLE"
    targets: tuple[int, ...]
    param: int | None = None


@dataclass(frozen=True)
class AnsatzTemplate:
    n_qubits: int
    n_blocks: int
    slots: tuple[Slot, ...]
    ring: bool = True

    @property
    def parameter_count(self) -> int:
        return 2 * self.n_qubits * self.n_blocks

    @property
    def entangler_count(self) -> int:
        return sum(s.kind == "ENTANGLE" for s in self.slots)

    @cached_property
    def plan(self) -> list[tuple]:
        return _compile(self)


def build_ansatz(n_qubits: int, n_blocks: int, ring: bool = True) -> AnsatzTemplate:
    if n_qubits < 2:
        raise ValueError(f"n_qubits must be >= 2, got {n_qubits}")
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    slots = []
    k = 0
    pairs = [(q, q + 1) for q in range(n_qubits - 1)]
    if ring:
        pairs.append((n_qubits - 1, 0))
    for _ in range(n_blocks):
        for kind in ("RY", "RZ"):
            for q in range(n_qubits):
                slots.append(Slot(kind, (q,), k))
                k += 1
        slots.extend(Slot("ENTANGLE", pair) for pair in pairs)
    return AnsatzTemplate(n_qubits, n_blocks, tuple(slots), ring)


def bind_parameters(template: AnsatzTemplate, theta) -> Circuit:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (template.parameter_count,):
        raise ValueError(
            f"theta must have length {template.parameter_count}, got shape {theta.shape}"
        )
    circuit = []
    for s in template.slots:
        if s.kind == "ENTANGLE":
            circuit.append(Gate(CNOT, s.targets, "CNOT"))
        else:
            circuit.append(Gate(ROTATIONS[s.kind](theta[s.param]), s.targets, s.kind))
    return tuple(circuit)


def _cnot_permutation(control: int, target: int, dim: int) -> np.ndarray:
    idx = np.arange(dim)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


def _compile(template: AnsatzTemplate) -> list[tuple]:
    """Fuse runs of R_z slots into one phase op and runs of CNOTs into one gather."""
    n = template.n_qubits
    dim = 1 << n
    # +1 for bit 0, -1 for bit 1: R_z(t) multiplies by exp(-i t sign / 2)
    signs = 1 - 2 * ((np.arange(dim)[:, None] >> np.arange(n)) & 1)
    ops: list[tuple] = []
    for slot in template.slots:
        kind = slot.kind
        last = ops[-1][0] if ops else None
        if kind == "ENTANGLE":
            perm = _cnot_permutation(*slot.targets, dim)
            if last == "perm":
                perm = ops.pop()[1][perm]
            ops.append(("perm", perm))
        elif kind == "RZ":
            q = slot.targets[0]
            if last == "phase":
                params, cols = ops.pop()[1:]
            else:
                params, cols = [], []
            ops.append(("phase", params + [slot.param], cols + [signs[:, q]]))
        else:
            ops.append(("ry", slot.targets[0], slot.param))
    return [
        ("phase", np.array(op[1]), np.stack(op[2])) if op[0] == "phase" else op for op in ops
    ]


def evolve_batch(template: AnsatzTemplate, thetas: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Run the bound ansatz for many parameter vectors at once.

    ``thetas`` has shape (B, P) and ``states`` shape (S, 2**n); the result has
    shape (B, S, 2**n) with ``out[b, s] = U(thetas[b]) states[s]``.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    n = template.n_qubits
    dim = 1 << n
    if thetas.shape[1] != template.parameter_count:
        raise ValueError(f"theta must have length {template.parameter_count}")
    states = np.asarray(states, dtype=complex)
    psi = np.broadcast_to(states, (thetas.shape[0],) + states.shape).copy()
    B, S = psi.shape[:2]
    for op in template.plan:
        if op[0] == "perm":
            psi = psi[..., op[1]]
        elif op[0] == "phase":
            _, params, signs = op
            psi *= np.exp(-0.5j * (thetas[:, params] @ signs))[:, None, :]
        else:
            _, q, k = op
            view = psi.reshape(B, S, dim >> (q + 1), 2, 1 << q)
            half = 0.5 * thetas[:, k].reshape(B, 1, 1, 1)
            c, s = np.cos(half), np.sin(half)
            a0 = view[:, :, :, 0, :].copy()
            a1 = view[:, :, :, 1, :].copy()
            view[:, :, :, 0, :] = c * a0 - s * a1
            view[:, :, :, 1, :] = s * a0 + c * a1
    return psi
