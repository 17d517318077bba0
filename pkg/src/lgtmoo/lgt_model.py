"""1D Z2 lattice gauge theory with spinless fermions, and its exact oracle.

Qubit layouts (0-based simulator indices):

* ``periodic``: N fermions and N links on a ring. Fermion ``j`` sits on qubit
  ``2j`` and the link ``(j, j+1 mod N)`` on qubit ``2j+1``.
* ``open_dangling``: N fermions between N+1 links. Link ``j`` (left of fermion
  ``j``) sits on qubit ``2j`` and fermion ``j`` on qubit ``2j+1``; the two end
  links have no outer neighbour.

Occupation is ``n = (1 - Z)/2`` so ``|0>`` is empty and ``(-1)**n = Z``. The
Jordan-Wigner string runs over fermion qubits only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

from .pauli import PauliSum, sigma_minus, sigma_plus, z_string
from .sim_core import DensityMatrix, StateVector

PERIODIC = "periodic"
OPEN_DANGLING = "open_dangling"
MAX_ED_QUBITS = 14
MAX_THERMAL_QUBITS = 12


@dataclass(frozen=True)
class ModelSpec:
    n_sites: int
    t: float = 1.0
    h: float = 0.5
    boundary: str = PERIODIC
    # indices of enforced Gauss constraints; None means all of them
    enforced: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        if self.boundary not in (PERIODIC, OPEN_DANGLING):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        min_sites = 2 if self.boundary == PERIODIC else 1
        if self.n_sites < min_sites:
            raise ValueError(f"n_sites must be >= {min_sites} for {self.boundary}, got {self.n_sites}")
        if self.enforced is not None:
            enforced = tuple(sorted(set(int(j) for j in self.enforced)))
            if any(not 0 <= j < self.n_sites for j in enforced):
                raise ValueError(f"enforced constraints {enforced} out of range")
            object.__setattr__(self, "enforced", enforced)

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_sites + (self.boundary == OPEN_DANGLING)

    @property
    def n_links(self) -> int:
        return self.n_sites + (self.boundary == OPEN_DANGLING)

    @property
    def constraints(self) -> tuple[int, ...]:
        return tuple(range(self.n_sites)) if self.enforced is None else self.enforced

    def fermion_qubit(self, j: int) -> int:
        return 2 * j + (self.boundary == OPEN_DANGLING)

    def link_qubit(self, link: int) -> int:
        """Periodic: link (j, j+1). Open: link left of fermion ``link``."""
        if self.boundary == PERIODIC:
            return 2 * (link % self.n_sites) + 1
        return 2 * link

    def hopping_bonds(self) -> list[tuple[int, int, int]]:
        """(fermion j, fermion k, link between them) for every hopping bond."""
        n = self.n_sites
        if self.boundary == PERIODIC:
            return [(j, (j + 1) % n, self.link_qubit(j)) for j in range(n)]
        return [(j, j + 1, self.link_qubit(j + 1)) for j in range(n - 1)]

    def gauss_qubits(self, j: int) -> tuple[int, int, int]:
        """(left link, fermion, right link) around site j."""
        if self.boundary == PERIODIC:
            return self.link_qubit(j - 1), self.fermion_qubit(j), self.link_qubit(j)
        return self.link_qubit(j), self.fermion_qubit(j), self.link_qubit(j + 1)


@dataclass(frozen=True)
class PhysicalBasis:
    indices: np.ndarray
    n_qubits: int
    n_constraints: int
    n_independent: int

    @property
    def dimension(self) -> int:
        return int(self.indices.size)

    def projector(self) -> np.ndarray:
        p = np.zeros((1 << self.n_qubits,) * 2)
        p[self.indices, self.indices] = 1.0
        return p


def _hop(a: int, link: int, b: int, string: Sequence[int]) -> PauliSum:
    """sigma^+_a X_link sigma^-_b + h.c., dressed by a Z string."""
    term = sigma_plus(a) * PauliSum.single(1.0, {link: "X"}) * sigma_minus(b)
    term = (term + term.dagger()).simplify()
    if string:
        term = term * z_string(string)
    return term


def build_hamiltonian(spec: ModelSpec) -> PauliSum:
    terms = PauliSum()
    for j, k, link in spec.hopping_bonds():
        if k == j + 1:
            string = ()
        else:
            # wrap bond c^dag_{N-1} X c_0: the JW string of c_{N-1} covers fermions 0..N-2;
            # fermion 0 is absorbed by its own annihilator, leaving fermions 1..N-2
            string = tuple(spec.fermion_qubit(m) for m in range(1, spec.n_sites - 1))
        terms = terms + (-spec.t) * _hop(spec.fermion_qubit(j), link, spec.fermion_qubit(k), string)
    for link in range(spec.n_links):
        terms = terms + PauliSum.single(-spec.h, {spec.link_qubit(link): "Z"})
    return terms.simplify()


def gauss_operators(spec: ModelSpec) -> list[PauliSum]:
    return [z_string(spec.gauss_qubits(j)) for j in spec.constraints]


def _z_mask(op: PauliSum) -> int:
    (term,) = op.terms
    x_mask, z_mask, _ = term.masks()
    assert x_mask == 0, "Gauss operators are pure Z strings"
    return z_mask


def _gf2_rank(masks: Sequence[int]) -> int:
    rank = 0
    rows = list(masks)
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


def enumerate_physical_basis(spec: ModelSpec) -> PhysicalBasis:
    n = spec.n_qubits
    masks = [_z_mask(g) for g in gauss_operators(spec)]
    x = np.arange(1 << n)
    keep = np.ones(x.size, dtype=bool)
    for m in masks:
        keep &= (np.bitwise_count(x & m) & 1) == 0
    return PhysicalBasis(x[keep], n, len(masks), _gf2_rank(masks))


def _restricted_hamiltonian(spec: ModelSpec, max_qubits: int) -> tuple[np.ndarray, PhysicalBasis]:
    if spec.n_qubits > max_qubits:
        raise ValueError(f"{spec.n_qubits} qubits exceeds the exact-diagonalization limit {max_qubits}")
    basis = enumerate_physical_basis(spec)
    h = build_hamiltonian(spec).to_matrix(spec.n_qubits)
    return h[np.ix_(basis.indices, basis.indices)], basis


def ed_ground(spec: ModelSpec) -> tuple[float, StateVector]:
    h_phys, basis = _restricted_hamiltonian(spec, MAX_ED_QUBITS)
    w, v = eigh(h_phys)
    amps = np.zeros(1 << spec.n_qubits, dtype=complex)
    amps[basis.indices] = v[:, 0]
    return float(w[0]), StateVector(spec.n_qubits, amps)


def unconstrained_ground_energy(spec: ModelSpec) -> float:
    if spec.n_qubits > MAX_ED_QUBITS:
        raise ValueError(f"{spec.n_qubits} qubits exceeds the exact-diagonalization limit")
    return float(eigh(build_hamiltonian(spec).to_matrix(spec.n_qubits), eigvals_only=True)[0])


@dataclass(frozen=True)
class ThermalResult:
    free_energy: float
    rho: DensityMatrix
    energy: float
    entropy: float
    log_partition: float


def ed_thermal(spec: ModelSpec, temperature: float) -> ThermalResult:
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    h_phys, basis = _restricted_hamiltonian(spec, MAX_THERMAL_QUBITS)
    w, v = eigh(h_phys)
    # shift by the ground energy so the Boltzmann weights never overflow
    shifted = -(w - w[0]) / temperature
    log_z = np.log(np.sum(np.exp(shifted))) - w[0] / temperature
    p = np.exp(shifted - np.log(np.sum(np.exp(shifted))))
    energy = float(p @ w)
    nz = p[p > 0]
    entropy = float(-nz @ np.log(nz))
    rho_phys = (v * p) @ v.conj().T
    rho = np.zeros((1 << spec.n_qubits,) * 2, dtype=complex)
    rho[np.ix_(basis.indices, basis.indices)] = rho_phys
    return ThermalResult(
        free_energy=energy - temperature * entropy,
        rho=DensityMatrix(spec.n_qubits, rho),
        energy=energy,
        entropy=entropy,
        log_partition=float(log_z),
    )


def claimed_dimension(spec: ModelSpec) -> int:
    return 2 ** (spec.n_sites + 1)
