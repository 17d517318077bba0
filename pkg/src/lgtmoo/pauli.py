"""Symbolic Pauli strings with exact algebra and fast expectation values.

A :class:`PauliTerm` is ``coefficient * prod_q P_q`` with ``P_q`` in {X, Y, Z};
qubits not listed carry the identity. Qubit 0 is the least significant bit of a
computational-basis index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

# product table: (a, b) -> (phase, c) with a*b = phase * c
_MUL = {
    ("X", "X"): (1, None), ("Y", "Y"): (1, None), ("Z", "Z"): (1, None),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

_SINGLE = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    factors: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for q, p in self.factors.items():
            q = int(q)
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            p = p.upper()
            if p == "I":
                continue
            if p not in _SINGLE:
                raise ValueError(f"unknown Pauli factor {p!r}")
            clean[q] = p
        object.__setattr__(self, "factors", dict(sorted(clean.items())))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def key(self) -> tuple[tuple[int, str], ...]:
        return tuple(self.factors.items())

    @property
    def max_qubit(self) -> int:
        return max(self.factors, default=-1)

    def masks(self) -> tuple[int, int, int]:
        """Return (x_mask, z_mask, n_y) describing the string in bit form."""
        x_mask = z_mask = n_y = 0
        for q, p in self.factors.items():
            if p in "XY":
                x_mask |= 1 << q
            if p in "YZ":
                z_mask |= 1 << q
            if p == "Y":
                n_y += 1
        return x_mask, z_mask, n_y

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            phase = 1
            out = dict(self.factors)
            for q, p in other.factors.items():
                if q in out:
                    ph, c = _MUL[(out[q], p)]
                    phase *= ph
                    if c is None:
                        del out[q]
                    else:
                        out[q] = c
                else:
                    out[q] = p
            return PauliTerm(self.coefficient * other.coefficient * phase, out)
        if isinstance(other, PauliSum):
            return PauliSum([self]) * other
        return PauliTerm(self.coefficient * other, self.factors)

    def __rmul__(self, other):
        return PauliTerm(self.coefficient * other, self.factors)

    def dagger(self) -> PauliTerm:
        return PauliTerm(np.conj(self.coefficient), self.factors)

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        if self.max_qubit >= n_qubits:
            raise IndexError(f"term acts on qubit {self.max_qubit} but n_qubits={n_qubits}")
        mat = np.array([[1.0 + 0j]])
        # kron from the most significant qubit down so qubit 0 is the LSB
        for q in reversed(range(n_qubits)):
            mat = np.kron(mat, _SINGLE.get(self.factors.get(q), np.eye(2)))
        return self.coefficient * mat

    def __repr__(self):
        s = " ".join(f"{p}{q}" for q, p in self.factors.items()) or "I"
        return f"({self.coefficient:.6g}) {s}"


class PauliSum:
    """A linear combination of Pauli strings."""

    def __init__(self, terms: Iterable[PauliTerm] = ()):
        self.terms: list[PauliTerm] = list(terms)

    @classmethod
    def single(cls, coefficient: complex, factors: Mapping[int, str]) -> PauliSum:
        return cls([PauliTerm(coefficient, factors)])

    @classmethod
    def identity(cls, coefficient: complex = 1.0) -> PauliSum:
        return cls([PauliTerm(coefficient, {})])

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def max_qubit(self) -> int:
        return max((t.max_qubit for t in self.terms), default=-1)

    def __add__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum([other])
        if not isinstance(other, PauliSum):
            return NotImplemented
        return PauliSum(self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum([other])
        if isinstance(other, PauliSum):
            return PauliSum([a * b for a in self.terms for b in other.terms]).simplify()
        return PauliSum([t * other for t in self.terms])

    def __rmul__(self, other):
        if isinstance(other, PauliTerm):
            return PauliSum([other]) * self
        return PauliSum([t * other for t in self.terms])

    def dagger(self) -> PauliSum:
        return PauliSum([t.dagger() for t in self.terms])

    def simplify(self, atol: float = 1e-14) -> PauliSum:
        acc: dict = {}
        for t in self.terms:
            acc[t.key] = acc.get(t.key, 0) + t.coefficient
        return PauliSum(PauliTerm(c, dict(k)) for k, c in acc.items() if abs(c) > atol)

    def is_zero(self, atol: float = 1e-14) -> bool:
        return len(self.simplify(atol)) == 0

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return (self - self.dagger()).is_zero(atol)

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        dim = 1 << n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            out += t.to_matrix(n_qubits)
        return out

    def diagonal_action(self, n_qubits: int) -> list[tuple[int, np.ndarray]]:
        """Per term: (x_mask, vector v) with ``P|b> = v[b] |b ^ x_mask>``.

        Terms sharing an x-mask are merged, so applying the sum costs one gather
        per distinct flip pattern.
        """
        if self.max_qubit >= n_qubits:
            raise IndexError(f"observable acts on qubit {self.max_qubit} but n_qubits={n_qubits}")
        b = np.arange(1 << n_qubits)
        grouped: dict[int, np.ndarray] = {}
        for t in self.simplify().terms:
            x_mask, z_mask, n_y = t.masks()
            # Y = i X Z, and Z on bit 1 gives -1
            parity = (np.bitwise_count(b & z_mask) & 1).astype(int)
            vec = t.coefficient * (1j) ** n_y * (1 - 2 * parity) * np.ones(b.size)
            grouped[x_mask] = grouped.get(x_mask, 0) + vec
        return sorted(grouped.items())

    def __repr__(self):
        return " + ".join(map(repr, self.terms)) or "0"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return (a * b - b * a).simplify()


def sigma_plus(q: int) -> PauliSum:
    """|0><1| on qubit q, i.e. (X + iY)/2."""
    return PauliSum([PauliTerm(0.5, {q: "X"}), PauliTerm(0.5j, {q: "Y"})])


def sigma_minus(q: int) -> PauliSum:
    """|1><0| on qubit q, i.e. (X - iY)/2."""
    return PauliSum([PauliTerm(0.5, {q: "X"}), PauliTerm(-0.5j, {q: "Y"})])


def z_string(qubits: Iterable[int], coefficient: complex = 1.0) -> PauliSum:
    return PauliSum.single(coefficient, {q: "Z" for q in qubits})
