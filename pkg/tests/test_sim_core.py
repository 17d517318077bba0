import numpy as np
import pytest
from hypothesis import given, strategies as st

from lgtmoo.ansatz import CNOT, bind_parameters, build_ansatz, ry
from lgtmoo.lgt_model import ModelSpec, build_hamiltonian
from lgtmoo.pauli import PauliSum
from lgtmoo.sim_core import (
    DensityMatrix,
    Gate,
    StateVector,
    apply_gate,
    circuit_unitary,
    density_expectation,
    density_from_angles,
    evolve_density,
    new_statevector,
    pauli_expectation,
    run_circuit,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def z_sum(n):
    op = PauliSum()
    for q in range(n):
        op = op + PauliSum.single(1.0, {q: "Z"})
    return op


@pytest.mark.parametrize("n", [1, 2, 4])
def test_new_statevector(n):
    amps = new_statevector(n).amplitudes
    assert amps.shape == (1 << n,) and amps[0] == 1 and np.count_nonzero(amps) == 1


@pytest.mark.parametrize("n", [0, 15])
def test_new_statevector_range(n):
    with pytest.raises(ValueError):
        new_statevector(n)


def test_x_on_qubit_zero():
    assert np.allclose(apply_gate(new_statevector(2), X, [0]).amplitudes, [0, 1, 0, 0])


def test_cnot_control_zero():
    s = StateVector(2, np.array([0, 1, 0, 0], dtype=complex))  # |01>: qubit 0 set
    assert np.allclose(apply_gate(s, CNOT, [0, 1]).amplitudes, [0, 0, 0, 1])


def test_ry_half_pi():
    out = apply_gate(new_statevector(1), ry(np.pi / 2), [0]).amplitudes
    assert np.allclose(out, [np.cos(np.pi / 4), np.sin(np.pi / 4)])


def test_gate_errors():
    s = new_statevector(2)
    with pytest.raises(ValueError):
        apply_gate(s, CNOT, [1, 1])
    with pytest.raises(IndexError):
        apply_gate(s, X, [2])
    with pytest.raises(ValueError):
        apply_gate(s, np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(ValueError):
        apply_gate(s, CNOT, [0])


def test_expectation_examples():
    s = new_statevector(4)
    assert pauli_expectation(s, z_sum(4)) == pytest.approx(4.0)
    assert pauli_expectation(s, PauliSum.single(1.0, {0: "X", 1: "X"})) == pytest.approx(0.0)


@given(st.integers(0, 2**32 - 1))
def test_hamiltonian_expectation_matches_dense(seed):
    rng = np.random.default_rng(seed)
    h = build_hamiltonian(ModelSpec(2))
    psi = random_state(rng, 4)
    dense = psi.amplitudes.conj() @ h.to_matrix(4) @ psi.amplitudes
    assert pauli_expectation(psi, h) == pytest.approx(dense.real, abs=1e-10)


def test_density_from_angles():
    assert np.allclose(density_from_angles([np.pi / 2]).entries, np.diag([1, 0]))
    assert np.allclose(density_from_angles([np.pi / 4] * 2).entries, np.eye(4) / 4)
    assert np.allclose(density_from_angles([np.pi / 3]).entries, np.diag([0.75, 0.25]))


def test_evolve_density_examples():
    rho = DensityMatrix(1, np.diag([0.3, 0.7]).astype(complex))
    assert np.allclose(evolve_density(rho, ()).entries, rho.entries)
    assert np.allclose(evolve_density(rho, (Gate(X, (0,)),)).entries, np.diag([0.7, 0.3]))


@given(st.integers(0, 2**32 - 1))
def test_evolve_density_preserves_spectrum(seed):
    rng = np.random.default_rng(seed)
    tpl = build_ansatz(4, 2)
    circuit = bind_parameters(tpl, rng.uniform(-np.pi, np.pi, tpl.parameter_count))
    rho = density_from_angles(rng.uniform(0, np.pi / 2, 4))
    out = evolve_density(rho, circuit)
    assert np.allclose(np.sort(out.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-10)
    u = circuit_unitary(circuit, 4)
    assert np.allclose(out.entries, u @ rho.entries @ u.conj().T, atol=1e-12)


def test_density_expectation_examples(rng=np.random.default_rng(3)):
    zero = new_statevector(4).to_density()
    assert density_expectation(zero, z_sum(4)) == pytest.approx(4.0)
    mixed = DensityMatrix(4, np.eye(16, dtype=complex) / 16)
    assert density_expectation(mixed, build_hamiltonian(ModelSpec(2))) == pytest.approx(0.0, abs=1e-12)
    psi = random_state(rng, 4)
    h = build_hamiltonian(ModelSpec(2))
    assert density_expectation(psi.to_density(), h) == pytest.approx(pauli_expectation(psi, h), abs=1e-10)


def test_run_circuit_matches_unitary():
    rng = np.random.default_rng(0)
    tpl = build_ansatz(3, 2)
    circuit = bind_parameters(tpl, rng.normal(size=tpl.parameter_count))
    psi = random_state(rng, 3)
    assert np.allclose(run_circuit(psi, circuit).amplitudes, circuit_unitary(circuit, 3) @ psi.amplitudes)
