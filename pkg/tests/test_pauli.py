import numpy as np
from hypothesis import given, strategies as st

from lgtmoo.pauli import PauliSum, PauliTerm, commutator, sigma_minus, sigma_plus, z_string

X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])

letters = st.sampled_from("IXYZ")
terms = st.builds(
    lambda c, ls: PauliTerm(c, dict(enumerate(ls))),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.lists(letters, min_size=3, max_size=3),
)


def test_single_qubit_matrices_little_endian():
    # qubit 0 is the least significant bit
    assert np.allclose(PauliSum.single(1.0, {0: "X"}).to_matrix(2), np.kron(np.eye(2), X))
    assert np.allclose(PauliSum.single(1.0, {1: "Z"}).to_matrix(2), np.kron(Z, np.eye(2)))


def test_identity_letters_are_dropped():
    assert PauliTerm(1.0, {0: "I", 2: "Z"}).key == ((2, "Z"),)


def test_ladder_operators():
    # |0> is empty, sigma_plus = |0><1| creates a particle under n = (1 - Z)/2
    assert np.allclose(sigma_plus(0).to_matrix(1), [[0, 1], [0, 0]])
    assert np.allclose(sigma_minus(0).to_matrix(1), [[0, 0], [1, 0]])


@given(terms, terms)
def test_product_matches_dense(a, b):
    dense = a.to_matrix(3) @ b.to_matrix(3)
    assert np.allclose((a * b).to_matrix(3), dense)


@given(st.lists(terms, min_size=1, max_size=4), st.lists(terms, min_size=1, max_size=4))
def test_sum_algebra_matches_dense(xs, ys):
    a, b = PauliSum(xs), PauliSum(ys)
    ma, mb = a.to_matrix(3), b.to_matrix(3)
    assert np.allclose((a + b).to_matrix(3), ma + mb)
    assert np.allclose((a * b).to_matrix(3), ma @ mb)
    assert np.allclose(commutator(a, b).to_matrix(3), ma @ mb - mb @ ma)
    assert np.allclose(a.dagger().to_matrix(3), ma.conj().T)


@given(st.lists(terms, min_size=1, max_size=4))
def test_diagonal_action_reproduces_matrix(ts):
    op = PauliSum(ts)
    dense = np.zeros((8, 8), dtype=complex)
    b = np.arange(8)
    for x_mask, vec in op.diagonal_action(3):
        dense[b ^ x_mask, b] += vec
    assert np.allclose(dense, op.to_matrix(3))


def test_simplify_cancels():
    op = PauliSum.single(1.0, {0: "X"}) - PauliSum.single(1.0, {0: "X"})
    assert op.simplify().is_zero()


def test_hermitian_check():
    assert (PauliSum.single(1.0, {0: "X", 1: "Y"})).is_hermitian()
    assert not PauliSum.single(1j, {0: "X"}).is_hermitian()


def test_z_string():
    assert np.allclose(z_string((0, 1)).to_matrix(2), np.diag([1, -1, -1, 1]))
