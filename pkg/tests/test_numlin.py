import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gelfand.exceptions import NotCommuting, NotHermitian, NotNormal, NotSquare
from gelfand.numlin import (
    Tolerance,
    hermitian_eig,
    image_basis,
    joint_spectrum,
    numeric_rank,
    simultaneous_diag,
    singular_values,
    whitening,
)


def random_unitary(n, rng):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        Tolerance(0.0, 1e-9)
    assert Tolerance.coerce(None) == Tolerance.default()


@pytest.mark.parametrize(
    "matrix, expected",
    [
        ([[2.0, 0.0], [0.0, 1.0]], [1.0, 2.0]),
        ([[2.0, 1.0], [1.0, 2.0]], [1.0, 3.0]),
        ([[0.0, 1j], [-1j, 0.0]], [-1.0, 1.0]),
        ([[5.0]], [5.0]),
    ],
)
def test_hermitian_eig_values(matrix, expected):
    values, vectors = hermitian_eig(matrix)
    assert_allclose(values, expected, atol=1e-12)
    assert_allclose(vectors.conj().T @ vectors, np.eye(len(expected)), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
def test_hermitian_eig_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = x + x.conj().T
    values, u = hermitian_eig(m)
    assert np.all(np.diff(values) >= 0)
    assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-10)
    assert_allclose(u @ np.diag(values) @ u.conj().T, m, atol=1e-9 * (1 + np.abs(m).max()))


def test_hermitian_eig_rejects_bad_input():
    with pytest.raises(NotHermitian):
        hermitian_eig([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NotSquare):
        hermitian_eig(np.zeros((2, 3)))


def test_simultaneous_diag_with_repeated_eigenvalues():
    rng = np.random.default_rng(3)
    u = random_unitary(4, rng)
    a = u @ np.diag([1.0, 1.0, 2.0, 2.0]) @ u.conj().T
    b = u @ np.diag([1j, -1j, 1j, -1j]) @ u.conj().T
    v = simultaneous_diag([a, b])
    values = joint_spectrum([a, b], v)
    for m in (a, b):
        d = v.conj().T @ m @ v
        assert np.abs(d - np.diag(np.diag(d))).max() < 1e-9
    # four distinct joint eigenvalues
    assert len({(round(x.real, 6), round(y.imag, 6)) for x, y in values}) == 4


def test_simultaneous_diag_rejects_non_commuting():
    with pytest.raises(NotCommuting):
        simultaneous_diag([[[1.0, 0.0], [0.0, 2.0]], [[0.0, 1.0], [1.0, 0.0]]])


def test_simultaneous_diag_rejects_non_normal():
    with pytest.raises(NotNormal):
        simultaneous_diag([[[0.0, 1.0], [0.0, 0.0]]])


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (np.diag([3.0, -2.0]), [3.0, 2.0]),
        ([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]], [2.0, 1.0]),
        (np.zeros((2, 2)), [0.0, 0.0]),
    ],
)
def test_singular_values(matrix, expected):
    assert_allclose(singular_values(matrix), expected, atol=1e-12)


def test_numeric_rank():
    v = np.array([1.0, 2.0, 3.0])
    assert numeric_rank(np.outer(v, v)) == 1
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank(np.zeros((0, 3))) == 0
    assert numeric_rank(np.diag([1.0, 1e-14])) == 1


def test_image_basis_is_orthonormal():
    basis = image_basis([[1.0, 1.0], [1.0, 1.0]])
    assert basis.shape == (2, 1)
    assert abs(abs(basis[:, 0] @ np.array([1.0, 1.0]) / np.sqrt(2)) - 1.0) < 1e-10


def test_whitening():
    gram = np.array([[2.0, 1j], [-1j, 3.0]])
    r, r_inv = whitening(gram)
    assert_allclose(r.conj().T @ r, gram, atol=1e-10)
    assert_allclose(r @ r_inv, np.eye(2), atol=1e-10)
    assert whitening([[1.0, 1.0], [1.0, 1.0]]) is None


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 6), cols=st.integers(1, 6), rank=st.integers(0, 6))
def test_numeric_rank_is_adjoint_invariant(seed, rows, cols, rank):
    rng = np.random.default_rng(seed)
    k = min(rank, rows, cols)
    left = rng.standard_normal((rows, k)) + 1j * rng.standard_normal((rows, k))
    right = rng.standard_normal((k, cols)) + 1j * rng.standard_normal((k, cols))
    m = left @ right
    assert numeric_rank(m) == numeric_rank(m.conj().T) == k


def joint_values(ms, u):
    spectrum = np.round(joint_spectrum(ms, u), 8) + 0.0
    return sorted(tuple(zip(row.real.tolist(), row.imag.tolist())) for row in spectrum)


def test_simultaneous_diag_ignores_input_order():
    rng = np.random.default_rng(11)
    u = random_unitary(5, rng)
    a = u @ np.diag([1.0, 1.0, 2.0, 2.0, 3.0]) @ u.conj().T
    b = u @ np.diag([1j, -1j, 1j, 1j, 0.0]) @ u.conj().T
    c = u @ np.diag([0.0, 0.0, 0.0, 5.0, 5.0]) @ u.conj().T
    forward = simultaneous_diag([a, b, c])
    backward = simultaneous_diag([c, b, a])
    assert joint_values([a, b, c], forward) == joint_values([a, b, c], backward)
    assert len(set(joint_values([a, b, c], forward))) == 5


def test_simultaneous_diag_of_pauli_x():
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    u = simultaneous_diag([x, np.eye(2)])
    expected = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    # columns agree up to order and a unit phase
    overlaps = np.abs(expected.conj().T @ u)
    assert_allclose(np.sort(overlaps.max(axis=0)), [1.0, 1.0], atol=1e-10)
    assert_allclose(np.sort(overlaps.min(axis=0)), [0.0, 0.0], atol=1e-10)
    assert sorted(np.round(joint_spectrum([x], u)[:, 0].real, 10)) == [-1.0, 1.0]
