import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmoments.errors import NonFiniteEntryError, NonSquareError, NotHermitianError, NotNormalError
from cmoments.linalg import (
    MatrixClass,
    central_power,
    classify,
    direct_sum_conjugate,
    eig_hermitian,
    eig_normal,
)

CUBE_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


def faddeev_leverrier(A):
    """Characteristic polynomial coefficients (highest degree first) without any eigen-solver."""
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(A)
    I = np.eye(n)
    for j in range(1, n + 1):
        M = A @ M + coeffs[-1] * I
        coeffs.append(-np.trace(A @ M) / j)
    return np.array(coeffs)


def companion_roots(coeffs):
    n = len(coeffs) - 1
    C = np.zeros((n, n), dtype=complex)
    C[0, :] = -np.asarray(coeffs[1:]) / coeffs[0]
    C[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(C)


def same_multiset(a, b, tol):
    """Greedy matching of two complex multisets."""
    b = list(np.asarray(b, dtype=complex))
    for z in np.asarray(a, dtype=complex):
        j = int(np.argmin([abs(z - w) for w in b]))
        if abs(z - b[j]) > tol:
            return False
        b.pop(j)
    return not b


def random_hermitian(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (G + G.conj().T) / 2


def random_normal(rng, n):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    lam = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Q @ np.diag(lam) @ Q.conj().T


def test_classify_examples():
    assert classify(np.diag(CUBE_ROOTS)) is MatrixClass.NORMAL
    assert classify(np.diag([1.0, -1.0])) is MatrixClass.HERMITIAN
    assert classify(np.array([[0, 1], [0, 0]])) is MatrixClass.GENERAL


def test_classify_rejects_bad_input():
    with pytest.raises(NonSquareError):
        classify(np.ones((2, 3)))
    with pytest.raises(NonFiniteEntryError):
        classify(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_eig_hermitian_small_cases():
    spec = eig_hermitian(np.diag([0.0, 1.0]))
    assert np.allclose(spec.eigenvalues, [0, 1])
    assert np.allclose(np.abs(spec.eigenbasis), np.eye(2))
    spec = eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(spec.eigenvalues, [-1, 1], atol=1e-14)


def test_eig_hermitian_matches_companion_oracle():
    rng = np.random.default_rng(11)
    A = random_hermitian(rng, 8)
    spec = eig_hermitian(A)
    oracle = np.sort(companion_roots(faddeev_leverrier(A)).real)
    assert np.all(np.diff(spec.eigenvalues.real) >= 0)
    assert np.allclose(spec.eigenvalues.real, oracle, atol=1e-8)


def test_eig_hermitian_requires_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_normal_examples():
    ev = eig_normal(np.diag([1, 1j, 0])).eigenvalues
    assert np.allclose(np.sort_complex(ev), np.sort_complex(np.array([1, 1j, 0])))
    ev = eig_normal(np.diag(CUBE_ROOTS)).eigenvalues
    assert np.allclose(np.sort_complex(ev), np.sort_complex(CUBE_ROOTS))


def test_eig_normal_similarity_invariance():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    ev = eig_normal(Q @ np.diag([1, 1j, 0]) @ Q.conj().T).eigenvalues
    assert same_multiset(ev, [1, 1j, 0], 1e-9)


def test_eig_normal_requires_normal():
    with pytest.raises(NotNormalError):
        eig_normal(np.array([[0, 1], [0, 0]]))


def test_eig_normal_repeated_real_parts():
    # eigenvalues sharing a real part force the second diagonalisation step
    A = np.diag([1 + 1j, 1 - 1j, 1 + 0j, -2j])
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)) + 0j)
    spec = eig_normal(Q @ A @ Q.conj().T)
    assert same_multiset(spec.eigenvalues, np.diag(A), 1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=7), st.integers(min_value=0, max_value=10**6))
def test_normal_decomposition_invariants(n, seed):
    A = random_normal(np.random.default_rng(seed), n)
    spec = eig_normal(A)
    U = spec.eigenbasis
    scale = 1 + np.linalg.norm(A)
    assert np.linalg.norm(U @ np.diag(spec.eigenvalues) @ U.conj().T - A) <= 1e-10 * scale
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=10**6))
def test_hermitian_decomposition_invariants(n, seed):
    A = random_hermitian(np.random.default_rng(seed), n)
    spec = eig_hermitian(A)
    U = spec.eigenbasis
    assert np.linalg.norm(U @ np.diag(spec.eigenvalues) @ U.conj().T - A) <= 1e-10 * (1 + np.linalg.norm(A))
    assert np.allclose(spec.eigenvalues.real, np.linalg.eigvalsh(A), atol=1e-10 * (1 + np.linalg.norm(A)))


def test_direct_sum_conjugate():
    out = direct_sum_conjugate(np.diag([1, 1j, 0]))
    assert np.allclose(out, np.diag([1, 1j, 0, 1, -1j, 0]))
    H = random_hermitian(np.random.default_rng(1), 3)
    ev = np.linalg.eigvalsh(direct_sum_conjugate(H))
    assert np.allclose(ev, np.sort(np.repeat(np.linalg.eigvalsh(H), 2)))
    A = random_normal(np.random.default_rng(2), 3)
    ev = eig_normal(direct_sum_conjugate(A)).eigenvalues
    lam = np.linalg.eigvals(A)
    assert same_multiset(ev, np.concatenate([lam, lam.conj()]), 1e-9)
    with pytest.raises(NonSquareError):
        direct_sum_conjugate(np.ones((2, 3)))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_central_power_on_normal_matches_eigenvalues(k):
    A = random_normal(np.random.default_rng(k), 4)
    lam, mu = np.linalg.eigvals(A), 0.3 - 0.2j
    plain = central_power(A, mu, k)
    absolute = central_power(A, mu, k, absolute=True)
    assert same_multiset(np.linalg.eigvals(plain), (lam - mu) ** k, 1e-8)
    assert np.allclose(np.sort(np.linalg.eigvalsh(absolute)), np.sort(np.abs(lam - mu) ** k), atol=1e-9)


def test_central_power_absolute_general():
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    # |J|^3 = (J*J)^(3/2) = diag(0, 1)
    assert np.allclose(central_power(A, 0, 3, absolute=True), np.diag([0, 1]))
    assert np.allclose(central_power(A, 0, 2), 0)
