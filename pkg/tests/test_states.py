import numpy as np
import pytest

from cmoments.errors import DimensionMismatchError, InvalidStateError
from cmoments.states import (
    DensityState,
    DiscreteState,
    Mode,
    as_mode,
    strong_moment_fixed_state,
    weak_moment_fixed_state,
)

DIAG_1_I_0 = np.diag([1, 1j, 0])


def test_discrete_state_validation():
    with pytest.raises(InvalidStateError):
        DiscreteState([0, 1], [0.7, 0.7])
    with pytest.raises(InvalidStateError):
        DiscreteState([0, 0], [0.5, 0.5])
    with pytest.raises(InvalidStateError):
        DiscreteState([], [])
    s = DiscreteState([0, 1], [0.5, 0.5])
    assert s.mean() == 0.5
    assert s.strong_moment(2) == pytest.approx(0.25)
    assert s.weak_moment(3) == pytest.approx(0)


def test_density_state_validation():
    with pytest.raises(InvalidStateError):
        DensityState(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidStateError):
        DensityState(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        DensityState(np.array([[0.5, 1], [0, 0.5]]))
    D = DensityState.from_factor(np.array([[1, 1j], [2, 0]]))
    assert np.trace(D.D).real == pytest.approx(1.0)


def test_tracial_state_on_diag_1_i_0():
    # mean (1+i)/3; deviations (2-i)/3, (2i-1)/3, -(1+i)/3; cubes summed and divided by 3
    value = weak_moment_fixed_state(DIAG_1_I_0, DensityState.maximally_mixed(3), 3)
    assert value == pytest.approx(5 / 27 - 5j / 27, abs=1e-15)
    assert abs(value) ** (1 / 3) == pytest.approx(50 ** (1 / 6) / 3, abs=1e-12)


def test_eigenvector_state_gives_zero():
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    A = Q @ np.diag([1, 1j, -2]) @ Q.conj().T
    v = Q[:, 1:2]
    D = DensityState(v @ v.conj().T)
    for k in range(1, 6):
        assert abs(weak_moment_fixed_state(A, D, k)) < 1e-12
        # |a - mu|^k goes through a square root of a PSD matrix, so eps becomes sqrt(eps) for odd k
        assert abs(strong_moment_fixed_state(A, D, k)) < (1e-7 if k % 2 else 1e-12)


def test_hermitian_variance_real_nonnegative():
    rng = np.random.default_rng(1)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = G + G.conj().T
    V = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    value = weak_moment_fixed_state(H, DensityState.from_factor(V), 2)
    assert abs(value.imag) < 1e-12 and value.real >= 0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        weak_moment_fixed_state(np.eye(3), DensityState.maximally_mixed(2), 2)


def test_strong_moment_of_jordan_block():
    J = np.array([[0, 1], [0, 0]], dtype=complex)
    D = DensityState(np.diag([0.5, 0.5]))
    # mean 0, |J|^2 = J*J = diag(0, 1)
    assert strong_moment_fixed_state(J, D, 2) == pytest.approx(0.5)


def test_as_mode():
    assert as_mode("weak") is Mode.WEAK
    assert as_mode(Mode.STRONG) is Mode.STRONG
