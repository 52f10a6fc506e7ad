"""State types and the result record shared by the moment optimizers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionMismatchError, InvalidStateError, check_k
from .linalg import as_matrix, central_power

STATE_TOL = 1e-10


class Mode(str, enum.Enum):
    STRONG = "Strong"
    WEAK = "Weak"


class Certificate(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    ATOM_SEARCH = "AtomSearch"
    FIXED_MEAN_LP = "FixedMeanLP"
    DUAL_SDP = "DualSDP"
    PRIMAL_ASCENT = "PrimalAscent"


def as_mode(mode) -> Mode:
    if isinstance(mode, Mode):
        return mode
    return Mode(str(mode).capitalize())


@dataclass(frozen=True)
class DiscreteState:
    """Finitely supported probability measure on the complex plane."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support, dtype=complex).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if s.shape != w.shape or s.size == 0:
            raise InvalidStateError("support and weights must be non-empty and equally long")
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidStateError("weights must be a probability vector")
        if s.size > 1:
            gaps = np.abs(s[:, None] - s[None, :]) + np.eye(s.size)
            if gaps.min() <= 1e-12:
                raise InvalidStateError("support points must be distinct")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    def mean(self) -> complex:
        return complex(self.weights @ self.support)

    def strong_moment(self, k: int) -> float:
        """E |X - EX|^k."""
        return float(self.weights @ np.abs(self.support - self.mean()) ** k)

    def weak_moment(self, k: int) -> complex:
        """E (X - EX)^k."""
        return complex(self.weights @ (self.support - self.mean()) ** k)

    def to_dict(self) -> dict:
        return {
            "type": "DiscreteState",
            "support": [[z.real, z.imag] for z in self.support],
            "weights": [float(w) for w in self.weights],
        }


@dataclass(frozen=True)
class DensityState:
    """Positive semidefinite unit-trace matrix, the state X -> Tr(D X)."""

    D: np.ndarray

    def __post_init__(self):
        D = as_matrix(self.D)
        scale = 1.0 + np.linalg.norm(D)
        if np.linalg.norm(D - D.conj().T) > STATE_TOL * scale:
            raise InvalidStateError("density matrix must be Hermitian")
        D = 0.5 * (D + D.conj().T)
        if abs(np.trace(D).real - 1.0) > STATE_TOL:
            raise InvalidStateError("density matrix must have unit trace")
        if np.linalg.eigvalsh(D).min() < -STATE_TOL:
            raise InvalidStateError("density matrix must be positive semidefinite")
        object.__setattr__(self, "D", D)

    @classmethod
    def from_factor(cls, V) -> "DensityState":
        V = np.asarray(V, dtype=complex)
        G = V @ V.conj().T
        return cls(G / np.trace(G).real)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityState":
        return cls(np.eye(n, dtype=complex) / n)

    @property
    def n(self) -> int:
        return self.D.shape[0]

    def __call__(self, X) -> complex:
        return complex(np.trace(self.D @ X))

    def to_dict(self) -> dict:
        return {
            "type": "DensityState",
            "n": self.n,
            "entries": [[z.real, z.imag] for z in self.D.ravel()],
        }


Witness = Union[DiscreteState, DensityState]


@dataclass(frozen=True)
class MomentResult:
    k: int
    mode: Mode
    value: float
    mean: complex
    witness: Witness
    certificate: Certificate
    info: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode.value,
            "value": self.value,
            "mean": [self.mean.real, self.mean.imag],
            "certificate": self.certificate.value,
            "witness": self.witness.to_dict(),
            "info": self.info,
        }


def _check_state(A: np.ndarray, state) -> DensityState:
    if not isinstance(state, DensityState):
        state = DensityState(state)
    if state.n != A.shape[0]:
        raise DimensionMismatchError(f"state is {state.n}x{state.n}, matrix is {A.shape[0]}x{A.shape[0]}")
    return state


def weak_moment_fixed_state(A, state, k: int) -> complex:
    """Tr(D (A - Tr(DA) I)^k)."""
    A = as_matrix(A)
    k = check_k(k)
    state = _check_state(A, state)
    return state(central_power(A, state(A), k))


def strong_moment_fixed_state(A, state, k: int) -> float:
    """Tr(D |A - Tr(DA) I|^k)."""
    A = as_matrix(A)
    k = check_k(k)
    state = _check_state(A, state)
    return state(central_power(A, state(A), k, absolute=True)).real


def witness_moment(result: MomentResult, A=None) -> float:
    """Re-evaluate the k-th power moment of a result's witness."""
    w, k = result.witness, result.k
    if isinstance(w, DiscreteState):
        return w.strong_moment(k) if result.mode is Mode.STRONG else abs(w.weak_moment(k))
    if A is None:
        raise ValueError("a density-matrix witness needs the matrix it was computed for")
    if result.mode is Mode.STRONG:
        return strong_moment_fixed_state(A, w, k)
    return abs(weak_moment_fixed_state(A, w, k))
