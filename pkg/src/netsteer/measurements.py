"""Qubit measurement algebra: Pauli matrices, binary POVMs, joint measurability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import IncompatiblePairError, InvalidPOVMError, PreconditionError
from .linalg import PSD_TOL, as_matrix, herm_eig, is_hermitian

I2 = np.eye(2, dtype=complex)
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

JM_TOL = 1e-12


def pauli(j: int) -> np.ndarray:
    """Pauli matrix ``j`` in {1, 2, 3} (x, y, z). A fresh copy each call."""
    if j not in (1, 2, 3):
        raise PreconditionError(f"Pauli index must be 1, 2 or 3, got {j!r}")
    return _PAULI[j - 1].copy()


def bloch_operator(r) -> np.ndarray:
    """``r . sigma`` for a real 3-vector ``r``."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise PreconditionError(f"Bloch vector must have 3 components, got shape {r.shape}")
    return r[0] * _PAULI[0] + r[1] * _PAULI[1] + r[2] * _PAULI[2]


def bloch_vector(op) -> np.ndarray:
    """Components ``Tr(op sigma_j)`` of a 2x2 operator (real parts)."""
    op = as_matrix(op)
    return np.array([np.trace(op @ s).real for s in _PAULI])


@dataclass(frozen=True)
class QubitBinaryPOVM:
    """Two-outcome qubit POVM with ``M0 = ((1+k) I + r.sigma)/2`` and ``M1 = I - M0``."""

    k: float
    r: tuple[float, float, float]

    def __post_init__(self):
        r = tuple(float(c) for c in np.asarray(self.r, dtype=float).reshape(-1))
        if len(r) != 3:
            raise InvalidPOVMError(f"r must have 3 components, got {len(r)}")
        k = float(self.k)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "r", r)
        norm = math.hypot(*r)
        if not (abs(k) <= 1 + 1e-12):
            raise InvalidPOVMError(f"|k| must be <= 1, got k={k}")
        if norm > 1 + k + 1e-12:
            raise InvalidPOVMError(f"|r|={norm:.6g} exceeds 1+k={1 + k:.6g}")
        if norm > 1 - k + 1e-12:
            raise InvalidPOVMError(f"|r|={norm:.6g} exceeds 1-k={1 - k:.6g}; second effect not PSD")

    @cached_property
    def effects(self) -> np.ndarray:
        m0 = 0.5 * ((1 + self.k) * I2 + bloch_operator(self.r))
        return np.stack([m0, I2 - m0])

    @property
    def observable(self) -> np.ndarray:
        return observable(self)


def povm_from_bloch(k: float, r) -> QubitBinaryPOVM:
    return QubitBinaryPOVM(k, tuple(np.asarray(r, dtype=float)))


def povm_from_observable(op) -> QubitBinaryPOVM:
    """Inverse of :func:`observable` for a Hermitian 2x2 operator with spectrum in [-1, 1]."""
    op = as_matrix(op)
    if op.shape != (2, 2) or not is_hermitian(op):
        raise InvalidPOVMError("expected a Hermitian 2x2 observable")
    k = float(np.trace(op).real / 2)
    return QubitBinaryPOVM(k, tuple(bloch_vector(op) / 2))


def observable(povm: QubitBinaryPOVM) -> np.ndarray:
    """Dichotomic observable ``M0 - M1 = k I + r.sigma``."""
    m0, m1 = povm.effects
    return m0 - m1


def effects_from_observable(op) -> np.ndarray:
    """Two-outcome effects ``(I +- op)/2`` for a Hermitian operator of any dimension."""
    op = as_matrix(op)
    if not is_hermitian(op):
        raise InvalidPOVMError("observable is not Hermitian")
    evals = herm_eig(op)[0]
    if evals[0] < -1 - PSD_TOL or evals[-1] > 1 + PSD_TOL:
        raise InvalidPOVMError(f"observable spectrum [{evals[0]:.6g}, {evals[-1]:.6g}] leaves [-1, 1]")
    eye = np.eye(op.shape[0], dtype=complex)
    return np.stack([(eye + op) / 2, (eye - op) / 2])


def validate_effects(effects, tol: float = PSD_TOL) -> np.ndarray:
    """Check a list of effects is PSD and sums to the identity; returns a stacked array."""
    effects = np.asarray(effects, dtype=complex)
    if effects.ndim != 3 or effects.shape[1] != effects.shape[2]:
        raise InvalidPOVMError(f"effects must have shape (m, d, d), got {effects.shape}")
    for e in effects:
        if not is_hermitian(e):
            raise InvalidPOVMError("effect is not Hermitian")
        if herm_eig(e)[0][0] < -tol:
            raise InvalidPOVMError("effect is not positive semidefinite")
    dev = np.max(np.abs(effects.sum(axis=0) - np.eye(effects.shape[1])))
    if dev > tol:
        raise InvalidPOVMError(f"effects sum to identity only within {dev:.3e}")
    return effects


def jm_pair_check(r1, r2) -> tuple[bool, float]:
    """Joint-measurability test for two unbiased qubit POVMs.

    ``margin = 2 - |r1 + r2| - |r1 - r2|``; compatible when the margin is
    non-negative (up to 1e-12).
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if np.linalg.norm(r1) > 1 + 1e-12 or np.linalg.norm(r2) > 1 + 1e-12:
        raise PreconditionError("Bloch vectors of unbiased POVMs must have norm <= 1")
    margin = 2.0 - float(np.linalg.norm(r1 + r2)) - float(np.linalg.norm(r1 - r2))
    return margin >= -JM_TOL, margin


@dataclass(frozen=True)
class JmDecomposition:
    """``(r1+r2)/2 = cos^2(omega) s`` and ``(r1-r2)/2 = sin^2(omega) t``."""

    omega: float
    s: np.ndarray
    t: np.ndarray

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        c2 = math.cos(self.omega) ** 2
        s2 = math.sin(self.omega) ** 2
        plus = c2 * self.s
        minus = s2 * self.t
        return plus + minus, plus - minus


def jm_decompose(r1, r2) -> JmDecomposition:
    """Split a compatible pair into the (omega, s, t) form.

    Any slack ``1 - |r1+r2|/2 - |r1-r2|/2`` is shared equally between the
    two halves, which keeps the split continuous in the inputs.
    """
    ok, margin = jm_pair_check(r1, r2)
    if not ok:
        raise IncompatiblePairError(f"pair is incompatible (margin {margin:.6g})")
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    half_sum = (r1 + r2) / 2
    half_diff = (r1 - r2) / 2
    a = float(np.linalg.norm(half_sum))
    b = float(np.linalg.norm(half_diff))
    slack = max(0.0, 1.0 - a - b)
    c2 = min(1.0, a + slack / 2)
    s2 = 1.0 - c2
    s = half_sum / c2 if c2 > 0 else np.zeros(3)
    t = half_diff / s2 if s2 > 0 else np.zeros(3)
    omega = math.atan2(math.sqrt(s2), math.sqrt(c2))
    # the angle round trip can move c2 by an ulp; rescale so reconstruction is exact
    if c2 > 0:
        s = s * (c2 / math.cos(omega) ** 2)
    if s2 > 0:
        t = t * (s2 / math.sin(omega) ** 2)
    return JmDecomposition(omega, s, t)
