"""Source states, named states and the star-network product state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidStateError, PreconditionError, ResourceError
from .linalg import (
    HERMITIAN_TOL,
    PSD_TOL,
    SubsystemLayout,
    as_matrix,
    expectation,
    herm_eig,
    is_hermitian,
    kron,
    kron_all,
    partial_trace,
    permute_subsystems,
)
from .measurements import bloch_vector, pauli

MAX_SOURCES = 5

BELL_KINDS = ("psi+", "psi-", "phi+", "phi-")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix together with its subsystem layout."""

    mat: np.ndarray
    layout: SubsystemLayout = None

    def __post_init__(self):
        mat = as_matrix(self.mat)
        layout = self.layout
        if layout is None:
            nq = int(round(math.log2(mat.shape[0]))) if mat.shape[0] > 1 else 0
            if nq < 1 or 2**nq != mat.shape[0]:
                raise InvalidStateError(f"dimension {mat.shape[0]} is not a power of two; pass a layout")
            layout = SubsystemLayout.qubits(nq)
        elif not isinstance(layout, SubsystemLayout):
            layout = SubsystemLayout(tuple(layout))
        try:
            layout.check(mat)
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from exc
        if not is_hermitian(mat, HERMITIAN_TOL):
            raise InvalidStateError("state is not Hermitian within 1e-10")
        tr = np.trace(mat).real
        if abs(tr - 1) > 1e-10:
            raise InvalidStateError(f"state has trace {tr:.12g}, expected 1")
        lo = herm_eig(mat)[0][0]
        if lo < -PSD_TOL:
            raise InvalidStateError(f"state has negative eigenvalue {lo:.3e}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def expect(self, op) -> float:
        return expectation(op, self.mat)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)


def pure(psi, layout=None) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), layout)


def bell_vector(kind: str) -> np.ndarray:
    """|Psi+-> = (|00> +- |11>)/sqrt2, |Phi+-> = (|01> +- |10>)/sqrt2."""
    s = 1 / math.sqrt(2)
    vectors = {
        "psi+": [s, 0, 0, s],
        "psi-": [s, 0, 0, -s],
        "phi+": [0, s, s, 0],
        "phi-": [0, s, -s, 0],
    }
    try:
        return np.array(vectors[kind.lower()], dtype=complex)
    except KeyError:
        raise PreconditionError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}") from None


def bell_state(kind: str = "psi+") -> DensityMatrix:
    return pure(bell_vector(kind))


def bell_projectors() -> dict[str, np.ndarray]:
    return {k: np.outer(bell_vector(k), bell_vector(k).conj()) for k in BELL_KINDS}


def isotropic(eta: float) -> DensityMatrix:
    """``eta |Psi+><Psi+| + (1 - eta) I/4``."""
    eta = float(eta)
    if not 0 <= eta <= 1:
        raise PreconditionError(f"isotropic visibility must lie in [0, 1], got {eta}")
    return DensityMatrix(eta * bell_state("psi+").mat + (1 - eta) * np.eye(4) / 4)


def maximally_mixed(nqubits: int = 2) -> DensityMatrix:
    d = 2**nqubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def ghz(nqubits: int = 3) -> DensityMatrix:
    psi = np.zeros(2**nqubits, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return pure(psi)


def product(*states: DensityMatrix) -> DensityMatrix:
    dims = sum((s.dims for s in states), ())
    return DensityMatrix(kron_all(s.mat for s in states), SubsystemLayout(dims))


def _wire_order(n: int) -> list[int]:
    # A1 B1 A2 B2 ... -> A1 A2 ... B1 B2 ...
    return [2 * mu for mu in range(n)] + [2 * mu + 1 for mu in range(n)]


@dataclass(frozen=True, eq=False)
class StarNetworkState:
    """``n`` independent two-qubit sources, source ``mu`` shared by Alice ``mu`` and Bob.

    The global wire order of :attr:`matrix` is A1 B1 A2 B2 ... An Bn.
    """

    sources: tuple[DensityMatrix, ...]

    def __post_init__(self):
        sources = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s) for s in self.sources)
        if not sources:
            raise PreconditionError("a star network needs at least one source")
        if len(sources) > MAX_SOURCES:
            raise ResourceError(f"n={len(sources)} sources exceeds the dense limit of {MAX_SOURCES}")
        for mu, s in enumerate(sources):
            if s.dims != (2, 2):
                raise InvalidStateError(f"source {mu} is not a two-qubit state (dims {s.dims})")
        object.__setattr__(self, "sources", sources)

    @property
    def n(self) -> int:
        return len(self.sources)

    @cached_property
    def matrix(self) -> np.ndarray:
        return kron_all(s.mat for s in self.sources)

    @property
    def layout(self) -> SubsystemLayout:
        return SubsystemLayout.qubits(2 * self.n)

    @cached_property
    def bob_ordered(self) -> DensityMatrix:
        return bob_ordered_state(self)


def star_state(sources: Sequence) -> StarNetworkState:
    return StarNetworkState(tuple(sources))


def bob_ordered_state(s: StarNetworkState) -> DensityMatrix:
    """W with wires reordered to A1 A2 ... An | B1 B2 ... Bn."""
    mat = permute_subsystems(s.matrix, s.layout, _wire_order(s.n))
    return DensityMatrix(mat, s.layout)


def bob_ordered_operator(op, n: int) -> np.ndarray:
    """Reorder an operator written in A1 B1 ... An Bn wire order the same way as the state."""
    return permute_subsystems(op, SubsystemLayout.qubits(2 * n), _wire_order(n))


def _two_qubit(rho) -> np.ndarray:
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if mat.shape != (4, 4):
        raise PreconditionError(f"expected a two-qubit state, got dimension {mat.shape[0]}")
    return mat


def t_matrix(rho) -> np.ndarray:
    """3x3 real correlation matrix ``t_ij = Tr[rho (sigma_i x sigma_j)]``."""
    mat = _two_qubit(rho)
    return np.array([[expectation(kron(pauli(i), pauli(j)), mat) for j in (1, 2, 3)] for i in (1, 2, 3)])


def reduced_state(rho, keep: str) -> DensityMatrix:
    """Single-qubit marginal; ``keep`` is ``"alice"`` (first wire) or ``"bob"``."""
    mat = _two_qubit(rho)
    side = keep.lower()
    if side not in ("alice", "bob"):
        raise PreconditionError(f"keep must be 'alice' or 'bob', got {keep!r}")
    traced = {1} if side == "alice" else {0}
    return DensityMatrix(partial_trace(mat, (2, 2), traced))


def local_bloch_vectors(rho) -> tuple[np.ndarray, np.ndarray]:
    """Bloch vectors ``(r_A, r_B)`` of the two marginals."""
    return bloch_vector(reduced_state(rho, "alice").mat), bloch_vector(reduced_state(rho, "bob").mat)


# -- random sampling ------------------------------------------------------

def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(rng: np.random.Generator, nqubits: int = 2, rank: int = 4) -> DensityMatrix:
    """Mixture of ``rank`` Haar-random pure states with flat Dirichlet weights."""
    dim = 2**nqubits
    weights = rng.dirichlet(np.ones(rank))
    mat = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        v = haar_vector(dim, rng)
        mat += w * np.outer(v, v.conj())
    mat = (mat + mat.conj().T) / 2
    return DensityMatrix(mat / np.trace(mat).real)


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)
