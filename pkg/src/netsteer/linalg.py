"""Dense complex matrix kernel for multi-qubit operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Subsystem
index 0 is always the leftmost (most significant) tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import LayoutError, PreconditionError

MAX_DIM = 4096
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True)
class SubsystemLayout:
    """Per-subsystem dimensions of a tensor-product space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise LayoutError(f"subsystem dimensions must all be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def qubits(cls, count: int) -> "SubsystemLayout":
        return cls((2,) * count)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.dims)

    def check(self, m: np.ndarray):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise LayoutError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] != self.total:
            raise LayoutError(f"matrix dimension {m.shape[0]} does not match layout {self.dims}")


def as_matrix(m) -> np.ndarray:
    """Validate and convert to a finite complex 2-d array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise PreconditionError(f"expected a 2-d matrix, got {arr.ndim}-d")
    if max(arr.shape) > MAX_DIM:
        raise PreconditionError(f"matrix dimension {arr.shape} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("matrix has non-finite entries")
    return arr


def _layout(layout) -> SubsystemLayout:
    return layout if isinstance(layout, SubsystemLayout) else SubsystemLayout(tuple(layout))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Iterable) -> np.ndarray:
    mats = list(mats)
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(kron, mats)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= tol


def partial_trace(m, layout, traced: Iterable[int]) -> np.ndarray:
    """Trace out the subsystems listed in ``traced``.

    Tracing every subsystem returns a 1x1 matrix holding the full trace.
    """
    m = as_matrix(m)
    layout = _layout(layout)
    layout.check(m)
    traced = sorted(set(int(i) for i in traced))
    nsub = len(layout)
    if any(i < 0 or i >= nsub for i in traced):
        raise LayoutError(f"traced indices {traced} out of range for {nsub} subsystems")
    keep = [i for i in range(nsub) if i not in traced]
    tensor = m.reshape(layout.dims + layout.dims)
    # einsum labels: row index i, column index nsub + i; traced pairs share a label
    row = list(range(nsub))
    col = [nsub + i for i in range(nsub)]
    for i in traced:
        col[i] = row[i]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(tensor, row + col, out)
    dim = int(np.prod([layout.dims[i] for i in keep])) if keep else 1
    return reduced.reshape(dim, dim)


def herm_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise PreconditionError("matrix is not Hermitian within 1e-10")
    # symmetrize so eigh sees exactly the Hermitian part
    evals, evecs = np.linalg.eigh((m + m.conj().T) / 2)
    return evals, evecs


def min_eigenvalue(m) -> float:
    return float(herm_eig(m)[0][0])


def permutation_unitary(layout, perm: Sequence[int]) -> np.ndarray:
    """Unitary ``U`` with ``U (x_0 ⊗ ... ⊗ x_k) = x_perm[0] ⊗ ... ⊗ x_perm[k]``."""
    layout = _layout(layout)
    perm = _check_perm(perm, len(layout))
    eye = np.eye(layout.total, dtype=complex).reshape(layout.dims + (layout.total,))
    return eye.transpose(perm + [len(layout)]).reshape(layout.total, layout.total)


def _check_perm(perm, nsub) -> list[int]:
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(nsub)):
        raise PreconditionError(f"{perm} is not a permutation of {nsub} subsystems")
    return perm


def permute_subsystems(m, layout, perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new subsystem ``i`` is old subsystem ``perm[i]``."""
    m = as_matrix(m)
    layout = _layout(layout)
    layout.check(m)
    perm = _check_perm(perm, len(layout))
    nsub = len(layout)
    tensor = m.reshape(layout.dims + layout.dims)
    out = tensor.transpose(perm + [nsub + p for p in perm])
    return np.ascontiguousarray(out).reshape(m.shape)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def expectation(op, state) -> float:
    """Real part of ``Tr(op @ state)``; asserts the imaginary part is negligible."""
    op = as_matrix(op)
    state = as_matrix(state)
    if op.shape != state.shape or op.shape[0] != op.shape[1]:
        raise LayoutError(f"dimension mismatch: {op.shape} vs {state.shape}")
    # Tr(AB) = sum_ij A_ij B_ji
    value = np.sum(op * state.T)
    if abs(value.imag) > 1e-9:
        raise PreconditionError(f"expectation has imaginary part {value.imag:.3e}; inputs not Hermitian")
    return float(value.real)
