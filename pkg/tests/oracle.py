"""Reference computations written directly in numpy, independent of netsteer."""

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
SIGMA = (SX, SY, SZ)


def kron(*ms):
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, m)
    return out


def ket(bits: str):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def proj(v):
    return np.outer(v, v.conj())


PSI_PLUS = (ket("00") + ket("11")) / np.sqrt(2)
PHI_PLUS = (ket("01") + ket("10")) / np.sqrt(2)


def isotropic(eta):
    return eta * proj(PSI_PLUS) + (1 - eta) * np.eye(4) / 4


def ev(op, rho):
    return float(np.trace(op @ rho).real)


def dot_sigma(r):
    return sum(c * s for c, s in zip(r, SIGMA))


def reorder_two_sources(w):
    """A1 B1 A2 B2 -> A1 A2 B1 B2 by an explicit SWAP of the middle wires."""
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[2 * j + i, 2 * i + j] = 1
    u = kron(I2, swap, I2)
    return u @ w @ u.conj().T
