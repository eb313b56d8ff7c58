"""Assemblages, network conditional states and Born-rule correlation tables.

Setting and outcome labels are 0-based throughout: Alice setting ``x=0``
is the first measurement of a source, outcome ``a=0`` the "+1" result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import LayoutError, PreconditionError
from .linalg import PSD_TOL, herm_eig, kron_all, partial_trace
from .measurements import QubitBinaryPOVM, validate_effects
from .states import DensityMatrix, StarNetworkState

NS_TOL = 1e-9
Key = tuple[tuple[int, ...], int]


def povm_effects(p) -> np.ndarray:
    """Effects of a POVM given as :class:`QubitBinaryPOVM` or an effect list."""
    if isinstance(p, QubitBinaryPOVM):
        return p.effects
    return validate_effects(p)


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Unnormalized conditional states, ``states[x, a]`` = rho~_{a|x}."""

    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 4 or states.shape[2] != states.shape[3]:
            raise PreconditionError(f"assemblage must have shape (N, m, d, d), got {states.shape}")
        object.__setattr__(self, "states", states)

    @property
    def settings(self) -> int:
        return self.states.shape[0]

    @property
    def outcomes(self) -> int:
        return self.states.shape[1]

    def probability(self, a: int, x: int) -> float:
        return float(np.trace(self.states[x, a]).real)

    def reduced_state(self, x: int = 0) -> np.ndarray:
        return self.states[x].sum(axis=0)

    def is_valid(self, tol: float = PSD_TOL) -> bool:
        psd = all(herm_eig(s)[0][0] >= -tol for s in self.states.reshape(-1, *self.states.shape[2:]))
        return psd and no_signalling_check(self)[0]


def conditional_states(w, povms: Sequence) -> Assemblage:
    """``rho~_{a|x} = Tr_A[(Pi_{a|x} x I) W]`` for a bipartite state ``W``."""
    mat = w.mat if isinstance(w, DensityMatrix) else np.asarray(w, dtype=complex)
    effects = [povm_effects(p) for p in povms]
    if not effects:
        raise PreconditionError("need at least one measurement")
    dA = effects[0].shape[1]
    if mat.shape[0] % dA:
        raise LayoutError(f"state dimension {mat.shape[0]} not divisible by Alice dimension {dA}")
    dB = mat.shape[0] // dA
    tensor = mat.reshape(dA, dB, dA, dB)
    out = []
    for eff in effects:
        if eff.shape[1] != dA:
            raise LayoutError("all Alice measurements must act on the same space")
        out.append(np.einsum("aji,ibjc->abc", eff, tensor))
    if len({e.shape[0] for e in effects}) != 1:
        raise PreconditionError("all settings must have the same number of outcomes")
    return Assemblage(np.stack(out))


def network_assemblage(s: StarNetworkState, per_source_povms: Sequence[Sequence]) -> list[Assemblage]:
    if len(per_source_povms) != s.n:
        raise PreconditionError(f"expected {s.n} measurement sets, got {len(per_source_povms)}")
    return [conditional_states(src, povms) for src, povms in zip(s.sources, per_source_povms)]


def network_conditional_state(assemblages: Sequence[Assemblage], outcomes: Sequence[int],
                              settings: Sequence[int]) -> np.ndarray:
    """Bob's unnormalized state ``(x)_mu rho~_{a_mu|x_mu}``, built on request."""
    if not len(assemblages) == len(outcomes) == len(settings):
        raise PreconditionError("outcome and setting strings must have one entry per source")
    return kron_all(asm.states[x, a] for asm, a, x in zip(assemblages, outcomes, settings))


def no_signalling_check(a: Assemblage, tol: float = NS_TOL) -> tuple[bool, float]:
    """Largest entrywise deviation of ``sum_a rho~_{a|x}`` across settings."""
    marginals = a.states.sum(axis=1)
    dev = float(np.max(np.abs(marginals - marginals[0]), initial=0.0))
    return dev <= tol, dev


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Probabilities ``p(a_1..a_n, b | x_1..x_n, y)``.

    ``probs[(xs, y)]`` is an array of shape ``(m_1, ..., m_n, m_y)``.
    """

    alice_settings: tuple[int, ...]
    bob_outcomes: tuple[int, ...]
    probs: Mapping[Key, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "alice_settings", tuple(int(c) for c in self.alice_settings))
        object.__setattr__(self, "bob_outcomes", tuple(int(c) for c in self.bob_outcomes))
        probs = {(tuple(int(x) for x in xs), int(y)): np.asarray(p, dtype=float)
                 for (xs, y), p in self.probs.items()}
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return len(self.alice_settings)

    @property
    def bob_settings(self) -> int:
        return len(self.bob_outcomes)

    def keys(self) -> list[Key]:
        return sorted(self.probs)

    def __getitem__(self, key: Key) -> np.ndarray:
        xs, y = key
        return self.probs[(tuple(xs), int(y))]

    def __contains__(self, key) -> bool:
        xs, y = key
        return (tuple(xs), int(y)) in self.probs

    def max_normalization_error(self) -> float:
        return max((abs(p.sum() - 1) for p in self.probs.values()), default=0.0)

    def min_probability(self) -> float:
        return min((float(p.min()) for p in self.probs.values()), default=0.0)

    def is_valid(self, tol: float = 1e-9) -> bool:
        return self.max_normalization_error() <= tol and self.min_probability() >= -1e-12

    def alice_marginal(self, xs: Sequence[int], y: int) -> np.ndarray:
        return self[(xs, y)].sum(axis=-1)

    def correlator(self, xs: Sequence[int], y: int, bob_values: Sequence[float],
                   alice_values: Sequence[float] = (1.0, -1.0)) -> float:
        """``sum p(a, b|x, y) prod_mu v(a_mu) w(b)``, default Alice values +1/-1."""
        p = self[(xs, y)]
        weights = np.asarray(bob_values, dtype=float)
        for _ in range(self.n):
            weights = np.multiply.outer(np.asarray(alice_values, dtype=float), weights)
        return float(np.sum(p * weights))

    def max_abs_difference(self, other: "CorrelationTable") -> float:
        if set(self.probs) != set(other.probs):
            raise PreconditionError("tables cover different setting tuples")
        return max(float(np.max(np.abs(self.probs[k] - other.probs[k]))) for k in self.probs)


def _bob_settings(bob_povm) -> list[np.ndarray]:
    """Accept one effect list or a list of effect lists."""
    if isinstance(bob_povm, np.ndarray) and bob_povm.ndim == 3:
        return [validate_effects(bob_povm)]
    return [validate_effects(np.asarray(effs, dtype=complex)) for effs in bob_povm]


def _alice_setup(state, per_source_povms):
    if isinstance(state, StarNetworkState):
        if len(per_source_povms) != state.n:
            raise PreconditionError(f"expected {state.n} measurement sets, got {len(per_source_povms)}")
        mat = state.bob_ordered.mat
    else:
        mat = state.mat if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)
    alice = [[povm_effects(p) for p in povms] for povms in per_source_povms]
    dA = int(np.prod([povms[0].shape[1] for povms in alice]))
    if mat.shape[0] % dA:
        raise LayoutError(f"state dimension {mat.shape[0]} incompatible with Alice dimension {dA}")
    return mat, alice, dA, mat.shape[0] // dA


def born_correlations(state, per_source_povms: Sequence[Sequence], bob_povm) -> CorrelationTable:
    """Born-rule table ``p = Tr[((x)Pi_{a|x}) x M_{b|y} W']`` on the full state.

    ``state`` is a :class:`StarNetworkState` (reordered internally so all
    Alice wires come first) or any state whose leading wires belong to the
    Alices in order, with Bob holding the remainder. ``bob_povm`` is a list
    of Bob settings, each a list of effects on Bob's space.
    """
    mat, alice, dA, dB = _alice_setup(state, per_source_povms)
    bob = _bob_settings(bob_povm)
    for effs in bob:
        if effs.shape[1] != dB:
            raise LayoutError(f"Bob effect dimension {effs.shape[1]} != Bob space {dB}")
    tensor = mat.reshape(dA, dB, dA, dB)
    probs = {}
    for xs in itertools.product(*(range(len(povms)) for povms in alice)):
        chosen = [alice[mu][x] for mu, x in enumerate(xs)]
        shape = tuple(e.shape[0] for e in chosen)
        joint = np.stack([kron_all(e[a] for e, a in zip(chosen, outcome))
                          for outcome in itertools.product(*(range(m) for m in shape))])
        bob_conditional = np.einsum("kji,ibjc->kbc", joint, tensor)
        for y, effs in enumerate(bob):
            p = np.einsum("kbc,mcb->km", bob_conditional, effs).real
            probs[(xs, y)] = p.reshape(shape + (effs.shape[0],))
    return CorrelationTable(tuple(len(p) for p in alice), tuple(e.shape[0] for e in bob), probs)


def table_from_assemblages(assemblages: Sequence[Assemblage], bob_povm) -> CorrelationTable:
    """Same table as :func:`born_correlations`, via per-source conditional states."""
    bob = _bob_settings(bob_povm)
    probs = {}
    for xs in itertools.product(*(range(a.settings) for a in assemblages)):
        shape = tuple(a.outcomes for a in assemblages)
        for y, effs in enumerate(bob):
            p = np.zeros(shape + (effs.shape[0],))
            for outcome in itertools.product(*(range(m) for m in shape)):
                sigma = network_conditional_state(assemblages, outcome, xs)
                p[outcome] = np.einsum("bc,mcb->m", sigma, effs).real
            probs[(xs, y)] = p
    return CorrelationTable(tuple(a.settings for a in assemblages), tuple(e.shape[0] for e in bob), probs)


def reduced_bob_state(state: StarNetworkState) -> np.ndarray:
    n = state.n
    return partial_trace(state.bob_ordered.mat, state.layout, range(n))
