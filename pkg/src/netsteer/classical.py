"""Finite local-hidden-state and local-hidden-variable models.

Hidden variables range over finite sets. The models predict assemblages
and correlation tables, and the brute-force routines here serve as the
classical oracle for every bound the criteria use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assemblages import Assemblage, CorrelationTable, _bob_settings, table_from_assemblages
from .errors import PreconditionError, ResourceError
from .linalg import kron_all
from .measurements import bloch_operator
from .states import haar_vector

NORM_TOL = 1e-12
DEFAULT_HIDDEN = 8


def _check_distribution(p: np.ndarray, axis: int, what: str):
    if np.any(p < -NORM_TOL):
        raise PreconditionError(f"{what} has negative entries")
    dev = np.max(np.abs(p.sum(axis=axis) - 1), initial=0.0)
    if dev > NORM_TOL:
        raise PreconditionError(f"{what} is not normalized (deviation {dev:.3e})")


@dataclass(frozen=True, eq=False)
class LhsSource:
    """One source of an LHS model.

    ``weights[k]`` is the probability of hidden value ``k``,
    ``responses[k, x, a]`` the probability Alice answers ``a`` to setting
    ``x`` and ``states[k]`` the qubit state sent to Bob.
    """

    weights: np.ndarray
    responses: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        r = np.asarray(self.responses, dtype=float)
        st = np.asarray(self.states, dtype=complex)
        if w.ndim != 1 or r.ndim != 3 or st.ndim != 3 or not (len(w) == len(r) == len(st)):
            raise PreconditionError("weights (K,), responses (K, N, m), states (K, d, d) required")
        _check_distribution(w, 0, "hidden-variable weights")
        _check_distribution(r, 2, "response table")
        for k, rho in enumerate(st):
            if abs(np.trace(rho) - 1) > 1e-10 or np.max(np.abs(rho - rho.conj().T)) > 1e-10:
                raise PreconditionError(f"hidden state {k} is not a valid density matrix")
            if np.linalg.eigvalsh(rho)[0] < -1e-9:
                raise PreconditionError(f"hidden state {k} is not positive semidefinite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "responses", r)
        object.__setattr__(self, "states", st)

    @property
    def settings(self) -> int:
        return self.responses.shape[1]

    @property
    def outcomes(self) -> int:
        return self.responses.shape[2]


@dataclass(frozen=True, eq=False)
class FiniteLhsModel:
    """Independent LHS sources, one per Alice."""

    sources: tuple[LhsSource, ...]

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))

    @property
    def n(self) -> int:
        return len(self.sources)


@dataclass(frozen=True, eq=False)
class FiniteLhvModel:
    """Joint hidden variable ``lambda`` with deterministic or stochastic responses.

    ``alice[mu][l, x, a]`` and ``bob[y][l, b]`` are response probabilities.
    """

    weights: np.ndarray
    alice: tuple[np.ndarray, ...]
    bob: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        alice = tuple(np.asarray(a, dtype=float) for a in self.alice)
        bob = tuple(np.asarray(b, dtype=float) for b in self.bob)
        _check_distribution(w, 0, "hidden-variable weights")
        for a in alice:
            if a.ndim != 3 or a.shape[0] != len(w):
                raise PreconditionError("Alice responses must have shape (L, N, m)")
            _check_distribution(a, 2, "Alice response table")
        for b in bob:
            if b.ndim != 2 or b.shape[0] != len(w):
                raise PreconditionError("Bob responses must have shape (L, m_y)")
            _check_distribution(b, 1, "Bob response table")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def n(self) -> int:
        return len(self.alice)


def lhs_assemblage(m: FiniteLhsModel | LhsSource, source: int = 0) -> Assemblage:
    """``rho~_{a|x} = sum_k w_k p(a|x,k) rho_k``."""
    src = m if isinstance(m, LhsSource) else m.sources[source]
    return Assemblage(np.einsum("k,kxa,kij->xaij", src.weights, src.responses, src.states))


def lhs_correlations(m: FiniteLhsModel, bob_povm) -> CorrelationTable:
    """Table predicted by an n-LHS model: Bob measures the product of hidden states.

    Because the sources are independent, summing over the joint hidden
    variable factorizes into per-source assemblages.
    """
    return table_from_assemblages([lhs_assemblage(src) for src in m.sources], bob_povm)


def _einsum_letters(count: int) -> list[str]:
    letters = "abcdefghijmnopqrstuvwxyz"
    if count > len(letters):
        raise ResourceError("too many parties for einsum")
    return list(letters[:count])


def lhv_correlations(m: FiniteLhvModel) -> CorrelationTable:
    """``p(a, b|x, y) = sum_l w_l prod_mu p_mu(a_mu|x_mu, l) p(b|y, l)``."""
    letters = _einsum_letters(m.n + 1)
    spec = ",".join(["l"] + [f"l{c}" for c in letters]) + "->" + "".join(letters)
    probs = {}
    for xs in itertools.product(*(range(a.shape[1]) for a in m.alice)):
        chosen = [a[:, x, :] for a, x in zip(m.alice, xs)]
        for y, b in enumerate(m.bob):
            probs[(xs, y)] = np.einsum(spec, m.weights, *chosen, b)
    return CorrelationTable(tuple(a.shape[1] for a in m.alice), tuple(b.shape[1] for b in m.bob), probs)


def lhv_from_lhs(m: FiniteLhsModel, bob_povm) -> FiniteLhvModel:
    """Recast an n-LHS model as an LHV model over the joint hidden variable.

    Bob's responses become Born probabilities of the product hidden state.
    """
    bob_settings = _bob_settings(bob_povm)
    joint = list(itertools.product(*(range(len(src.weights)) for src in m.sources)))
    weights = np.array([math.prod(src.weights[k] for src, k in zip(m.sources, ks)) for ks in joint])
    alice = tuple(np.stack([src.responses[ks[mu]] for ks in joint]) for mu, src in enumerate(m.sources))
    bob = []
    for effs in bob_settings:
        rows = []
        for ks in joint:
            rho = kron_all(src.states[k] for src, k in zip(m.sources, ks))
            rows.append(np.clip(np.einsum("bc,mcb->m", rho, effs).real, 0.0, None))
        rows = np.array(rows)
        bob.append(rows / rows.sum(axis=1, keepdims=True))
    return FiniteLhvModel(weights, alice, tuple(bob))


# -- random models --------------------------------------------------------------

def _pure_qubit_states(rng: np.random.Generator, count: int) -> np.ndarray:
    vs = [haar_vector(2, rng) for _ in range(count)]
    return np.stack([np.outer(v, v.conj()) for v in vs])


def _responses(rng: np.random.Generator, hidden: int, settings: int, outcomes: int,
               deterministic: bool) -> np.ndarray:
    if deterministic:
        choice = rng.integers(outcomes, size=(hidden, settings))
        return np.eye(outcomes)[choice]
    return rng.dirichlet(np.ones(outcomes), size=(hidden, settings))


def _aligned_qubit_states(rng: np.random.Generator, count: int, directions) -> np.ndarray:
    dirs = np.asarray(directions, dtype=float).reshape(-1, 3)
    picks = dirs[rng.integers(len(dirs), size=count)] * rng.choice((-1.0, 1.0), size=(count, 1))
    return np.stack([(np.eye(2) + bloch_operator(d)) / 2 for d in picks])


def random_lhs_source(rng: np.random.Generator, settings: int, outcomes: int = 2,
                      hidden: int = DEFAULT_HIDDEN, deterministic: bool = False,
                      directions=None) -> LhsSource:
    """Dirichlet weights and responses with random pure hidden states.

    Hidden states are Haar random, or Bloch vectors drawn from
    ``+-directions`` when given (this pushes models towards the bounds).
    """
    states = (_pure_qubit_states(rng, hidden) if directions is None
              else _aligned_qubit_states(rng, hidden, directions))
    return LhsSource(rng.dirichlet(np.ones(hidden)),
                     _responses(rng, hidden, settings, outcomes, deterministic), states)


def random_lhs_model(rng: np.random.Generator, n: int, settings: int = 2, outcomes: int = 2,
                     hidden: int = DEFAULT_HIDDEN, deterministic: bool = False,
                     directions=None) -> FiniteLhsModel:
    return FiniteLhsModel(tuple(random_lhs_source(rng, settings, outcomes, hidden, deterministic, directions)
                                for _ in range(n)))


def random_lhv_model(rng: np.random.Generator, n: int, bob_outcomes: Sequence[int], settings: int = 2,
                     hidden: int = DEFAULT_HIDDEN, deterministic: bool = False) -> FiniteLhvModel:
    alice = tuple(_responses(rng, hidden, settings, 2, deterministic) for _ in range(n))
    bob = tuple(_responses(rng, hidden, 1, m, deterministic)[:, 0, :] for m in bob_outcomes)
    return FiniteLhvModel(rng.dirichlet(np.ones(hidden)), alice, bob)


# -- Bell bound by enumeration ------------------------------------------------------

@dataclass(frozen=True)
class BellFunctional:
    """``sum_gamma <A_gamma x B_gamma>`` with ``A_gamma = (x)_mu (A_1 + (-1)^gamma_mu A_2)``."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be at least 1")

    @property
    def gammas(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=self.n))

    def alice_factors(self, assignment: np.ndarray) -> np.ndarray:
        """Products ``prod_mu (A_1 + (-1)^gamma A_2)`` for every gamma.

        ``assignment`` has shape ``(..., n, 2)`` with entries +-1; the result
        has shape ``(..., 2^n)`` of exact integers.
        """
        plus = assignment[..., 0] + assignment[..., 1]
        minus = assignment[..., 0] - assignment[..., 1]
        out = []
        for g in self.gammas:
            factors = np.where(np.array(g, dtype=bool), minus, plus)
            out.append(np.prod(factors, axis=-1))
        return np.stack(out, axis=-1)


MAX_ENUM_N = 4


def _alice_assignments(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1, -1), repeat=2 * n)), dtype=np.int64).reshape(-1, n, 2)


def lhv_bell_bound(f: BellFunctional) -> int:
    """Exact deterministic-strategy maximum of the Bell functional.

    Each gamma term is maximized independently by Bob choosing
    ``B_gamma = sign`` of its coefficient.
    """
    if f.n > MAX_ENUM_N:
        raise ResourceError(f"enumeration supports n <= {MAX_ENUM_N}, got {f.n}")
    coeffs = f.alice_factors(_alice_assignments(f.n))
    return int(np.abs(coeffs).sum(axis=1).max())


def lhv_bell_bound_full(f: BellFunctional) -> int:
    """Same maximum by enumerating Bob's sign assignments too (n <= 3)."""
    if f.n > 3:
        raise ResourceError("full enumeration supports n <= 3")
    coeffs = f.alice_factors(_alice_assignments(f.n))
    bob = np.array(list(itertools.product((1, -1), repeat=2**f.n)), dtype=np.int64)
    return int((coeffs @ bob.T).max())


# -- randomized soundness oracles ----------------------------------------------------

def random_orthonormal_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q[:, 0], q[:, 1]


def lhs_nonlinear_value(model: FiniteLhsModel, settings, simplified: bool = False) -> float:
    """Nonlinear criterion evaluated on the statistics an LHS model predicts.

    Only Bob's axes in ``settings`` matter; Alice's answers come from the model.
    """
    from .criteria import nonlinear_criterion

    crit = nonlinear_criterion(settings, simplified)
    return crit.value(lhs_correlations(model, crit.bob_povms))


def _default_alice(n: int):
    from .measurements import povm_from_bloch

    pair = (povm_from_bloch(0, (1, 0, 0)), povm_from_bloch(0, (0, 0, 1)))
    return (pair,) * n


def lhs_nonlinear_oracle(trials: int, rng_seed: int, n: int = 1, simplified: bool = False,
                         deterministic: bool = False, hidden: int = DEFAULT_HIDDEN) -> float:
    """Largest nonlinear-criterion value over randomly sampled LHS models.

    Trial ``i`` draws from its own stream seeded by ``(rng_seed, i)``; Bob's
    axes are a fresh random orthonormal pair per source.
    """
    from .criteria import NonlinearSettings

    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    best = -math.inf
    for i in range(trials):
        rng = np.random.default_rng([rng_seed, i])
        model = random_lhs_model(rng, n, settings=2, hidden=hidden, deterministic=deterministic)
        settings = NonlinearSettings(_default_alice(n), tuple(random_orthonormal_pair(rng) for _ in range(n)))
        best = max(best, lhs_nonlinear_value(model, settings, simplified))
    return best
