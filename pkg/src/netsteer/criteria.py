"""Steering criteria for the star network.

Three criteria are provided, each in two forms:

* operator form (``eval_nonlinear``, ``eval_nonlinear_simplified``,
  ``eval_lsi``, ``eval_bell``): expectations of explicit operators on a
  quantum state;
* table form (:class:`TableCriterion`): the same quantity written as a
  combination of correlators of a :class:`CorrelationTable`, so it can be
  evaluated on classical-model predictions or on sampled frequencies.

Alice setting labels are 0-based (``x=0`` is the first measurement).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .assemblages import CorrelationTable
from .errors import ConstraintError, PreconditionError
from .linalg import PSD_TOL, as_matrix, expectation, herm_eig, is_hermitian, kron, kron_all
from .measurements import (
    I2,
    QubitBinaryPOVM,
    bloch_operator,
    effects_from_observable,
    observable,
    pauli,
    povm_from_observable,
)
from .states import (
    BELL_KINDS,
    DensityMatrix,
    StarNetworkState,
    bell_projectors,
    reduced_state,
)

VIOLATION_TOL = 1e-9
CONSTRAINT_TOL = 1e-6
AXIS_TOL = 1e-10


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    value: float
    bound: float
    bound_provenance: str
    terms: Mapping[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    scenario: str = ""

    @property
    def violated(self) -> bool:
        return self.value > self.bound + VIOLATION_TOL

    @property
    def ratio(self) -> float:
        return self.value / self.bound if self.bound else math.inf

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "value": self.value,
            "bound": self.bound,
            "violated": self.violated,
            "ratio": self.ratio,
            "bound_provenance": self.bound_provenance,
            "terms": dict(self.terms),
            "notes": list(self.notes),
            "scenario": self.scenario,
        }


def _bits(n: int):
    return itertools.product((0, 1), repeat=n)


def _bit_label(bits) -> str:
    return "".join(str(b) for b in bits)


def _sign(gamma: int, x: int) -> int:
    # coefficient of A_x in (A_0 + (-1)^gamma A_1)
    return 1 if x == 0 else (-1) ** gamma


def _check_observable(op, dim: int | None = None, what: str = "observable") -> np.ndarray:
    op = as_matrix(op)
    if dim is not None and op.shape != (dim, dim):
        raise PreconditionError(f"{what} must be {dim}x{dim}, got {op.shape}")
    if not is_hermitian(op):
        raise PreconditionError(f"{what} is not Hermitian")
    evals = herm_eig(op)[0]
    if evals[0] < -1 - PSD_TOL or evals[-1] > 1 + PSD_TOL:
        raise PreconditionError(f"{what} spectrum [{evals[0]:.6g}, {evals[-1]:.6g}] leaves [-1, 1]")
    return op


# -- table form -------------------------------------------------------------

@dataclass(frozen=True)
class Correlator:
    """``<(x)_mu A_{x_mu} x B>`` read off setting tuple ``(xs, y)``.

    Alice outcomes carry values +1/-1; Bob outcome ``b`` carries ``bob_values[b]``.
    """

    xs: tuple[int, ...]
    y: int
    bob_values: tuple[float, ...] = (1.0, -1.0)


Term = tuple[tuple[float, Correlator], ...]


@dataclass(frozen=True, eq=False)
class TableCriterion:
    """A criterion expressed through correlators of a correlation table.

    ``terms`` are linear combinations of correlators; ``combine`` maps the
    vector of term values to the criterion value. ``alice_povms`` and
    ``bob_povms`` are the measurements whose statistics the table must hold.
    """

    name: str
    n: int
    terms: tuple[Term, ...]
    labels: tuple[str, ...]
    combine: Callable[[np.ndarray], float]
    bound: float
    bound_provenance: str
    linear: bool
    alice_povms: tuple[tuple, ...]
    bob_povms: tuple[np.ndarray, ...]

    def required_keys(self) -> set:
        return {(c.xs, c.y) for term in self.terms for _, c in term}

    def term_weights(self) -> list[dict]:
        """Per term, a map from setting tuple to the weight array over outcomes."""
        out = []
        for term in self.terms:
            weights: dict = {}
            for coef, c in term:
                w = np.asarray(c.bob_values, dtype=float)
                for _ in range(self.n):
                    w = np.multiply.outer(np.array([1.0, -1.0]), w)
                key = (c.xs, c.y)
                weights[key] = weights.get(key, 0.0) + coef * w
            out.append(weights)
        return out

    def term_values(self, table: CorrelationTable) -> np.ndarray:
        missing = self.required_keys() - set(table.probs)
        if missing:
            raise PreconditionError(f"table lacks setting tuples {sorted(missing)}")
        return np.array([
            sum(coef * table.correlator(c.xs, c.y, c.bob_values) for coef, c in term)
            for term in self.terms
        ])

    def value(self, table: CorrelationTable) -> float:
        return float(self.combine(self.term_values(table)))

    def report(self, table: CorrelationTable, scenario: str = "") -> CriterionReport:
        terms = self.term_values(table)
        return CriterionReport(self.name, float(self.combine(terms)), self.bound, self.bound_provenance,
                               dict(zip(self.labels, map(float, terms))), scenario=scenario)


# -- nonlinear criterion ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class NonlinearSettings:
    """Two Alice POVMs and two orthonormal Bob axes per source."""

    alice: tuple[tuple[QubitBinaryPOVM, QubitBinaryPOVM], ...]
    bob_axes: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        alice = tuple(tuple(pair) for pair in self.alice)
        axes = tuple((np.asarray(a, dtype=float), np.asarray(b, dtype=float)) for a, b in self.bob_axes)
        if len(alice) != len(axes) or not alice:
            raise PreconditionError("need one Alice pair and one Bob axis pair per source")
        for mu, (pair, (n1, n2)) in enumerate(zip(alice, axes)):
            if len(pair) != 2 or not all(isinstance(p, QubitBinaryPOVM) for p in pair):
                raise PreconditionError(f"source {mu}: Alice needs exactly two qubit POVMs")
            if abs(np.linalg.norm(n1) - 1) > AXIS_TOL or abs(np.linalg.norm(n2) - 1) > AXIS_TOL:
                raise ConstraintError(f"source {mu}: Bob axes must be unit vectors")
            if abs(float(n1 @ n2)) > AXIS_TOL:
                raise ConstraintError(f"source {mu}: Bob axes must be orthogonal")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob_axes", axes)

    @property
    def n(self) -> int:
        return len(self.alice)


def a_bar_operator(alphas: Sequence[int], settings: NonlinearSettings) -> np.ndarray:
    """``(x)_mu (A_1 + (-1)^alpha_mu A_2)/2`` with the 1/2 applied per source."""
    if len(alphas) != settings.n:
        raise PreconditionError(f"need {settings.n} bits, got {len(alphas)}")
    factors = []
    for alpha, (p1, p2) in zip(alphas, settings.alice):
        factors.append(0.5 * (observable(p1) + (-1) ** alpha * observable(p2)))
    return kron_all(factors)


def b_bar_operator(alphas: Sequence[int], settings: NonlinearSettings) -> np.ndarray:
    """``(x)_mu n_{alpha_mu}.sigma`` on Bob's wires."""
    if len(alphas) != settings.n:
        raise PreconditionError(f"need {settings.n} bits, got {len(alphas)}")
    return kron_all(bloch_operator(axes[alpha]) for alpha, axes in zip(alphas, settings.bob_axes))


def _nonlinear_combine(n: int) -> Callable[[np.ndarray], float]:
    def combine(t):
        t00, t01, t10, t11 = (float(v) for v in t)
        return (math.sqrt((t00 * t00) ** (1 / n) + (t01 * t01) ** (1 / n))
                + math.sqrt((t10 * t10) ** (1 / n) + (t11 * t11) ** (1 / n)))
    return combine


def _simplified_combine(n: int) -> Callable[[np.ndarray], float]:
    def combine(t):
        t00, _, _, t11 = (float(v) for v in t)
        return abs(t00) ** (1 / n) + abs(t11) ** (1 / n)
    return combine


_NL_LABELS = ("A0B0", "A0B1", "A1B0", "A1B1")


def _check_bob_constraint(s: StarNetworkState, settings: NonlinearSettings):
    for mu, (src, axes) in enumerate(zip(s.sources, settings.bob_axes)):
        rho_b = reduced_state(src, "bob").mat
        for y, axis in enumerate(axes):
            bias = expectation(bloch_operator(axis), rho_b)
            if abs(bias) > CONSTRAINT_TOL:
                raise ConstraintError(
                    f"source {mu}, Bob axis {y}: Tr(B rho_B) = {bias:.3e}; Bob's outcomes must be unbiased")


def _nonlinear_terms(s: StarNetworkState, settings: NonlinearSettings) -> np.ndarray:
    if s.n != settings.n:
        raise PreconditionError(f"settings are for n={settings.n}, state has n={s.n}")
    _check_bob_constraint(s, settings)
    w = s.bob_ordered.mat
    zero, one = (0,) * s.n, (1,) * s.n
    a = {0: a_bar_operator(zero, settings), 1: a_bar_operator(one, settings)}
    b = {0: b_bar_operator(zero, settings), 1: b_bar_operator(one, settings)}
    return np.array([expectation(kron(a[i], b[j]), w) for i in (0, 1) for j in (0, 1)])


def eval_nonlinear(s: StarNetworkState, settings: NonlinearSettings, scenario: str = "") -> CriterionReport:
    terms = _nonlinear_terms(s, settings)
    value = _nonlinear_combine(s.n)(terms)
    return CriterionReport("nonlinear", value, 1.0, "analytic",
                           dict(zip(_NL_LABELS, map(float, terms))), scenario=scenario)


def eval_nonlinear_simplified(s: StarNetworkState, settings: NonlinearSettings,
                              scenario: str = "") -> CriterionReport:
    terms = _nonlinear_terms(s, settings)
    value = _simplified_combine(s.n)(terms)
    notes = ()
    if abs(terms[1]) <= VIOLATION_TOL and abs(terms[2]) <= VIOLATION_TOL:
        notes = ("cross terms vanish: equivalent to the full nonlinear criterion",)
    return CriterionReport("nonlinear-simplified", value, 1.0, "analytic",
                           dict(zip(_NL_LABELS, map(float, terms))), notes, scenario)


def nonlinear_criterion(settings: NonlinearSettings, simplified: bool = False) -> TableCriterion:
    n = settings.n
    terms = []
    for alpha in (0, 1):
        for beta in (0, 1):
            term = []
            for xs in itertools.product((0, 1), repeat=n):
                coef = math.prod(0.5 * _sign(alpha, x) for x in xs)
                term.append((coef, Correlator(xs, beta)))
            terms.append(tuple(term))
    bob = tuple(effects_from_observable(b_bar_operator((beta,) * n, settings)) for beta in (0, 1))
    name = "nonlinear-simplified" if simplified else "nonlinear"
    combine = _simplified_combine(n) if simplified else _nonlinear_combine(n)
    return TableCriterion(name, n, tuple(terms), _NL_LABELS, combine, 1.0, "analytic", False,
                          tuple(settings.alice), bob)


# -- linear steering inequality -----------------------------------------------

def _pauli_pair(j: int) -> np.ndarray:
    return kron(pauli(j), pauli(j))


@dataclass(frozen=True, eq=False)
class LsiSpec:
    """Three Alice observables per source and three Bob operators on two qubits."""

    alice1: tuple[np.ndarray, np.ndarray, np.ndarray]
    alice2: tuple[np.ndarray, np.ndarray, np.ndarray]
    bob: tuple[np.ndarray, np.ndarray, np.ndarray] = None

    def __post_init__(self):
        bob = self.bob if self.bob is not None else tuple(_pauli_pair(j) for j in (1, 2, 3))
        a1 = tuple(_check_observable(a, 2, "Alice observable") for a in self.alice1)
        a2 = tuple(_check_observable(a, 2, "Alice observable") for a in self.alice2)
        bob = tuple(_check_observable(b, 4, "Bob operator") for b in bob)
        if not len(a1) == len(a2) == len(bob) == 3:
            raise PreconditionError("an LSI needs three settings per party")
        object.__setattr__(self, "alice1", a1)
        object.__setattr__(self, "alice2", a2)
        object.__setattr__(self, "bob", bob)

    @classmethod
    def pauli(cls) -> "LsiSpec":
        paulis = tuple(pauli(j) for j in (1, 2, 3))
        return cls(paulis, paulis)

    def is_canonical_bob(self) -> bool:
        return all(np.max(np.abs(b - _pauli_pair(j))) <= 1e-12 for j, b in zip((1, 2, 3), self.bob))


def build_lsi_H(spec: LsiSpec) -> np.ndarray:
    """``H = sum_j A_j^(1) x A_j^(2) x B_j`` in wire order A1 A2 B1 B2."""
    return sum(kron_all((a1, a2, b)) for a1, a2, b in zip(spec.alice1, spec.alice2, spec.bob))


@dataclass(frozen=True)
class BetaResult:
    value: float
    converged: bool
    coefficients: tuple[float, float, float]
    singular_value_check: float | None = None


def _product_state_form(op: np.ndarray) -> np.ndarray:
    """``C[k, l] = Tr(op sigma_k x sigma_l)/4`` with sigma_0 = I, so that
    ``<psi x phi|op|psi x phi> = (1, s) C (1, t)``."""
    basis = [I2] + [pauli(j) for j in (1, 2, 3)]
    return np.array([[np.trace(op @ kron(a, b)).real / 4 for b in basis] for a in basis])


def _unit_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _maximize_product(c: np.ndarray, rng: np.random.Generator, starts: int, iterations: int,
                      step: float, tol: float = 1e-12) -> tuple[float, bool]:
    """Multi-start projected gradient ascent of ``(1,s) C (1,t)`` over unit ``s, t``."""
    c00, cs, ct, m = c[0, 0], c[1:, 0], c[0, 1:], c[1:, 1:]

    def f(s, t):
        return c00 + s @ cs + t @ ct + np.einsum("ki,ij,kj->k", s, m, t)

    s = _unit_rows(rng.normal(size=(starts, 3)))
    t = _unit_rows(rng.normal(size=(starts, 3)))
    eta = np.full(starts, step)
    val = f(s, t)
    converged = False
    for _ in range(iterations):
        gs = cs + t @ m.T
        gt = ct + s @ m
        # tangential components; zero at a stationary point on the spheres
        gs_tan = gs - np.sum(gs * s, axis=1, keepdims=True) * s
        gt_tan = gt - np.sum(gt * t, axis=1, keepdims=True) * t
        gnorm = np.sqrt(np.sum(gs_tan**2, axis=1) + np.sum(gt_tan**2, axis=1))
        if gnorm[np.argmax(val)] < tol:
            converged = True
            break
        while True:
            s_new = _unit_rows(s + eta[:, None] * gs)
            t_new = _unit_rows(t + eta[:, None] * gt)
            new = f(s_new, t_new)
            worse = new < val - 1e-15
            if not worse.any() or eta.max() < 1e-12:
                break
            eta = np.where(worse, eta / 2, eta)
        accept = new >= val - 1e-15
        s = np.where(accept[:, None], s_new, s)
        t = np.where(accept[:, None], t_new, t)
        val = np.where(accept, new, val)
        eta = np.minimum(eta * 1.5, step)
    return float(val.max()), converged


def lsi_beta(spec: LsiSpec, responses: tuple | None = None, starts: int = 64, iterations: int = 500,
             step: float = 0.1, seed: int = 0) -> BetaResult:
    """Largest product-state value of ``sum_j d1_j d2_j B_j``.

    With ``responses=(d1, d2)`` the response coefficients are fixed;
    otherwise the objective is linear in each product ``d1_j d2_j`` so only
    the sign vertices in {-1, +1}^3 are searched.
    """
    rng = np.random.default_rng(seed)
    if responses is not None:
        d1, d2 = (np.asarray(d, dtype=float) for d in responses)
        if np.any(np.abs(d1) > 1) or np.any(np.abs(d2) > 1):
            raise PreconditionError("response coefficients must lie in [-1, 1]")
        candidates = [tuple(d1 * d2)]
    else:
        candidates = list(itertools.product((1.0, -1.0), repeat=3))
    forms = [_product_state_form(b) for b in spec.bob]
    # without local (affine) parts each subproblem is a largest-singular-value problem
    bilinear = all(np.allclose(f[0, :], 0, atol=1e-14) and np.allclose(f[:, 0], 0, atol=1e-14) for f in forms)
    best, best_e, all_converged, svd_check = -math.inf, None, True, -math.inf
    for e in candidates:
        c = sum(ej * fj for ej, fj in zip(e, forms))
        value, converged = _maximize_product(c, rng, starts, iterations, step)
        all_converged &= converged
        if bilinear:
            svd_check = max(svd_check, float(np.linalg.svd(c[1:, 1:], compute_uv=False)[0]))
        if value > best:
            best, best_e = value, e
    if not bilinear:
        svd_check = None
    return BetaResult(best, all_converged, tuple(float(v) for v in best_e), svd_check)


def eval_lsi(s: StarNetworkState, spec: LsiSpec | None = None, scenario: str = "",
             beta: float | None = None) -> CriterionReport:
    spec = spec or LsiSpec.pauli()
    if s.n != 2:
        raise PreconditionError(f"the linear steering inequality is defined for n=2, got n={s.n}")
    value = expectation(build_lsi_H(spec), s.bob_ordered.mat)
    if beta is not None:
        bound, provenance = float(beta), "user"
    elif spec.is_canonical_bob():
        bound, provenance = 1.0, "analytic"
    else:
        res = lsi_beta(spec)
        bound, provenance = res.value, "optimizer" if res.converged else "optimizer (not converged)"
    terms = {f"j={j}": expectation(kron_all((a1, a2, b)), s.bob_ordered.mat)
             for j, (a1, a2, b) in enumerate(zip(spec.alice1, spec.alice2, spec.bob), start=1)}
    return CriterionReport("lsi", value, bound, provenance, terms, scenario=scenario)


def sbm_coefficients(bob_op: np.ndarray) -> np.ndarray:
    """Diagonal of ``bob_op`` in the Bell basis ordered psi+, psi-, phi+, phi-."""
    proj = bell_projectors()
    return np.array([np.trace(bob_op @ proj[k]).real for k in BELL_KINDS])


def lsi_criterion(spec: LsiSpec | None = None, bob_measurement: str = "pauli",
                  beta: float | None = None) -> TableCriterion:
    """Table form of the LSI.

    ``bob_measurement="pauli"`` uses three two-outcome Bob settings
    ``(I +- B_j)/2``; ``"sbm"`` uses one four-outcome Bell measurement and
    reads each ``B_j`` off the outcome values (valid when the ``B_j`` are
    diagonal in the Bell basis).
    """
    spec = spec or LsiSpec.pauli()
    if beta is None:
        beta, provenance = (1.0, "analytic") if spec.is_canonical_bob() else (lsi_beta(spec).value, "optimizer")
    else:
        provenance = "user"
    alice = tuple(tuple(povm_from_observable(a) for a in side) for side in (spec.alice1, spec.alice2))
    if bob_measurement == "pauli":
        bob = tuple(effects_from_observable(b) for b in spec.bob)
        term = tuple((1.0, Correlator((j, j), j)) for j in range(3))
    elif bob_measurement == "sbm":
        proj = bell_projectors()
        if sbm_decomposition_residual(proj, spec.bob) > 1e-12:
            raise PreconditionError("Bob operators are not diagonal in the Bell basis")
        bob = (np.stack([proj[k] for k in BELL_KINDS]),)
        term = tuple((1.0, Correlator((j, j), 0, tuple(sbm_coefficients(b)))) for j, b in enumerate(spec.bob))
    else:
        raise PreconditionError(f"unknown Bob measurement {bob_measurement!r}")
    return TableCriterion("lsi", 2, (term,), ("H",), lambda t: float(t[0]), beta, provenance, True, alice, bob)


_SBM_SIGNS = {
    1: {"psi+": 1, "psi-": -1, "phi+": 1, "phi-": -1},
    2: {"psi+": -1, "psi-": 1, "phi+": 1, "phi-": -1},
    3: {"psi+": 1, "psi-": 1, "phi+": -1, "phi-": -1},
}


def sbm_decomposition_residual(projectors: Mapping[str, np.ndarray] | None = None,
                               bob_ops: Sequence[np.ndarray] | None = None) -> float:
    """Largest entrywise residual of ``B_j = sum +-`` Bell projectors for j = 1, 2, 3."""
    projectors = projectors if projectors is not None else bell_projectors()
    bob_ops = bob_ops if bob_ops is not None else [_pauli_pair(j) for j in (1, 2, 3)]
    residual = 0.0
    for j, b in zip((1, 2, 3), bob_ops):
        combo = sum(sign * np.asarray(projectors[k]) for k, sign in _SBM_SIGNS[j].items())
        residual = max(residual, float(np.max(np.abs(as_matrix(b) - combo))))
    return residual


def sbm_decomposition_check(projectors: Mapping[str, np.ndarray] | None = None, tol: float = 1e-12) -> bool:
    return sbm_decomposition_residual(projectors) <= tol


# -- Bell inequality ------------------------------------------------------------

def a_gamma_operator(gammas: Sequence[int], alice_observables: Sequence[Sequence]) -> np.ndarray:
    """``(x)_mu (A_1 + (-1)^gamma_mu A_2)``; no normalization factor."""
    if len(gammas) != len(alice_observables):
        raise PreconditionError(f"need {len(alice_observables)} bits, got {len(gammas)}")
    return kron_all(as_matrix(a1) + (-1) ** g * as_matrix(a2) for g, (a1, a2) in zip(gammas, alice_observables))


def _gamma_key(key) -> tuple[int, ...]:
    if isinstance(key, str):
        return tuple(int(c) for c in key)
    return tuple(int(c) for c in key)


def _normalize_bob(bob_observables: Mapping, n: int) -> dict[tuple[int, ...], np.ndarray]:
    bob = {_gamma_key(k): v for k, v in bob_observables.items()}
    expected = set(_bits(n))
    if set(bob) != expected:
        raise PreconditionError(f"need one Bob observable per bit string of length {n}")
    return {g: _check_observable(bob[g], what=f"Bob observable {_bit_label(g)}") for g in sorted(bob)}


def eval_bell(state, alice_observables: Sequence[Sequence], bob_observables: Mapping,
              verify_bound: bool = False, scenario: str = "") -> CriterionReport:
    """``sum_gamma <A_gamma x B_gamma>`` against the classical bound ``2^n``.

    ``state`` is a :class:`StarNetworkState` or a density matrix whose first
    ``n`` qubits belong to the Alices and whose remaining wires are Bob's.
    """
    n = len(alice_observables)
    alice = [tuple(_check_observable(a, 2, "Alice observable") for a in pair) for pair in alice_observables]
    if any(len(pair) != 2 for pair in alice):
        raise PreconditionError("each Alice needs exactly two observables")
    bob = _normalize_bob(bob_observables, n)
    if isinstance(state, StarNetworkState):
        if state.n != n:
            raise PreconditionError(f"state has n={state.n}, observables given for n={n}")
        mat = state.bob_ordered.mat
    else:
        mat = state.mat if isinstance(state, DensityMatrix) else as_matrix(state)
    terms = {}
    for g, b in bob.items():
        op = kron(a_gamma_operator(g, alice), b)
        if op.shape != mat.shape:
            raise PreconditionError(f"operator dimension {op.shape[0]} does not match state {mat.shape[0]}")
        terms[_bit_label(g)] = expectation(op, mat)
    bound, provenance = float(2**n), "analytic"
    if verify_bound:
        from .classical import BellFunctional, lhv_bell_bound

        oracle = lhv_bell_bound(BellFunctional(n))
        if oracle != 2**n:
            raise AssertionError(f"enumerated bound {oracle} disagrees with 2^n")
        provenance = "analytic; enumeration agrees"
    return CriterionReport("bell", float(sum(terms.values())), bound, provenance, terms, scenario=scenario)


def bell_criterion(alice_observables: Sequence[Sequence], bob_observables: Mapping) -> TableCriterion:
    n = len(alice_observables)
    bob = _normalize_bob(bob_observables, n)
    alice = tuple(tuple(povm_from_observable(a) for a in pair) for pair in alice_observables)
    terms, labels = [], []
    for y, g in enumerate(_bits(n)):
        term = tuple((float(math.prod(_sign(gm, x) for gm, x in zip(g, xs))), Correlator(xs, y))
                     for xs in itertools.product((0, 1), repeat=n))
        terms.append(term)
        labels.append(_bit_label(g))
    bob_povms = tuple(effects_from_observable(bob[g]) for g in _bits(n))
    return TableCriterion("bell", n, tuple(terms), tuple(labels), lambda t: float(np.sum(t)),
                          float(2**n), "analytic", True, alice, bob_povms)
