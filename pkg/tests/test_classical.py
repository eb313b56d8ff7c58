import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netsteer.assemblages import born_correlations, conditional_states
from netsteer.classical import (
    BellFunctional,
    FiniteLhsModel,
    FiniteLhvModel,
    LhsSource,
    lhs_assemblage,
    lhs_correlations,
    lhs_nonlinear_oracle,
    lhv_bell_bound,
    lhv_bell_bound_full,
    lhv_correlations,
    lhv_from_lhs,
    random_lhs_model,
    random_lhv_model,
)
from netsteer.errors import PreconditionError, ResourceError
from netsteer.measurements import povm_from_bloch
from netsteer.states import bell_state, star_state

from oracle import I2, SZ, ket, proj

Z = povm_from_bloch(0, (0, 0, 1))
Z_EFFECTS = np.stack([(I2 + SZ) / 2, (I2 - SZ) / 2])


def uniform_source(settings=2):
    return LhsSource(np.array([1.0]), np.full((1, settings, 2), 0.5), (I2 / 2)[None])


def z_model():
    """Two hidden values sending |0> or |1>, Alice answering deterministically."""
    responses = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])
    states = np.stack([proj(ket("0")), proj(ket("1"))])
    return LhsSource(np.array([0.5, 0.5]), responses, states)


def brute_force_bell(n):
    """Full enumeration of every Alice and Bob sign assignment, written out directly."""
    best = -np.inf
    for alice in itertools.product((1, -1), repeat=2 * n):
        pairs = [alice[2 * mu:2 * mu + 2] for mu in range(n)]
        coeffs = [np.prod([a1 + (-1) ** g * a2 for g, (a1, a2) in zip(gam, pairs)])
                  for gam in itertools.product((0, 1), repeat=n)]
        for bob in itertools.product((1, -1), repeat=2**n):
            best = max(best, sum(c * b for c, b in zip(coeffs, bob)))
    return best


def test_uniform_model_assemblage():
    a = lhs_assemblage(uniform_source())
    assert np.allclose(a.states, I2 / 4)


def test_z_model_reproduces_bell_assemblage():
    assert np.allclose(lhs_assemblage(z_model()).states, conditional_states(bell_state("psi+"), [Z]).states)


def test_lhs_assemblage_no_signalling():
    rng = np.random.default_rng(1)
    m = random_lhs_model(rng, 1, settings=3)
    assert lhs_assemblage(m).is_valid()


def test_lhs_correlations_examples():
    t = lhs_correlations(FiniteLhsModel((uniform_source(1),)), [Z_EFFECTS])
    assert np.allclose(t[((0,), 0)], 0.25)
    t = lhs_correlations(FiniteLhsModel((z_model(),)), [Z_EFFECTS])
    born = born_correlations(star_state([bell_state("psi+")]), [[Z]], [Z_EFFECTS])
    assert t.max_abs_difference(born) <= 1e-10


def test_lhs_alice_marginal_matches_responses():
    rng = np.random.default_rng(2)
    m = random_lhs_model(rng, 2, settings=2)
    t = lhs_correlations(m, [np.stack([np.kron(a, b) for a in Z_EFFECTS for b in Z_EFFECTS])])
    for xs in itertools.product(range(2), repeat=2):
        marg = [src.weights @ src.responses[:, x, :] for src, x in zip(m.sources, xs)]
        assert np.allclose(t.alice_marginal(xs, 0), np.outer(*marg))


def test_model_validation():
    with pytest.raises(PreconditionError):
        LhsSource(np.array([0.5, 0.6]), np.full((2, 1, 2), 0.5), np.stack([I2 / 2] * 2))
    with pytest.raises(PreconditionError):
        LhsSource(np.array([1.0]), np.array([[[0.7, 0.7]]]), (I2 / 2)[None])
    with pytest.raises(PreconditionError):
        LhsSource(np.array([1.0]), np.full((1, 1, 2), 0.5), np.diag([1.5, -0.5])[None])
    with pytest.raises(PreconditionError):
        FiniteLhvModel(np.array([1.0]), (np.full((1, 2, 2), 0.5),), (np.array([[0.2, 0.2]]),))


def test_lhv_correlations_deterministic_and_mixture():
    a = np.array([[[1.0, 0.0], [0.0, 1.0]]])
    b = np.array([[0.0, 1.0]])
    t = lhv_correlations(FiniteLhvModel(np.array([1.0]), (a,), (b,)))
    assert set(np.unique(t[((1,), 0)])) <= {0.0, 1.0}
    a2 = np.array([[[0.0, 1.0], [1.0, 0.0]]])
    m0 = FiniteLhvModel(np.array([1.0]), (a,), (b,))
    m1 = FiniteLhvModel(np.array([1.0]), (a2,), (b,))
    mix = FiniteLhvModel(np.array([0.3, 0.7]), (np.concatenate([a, a2]),), (np.concatenate([b, b]),))
    t0, t1, tm = (lhv_correlations(m) for m in (m0, m1, mix))
    for key in tm.keys():
        assert np.allclose(tm[key], 0.3 * t0[key] + 0.7 * t1[key])


def test_lhv_uniform_table():
    m = FiniteLhvModel(np.array([1.0]), (np.full((1, 2, 2), 0.5),) * 2, (np.full((1, 2), 0.5),))
    t = lhv_correlations(m)
    assert all(np.allclose(t[k], 0.125) for k in t.keys())


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_lhv_from_lhs_reproduces_table(seed, n):
    rng = np.random.default_rng(seed)
    m = random_lhs_model(rng, n, hidden=3)
    dim = 2**n
    u = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))[0]
    bob = [np.stack([np.outer(u[:, i], u[:, i].conj()) for i in range(dim)])]
    t_lhs = lhs_correlations(m, bob)
    t_lhv = lhv_correlations(lhv_from_lhs(m, bob))
    assert t_lhs.is_valid()
    assert t_lhs.max_abs_difference(t_lhv) <= 1e-12


def test_random_lhv_model_valid():
    m = random_lhv_model(np.random.default_rng(0), 2, (2, 4), deterministic=True)
    assert lhv_correlations(m).is_valid()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bell_bound_enumeration(n):
    assert lhv_bell_bound(BellFunctional(n)) == 2**n
    assert lhv_bell_bound_full(BellFunctional(n)) == 2**n


@pytest.mark.parametrize("n", [1, 2])
def test_bell_bound_against_written_out_enumeration(n):
    assert brute_force_bell(n) == lhv_bell_bound(BellFunctional(n))


def test_bell_bound_limits():
    assert lhv_bell_bound(BellFunctional(4)) == 16
    with pytest.raises(ResourceError):
        lhv_bell_bound(BellFunctional(5))
    with pytest.raises(PreconditionError):
        BellFunctional(0)


def test_nonlinear_oracle_uniform_model_is_zero():
    from netsteer.classical import _default_alice, lhs_nonlinear_value
    from netsteer.criteria import NonlinearSettings

    settings = NonlinearSettings(_default_alice(1), (((1, 0, 0), (0, 0, 1)),))
    assert lhs_nonlinear_value(FiniteLhsModel((uniform_source(),)), settings) == 0


@pytest.mark.parametrize("simplified", [False, True])
def test_nonlinear_oracle_bounded(simplified):
    assert lhs_nonlinear_oracle(1000, 11, n=1, simplified=simplified, deterministic=True) <= 1 + 1e-9


def test_nonlinear_oracle_needs_trials():
    with pytest.raises(PreconditionError):
        lhs_nonlinear_oracle(0, 1)
