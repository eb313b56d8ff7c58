import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netsteer.errors import InvalidStateError, PreconditionError, ResourceError
from netsteer.linalg import expectation
from netsteer.measurements import bloch_operator
from netsteer.states import (
    DensityMatrix,
    bell_projectors,
    bell_state,
    bob_ordered_operator,
    ghz,
    isotropic,
    maximally_mixed,
    product,
    random_density_matrix,
    reduced_state,
    star_state,
    t_matrix,
)

from oracle import I2, PHI_PLUS, PSI_PLUS, SX, SY, SZ, isotropic as o_isotropic, kron, proj, reorder_two_sources


def test_bell_state_vectors():
    assert np.allclose(bell_state("psi+").mat, proj(PSI_PLUS))
    assert np.allclose(bell_state("phi+").mat, proj(PHI_PLUS))
    with pytest.raises(PreconditionError):
        bell_state("omega")


def test_bell_marginals_and_correlations():
    psi = bell_state("psi+")
    assert np.allclose(reduced_state(psi, "alice").mat, I2 / 2)
    assert np.allclose(reduced_state(psi, "bob").mat, I2 / 2)
    assert expectation(kron(SZ, SZ), psi.mat) == pytest.approx(1)


def test_bell_projectors_complete():
    ps = list(bell_projectors().values())
    assert np.allclose(sum(ps), np.eye(4))
    for i, a in enumerate(ps):
        for b in ps[i + 1:]:
            assert np.allclose(a @ b, 0)


def test_isotropic_endpoints():
    assert np.allclose(isotropic(0).mat, np.eye(4) / 4)
    assert np.allclose(isotropic(1).mat, bell_state("psi+").mat)
    with pytest.raises(PreconditionError):
        isotropic(1.2)


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.68, 1.0])
def test_isotropic_t_matrix(eta):
    expected = np.array([[kron(a, b).__matmul__(o_isotropic(eta)).trace().real for b in (SX, SY, SZ)]
                         for a in (SX, SY, SZ)])
    assert np.allclose(expected, eta * np.diag([1, -1, 1]))
    assert np.allclose(t_matrix(isotropic(eta)), expected, atol=1e-12)
    assert np.allclose(reduced_state(isotropic(eta), "bob").mat, I2 / 2)


def test_t_matrix_examples():
    assert np.allclose(t_matrix(maximally_mixed(2)), 0)
    assert np.allclose(t_matrix(bell_state("psi+")), np.diag([1, -1, 1]))
    assert np.allclose(t_matrix(bell_state("phi+")), np.diag([1, 1, -1]))
    with pytest.raises(PreconditionError):
        t_matrix(ghz())


def test_ghz_expectations():
    g = ghz()
    assert g.dims == (2, 2, 2)
    assert expectation(kron(SX, SX, SX), g.mat) == pytest.approx(1)
    assert expectation(kron(SX, SY, SY), g.mat) == pytest.approx(-1)
    from netsteer.linalg import partial_trace

    for keep in range(3):
        traced = [i for i in range(3) if i != keep]
        assert np.allclose(partial_trace(g.mat, g.layout, traced), I2 / 2)


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.eye(2))
    with pytest.raises(Exception):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))


def test_density_matrix_is_read_only():
    rho = maximally_mixed(1)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_reduced_state_of_product():
    rng = np.random.default_rng(5)
    rho = random_density_matrix(rng, 1, 2)
    tau = random_density_matrix(rng, 1, 2)
    assert np.allclose(reduced_state(product(rho, tau), "alice").mat, rho.mat)


def test_star_state_small_cases():
    s1 = star_state([bell_state("psi+")])
    assert np.allclose(s1.matrix, proj(PSI_PLUS))
    assert np.allclose(s1.bob_ordered.mat, s1.matrix)
    s2 = star_state([bell_state("psi+")] * 2)
    assert np.trace(s2.matrix).real == pytest.approx(1)
    assert np.linalg.matrix_rank(s2.matrix) == 1
    iso = star_state([isotropic(0.4)] * 2)
    assert np.allclose(iso.matrix, np.kron(o_isotropic(0.4), o_isotropic(0.4)))


def test_bob_ordered_matches_explicit_swap():
    rng = np.random.default_rng(7)
    s = star_state([random_density_matrix(rng), random_density_matrix(rng)])
    assert np.allclose(s.bob_ordered.mat, reorder_two_sources(s.matrix), atol=1e-12)
    w = star_state([bell_state("psi+")] * 2).bob_ordered
    assert expectation(kron(SX, SX, SX, SX), w.mat) == pytest.approx(1)


def test_bob_ordered_trace_invariance():
    rng = np.random.default_rng(8)
    s = star_state([random_density_matrix(rng) for _ in range(3)])
    ops = [rng.normal(size=(2, 2)) for _ in range(6)]
    ops = [o + o.T for o in ops]
    native = kron(*ops)  # A1 B1 A2 B2 A3 B3
    assert expectation(bob_ordered_operator(native, 3), s.bob_ordered.mat) == pytest.approx(
        expectation(native, s.matrix), abs=1e-12)


def test_star_state_limits():
    with pytest.raises(ResourceError):
        star_state([maximally_mixed(2)] * 6)
    with pytest.raises(InvalidStateError):
        star_state([ghz()])
    with pytest.raises(PreconditionError):
        star_state([])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_t_matrix_norm_bounded(seed):
    rho = random_density_matrix(np.random.default_rng(seed))
    assert np.linalg.svd(t_matrix(rho), compute_uv=False)[0] <= 1 + 1e-9


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_bilinear_form_matches_t_matrix(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng)
    r, n = rng.normal(size=3), rng.normal(size=3)
    op = kron(bloch_operator(r), bloch_operator(n))
    assert expectation(op, rho.mat) == pytest.approx(n @ t_matrix(rho).T @ r, abs=1e-10)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_bias_drops_out_when_bob_marginal_is_mixed(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng).mat
    # local filter F = (2 rho_B)^(-1/2) on Bob makes his marginal exactly I/2
    evals, evecs = np.linalg.eigh(reduced_state(rho, "bob").mat)
    f = evecs @ np.diag((2 * evals) ** -0.5) @ evecs.conj().T
    mixed = kron(I2, f) @ rho @ kron(I2, f).conj().T
    assert np.allclose(reduced_state(mixed, "bob").mat, I2 / 2)
    b = bloch_operator(rng.normal(size=3))
    k = rng.uniform(-0.5, 0.5)
    r = rng.normal(size=3)
    r *= 0.4 / np.linalg.norm(r)
    biased = kron(k * I2 + bloch_operator(r), b)
    unbiased = kron(bloch_operator(r), b)
    assert expectation(biased, mixed) == pytest.approx(expectation(unbiased, mixed), abs=1e-10)
