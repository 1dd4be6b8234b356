import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles as O
from conftest import random_cd
from r2opuc import fixtures, spectral
from r2opuc.errors import DimensionTooSmall, MomentOutOfRange
from r2opuc.recurrence import eval_R

EX1 = fixtures.example_sequences(fixtures.ExampleSpec.ex1(), 30)
EX3 = fixtures.example_sequences(fixtures.ExampleSpec.ex3(), 30)
EX4 = fixtures.example_sequences(fixtures.ExampleSpec.ex4(1.0, 1.0), 30)


def test_quadrature_ex1_uniform():
    q = spectral.quadrature(EX1, 4)
    np.testing.assert_allclose(q.lambda_hat, 0.25, atol=1e-14)
    expected = np.exp(1j * (2 * np.arange(1, 5) - 1) * np.pi / 4)
    got = sorted(q.zeta, key=lambda z: np.angle(z) % (2 * np.pi))
    np.testing.assert_allclose(got, expected, atol=1e-14)


def test_quadrature_ex3_frozen():
    # frozen from the multiprecision Wronskian oracle (tests/oracles.py)
    q = spectral.quadrature(EX3, 3)
    np.testing.assert_allclose(q.x, [1.0, 0.0, -1.0], atol=1e-15)
    np.testing.assert_allclose(q.zeta, [1j, -1.0, -1j], atol=1e-15)
    np.testing.assert_allclose(q.lam, [0.5, 0.5, 0.5], rtol=1e-14)
    np.testing.assert_allclose(q.lambda_hat, [0.25, 0.5, 0.25], rtol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_quadrature_vs_multiprecision(seed):
    cd = random_cd(seed, 9)
    ref = O.mp_weights(cd.c, list(cd.d), 9)
    q = spectral.quadrature(cd, 9)
    np.testing.assert_allclose(q.x, [float(r[0]) for r in ref], rtol=1e-11)
    np.testing.assert_allclose(q.lam, [float(r[1]) for r in ref], rtol=1e-9)
    np.testing.assert_allclose(q.lambda_hat, [float(r[2]) for r in ref], rtol=1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 25))
def test_quadrature_invariants(seed, n):
    cd = random_cd(seed, n)
    q = spectral.quadrature(cd, n)
    assert np.all(np.abs(np.abs(q.zeta) - 1) < 1e-12)
    assert np.all(np.abs(q.zeta - 1) > 0)
    assert np.all(q.lam > 0) and np.all(q.lambda_hat > 0)
    assert abs(np.sum(q.lambda_hat) - 1) < 1e-10
    rel = 0.25 * (1 + cd.c[0] ** 2) * np.abs(q.zeta - 1) ** 2 * q.lam
    np.testing.assert_allclose(q.lambda_hat, rel, rtol=1e-10)


def test_quadrature_needs_n_two():
    with pytest.raises(DimensionTooSmall):
        spectral.quadrature(EX1, 1)


def test_moments_ex1_lebesgue():
    q = spectral.quadrature(EX1, 8)
    assert spectral.discrete_moment(q, 0) == pytest.approx(1.0)
    for k in range(1, 8):
        assert abs(spectral.discrete_moment(q, k)) < 1e-13
        assert abs(spectral.discrete_moment(q, -k)) < 1e-13


def test_moment_out_of_range_warns():
    q = spectral.quadrature(EX1, 4)
    with pytest.warns(MomentOutOfRange):
        spectral.discrete_moment(q, 4)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 10), st.integers(1, 8))
def test_moments_stable_in_n(seed, n, m):
    cd = random_cd(seed, n + m)
    a = spectral.quadrature(cd, n)
    b = spectral.quadrature(cd, n + m)
    for k in range(-(n - 1), n):
        mk = spectral.discrete_moment(a, k)
        assert abs(mk - spectral.discrete_moment(b, k)) < 1e-10
        assert abs(mk - np.conj(spectral.discrete_moment(a, -k))) < 1e-14


def test_moments_ex3_density():
    # ∫ ζ^k sin^2(θ/2)/π dθ: 1 for k = 0, -1/2 for |k| = 1, 0 beyond
    q = spectral.quadrature(EX3, 6)
    expected = {0: 1.0, 1: -0.5, -1: -0.5}
    for k in range(-5, 6):
        assert spectral.discrete_moment(q, k) == pytest.approx(expected.get(k, 0.0), abs=1e-13)


def test_discrete_orthogonality_ex1_diagonal():
    rep = spectral.verify_discrete_orthogonality(EX1, 5)
    k = np.arange(1, 6)
    diag = 4.0 ** k * 0.5 * 0.25 ** (k - 1) / EX1.ell[1:6]
    np.testing.assert_allclose(np.diag(rep.expected).real, diag, rtol=1e-14)
    assert rep.passed(1e-12)


@pytest.mark.parametrize("cd,n", [(EX3, 6), (EX4, 8), (random_cd(0, 8), 8), (random_cd(1, 8), 8)])
def test_discrete_orthogonality(cd, n):
    for method in ("twisted", "recurrence"):
        rep = spectral.verify_discrete_orthogonality(cd, n, method=method)
        assert rep.passed(1e-9)
        assert rep.max_offdiag <= 1e-9


def test_phi_orthogonality_ex1():
    rep = spectral.verify_phi_orthogonality(EX1, 7)
    np.testing.assert_allclose(np.diag(rep.expected).real, 1.0, rtol=1e-14)
    assert rep.passed(1e-12)


@pytest.mark.parametrize("method", ["twisted", "pointwise", "deflation"])
def test_phi_orthogonality_ex4(method):
    rep = spectral.verify_phi_orthogonality(EX4, 5, method=method)
    assert rep.passed(1e-10)
    assert rep.max_offdiag <= 1e-10


def test_phi_norms_match_verblunsky_products():
    # ‖Φ_k‖^2 = Π_{j<k} (1 - |α_j|^2) under the probability measure
    from r2opuc import opuc

    cd = random_cd(3, 12)
    alpha = opuc.verblunsky_from_cd(cd, 11).alpha
    norms = np.concatenate([[1.0], np.cumprod(1 - np.abs(alpha) ** 2)])
    np.testing.assert_allclose(spectral.phi_norms(cd, 12), norms[:12], rtol=1e-10)


@pytest.mark.parametrize("cd,n", [(random_cd(2, 6), 6), (EX3, 5), (random_cd(5, 20), 20)])
def test_u_hat_orthonormality(cd, n):
    rep = spectral.verify_u_hat_orthonormality(cd, n)
    assert rep.passed(1e-10)
    assert rep.gram[0, 0] == pytest.approx(1.0, abs=1e-10)


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        spectral.verify_discrete_orthogonality(EX1, 4, method="other")


@pytest.mark.parametrize("seed", range(3))
def test_node_values_vs_multiprecision(seed):
    cd = random_cd(seed, 14)
    q = spectral.quadrature(cd, 14)
    R = spectral.node_values(cd, 14, q.x)
    d = list(cd.d)
    for r, x in enumerate(q.x[:5]):
        for k in (0, 3, 9, 13):
            ref = complex(2 ** k * O.mp_P(cd.c, d, k, x) / (x - 1j) ** k)
            assert R[k, r] == pytest.approx(ref, rel=1e-9)
    assert np.all(R[14] == 0)


def test_twisted_route_survives_large_n():
    for seed in range(10):
        cd = random_cd(1000 + seed, 24)
        assert spectral.verify_discrete_orthogonality(cd, 24).passed(1e-9)
        assert spectral.verify_phi_orthogonality(cd, 24).passed(1e-9)
        assert spectral.verify_u_hat_orthonormality(cd, 24).passed(1e-9)


def test_combination_coefficients():
    b = spectral.combination_coefficients(EX1.ell, 8)
    np.testing.assert_allclose(b, -0.5)
    cd = random_cd(4, 10)
    assert spectral.combination_coefficients(cd.ell, 10)[0] == -0.5


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 12))
def test_combination_reconstruction(seed, n):
    cd = random_cd(seed, n)
    rng = np.random.default_rng(seed)
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    z = z / np.abs(z) * rng.uniform(0.3, 1.2, 4)
    assert spectral.combination_residual(cd, n, z) <= 1e-10


@pytest.mark.parametrize("cd", [EX1, EX3])
def test_combination_reconstruction_absolute(cd):
    z = np.exp(1j * np.linspace(0.1, 6.0, 7))
    for n in (2, 6, 15):
        assert spectral.combination_residual(cd, n, z, relative=False) <= 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_wall_partial_sum(seed):
    cd = random_cd(seed, 12)
    for n in range(2, 13):
        q = spectral.quadrature(cd, n)
        assert np.sum(q.lam) == pytest.approx(spectral.wall_partial_sum(cd, n), rel=1e-9)


def test_wall_partial_sum_ex3_closed_form():
    # Σ_r λ_r = 1 + Σ_{k=2..n} 2/(k(k+1)) = 2 - 2/(n+1)
    for n in range(2, 13):
        q = spectral.quadrature(EX3, n)
        assert np.sum(q.lam) == pytest.approx(2 - 2 / (n + 1), rel=1e-12)
