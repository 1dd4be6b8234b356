import numpy as np
import pytest

from r2opuc import chain, fixtures
from r2opuc.chain import ChainSequence, Classification, classify, maximal_params, minimal_params
from r2opuc.errors import DepthInsufficient, NotAChainSequence


def ex1_chain():
    return ChainSequence(term=lambda n: np.where(n == 1, 0.5, 0.25))


def test_minimal_ex1():
    ell = minimal_params([0.5] + [0.25] * 9, 11).ell
    assert ell[0] == 0.0
    np.testing.assert_allclose(ell[1:], 0.5, atol=1e-15)


def test_minimal_ex3_closed_form():
    ell = minimal_params([0.25] * 40, 41).ell
    n = np.arange(1, 41)
    np.testing.assert_allclose(ell[1:], n / (2 * (n + 1)), rtol=1e-13)


def test_minimal_rejects_non_chain():
    with pytest.raises(NotAChainSequence):
        minimal_params([0.5, 0.9], 3)
    with pytest.raises(NotAChainSequence):
        minimal_params([0.3, -0.1], 3)


def test_minimal_from_unbounded_rule():
    a = minimal_params(ex1_chain(), 8).ell
    b = minimal_params([0.5] + [0.25] * 6, 8).ell
    np.testing.assert_array_equal(a, b)


def test_finite_chain_too_short():
    with pytest.raises(DepthInsufficient):
        ChainSequence(values=[0.25, 0.25]).values(3)


def test_maximal_ex3():
    M = maximal_params(ChainSequence(term=lambda n: np.full(n.shape, 0.25)), 4)
    np.testing.assert_allclose(M, 0.5, atol=1e-10)


@pytest.mark.parametrize("lam", [0.0, 1.0, 2.0])
def test_maximal_ex4_closed_form(lam):
    ex = fixtures.ExampleSpec.ex4(lam, 0.7)
    M = maximal_params(fixtures.chain_of(ex), 12)
    n = np.arange(0, 12)
    # M_{n+1} for n = 0..11
    expected = 0.5 * (2 * lam + n + 1) / (lam + n + 1)
    np.testing.assert_allclose(M, expected, atol=1e-10)


def test_maximal_equals_minimal_single_parameter():
    ell = minimal_params(ex1_chain(), 10).ell
    M = maximal_params(ex1_chain(), 10, depth=100_000)
    np.testing.assert_allclose(M, ell, atol=1e-10)


def test_plain_backward_recursion_converges_algebraically():
    # without extrapolation the error decays like 1/depth in the single case
    ell = minimal_params(ex1_chain(), 10).ell
    M = maximal_params(ex1_chain(), 10, depth=100_000, extrapolate=False, tol=1.0)
    err = np.max(np.abs(M - ell))
    assert 1e-6 < err < 1e-4


def test_maximal_refuses_unconverged_without_extrapolation():
    with pytest.raises(DepthInsufficient):
        maximal_params(ex1_chain(), 10, depth=1000, extrapolate=False)


def test_maximal_parameter_identity():
    ex = fixtures.ExampleSpec.ex4(1.0, 1.0)
    d = fixtures.chain_of(ex).values(20)
    M = maximal_params(fixtures.chain_of(ex), 20)
    np.testing.assert_allclose((1 - M[:-1]) * M[1:], d[:19], rtol=1e-12)


def test_classify_ex3_multiple():
    rep = classify([0.25] * 5000, 4096)
    assert rep.classification is Classification.MULTIPLE
    n = np.arange(1, 4097)
    # t_n = Π j/(j+2) = 2/((n+1)(n+2))
    np.testing.assert_allclose(rep.terms, 2.0 / ((n + 1) * (n + 2)), rtol=1e-10)
    assert abs(rep.partial_sum - (1.0 - 2.0 / 4098)) < 1e-10


def test_classify_ex1_single():
    assert classify(ex1_chain(), 4096).classification is Classification.SINGLE


def test_classify_ex4_negative_lambda_single():
    ex = fixtures.ExampleSpec.ex4(-0.75, 0.3)
    assert classify(fixtures.chain_of(ex), 4096).classification is Classification.SINGLE


def test_classify_ex4_positive_lambda_multiple():
    ex = fixtures.ExampleSpec.ex4(1.0, 0.3)
    assert classify(fixtures.chain_of(ex), 4096).classification is Classification.MULTIPLE


def test_wall_terms_match_classify():
    d = [0.25] * 100
    np.testing.assert_allclose(chain.wall_terms(d, 50), classify(d, 50).terms)
