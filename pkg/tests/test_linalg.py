import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asp.errors import (
    DenominatorNearZero,
    DimensionMismatch,
    NegativeEigenvalue,
    NonFinite,
    NotSymmetric,
    RankDeficient,
)
from asp.linalg import (
    LinearSystem,
    numerical_rank,
    pinv_psd,
    sherman_morrison_update,
    solve_normal_equations,
    symmetric_eigendecompose,
    underdetermined_apply,
)


def random_spd(rng, n, floor=0.5):
    B = rng.standard_normal((n, n))
    return B @ B.T + floor * np.eye(n)


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


seeds = st.integers(0, 2**32 - 1)


# -- sherman_morrison_update ------------------------------------------------

def test_sm_zero_update_is_identity():
    np.testing.assert_array_equal(sherman_morrison_update(np.eye(2), [0.0, 0.0]), np.eye(2))


def test_sm_unit_vector():
    out = sherman_morrison_update(np.eye(2), [1.0, 0.0])
    np.testing.assert_allclose(out, [[0.5, 0.0], [0.0, 1.0]], atol=1e-15)


def test_sm_against_direct_inverse():
    rng = np.random.default_rng(8)
    M = random_spd(rng, 8)
    u = rng.standard_normal(8)
    P = np.linalg.inv(M)
    P = 0.5 * (P + P.T)
    out = sherman_morrison_update(P, u)
    assert np.max(np.abs(out - np.linalg.inv(M + np.outer(u, u)))) < 1e-8
    np.testing.assert_array_equal(out, out.T)


def test_sm_degenerate_denominator():
    # M = -I: 1 + u'M^{-1}u = 1 - 1 = 0
    with pytest.raises(DenominatorNearZero):
        sherman_morrison_update(-np.eye(2), [1.0, 0.0])


def test_sm_rejects_asymmetric_and_bad_shapes():
    with pytest.raises(NotSymmetric):
        sherman_morrison_update([[1.0, 0.1], [0.0, 1.0]], [1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        sherman_morrison_update(np.eye(3), [1.0, 0.0])
    with pytest.raises(NonFinite):
        sherman_morrison_update(np.eye(2), [np.nan, 0.0])


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 16), k=st.integers(1, 64))
def test_sm_chain_matches_regularized_gram_inverse(seed, n, k):
    delta = 1e-6
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((k, n))
    P = np.eye(n) / delta
    for a in A:
        P = sherman_morrison_update(P, a)
    direct = np.linalg.inv(delta * np.eye(n) + A.T @ A)
    assert np.max(np.abs(P - direct)) < 1e-7 * max(1.0, np.max(np.abs(direct)))


# -- symmetric_eigendecompose -----------------------------------------------

def test_eig_diagonal():
    dec = symmetric_eigendecompose(np.diag([2.0, 3.0]))
    np.testing.assert_array_equal(dec.eigenvalues, [3.0, 2.0])
    np.testing.assert_array_equal(np.abs(dec.eigenvectors), [[0.0, 1.0], [1.0, 0.0]])


def test_eig_swap_matrix():
    dec = symmetric_eigendecompose([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(dec.eigenvalues, [1.0, -1.0], atol=1e-15)
    s = 1 / np.sqrt(2)
    v1, v2 = dec.eigenvectors.T
    np.testing.assert_allclose(np.abs(v1 @ [s, s]), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.abs(v2 @ [s, -s]), 1.0, atol=1e-14)


def test_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eigendecompose([[1.0, 2.0], [0.0, 1.0]])


def test_eig_zero_matrix():
    dec = symmetric_eigendecompose(np.zeros((3, 3)))
    np.testing.assert_array_equal(dec.eigenvalues, 0.0)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(1, 12), scale=st.floats(1e-3, 1e3))
def test_eig_properties(seed, n, scale):
    rng = np.random.default_rng(seed)
    B = scale * rng.standard_normal((n, n))
    S = B + B.T
    dec = symmetric_eigendecompose(S)
    Q, w = dec.eigenvectors, dec.eigenvalues
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(Q.T @ Q - np.eye(n))) < 1e-10
    assert np.max(np.abs(dec.reconstruct() - S)) < 1e-9 * max(1.0, scale)
    assert abs(w.sum() - np.trace(S)) < 1e-9 * n * max(1.0, scale)
    # LAPACK as an independent oracle for the spectrum
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S)[::-1], atol=1e-10 * max(1.0, scale) * n)


def test_eig_64x64():
    rng = np.random.default_rng(64)
    B = rng.standard_normal((64, 64))
    S = B + B.T
    dec = symmetric_eigendecompose(S)
    assert np.max(np.abs(dec.reconstruct() - S)) < 1e-9


# -- pinv_psd ---------------------------------------------------------------

def test_pinv_leaves_zero_uninverted():
    np.testing.assert_allclose(pinv_psd(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-15)


def test_pinv_full_rank_is_inverse():
    rng = np.random.default_rng(3)
    S = random_spd(rng, 6)
    P = pinv_psd(S)
    np.testing.assert_allclose(P, np.linalg.inv(S), atol=1e-9)
    assert np.max(np.abs(P @ S - np.eye(6))) < 1e-8


def test_pinv_rank_two_penrose():
    rng = np.random.default_rng(4)
    Q = random_orthogonal(rng, 4)
    S = (Q * [5.0, 1.0, 1e-14, 0.0]) @ Q.T
    S = 0.5 * (S + S.T)
    P = pinv_psd(S)
    assert numerical_rank(P) == 2
    assert np.max(np.abs(S @ P @ S - S)) < 1e-9
    assert np.max(np.abs(P @ S @ P - P)) < 1e-9
    expected = (Q * [0.2, 1.0, 0.0, 0.0]) @ Q.T
    np.testing.assert_allclose(P, expected, atol=1e-9)


def test_pinv_rejects_indefinite():
    with pytest.raises(NegativeEigenvalue):
        pinv_psd(np.diag([1.0, -0.5]))


# -- solve_normal_equations -------------------------------------------------

def test_normal_equations_identity():
    b = np.array([1.0, -2.0, 3.5])
    np.testing.assert_allclose(solve_normal_equations(LinearSystem(np.eye(3), b)), b)


def test_normal_equations_mean():
    x = solve_normal_equations(LinearSystem([[1.0], [1.0]], [1.0, 3.0]))
    np.testing.assert_allclose(x, [2.0], atol=1e-15)


def test_normal_equations_recover_consistent_solution():
    rng = np.random.default_rng(10)
    A = rng.standard_normal((10, 4))
    x_star = rng.standard_normal(4)
    sys = LinearSystem(A, A @ x_star)
    x = solve_normal_equations(sys)
    assert np.max(np.abs(x - x_star)) < 1e-9
    assert np.max(np.abs(A.T @ (sys.b - A @ x))) < 1e-8


def test_normal_equations_rank_deficient():
    A = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(RankDeficient):
        solve_normal_equations(LinearSystem(A, [1.0, 2.0, 3.0]))


def test_linear_system_validation():
    with pytest.raises(DimensionMismatch):
        LinearSystem(np.eye(3), [1.0, 2.0])
    with pytest.raises(NonFinite):
        LinearSystem(np.eye(2), [1.0, np.inf])
    sys = LinearSystem(np.eye(2), [1.0, 2.0])
    with pytest.raises(ValueError):
        sys.A[0, 0] = 5.0


# -- underdetermined_apply --------------------------------------------------

def test_underdetermined_single_row():
    np.testing.assert_allclose(underdetermined_apply([[1.0, 0.0]], [3.0]), [3.0, 0.0])


def test_underdetermined_orthonormal_rows():
    rng = np.random.default_rng(5)
    Q = random_orthogonal(rng, 5)[:2]
    v = rng.standard_normal(2)
    np.testing.assert_allclose(underdetermined_apply(Q, v), Q.T @ v, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_underdetermined_right_inverse_and_minimum_norm(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2, 5))
    v = rng.standard_normal(2)
    x = underdetermined_apply(A, v)
    assert np.max(np.abs(A @ x - v)) < 1e-10
    # any other solution adds a null-space component and is no shorter
    null = np.linalg.svd(A)[2][2:]
    for z in null:
        other = x + rng.standard_normal() * z
        assert np.linalg.norm(x) <= np.linalg.norm(other) + 1e-10
    np.testing.assert_allclose(x, np.linalg.pinv(A) @ v, atol=1e-10)


def test_underdetermined_rank_deficient():
    with pytest.raises(RankDeficient):
        underdetermined_apply([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]], [1.0, 2.0])
