import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpeps.errors import InvalidArgument, NumericError
from gpeps.tensor import contract, permute, svd_truncate


def rand_tensor(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_permute_transpose():
    t = np.arange(6).reshape(2, 3).astype(complex)
    np.testing.assert_array_equal(permute(t, (1, 0)), t.T)


def test_permute_identity():
    t = rand_tensor(np.random.default_rng(0), (2, 3, 4))
    np.testing.assert_array_equal(permute(t, (0, 1, 2)), t)


def test_permute_against_index_loop():
    t = rand_tensor(np.random.default_rng(1), (2, 3, 4))
    p = permute(t, (2, 0, 1))
    assert p.shape == (4, 2, 3)
    for i, j, k in itertools.product(range(2), range(3), range(4)):
        assert p[k, i, j] == t[i, j, k]


def test_permute_rejects_non_permutation():
    with pytest.raises(InvalidArgument):
        permute(np.zeros((2, 2)), (0, 0))


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(4)), st.integers(0, 2**31))
def test_permute_inverse_roundtrip(axes, seed):
    t = rand_tensor(np.random.default_rng(seed), (2, 3, 1, 2))
    inv = np.argsort(axes)
    back = permute(permute(t, axes), inv)
    assert np.max(np.abs(back - t)) <= 1e-15


def test_contract_identity():
    v = np.array([0.3 + 0.1j, -0.7j])
    np.testing.assert_allclose(contract(np.eye(2), v, [(1, 0)]), v)


def test_contract_normalized_state_to_scalar():
    rng = np.random.default_rng(2)
    psi = rand_tensor(rng, (2, 2, 2))
    psi /= np.linalg.norm(psi)
    out = contract(psi, psi.conj(), [(0, 0), (1, 1), (2, 2)])
    assert out.shape == ()
    assert abs(out - 1) < 1e-14


def test_contract_matches_triple_loop():
    rng = np.random.default_rng(3)
    a, b = rand_tensor(rng, (3, 4)), rand_tensor(rng, (4, 5))
    naive = np.zeros((3, 5), dtype=complex)
    for i in range(3):
        for j in range(5):
            for k in range(4):
                naive[i, j] += a[i, k] * b[k, j]
    np.testing.assert_allclose(contract(a, b, [(1, 0)]), naive, atol=1e-13)


def test_contract_free_axis_order():
    rng = np.random.default_rng(4)
    a, b = rand_tensor(rng, (2, 3, 4)), rand_tensor(rng, (5, 3))
    out = contract(a, b, [(1, 1)])
    assert out.shape == (2, 4, 5)
    np.testing.assert_allclose(out, np.einsum("ijk,lj->ikl", a, b))


def test_contract_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        contract(np.zeros((2, 3)), np.zeros((4, 2)), [(1, 0)])


def test_contract_bilinear():
    rng = np.random.default_rng(5)
    a1, a2, b = rand_tensor(rng, (3, 4)), rand_tensor(rng, (3, 4)), rand_tensor(rng, (4, 2))
    lhs = contract(2 * a1 - 1j * a2, b, [(1, 0)])
    rhs = 2 * contract(a1, b, [(1, 0)]) - 1j * contract(a2, b, [(1, 0)])
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


def test_svd_diagonal_full():
    res = svd_truncate(np.diag([1.0, 0.5]).astype(complex), 1, chi=2)
    np.testing.assert_allclose(res.singular_values, [1.0, 0.5])
    assert res.truncation_error == 0


def test_svd_diagonal_truncated():
    res = svd_truncate(np.diag([1.0, 0.5]).astype(complex), 1, chi=1)
    np.testing.assert_allclose(res.singular_values, [1.0])
    assert res.truncation_error == pytest.approx(0.5 / np.sqrt(1.25), abs=1e-15)


def test_svd_reconstruction_8x8():
    t = rand_tensor(np.random.default_rng(6), (8, 8))
    res = svd_truncate(t, 1, chi=8)
    rec = (res.left * res.singular_values) @ res.right
    assert np.max(np.abs(rec - t)) <= 1e-12
    assert res.truncation_error == 0


def test_svd_isometries_and_split():
    t = rand_tensor(np.random.default_rng(7), (2, 3, 4, 2))
    res = svd_truncate(t, ((0, 2), (1, 3)), chi=5)
    assert res.left.shape == (2, 4, 5)
    assert res.right.shape == (5, 3, 2)
    u = res.left.reshape(8, 5)
    v = res.right.reshape(5, 6)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-12)
    np.testing.assert_allclose(v @ v.conj().T, np.eye(5), atol=1e-12)
    s = np.sort(res.singular_values)[::-1]
    np.testing.assert_array_equal(res.singular_values, s)


def test_svd_error_matches_reconstruction():
    t = rand_tensor(np.random.default_rng(8), (6, 6))
    res = svd_truncate(t, 1, chi=3)
    rec = (res.left * res.singular_values) @ res.right
    rel = np.linalg.norm(rec - t) / np.linalg.norm(t)
    assert res.truncation_error == pytest.approx(rel, rel=1e-10)


def test_svd_floor_drops_null_directions():
    rank2 = np.outer([1, 2, 3], [1, 0, 1]) + np.outer([0, 1, 0], [1, 1, 0])
    res = svd_truncate(rank2.astype(complex), 1, chi=10)
    assert len(res.singular_values) == 2


def test_svd_non_finite():
    t = np.ones((2, 2), dtype=complex)
    t[0, 0] = np.nan
    with pytest.raises(NumericError):
        svd_truncate(t, 1, chi=2)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_svd_weight_equals_frobenius(r, c, seed):
    t = rand_tensor(np.random.default_rng(seed), (r, c))
    res = svd_truncate(t, 1, chi=100, floor=0.0)
    total = np.sum(res.singular_values**2)
    assert total == pytest.approx(np.linalg.norm(t) ** 2, rel=1e-12)


def test_chi_limited_flag():
    t = np.diag([1.0, 0.5, 1e-14]).astype(complex)
    assert not svd_truncate(t, 1, chi=3).chi_limited
    assert not svd_truncate(t, 1, chi=2).chi_limited
    assert svd_truncate(t, 1, chi=1).chi_limited
