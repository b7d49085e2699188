import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttinterp import tt as T
from ttinterp.errors import CapacityError, ConfigError, DimensionMismatch


def random_dense(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


def low_rank_dense(dims, rank, seed=0):
    rng = np.random.default_rng(seed)
    cores = [rng.standard_normal((1 if k == 0 else rank, n, 1 if k == len(dims) - 1 else rank))
             for k, n in enumerate(dims)]
    return T.tt_to_dense(T.TensorTrain(cores))


def test_lossless_round_trip():
    a = random_dense((2, 3, 4, 2, 3))
    tt = T.tt_from_dense(a)
    assert np.allclose(tt.full(), a, atol=1e-12)


@pytest.mark.parametrize("eps", [1e-1, 1e-3, 1e-6])
def test_tt_svd_error_bound(eps):
    a = random_dense((4,) * 5, seed=1)
    tt = T.tt_from_dense(a, eps)
    err = np.linalg.norm(tt.full() - a) / np.linalg.norm(a)
    assert err <= eps * (1 + 1e-12)


def test_tt_svd_recovers_low_rank():
    a = low_rank_dense((2,) * 10, 3)
    tt = T.tt_from_dense(a, 1e-12)
    assert tt.max_rank == 3


def test_rank_cap():
    a = random_dense((2,) * 8)
    tt = T.tt_from_dense(a, T.Tolerance(0.0, 2))
    assert tt.max_rank <= 2


def test_tolerance_validation():
    with pytest.raises(ConfigError):
        T.Tolerance(-1.0)
    with pytest.raises(ConfigError):
        T.Tolerance(0.1, 0)


def test_round_left_orthogonal():
    a = low_rank_dense((2,) * 8, 4, seed=3)
    tt = T.round(T.add(T.tt_from_dense(a), T.tt_from_dense(a)), 1e-12)
    assert tt.max_rank == 4
    for c in tt.cores[:-1]:
        mat = c.reshape(-1, c.shape[2])
        assert np.allclose(mat.T @ mat, np.eye(mat.shape[1]), atol=1e-12)
    assert np.allclose(tt.full(), 2 * a, atol=1e-10)


def test_round_stop_leaves_tail():
    a = T.tt_from_dense(low_rank_dense((2,) * 8, 3, seed=4))
    doubled = T.add(a, a)
    out = T.round(doubled, 1e-12, stop=4)
    # bonds past ``stop`` are only QR-reduced to their dimension bound
    tail = tuple(min(r, 2 ** (8 - b)) for b, r in enumerate(doubled.ranks) if b > 4)
    assert out.ranks[5:] == tail
    assert max(out.ranks[5:8]) > 3
    assert np.allclose(out.full(), doubled.full(), atol=1e-10)


def test_arithmetic_matches_dense():
    a = random_dense((2, 3, 2, 3), 5)
    b = random_dense((2, 3, 2, 3), 6)
    ta, tb = T.tt_from_dense(a), T.tt_from_dense(b)
    assert np.allclose((ta + tb).full(), a + b)
    assert np.allclose((ta - tb).full(), a - b)
    assert np.allclose((-ta).full(), -a)
    assert np.allclose((2.5 * ta).full(), 2.5 * a)
    assert np.allclose(T.hadamard(ta, tb).full(), a * b)
    assert np.isclose(T.dot(ta, tb), np.sum(a * b))
    assert np.isclose(T.norm2(ta), np.linalg.norm(a))
    assert np.isclose(T.total_sum(ta), a.sum())
    assert np.allclose(T.add_many([ta, tb, ta]).full(), 2 * a + b)


def test_add_mismatch():
    with pytest.raises(DimensionMismatch):
        T.add(T.ones((2, 2)), T.ones((2, 3)))


def test_constructors():
    assert np.array_equal(T.zeros((2, 3)).full(), np.zeros((2, 3)))
    assert np.array_equal(T.ones((2, 3)).full(), np.ones((2, 3)))
    d = T.delta((1, 2), (2, 3)).full()
    assert d[1, 2] == 1 and d.sum() == 1
    v = [np.array([1.0, 2.0]), np.array([3.0, 4.0, 5.0])]
    assert np.allclose(T.rank_one(v).full(), np.outer(*v))


def test_bad_cores_rejected():
    with pytest.raises(ConfigError):
        T.TensorTrain([])
    with pytest.raises(ConfigError):
        T.TensorTrain([np.ones((2, 2, 1))])
    with pytest.raises(DimensionMismatch):
        T.TensorTrain([np.ones((1, 2, 2)), np.ones((3, 2, 1))])


def test_cores_are_immutable():
    tt = T.ones((2, 2))
    with pytest.raises(ValueError):
        tt.cores[0][0, 0, 0] = 5.0


def test_eval_and_eval_many():
    a = random_dense((2, 3, 4))
    tt = T.tt_from_dense(a)
    assert np.isclose(T.tt_eval(tt, (1, 2, 3)), a[1, 2, 3])
    idx = np.array([[0, 0, 0], [1, 1, 2], [1, 2, 3]])
    assert np.allclose(T.tt_eval_many(tt, idx), a[tuple(idx.T)])
    with pytest.raises(IndexError):
        T.tt_eval(tt, (2, 0, 0))
    with pytest.raises(DimensionMismatch):
        T.tt_eval(tt, (0, 0))


def test_fix_index_and_kron():
    a = random_dense((2, 3, 4, 2))
    tt = T.tt_from_dense(a)
    assert np.allclose(T.fix_index(tt, [1, 3], [2, 0]).full(), a[:, 2, :, 0])
    b = random_dense((3,), 2)
    assert np.allclose(T.kron(tt, T.tt_from_dense(b)).full(), np.multiply.outer(a, b))


def test_capacity_guard(monkeypatch):
    monkeypatch.setattr(T, "MAX_DENSE_ELEMENTS", 100)
    with pytest.raises(CapacityError):
        T.ones((2,) * 8).full()


@pytest.mark.parametrize("method", ["zipup", "naive"])
def test_apply_operator_matches_dense(method):
    rng = np.random.default_rng(7)
    mat = rng.standard_normal((16, 16))
    op = T.operator_from_dense(mat, (2,) * 4, (2,) * 4)
    v = rng.standard_normal(16)
    out = T.apply_operator(op, T.tt_from_dense(v.reshape((2,) * 4)), method=method)
    assert np.allclose(out.full().ravel(), mat @ v, atol=1e-12)
    assert np.allclose(op.full(), mat)


def test_operator_algebra():
    rng = np.random.default_rng(8)
    a, b = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
    oa = T.operator_from_dense(a, (2,) * 3, (2,) * 3)
    ob = T.operator_from_dense(b, (2,) * 3, (2,) * 3)
    assert np.allclose((oa + ob).full(), a + b)
    assert np.allclose((oa - ob).full(), a - b)
    assert np.allclose((3 * oa).full(), 3 * a)
    assert np.allclose(T.operator_transpose(oa).full(), a.T)
    assert np.allclose(T.operator_round(oa + oa, 1e-12).full(), 2 * a)
    assert np.allclose(T.identity_operator((2, 3)).full(), np.eye(6))
    assert np.allclose(T.operator_kron(oa, ob).full(), np.kron(a, b))


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        T.apply_operator(T.identity_operator((2, 2)), T.ones((2, 3)))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(2, 3), min_size=2, max_size=5), st.floats(-3, 3), st.integers(0, 1000))
def test_linearity_property(dims, c, seed):
    a = random_dense(dims, seed)
    b = random_dense(dims, seed + 1)
    ta, tb = T.tt_from_dense(a), T.tt_from_dense(b)
    out = T.round(T.add(ta, T.scale(tb, c)), 1e-13)
    assert np.allclose(out.full(), a + c * b, atol=1e-10)
