import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttinterp import encoders as E
from ttinterp import tt as T
from ttinterp.errors import ConfigError, DimensionMismatch, FormatError


def smooth2d(x, y):
    return np.exp(-((x - 0.4) ** 2 + (y - 0.6) ** 2) / 0.05) + 0.3 * np.sin(2 * np.pi * x * y)


def test_grid_basics():
    g = E.GridDescriptor((3, 4), domain=((0, 2), (-1, 1)))
    assert g.d == 2 and g.shape == (8, 16) and g.num_points == 128
    assert g.spacing == (0.25, 0.125)
    assert np.allclose(g.axis(1)[:3], [-1, -0.875, -0.75])
    assert g.refined(2).scales == (5, 6)
    assert g.refined([1, 0]).scales == (4, 4)


def test_grid_text_round_trip():
    g = E.GridDescriptor((5, 5), domain=((0, 1), (0.5, 2.5)), layout="interleaved", periodic=(True, False))
    assert E.GridDescriptor.from_text(g.to_text()) == g
    with pytest.raises(FormatError):
        E.GridDescriptor.from_text("layout=plain\n")


@pytest.mark.parametrize("kw", [
    dict(scales=(0,)),
    dict(scales=(3,), domain=((1, 0),)),
    dict(scales=(3, 4), layout="interleaved"),
    dict(scales=(3,), layout="zigzag"),
])
def test_grid_validation(kw):
    with pytest.raises(ConfigError):
        E.GridDescriptor(**kw)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_interleave_bits_inverse(d, N, data):
    idx = tuple(data.draw(st.integers(0, 2**N - 1)) for _ in range(d))
    flat = E.interleave_bits(idx, N)
    assert E.deinterleave_bits(flat, d, N) == idx


def test_interleave_order_small():
    # two dims, two scales: x1 y1 x2 y2
    assert E.interleave_order(2, 2) == [0, 2, 1, 3]
    assert E.interleave_bits((2, 1), 2) == 0b1001


@pytest.mark.parametrize("layout", ["plain", "interleaved", "tucker"])
def test_lossless_encode_decode(layout):
    g = E.GridDescriptor.uniform(2, 4, layout)
    a = E.sample(smooth2d, g)
    obj = E.encode_dense(a, g)
    assert np.allclose(E.decode(obj, g), a, atol=1e-12)


@pytest.mark.parametrize("layout", ["plain", "interleaved"])
def test_index_bits_consistent(layout):
    g = E.GridDescriptor.uniform(3, 3, layout)
    a = np.random.default_rng(0).standard_normal(g.shape)
    tt = E.encode_dense(a, g)
    idx = np.random.default_rng(1).integers(0, 8, (20, 3))
    vals = T.tt_eval_many(tt, E.index_bits_many(idx, g))
    assert np.allclose(vals, a[tuple(idx.T)])
    assert np.isclose(T.tt_eval(tt, E.index_bits(idx[0], g)), a[tuple(idx[0])])


def test_interleave_helpers():
    g = E.GridDescriptor.uniform(2, 5)
    a = E.sample(smooth2d, g)
    tt = E.interleave(a, g, 1e-12)
    assert np.allclose(E.deinterleave(tt, g), a, atol=1e-10)


def test_interleaved_ranks_lower_for_smooth():
    g = E.GridDescriptor.uniform(2, 6)
    a = E.sample(lambda x, y: np.exp(-((x - y) ** 2) * 3), g)
    plain = E.encode_dense(a, g, 1e-8)
    inter = E.encode_dense(a, g.with_layout("interleaved"), 1e-8)
    assert inter.max_rank <= plain.max_rank


def test_decode_mismatch():
    with pytest.raises(DimensionMismatch):
        E.decode(T.ones((2,) * 5), E.GridDescriptor.uniform(2, 3))
    with pytest.raises(DimensionMismatch):
        E.encode_dense(np.ones((4, 4)), E.GridDescriptor.uniform(2, 3))


def test_bundle_scales():
    g = E.GridDescriptor.uniform(2, 3, "interleaved")
    a = np.random.default_rng(2).standard_normal(g.shape)
    tt = E.encode_dense(a, g)
    b = E.bundle_scales(tt, 2)
    assert b.dims == (4, 4, 4)
    assert np.allclose(b.full().ravel(), tt.full().ravel())


@pytest.mark.parametrize("eps", [1e-2, 1e-5, 1e-9])
def test_tucker_error_budget(eps):
    g = E.GridDescriptor((5, 4, 3))
    a = E.sample(lambda x, y, z: np.sin(3 * x + y) * np.exp(z * y) + x * z, g)
    t = E.to_tucker(a, g, eps)
    err = np.linalg.norm(E.decode(t, g) - a) / np.linalg.norm(a)
    assert err <= eps
    assert all(f.dims[0] == r for f, r in zip(t.factors, t.tucker_ranks))
    assert t.scales == (5, 4, 3)


def test_tucker_arithmetic_and_eval():
    g = E.GridDescriptor((3, 4))
    a = E.sample(smooth2d, g)
    b = E.sample(lambda x, y: x + y, g)
    ta, tb = E.to_tucker(a, g, 1e-13), E.to_tucker(b, g, 1e-13)
    s = E.tucker_round(E.tucker_add(ta, E.tucker_scale(tb, -2.0)), 1e-12)
    assert np.allclose(s.full(), a - 2 * b, atol=1e-10)
    idx = np.array([[0, 0], [7, 15], [3, 9]])
    assert np.allclose(E.tucker_eval_many(ta, idx), a[tuple(idx.T)], atol=1e-11)
    assert np.allclose(ta.factor_matrix(1).shape, (16, ta.tucker_ranks[1]))


def test_tucker_1d_to_qtt():
    g = E.GridDescriptor((6,))
    a = E.sample(lambda x: np.cos(5 * x), g)
    t = E.to_tucker(a, g, 1e-13)
    assert np.allclose(t.to_qtt().full().ravel(), a, atol=1e-12)
    with pytest.raises(ConfigError):
        E.to_tucker(np.ones((6, 8)))


def test_sample_broadcasts_constant():
    g = E.GridDescriptor.uniform(2, 2)
    assert np.array_equal(E.sample(lambda x, y: 3.0, g), np.full((4, 4), 3.0))
