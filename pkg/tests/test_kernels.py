from fractions import Fraction

import numpy as np
import pytest

from ttinterp import kernels as K
from ttinterp.errors import ConfigError

import oracles as O

X = np.linspace(-3.2, 3.2, 641)


@pytest.mark.parametrize("name", K.SHIPPED)
def test_kernel_matches_closed_form(name):
    k = K.by_name(name)
    assert np.allclose(k(X), O.phi(name, X), atol=1e-14)


@pytest.mark.parametrize("name,der", [("keys", 1), ("cubic6", 1), ("bspline3", 1), ("bspline3", 2)])
def test_kernel_derivatives(name, der):
    k = K.by_name(name)
    pts = X[np.abs(X - np.round(X)) > 1e-9]
    assert np.allclose(k(pts, der), O.phi(name, pts, der), atol=1e-12)


@pytest.mark.parametrize("name", K.SHIPPED + ("mn:0.3333333333,0.3333333333", "lagrange:4", "lagrange:2"))
def test_partition_of_unity(name):
    k = K.by_name(name)
    t = np.linspace(0, 1, 11)
    total = sum(k(t - j) for j in range(-4, 5))
    assert np.allclose(total, 1.0, atol=1e-12)


def test_interpolating_flags():
    assert K.keys_cubic().kind == "interpolating"
    assert K.cubic_sixpoint().kind == "interpolating"
    assert K.linear_kernel().kind == "interpolating"
    assert K.bspline_cubic().kind == "quasi"


def test_keys_half_value_exact():
    assert K.keys_cubic().piece_exact(Fraction(1, 2)) == Fraction(9, 16)


def test_keys_stencil_matrix():
    m = K.stencils(K.keys_cubic()).matrix()
    expected = [[0, -0.5, 1, -0.5], [1, 0, -2.5, 1.5], [0, 0.5, 2, -1.5], [0, 0, -0.5, 0.5]]
    assert np.allclose(m, expected)


def test_bspline_stencil_matrix():
    m = K.stencils(K.bspline_cubic()).matrix() * 6
    expected = [[1, -3, 3, -1], [4, 0, -6, 3], [1, 3, 3, -3], [0, 0, 0, 1]]
    assert np.allclose(m, expected)


@pytest.mark.parametrize("name", K.SHIPPED)
def test_stencils_are_shifted_kernel(name):
    k = K.by_name(name)
    st = K.stencils(k)
    t = np.linspace(0, 0.999, 9)
    w = st(t)
    for col, off in enumerate(st.offsets):
        assert np.allclose(w[:, col], O.phi(name, t - off))


def test_offsets():
    assert K.keys_cubic().offsets == (-1, 0, 1, 2)
    assert K.cubic_sixpoint().offsets == (-2, -1, 0, 1, 2, 3)
    assert K.linear_kernel().offsets == (0, 1)


def test_derivative_beyond_smoothness():
    with pytest.raises(ConfigError):
        K.keys_cubic().stencil_polys(2)
    with pytest.raises(ConfigError):
        K.linear_kernel().stencil_polys(1)


@pytest.mark.parametrize("bad", ["nope", "mn:1", "lagrange:x", "mn:a,b"])
def test_by_name_errors(bad):
    with pytest.raises(ConfigError):
        K.by_name(bad)


def test_fade():
    t = np.linspace(0, 1, 5)
    assert np.allclose(K.fade("f5")(t), O.fade5(t))
    assert np.allclose(K.fade("f3")(t), O.fade3(t))
    assert np.allclose(K.fade("f5", 1)(np.array([0.0, 1.0])), 0)
