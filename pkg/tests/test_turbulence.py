import numpy as np
import pytest

from ttinterp import encoders as E
from ttinterp import tt as T
from ttinterp import turbulence as TB
from ttinterp.errors import ConfigError

import oracles as O

EPS = {(0, 1, 2): 1, (0, 2, 1): -1, (1, 2, 0): 1, (1, 0, 2): -1, (2, 0, 1): 1, (2, 1, 0): -1}


@pytest.fixture(scope="module")
def small():
    spec = TB.CascadeSpec(seed=4, scales=4, tol=1e-12)
    return spec, TB.turbulence_cascade(spec)


def stream_dense(spec, m, j):
    return E.decode(TB.stream_field(spec, m, j), E.GridDescriptor.uniform(3, m, "interleaved"))


def test_levi_civita_table():
    assert {(k, i, j): s for k, i, j, s in TB.LEVI_CIVITA} == EPS


def test_velocity_matches_dense_curl(small):
    spec, cas = small
    M = spec.scales
    ref = np.zeros((3,) + (2**M,) * 3)
    for m in range(2, M):
        w = 2.0 ** (-4 * m / 3)
        for (k, i, j), s in EPS.items():
            ders = [0, 0, 0]
            ders[i] = 1
            ref[k] += s * w * O.conv_separable(stream_dense(spec, m, j), "bspline3", M - m, "periodic", ders)
    assert np.max(np.abs(cas.dense() - ref)) <= 1e-9 * np.max(np.abs(ref))


def test_continuous_divergence_vanishes(small):
    spec, _ = small
    x = np.random.default_rng(0).random((200, 3))
    div = np.zeros(200)
    grad_scale = 0.0
    for m in range(2, spec.scales):
        w = 2.0 ** (-4 * m / 3)
        G = stream_dense(spec, m, 0), stream_dense(spec, m, 1), stream_dense(spec, m, 2)
        for (k, i, j), s in EPS.items():
            ders = [0, 0, 0]
            ders[i] += 1
            ders[k] += 1
            term = s * w * O.spline_field(G[j], x, ders)
            div += term
            grad_scale = max(grad_scale, np.max(np.abs(term)))
    assert np.max(np.abs(div)) <= 1e-12 * grad_scale


def test_analytic_fields_agree_with_tt(small):
    spec, cas = small
    L = 2**spec.scales
    idx = np.random.default_rng(1).integers(0, L, (50, 3))
    v, div = TB.analytic_fields(spec, idx / L)
    dense = cas.dense()
    for k in range(3):
        assert np.allclose(v[k], dense[k][tuple(idx.T)], atol=1e-9)
    assert np.max(np.abs(div)) <= 1e-10 * np.max(np.abs(v))


def test_tt_divergence_small(small):
    spec, cas = small
    div = TB.tt_divergence(spec)
    assert T.norm2(div) <= 1e-9 * max(T.norm2(v) for v in cas.velocity)


def test_tucker_layout_agrees(small):
    spec, cas = small
    tuck = TB.turbulence_cascade(spec, layout="tucker")
    assert all(isinstance(v, E.TuckerTT) for v in tuck.velocity)
    assert np.allclose(tuck.dense(), cas.dense(), atol=1e-9)


def test_unit_energy():
    spec = TB.CascadeSpec(seed=1, scales=4, unit_energy=True)
    v = TB.turbulence_cascade(spec).dense()
    assert np.isclose(np.sum(v**2) / 2**12, 1.0, rtol=1e-6)


def test_determinism():
    spec = TB.CascadeSpec(seed=2, scales=4)
    a = TB.turbulence_cascade(spec).velocity[0]
    b = TB.turbulence_cascade(spec).velocity[0]
    assert all(np.array_equal(x, y) for x, y in zip(a.cores, b.cores))


def test_spec_validation():
    with pytest.raises(ConfigError):
        TB.CascadeSpec(scales=3)
    with pytest.raises(ConfigError):
        TB.CascadeSpec(rank=0)
    with pytest.raises(ConfigError):
        TB.turbulence_cascade(TB.CascadeSpec(), layout="plain")


def test_levels_and_weights():
    spec = TB.CascadeSpec(scales=6)
    assert list(spec.levels) == [2, 3, 4, 5]
    assert spec.weight(3) == pytest.approx(2**-4)
