import csv
import json

import numpy as np
import pytest

from ttinterp import analysis as A
from ttinterp import encoders as E
from ttinterp import kernels as K
from ttinterp import tt as T
from ttinterp.errors import ConfigError

import oracles as O


def test_single_mode_spectrum():
    L = 16
    x = np.arange(L) / L
    v = np.zeros((3, L, L, L))
    v[0] = np.cos(2 * np.pi * 3 * x)[None, :, None]
    k, e = A.energy_spectrum(v)
    assert k[0] == 1 and k[-1] == L // 2
    assert np.isclose(e[k == 3][0], 0.25)
    assert np.isclose(e.sum(), 0.5 * np.mean(np.sum(v**2, axis=0)))


def test_spectrum_parseval():
    v = np.random.default_rng(0).standard_normal((3, 8, 8, 8))
    k, e = A.energy_spectrum(v, full=True)
    assert np.isclose(e.sum(), 0.5 * np.mean(np.sum(v**2, axis=0)))


def test_spectrum_from_tts():
    v = np.random.default_rng(1).standard_normal((3, 8, 8, 8))
    g = E.GridDescriptor.uniform(3, 3, "interleaved")
    tts = [E.encode_dense(c, g) for c in v]
    assert np.allclose(A.energy_spectrum(tts)[1], A.energy_spectrum(v)[1])


def test_spectrum_slope_power_law():
    k = np.arange(1, 33, dtype=float)
    assert A.spectrum_slope(k, 2.0 * k ** (-5 / 3), 2, 30) == pytest.approx(-5 / 3)


def test_flatness_constant_increments():
    L = 16
    x = np.arange(L, dtype=float)
    v = np.stack(np.meshgrid(x, x, x, indexing="ij"))  # v_a = x_a
    assert np.allclose(A.flatness(v, [1, 2]), 1.0)
    assert np.all(A.flatness(np.zeros((3, 4, 4, 4)), [1]) == 1.0)


def test_flatness_gaussian_near_three():
    rng = np.random.default_rng(2)
    v = rng.standard_normal((3, 32, 32, 32))
    f = A.flatness(v, [1, 4], mode="full")
    assert np.allclose(f, 3.0, atol=0.15)


def test_flatness_manual():
    rng = np.random.default_rng(3)
    v = rng.standard_normal((3, 6, 6, 6))
    r = 2
    s2 = s4 = 0.0
    for a in range(3):
        dv = np.take(v[a], range(r, 6), axis=a) - np.take(v[a], range(0, 6 - r), axis=a)
        s2 += np.mean(dv**2) / 3
        s4 += np.mean(dv**4) / 3
    assert A.flatness(v, [r])[0] == pytest.approx(s4 / s2**2)


def test_flatness_errors():
    with pytest.raises(ConfigError):
        A.flatness(np.zeros((3, 4, 4, 4)), [4])
    with pytest.raises(ConfigError):
        A.flatness(np.zeros((3, 4, 4, 4)), [1], mode="odd")


def test_rmse_sampled_and_evaluate():
    g = E.GridDescriptor.uniform(2, 4, "interleaved")
    a = np.random.default_rng(4).standard_normal(g.shape)
    tt = E.encode_dense(a, g)
    idx = np.array([[1, 2], [15, 0]])
    assert np.allclose(A.evaluate_many(tt, idx, g), a[tuple(idx.T)])
    assert A.rmse_sampled(tt, lambda i: a[tuple(i.T)], 500, grid=g) < 1e-12
    assert A.rmse_sampled(tt, lambda i: a[tuple(i.T)] + 1.0, 100, grid=g) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        A.rmse_sampled(tt, lambda i: 0, 0, grid=g)


def test_rank_stats():
    s = A.rank_stats(T.ones((2,) * 10))
    assert s == {"max_rank": 1, "parameter_count": 20, "compression_ratio": 20 / 1024}


def test_kernel_interpolate_dense_matches_oracle():
    f = np.random.default_rng(5).standard_normal(16)
    x = np.arange(64) / 64
    assert np.allclose(A.kernel_interpolate_dense(f, K.keys_cubic(), x), O.conv_periodic(f, "keys", 2))


@pytest.mark.parametrize("name,order", [("keys", 3), ("cubic6", 4), ("bspline3", 2), ("linear", 2)])
def test_convergence_orders(name, order):
    _, _, slope = A.convergence_study(K.by_name(name), levels=range(4, 9))
    assert abs(slope - order) <= 0.3


def test_derivative_convergence_needs_df():
    with pytest.raises(ConfigError):
        A.convergence_study(K.keys_cubic(), derivative=1)


def test_metric_report(tmp_path):
    rep = A.MetricReport("x", {"a": np.float64(1.5), "b": [np.int64(2)]}, {"k": [1, 2], "E": [0.5, 0.25]})
    rep.to_csv(tmp_path / "r.csv")
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    assert rows == [["k", "E"], ["1", "0.5"], ["2", "0.25"]]
    assert json.loads(rep.to_json()) == {"name": "x", "a": 1.5, "b": [2]}
