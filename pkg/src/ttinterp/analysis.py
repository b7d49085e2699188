"""Metrics: sampled errors, convergence orders, spectra, flatness, ranks."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tt as T
from .encoders import GridDescriptor, TuckerTT, index_bits_many, tucker_eval_many
from .errors import ConfigError
from .kernels import Kernel


@dataclass
class MetricReport:
    name: str
    scalars: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        cols = list(self.series)
        if not cols:
            return
        n = max(len(self.series[c]) for c in cols)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for i in range(n):
                w.writerow([_cell(self.series[c][i]) if i < len(self.series[c]) else "" for c in cols])

    def to_json(self) -> str:
        return json.dumps({"name": self.name, **{k: _jsonable(v) for k, v in self.scalars.items()}}, indent=2)


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


def evaluate_many(obj, indices: np.ndarray, grid: GridDescriptor | None = None) -> np.ndarray:
    """Values at grid indices ``(S, d)``; without a grid the indices are core indices."""
    if isinstance(obj, TuckerTT):
        return tucker_eval_many(obj, indices)
    if grid is None:
        return T.tt_eval_many(obj, indices)
    return T.tt_eval_many(obj, index_bits_many(indices, grid))


def rmse_sampled(obj, reference: Callable, samples: int = 10_000, seed: int = 0,
                 grid: GridDescriptor | None = None) -> float:
    """Root-mean-square deviation at uniformly drawn indices.

    ``reference`` receives the ``(S, d)`` index array and returns values.
    """
    if samples < 1:
        raise ConfigError("need at least one sample")
    rng = np.random.default_rng(seed)
    shape = grid.shape if grid is not None else (obj.dims if isinstance(obj, T.TensorTrain) else None)
    if shape is None:
        shape = tuple(2**n for n in obj.scales)
    idx = np.stack([rng.integers(0, n, samples) for n in shape], axis=1)
    diff = evaluate_many(obj, idx, grid) - np.asarray(reference(idx), dtype=float)
    return float(np.sqrt(np.mean(diff**2)))


def rank_stats(obj) -> dict:
    if isinstance(obj, TuckerTT):
        points = math.prod(2**n for n in obj.scales)
    else:
        points = obj.size
    params = obj.parameter_count
    return {"max_rank": obj.max_rank, "parameter_count": params, "compression_ratio": params / points}


# --------------------------------------------------------------------------
# convergence orders
# --------------------------------------------------------------------------


def kernel_interpolate_dense(samples: np.ndarray, kernel: Kernel, x: np.ndarray, derivative: int = 0) -> np.ndarray:
    """Periodic convolution interpolant on ``[0, 1)`` evaluated at points ``x``.

    Evaluates the kernel pieces directly, independent of the stencil code.
    """
    n = samples.size
    u = np.asarray(x, dtype=float) * n
    base = np.floor(u).astype(np.int64)
    out = np.zeros_like(u)
    reach = kernel.q // 2 + 1
    for j in range(-reach, reach + 1):
        node = base + j
        out += samples[node % n] * kernel(u - node, derivative)
    return out * float(n) ** derivative


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if np.unique(lx).size < 2:
        raise ConfigError("slope fit needs at least two distinct abscissae")
    return float(np.polyfit(lx, ly, 1)[0])


def convergence_study(kernel: Kernel, f: Callable = None, levels: Sequence[int] = range(4, 11),
                      derivative: int = 0, df: Callable | None = None, points_per_cell: int = 8):
    """Max error of the periodic interpolant of ``f`` for ``h = 2^-n``.

    Returns ``(h, errors, slope)``.
    """
    if f is None:
        f = lambda x: np.sin(2 * np.pi * x)  # noqa: E731
    target = f if derivative == 0 else df
    if target is None:
        raise ConfigError("derivative study needs the analytic derivative df")
    hs, errs = [], []
    for n in levels:
        N = 2**n
        xs = np.arange(N) / N
        fine = (np.arange(N * points_per_cell) + 0.5) / (N * points_per_cell)
        approx = kernel_interpolate_dense(f(xs), kernel, fine, derivative)
        hs.append(1.0 / N)
        errs.append(float(np.max(np.abs(approx - target(fine)))))
    return np.array(hs), np.array(errs), fit_slope(hs, errs)


# --------------------------------------------------------------------------
# turbulence statistics
# --------------------------------------------------------------------------


def _as_dense_velocity(v, M: int | None = None) -> np.ndarray:
    if isinstance(v, np.ndarray):
        return v
    from .encoders import decode

    out = []
    for comp in v:
        if isinstance(comp, TuckerTT):
            out.append(decode(comp, None))
        else:
            d = 3
            N = comp.ndim // d if M is None else M
            out.append(decode(comp, GridDescriptor.uniform(d, N, "interleaved")))
    return np.stack(out)


def energy_spectrum(v, M: int | None = None, full: bool = False):
    """Shell-summed spectrum ``E(k) = sum_{|k| in shell} |v_hat|^2 / 2``.

    ``v`` is a sequence of three interleaved QTTs (or Tucker tensors) or a
    dense ``(3, L, L, L)`` array.  Shells are integer bins ``[k - 1/2, k + 1/2)``.
    Returns ``(k, E)`` for ``k = 1..L/2`` (or every shell with ``full``).
    """
    vel = _as_dense_velocity(v, M)
    L = vel.shape[-1]
    T.check_capacity(vel.size, "velocity field")
    vh = np.fft.fftn(vel, axes=(1, 2, 3)) / L**3
    e = 0.5 * np.sum(np.abs(vh) ** 2, axis=0)
    freq = np.fft.fftfreq(L, 1.0 / L)
    kx, ky, kz = np.meshgrid(freq, freq, freq, indexing="ij")
    shell = np.rint(np.sqrt(kx**2 + ky**2 + kz**2)).astype(np.int64)
    spec = np.bincount(shell.ravel(), weights=e.ravel())
    k = np.arange(spec.size)
    if full:
        return k, spec
    sel = (k >= 1) & (k <= L // 2)
    return k[sel], spec[sel]


def spectrum_slope(k, E, kmin: float, kmax: float) -> float:
    sel = (k >= kmin) & (k <= kmax) & (E > 0)
    return fit_slope(k[sel], E[sel])


def flatness(v, separations: Sequence[int], mode: str = "longitudinal", M: int | None = None) -> np.ndarray:
    """``F(r) = S4 / S2^2`` of velocity increments at lags ``r`` (grid units).

    ``longitudinal`` uses component ``a`` displaced along axis ``a``;
    ``full`` uses every component along every axis.  Increments are not
    wrapped.  Moments are averaged over positions and directions before
    the ratio is taken.  A field with constant increments gives 1.
    """
    if mode not in ("longitudinal", "full"):
        raise ConfigError(f"unknown flatness mode {mode!r}")
    vel = _as_dense_velocity(v, M)
    if vel.ndim == 1:
        vel = vel[None, :]
    ncomp, dims = vel.shape[0], vel.ndim - 1
    out = []
    for r in separations:
        s2 = s4 = 0.0
        count = 0
        for axis in range(dims):
            comps = [axis] if mode == "longitudinal" and ncomp == dims else range(ncomp)
            for c in comps:
                f = vel[c]
                n = f.shape[axis]
                if r <= 0 or r >= n:
                    raise ConfigError(f"separation {r} out of range")
                dv = np.take(f, np.arange(r, n), axis=axis) - np.take(f, np.arange(0, n - r), axis=axis)
                s2 += float(np.mean(dv**2))
                s4 += float(np.mean(dv**4))
                count += 1
        s2 /= count
        s4 /= count
        out.append(1.0 if s2 == 0 else s4 / s2**2)
    return np.array(out)
