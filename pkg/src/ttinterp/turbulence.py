"""Divergence-free synthetic turbulence from a multiscale stream function.

Each velocity component is

    v_k = sum_{m=2}^{M-1} w_m sum_{i,j} eps_{kij} d_i S_M[G^m_j],

where ``G^m_j`` is a random QTT on the ``2^m``-per-axis grid, ``S_M`` the
cubic B-spline quasi-interpolant refined to ``2^M`` points per axis and
``w_m = 2^(-4m/3)``.  Derivatives are taken exactly on the spline pieces,
so ``div v = 0`` holds identically for the continuous field.

One random field ``G^m_j`` is drawn per (scale, component) and shared by the
two velocity components it feeds; drawing it anew per (i, j) pair would
break the curl structure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import encoders as E
from . import tt as T
from .errors import ConfigError
from .kernels import Kernel, bspline_cubic
from .noise import random_qtt
from .tti import apply_tti_interleaved, apply_tti_tucker, build_tti_multidim_interleaved

TAG_TURBULENCE = 5

# (k, i, j, sign) with eps_{kij} = sign
LEVI_CIVITA = tuple(
    (k, i, j, s)
    for (k, i, j), s in (
        ((0, 1, 2), 1), ((0, 2, 1), -1),
        ((1, 2, 0), 1), ((1, 0, 2), -1),
        ((2, 0, 1), 1), ((2, 1, 0), -1),
    )
)


def kolmogorov_weight(m: int) -> float:
    return 2.0 ** (-4.0 * m / 3.0)


@dataclass(frozen=True)
class CascadeSpec:
    seed: int = 0
    scales: int = 6
    rank: int = 5
    tol: float = 1e-8
    first_scale: int = 2
    unit_energy: bool = False

    def __post_init__(self):
        if self.scales < 4:
            raise ConfigError("the cascade needs M >= 4")
        if self.rank < 1:
            raise ConfigError("rank must be >= 1")

    @property
    def levels(self) -> range:
        return range(self.first_scale, self.scales)

    def weight(self, m: int) -> float:
        return kolmogorov_weight(m)


@dataclass(frozen=True)
class Cascade:
    spec: CascadeSpec
    velocity: tuple  # three TensorTrain (interleaved) or TuckerTT
    layout: str
    scale: float = 1.0

    @property
    def max_rank(self) -> int:
        return max(v.max_rank for v in self.velocity)

    def grid(self) -> E.GridDescriptor:
        return E.GridDescriptor.uniform(3, self.spec.scales, self.layout)

    def dense(self) -> np.ndarray:
        """Velocity as an array of shape ``(3, 2^M, 2^M, 2^M)``."""
        g = self.grid()
        return np.stack([E.decode(v, g) for v in self.velocity])


def stream_field(spec: CascadeSpec, m: int, j: int) -> T.TensorTrain:
    """Interleaved random QTT ``G^m_j`` with ``3m`` cores."""
    return random_qtt(3 * m, spec.rank, spec.seed, (TAG_TURBULENCE, m, j))


def _derivative_op(kernel: Kernel, m: int, M: int, axis: int, extra=None):
    ders = [0, 0, 0]
    ders[axis] += 1
    if extra is not None:
        ders[extra] += 1
    return build_tti_multidim_interleaved(kernel, 3, m, M - m, derivative=ders)


def turbulence_cascade(spec: CascadeSpec, layout: str = "interleaved") -> Cascade:
    """Build ``(v_x, v_y, v_z)`` in the interleaved or Tucker layout."""
    if layout not in ("interleaved", "tucker"):
        raise ConfigError(f"unknown layout {layout!r}")
    M = spec.scales
    kernel = bspline_cubic()
    if layout == "interleaved":
        vel = [T.zeros((2,) * (3 * M)) for _ in range(3)]
    else:
        vel = [None, None, None]
    for m in spec.levels:
        w = spec.weight(m)
        fields = [stream_field(spec, m, j) for j in range(3)]
        if layout == "interleaved":
            ops = [_derivative_op(kernel, m, M, i) for i in range(3)]
            for k, i, j, s in LEVI_CIVITA:
                term = apply_tti_interleaved(ops[i], fields[j], spec.tol)
                vel[k] = T.round(T.add(vel[k], T.scale(term, s * w)), spec.tol)
        else:
            gm = E.GridDescriptor.uniform(3, m, "interleaved")
            tuckers = [E.to_tucker(E.decode(f, gm), tol=spec.tol * 1e-2) for f in fields]
            for k, i, j, s in LEVI_CIVITA:
                ders = [0, 0, 0]
                ders[i] = 1
                term = apply_tti_tucker(tuckers[j], kernel, M - m, ders, spec.tol)
                term = E.tucker_scale(term, s * w)
                vel[k] = term if vel[k] is None else E.tucker_round(E.tucker_add(vel[k], term), spec.tol)
    scale = 1.0
    if spec.unit_energy:
        energy = sum(_norm(v) ** 2 for v in vel) / 2.0 ** (3 * M)
        scale = 1.0 / np.sqrt(energy) if energy > 0 else 1.0
        vel = [T.scale(v, scale) if layout == "interleaved" else E.tucker_scale(v, scale) for v in vel]
    return Cascade(spec, tuple(vel), layout, scale)


def _norm(v) -> float:
    if isinstance(v, E.TuckerTT):
        return float(np.linalg.norm(E.tucker_to_dense(v)))
    return T.norm2(v)


# --------------------------------------------------------------------------
# analytic evaluation of the continuous field
# --------------------------------------------------------------------------


def _spline_eval(values: np.ndarray, kernel: Kernel, x: np.ndarray, ders) -> np.ndarray:
    """Periodic tensor-product quasi-interpolant (or derivative) at points ``x``.

    ``values`` has shape ``(L, L, L)`` on ``[0, 1)^3``; ``x`` is ``(S, 3)``.
    """
    L = values.shape[0]
    u = x * L
    base = np.floor(u).astype(np.int64)
    t = u - base
    out = np.zeros(x.shape[0])
    offs = kernel.offsets
    w = []
    for ax in range(3):
        # phi^(d)(t - k) with chain factor L^d
        w.append(np.stack([kernel(t[:, ax] - k, ders[ax]) * L ** ders[ax] for k in offs], axis=1))
    for a, ka in enumerate(offs):
        for b, kb in enumerate(offs):
            for c, kc in enumerate(offs):
                v = values[(base[:, 0] + ka) % L, (base[:, 1] + kb) % L, (base[:, 2] + kc) % L]
                out += v * w[0][:, a] * w[1][:, b] * w[2][:, c]
    return out


def analytic_fields(spec: CascadeSpec, x: np.ndarray, scale: float = 1.0):
    """Velocity and its divergence at continuous points, straight from the spline pieces.

    Returns ``(v, div)`` with ``v`` of shape ``(3, S)``.
    """
    kernel = bspline_cubic()
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.zeros((3, x.shape[0]))
    div = np.zeros(x.shape[0])
    for m in spec.levels:
        w = spec.weight(m) * scale
        gm = E.GridDescriptor.uniform(3, m, "interleaved")
        dense = [E.decode(stream_field(spec, m, j), gm) for j in range(3)]
        for k, i, j, s in LEVI_CIVITA:
            ders = [0, 0, 0]
            ders[i] += 1
            v[k] += s * w * _spline_eval(dense[j], kernel, x, ders)
            ders[k] += 1
            div += s * w * _spline_eval(dense[j], kernel, x, ders)
    return v, div


def tt_divergence(spec: CascadeSpec) -> T.TensorTrain:
    """Divergence assembled in TT form from mixed second-derivative operators."""
    M = spec.scales
    kernel = bspline_cubic()
    div = T.zeros((2,) * (3 * M))
    for m in spec.levels:
        w = spec.weight(m)
        for k, i, j, s in LEVI_CIVITA:
            op = _derivative_op(kernel, m, M, i, extra=k)
            term = apply_tti_interleaved(op, stream_field(spec, m, j), spec.tol)
            div = T.round(T.add(div, T.scale(term, s * w)), spec.tol)
    return div
