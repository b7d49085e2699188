"""Procedural noise built from random QTTs and refinement operators.

Randomness comes from Philox counter-based generators keyed by
``(seed, stream...)`` so that every draw can be replayed by a dense
reference implementation.  Stream tags used here:

=========  ==========================================
tag        stream key
=========  ==========================================
1          random QTT cores: (1, *stream, core index)
2          midpoint displacement level l: (2, l)
3          value-noise lattice: (3,)
4          Perlin gradient table: (4,)
=========  ==========================================
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import tt as T
from .construct import polynomial_cores
from .errors import ConfigError
from .kernels import (
    Kernel,
    StencilSet,
    by_name,
    fade_poly,
    linear_kernel,
    poly_add,
    poly_mul,
    stencil_set,
)
from .tti import (
    apply_tti,
    apply_tti_interleaved,
    build_from_stencils,
    build_tti_1d,
    build_tti_multidim_interleaved,
    interleave_operators,
)
from .tt import TensorTrain

TAG_QTT, TAG_MIDPOINT, TAG_VALUE, TAG_PERLIN = 1, 2, 3, 4


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Independent Philox stream for ``(seed, stream)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class NoiseSpec:
    seed: int = 0
    scales: int = 8
    base_scales: int = 3
    octaves: int = 1
    persistence: float = 0.5
    roughness: float = 1.0
    decay: float = 0.5
    kernel: str = "keys"
    fade: str = "f5"
    dim: int = 1
    rank: int = 5

    def __post_init__(self):
        if not 0 < self.persistence < 1:
            raise ConfigError("persistence must lie in (0, 1)")
        if not 0 < self.decay < 1:
            raise ConfigError("decay must lie in (0, 1)")
        if self.octaves < 1 or self.octaves > self.scales - self.base_scales + 1:
            raise ConfigError("octave count exceeds available scales")
        if self.base_scales < 1 or self.base_scales > self.scales:
            raise ConfigError("base_scales must lie in [1, scales]")


# --------------------------------------------------------------------------
# random QTTs
# --------------------------------------------------------------------------


def random_ranks(s: int, chi: int) -> list[int]:
    return [1] + [min(chi, 2**k, 2 ** (s - k)) for k in range(1, s)] + [1]


def random_qtt(s: int, chi: int, seed: int, stream=(), calibrate: bool = True) -> TensorTrain:
    """QTT with ``s`` binary cores of iid normal entries and bond ``chi``.

    With ``calibrate`` the field is scaled to unit variance over the whole
    grid (computed exactly from the TT sum and norm).
    """
    if chi < 1 or s < 1:
        raise ConfigError("need chi >= 1 and s >= 1")
    stream = tuple(stream)
    r = random_ranks(s, chi)
    cores = [generator(seed, TAG_QTT, *stream, k).standard_normal((r[k], 2, r[k + 1])) for k in range(s)]
    tt = TensorTrain(cores)
    if not calibrate:
        return tt
    n = 2.0**s
    mean = T.total_sum(tt) / n
    var = T.norm2(tt) ** 2 / n - mean**2
    if var <= 0:
        return tt
    return T.scale(tt, 1.0 / np.sqrt(var))


def mask_odd(tt: TensorTrain) -> TensorTrain:
    """Zero every even site (last core sliced at 0 set to zero)."""
    cores = list(tt.cores)
    last = np.array(cores[-1])
    last[:, 0, :] = 0.0
    cores[-1] = last
    return TensorTrain(cores)


# --------------------------------------------------------------------------
# midpoint displacement
# --------------------------------------------------------------------------


def midpoint_displacements(level: int, seed: int, chi: int = 5) -> TensorTrain:
    """Level-``level`` perturbations on the odd sites of a ``2^level`` grid, unit RMS."""
    d = mask_odd(random_qtt(level, chi, seed, (TAG_MIDPOINT, level), calibrate=False))
    rms = T.norm2(d) / np.sqrt(2.0 ** (level - 1))
    return T.scale(d, 1.0 / rms) if rms > 0 else d


def linear_ramp(M: int, h0: float, hN: float) -> TensorTrain:
    return TensorTrain(polynomial_cores([h0, hN - h0], M))


def midpoint_displacement_tt(spec: NoiseSpec, h0: float = 0.0, hN: float = 0.0, tol=1e-12) -> TensorTrain:
    """Heights ``H[0..2^M - 1]`` of midpoint displacement on ``2^M`` cells.

    The right endpoint ``H[2^M] = hN`` lies outside the QTT; the linear
    refinement of each level uses zero-fill at that end so its
    perturbation is 0 there, as in the recursive algorithm.
    """
    if spec.dim != 1:
        raise ConfigError("midpoint displacement is one-dimensional")
    M = spec.scales
    if M < 2:
        raise ConfigError("midpoint displacement needs M >= 2")
    out = linear_ramp(M, h0, hN)
    hat = linear_kernel()
    for level in range(1, M + 1):
        amp = spec.roughness * spec.decay ** (level - 1)
        if amp == 0:
            continue
        disp = midpoint_displacements(level, spec.seed, spec.rank)
        op = build_tti_1d(hat, level, M - level, boundary="clamped")
        out = T.round(T.add(out, T.scale(apply_tti(op, disp), amp)), tol)
    return out


# --------------------------------------------------------------------------
# value noise
# --------------------------------------------------------------------------


def value_lattice(spec: NoiseSpec) -> TensorTrain:
    """Random lattice values, ``dim * base_scales`` cores (interleaved for dim > 1)."""
    return random_qtt(spec.dim * spec.base_scales, spec.rank, spec.seed, (TAG_VALUE,))


def value_noise_tt(spec: NoiseSpec, tol=1e-12) -> TensorTrain:
    kernel = by_name(spec.kernel)
    if kernel.q != 4 or kernel.degree != 3:
        raise ConfigError("value noise uses a four-point cubic kernel (keys, bspline3, mn:B,C)")
    lattice = value_lattice(spec)
    m = spec.scales - spec.base_scales
    if spec.dim == 1:
        return apply_tti(build_tti_1d(kernel, spec.base_scales, m), lattice, tol)
    op = build_tti_multidim_interleaved(kernel, spec.dim, spec.base_scales, m)
    return apply_tti_interleaved(op, lattice, tol)


# --------------------------------------------------------------------------
# Perlin
# --------------------------------------------------------------------------


def perlin_gradients(spec: NoiseSpec, unit: bool = False) -> np.ndarray:
    """Gradient table of shape ``(2^n0,) * dim + (dim,)``."""
    shape = (2**spec.base_scales,) * spec.dim + (spec.dim,)
    T.check_capacity(int(np.prod(shape)), "gradient table")
    g = generator(spec.seed, TAG_PERLIN).standard_normal(shape)
    if unit:
        g = g / np.linalg.norm(g, axis=-1, keepdims=True)
    return g


def perlin_stencils(fade: str = "f5") -> tuple[StencilSet, StencilSet]:
    """(gradient-axis stencil, blending stencil) on the unit cell.

    Along the gradient's own axis the corner contributions are
    ``(1 - f(u)) u`` and ``f(u) (u - 1)``; along the other axes they are
    ``1 - f(u)`` and ``f(u)``.
    """
    f = fade_poly(fade)
    one_minus_f = poly_add((Fraction(1),), tuple(-c for c in f))
    grad = {0: poly_mul(one_minus_f, (0, 1)), 1: poly_mul(f, (-1, 1))}
    blend = {0: one_minus_f, 1: f}
    deg = len(grad[0]) - 1
    to_float = lambda d: {k: [float(c) for c in v] for k, v in d.items()}  # noqa: E731
    return stencil_set(to_float(grad), deg), stencil_set(to_float(blend), deg)


def perlin_tt(spec: NoiseSpec, unit_gradients: bool = False, tol=1e-12) -> TensorTrain:
    """Gradient noise on ``2^M`` points per axis with a ``2^n0`` periodic lattice."""
    from .encoders import GridDescriptor, encode_dense

    d = spec.dim
    if d not in (1, 3):
        raise ConfigError("perlin_tt supports dim 1 or 3")
    n0 = spec.base_scales
    m = spec.scales - n0
    grads = perlin_gradients(spec, unit_gradients)
    grad_st, blend_st = perlin_stencils(spec.fade)
    if d == 1:
        g = T.tt_from_dense(grads[..., 0].reshape((2,) * n0))
        return apply_tti(build_from_stencils(grad_st, n0, m), g, tol)
    grid = GridDescriptor.uniform(d, n0, "interleaved")
    terms = []
    for c in range(d):
        parts = [build_from_stencils(grad_st if ax == c else blend_st, n0, m) for ax in range(d)]
        op = interleave_operators(parts)
        g = encode_dense(grads[..., c], grid)
        terms.append(apply_tti_interleaved(op, g, tol))
    return T.round(T.add_many(terms), tol)


# --------------------------------------------------------------------------
# fractal octaves
# --------------------------------------------------------------------------


def octave(base: TensorTrain, k: int, dim: int = 1) -> TensorTrain:
    """``n(2^k x)`` with periodic wrap: drop the last ``k*dim`` bits, prepend ones."""
    if k == 0:
        return base
    drop = k * dim
    if drop >= base.ndim:
        raise ConfigError("octave exceeds the available scales")
    fixed = T.fix_index(base, list(range(base.ndim - drop, base.ndim)), [0] * drop)
    return TensorTrain([np.ones((1, 2, 1))] * drop + list(fixed.cores))


def fractal_tt(base: TensorTrain, octaves: int, persistence: float, dim: int = 1, tol=1e-12) -> TensorTrain:
    """``sum_{k < O} alpha^k n(2^k x)`` from a base noise QTT."""
    if octaves < 1 or octaves * dim > base.ndim:
        raise ConfigError("octave count exceeds available scales")
    terms = [T.scale(octave(base, k, dim), persistence**k) for k in range(octaves)]
    return T.round(T.add_many(terms), tol)
