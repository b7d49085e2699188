"""Refinement operators: coarse shift MPO joined to fine polynomial MPS.

For a coarse QTT ``f`` with ``n`` cores and ``m`` extra scales the refined
tensor with ``n + m`` cores is

    y(a, b) = h^-deriv * sum_k f_{a+k} P^(k)(t_b),   t_b = sum_j b_j 2^-j,

where ``P^(k)`` are the kernel stencil polynomials (or their derivatives)
and ``h`` the coarse spacing.  The operator is assembled as ``n`` operator
cores (the ``q`` shifts stacked block-diagonally, ending in a one-hot bond
over offsets) followed by ``m`` vector cores (the stencil polynomials,
sharing everything but the first core).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tt as T
from .construct import polynomial_cores, shift_mpo
from .encoders import TuckerTT
from .errors import ConfigError, DimensionMismatch
from .kernels import Kernel, StencilSet, identity_stencils, stencils as kernel_stencils
from .tt import TensorTrain, TTOperator, Tolerance

BOUNDARIES = ("periodic", "clamped")
EDGE_MODES = ("zero", "edge", "reflect")


@dataclass(frozen=True)
class TTIOperator:
    coarse_cores: tuple
    fine_cores: tuple
    stencils: StencilSet
    derivative: int = 0
    boundary: str = "periodic"
    kernel: Kernel | None = None

    @property
    def n(self) -> int:
        return len(self.coarse_cores)

    @property
    def m(self) -> int:
        return len(self.fine_cores)

    @property
    def ranks(self) -> tuple:
        return (1,) + tuple(c.shape[-1] for c in self.coarse_cores + self.fine_cores)

    @property
    def coarse_ranks(self) -> tuple:
        """Bonds between coarse cores (excluding the open ends)."""
        return tuple(c.shape[-1] for c in self.coarse_cores[:-1])

    @property
    def interface_rank(self) -> int:
        return self.coarse_cores[-1].shape[-1]

    @property
    def fine_ranks(self) -> tuple:
        return tuple(c.shape[-1] for c in self.fine_cores[:-1])

    def op_cores(self) -> list[np.ndarray]:
        """All cores as 4-way operator cores; fine cores get a unit column."""
        return list(self.coarse_cores) + [c[:, :, None, :] for c in self.fine_cores]

    def as_operator(self) -> TTOperator:
        return TTOperator(self.op_cores())


# --------------------------------------------------------------------------
# shifts with optional folded boundary handling
# --------------------------------------------------------------------------


def _unit_mpo(row: int, col: int, N: int) -> TTOperator:
    cores = []
    for i in range(N):
        c = np.zeros((1, 2, 2, 1))
        c[0, (row >> (N - 1 - i)) & 1, (col >> (N - 1 - i)) & 1, 0] = 1.0
        cores.append(c)
    return TTOperator(cores)


def _source_index(j: int, size: int, edge_mode: str) -> int | None:
    """Where an out-of-range sample ``j`` takes its value from."""
    if 0 <= j < size:
        return j
    if edge_mode == "zero":
        return None
    if edge_mode == "edge":
        return min(max(j, 0), size - 1)
    if edge_mode == "reflect":
        period = 2 * (size - 1)
        j = abs(j) % period if period else 0
        return period - j if j >= size else j
    raise ConfigError(f"unknown edge mode {edge_mode!r}")


def boundary_shift(k: int, N: int, boundary: str = "periodic", edge_mode: str = "zero") -> TTOperator:
    """Operator with ``(A f)_a = f_{a+k}`` under the given boundary rule."""
    size = 2**N
    if abs(k) >= size:
        raise ConfigError(f"offset {k} does not fit a grid of {size} points")
    if boundary == "periodic":
        return shift_mpo("S", k % size, N)
    if boundary != "clamped":
        raise ConfigError(f"unknown boundary {boundary!r}")
    op = shift_mpo("L", k, N) if k >= 0 else shift_mpo("R", -k, N)
    if edge_mode == "zero" or k == 0:
        return op
    rows = range(size - k, size) if k > 0 else range(0, -k)
    for a in rows:
        src = _source_index(a + k, size, edge_mode)
        op = T.operator_add(op, _unit_mpo(a, src, N))
    return T.operator_round(op, 0.0)


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------


def _stack_shifts(shifts: Sequence[TTOperator]) -> list[np.ndarray]:
    """Block-diagonal concatenation ending in a one-hot bond over offsets."""
    q = len(shifts)
    n = shifts[0].ndim
    if n == 1:
        core = np.zeros((1, 2, 2, q))
        for j, s in enumerate(shifts):
            core[..., j] = s.cores[0][..., 0]
        return [core]
    cores = [np.concatenate([s.cores[0] for s in shifts], axis=3)]
    for i in range(1, n - 1):
        blocks = [s.cores[i] for s in shifts]
        rl = sum(b.shape[0] for b in blocks)
        rr = sum(b.shape[3] for b in blocks)
        c = np.zeros((rl, 2, 2, rr))
        x = y = 0
        for b in blocks:
            c[x : x + b.shape[0], :, :, y : y + b.shape[3]] = b
            x += b.shape[0]
            y += b.shape[3]
        cores.append(c)
    blocks = [s.cores[-1] for s in shifts]
    rl = sum(b.shape[0] for b in blocks)
    c = np.zeros((rl, 2, 2, q))
    x = 0
    for j, b in enumerate(blocks):
        c[x : x + b.shape[0], :, :, j] = b[..., 0]
        x += b.shape[0]
    cores.append(c)
    return cores


def _compress_open(cores: list[np.ndarray]) -> list[np.ndarray]:
    """Exact recompression of 4-way cores whose last right bond is open."""
    q = cores[-1].shape[3]
    merged = [c.reshape(c.shape[0], 4, c.shape[3]) for c in cores]
    merged.append(np.eye(q)[:, :, None])
    rounded = T.round(TensorTrain(merged), 0.0)
    out = [c.reshape(c.shape[0], 2, 2, c.shape[2]) for c in rounded.cores[:-1]]
    tail = rounded.cores[-1][:, :, 0]  # (r, q)
    out[-1] = np.tensordot(out[-1], tail, axes=(3, 0))
    return out


def build_from_stencils(
    st: StencilSet,
    n: int,
    m: int,
    boundary: str = "periodic",
    edge_mode: str = "zero",
    scale: float = 1.0,
    derivative: int = 0,
    kernel: Kernel | None = None,
) -> TTIOperator:
    """Assemble the refinement operator for an arbitrary stencil set."""
    if n < 1 or m < 0:
        raise ConfigError("need n >= 1 and m >= 0")
    if 2**n < len(st.offsets):
        raise ConfigError(f"stencil with {len(st.offsets)} points does not fit {2**n} coarse cells")
    if boundary not in BOUNDARIES:
        raise ConfigError(f"unknown boundary {boundary!r}")
    if edge_mode not in EDGE_MODES:
        raise ConfigError(f"unknown edge mode {edge_mode!r}")
    shifts = [boundary_shift(k, n, boundary, edge_mode) for k in st.offsets]
    coarse = _compress_open(_stack_shifts(shifts))
    coeffs = st.matrix() * scale  # (q, p+1)
    if m == 0:
        w = coeffs[:, 0]
        coarse[-1] = np.tensordot(coarse[-1], w, axes=(3, 0))[..., None]
        return TTIOperator(tuple(coarse), (), st, derivative, boundary, kernel)
    per_offset = [polynomial_cores(row, m) for row in coeffs]
    first = np.concatenate([pc[0] for pc in per_offset], axis=0)  # (q, 2, p+1) or (q, 2, 1)
    fine = [first] + list(per_offset[0][1:])
    return TTIOperator(tuple(coarse), tuple(fine), st, derivative, boundary, kernel)


def build_tti_1d(
    kernel: Kernel,
    n: int,
    m: int,
    derivative: int = 0,
    boundary: str = "periodic",
    spacing: float | None = None,
    edge_mode: str = "zero",
) -> TTIOperator:
    """Refinement operator for a kernel; derivatives scaled by ``spacing^-derivative``.

    ``spacing`` defaults to the coarse spacing ``2^-n`` of the unit interval.
    """
    st = kernel_stencils(kernel, derivative)
    h = 2.0**-n if spacing is None else float(spacing)
    return build_from_stencils(st, n, m, boundary, edge_mode, h**-derivative, derivative, kernel)


# --------------------------------------------------------------------------
# application
# --------------------------------------------------------------------------


def _apply_padded(op_cores, vec: TensorTrain, tol, stop: int) -> TensorTrain:
    """Zip-up an operator whose trailing cores have unit columns."""
    nv = vec.ndim
    if len(op_cores) < nv:
        raise DimensionMismatch("operator shorter than vector")
    for k in range(nv):
        if op_cores[k].shape[2] != vec.dims[k]:
            raise DimensionMismatch(f"operator column {op_cores[k].shape[2]} != vector dim {vec.dims[k]} at core {k}")
    for c in op_cores[nv:]:
        if c.shape[2] != 1:
            raise DimensionMismatch("vector has too few cores for this operator")
    pad = [np.ones((1, 1, 1))] * (len(op_cores) - nv)
    cores, carry = T.zipup(op_cores, list(vec.cores) + pad)
    cores[-1] = np.tensordot(cores[-1], carry, axes=(2, 0))
    return T.round(TensorTrain(cores), tol, stop=stop)


def apply_tti(op: TTIOperator, f: TensorTrain, tol: Tolerance | float | None = None) -> TensorTrain:
    """Refine ``f`` (``n`` binary cores) to ``n + m`` cores.

    One rounding pass at ``tol`` touches only the coarse bonds and the
    coarse/fine interface; the fine tail keeps its structural rank.
    """
    if f.ndim != op.n or any(d != 2 for d in f.dims):
        raise DimensionMismatch(f"expected a QTT with {op.n} binary cores, got dims {f.dims}")
    return _apply_padded(op.op_cores(), f, tol, stop=op.n)


def refine(f: TensorTrain, kernel: Kernel, m: int, derivative: int = 0, boundary: str = "periodic",
           tol: Tolerance | float | None = None, spacing: float | None = None, edge_mode: str = "zero") -> TensorTrain:
    op = build_tti_1d(kernel, f.ndim, m, derivative, boundary, spacing, edge_mode)
    return apply_tti(op, f, tol)


# --------------------------------------------------------------------------
# clamped boundary correction (1D)
# --------------------------------------------------------------------------


def clamped_boundary_correction(
    f: TensorTrain,
    kernel: Kernel | StencilSet,
    m: int,
    derivative: int = 0,
    boundary: str = "clamped",
    edge_mode: str = "edge",
    spacing: float | None = None,
) -> TensorTrain:
    """Correction turning zero-fill clamped refinement into ``edge_mode`` handling.

    The result is a sum of rank-1 coarse deltas at the ``q - 1`` boundary
    cells, each carrying a fine polynomial; its ranks are at most ``q``.
    """
    n = f.ndim
    st = kernel if isinstance(kernel, StencilSet) else kernel_stencils(kernel, derivative)
    h = 2.0**-n if spacing is None else float(spacing)
    out_dims = (2,) * (n + m)
    if boundary == "periodic" or edge_mode == "zero":
        return T.zeros(out_dims)
    size = 2**n
    coeffs = st.matrix() * h**-derivative
    terms = []
    cells = set(range(0, min(size, max(0, -min(st.offsets))))) | set(range(max(0, size - max(st.offsets)), size))
    for a in sorted(cells):
        poly = np.zeros(coeffs.shape[1])
        for row, k in enumerate(st.offsets):
            j = a + k
            if 0 <= j < size:
                continue
            src = _source_index(j, size, edge_mode)
            poly += T.tt_eval(f, [(src >> (n - 1 - i)) & 1 for i in range(n)]) * coeffs[row]
        if not np.any(poly):
            continue
        cores = []
        for i in range(n):
            c = np.zeros((1, 2, 1))
            c[0, (a >> (n - 1 - i)) & 1, 0] = 1.0
            cores.append(c)
        if m:
            cores += polynomial_cores(poly, m)
        else:
            cores[-1] = cores[-1] * poly[0]
        terms.append(TensorTrain(cores))
    if not terms:
        return T.zeros(out_dims)
    return T.round(T.add_many(terms), 0.0)


# --------------------------------------------------------------------------
# multidimensional (interleaved) operators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InterleavedTTIOperator:
    cores: tuple  # 4-way, scale-major / dimension-minor
    d: int
    n: int
    m: int
    parts: tuple  # the 1D operators

    @property
    def ranks(self) -> tuple:
        return (1,) + tuple(c.shape[-1] for c in self.cores)

    @property
    def coarse_ranks(self) -> tuple:
        return self.ranks[1 : self.d * self.n]

    @property
    def fine_ranks(self) -> tuple:
        return self.ranks[self.d * self.n + 1 : -1]

    def as_operator(self) -> TTOperator:
        return TTOperator(self.cores)


def _as_list(x, d):
    if isinstance(x, (list, tuple)):
        if len(x) != d:
            raise ConfigError(f"expected {d} per-dimension entries, got {len(x)}")
        return list(x)
    return [x] * d


def interleave_operators(parts: Sequence[TTIOperator]) -> InterleavedTTIOperator:
    """Pad each 1D operator with identities on the other dimensions' bonds."""
    d = len(parts)
    n, m = parts[0].n, parts[0].m
    if any(p.n != n or p.m != m for p in parts):
        raise ConfigError("interleaved layout needs equal coarse and fine scales in every dimension")
    per_dim = [p.op_cores() for p in parts]
    bonds = [[1] + [c.shape[3] for c in cores] for cores in per_dim]  # bonds[j][k]
    out = []
    for k in range(n + m):
        for j in range(d):
            g = per_dim[j][k]
            left = int(np.prod([bonds[i][k + 1] for i in range(j)], dtype=np.int64))
            right = int(np.prod([bonds[i][k] for i in range(j + 1, d)], dtype=np.int64))
            il, ir = np.eye(left), np.eye(right)
            core = np.einsum("ab,xijy,cd->axcijbyd", il, g, ir)
            x, y = g.shape[0], g.shape[3]
            out.append(core.reshape(left * x * right, g.shape[1], g.shape[2], left * y * right))
    return InterleavedTTIOperator(tuple(out), d, n, m, tuple(parts))


def build_tti_multidim_interleaved(
    kernel,
    d: int,
    n: int,
    m: int,
    derivative=0,
    boundary="periodic",
    spacing=None,
    edge_mode="zero",
) -> InterleavedTTIOperator:
    """d-dimensional operator for the interleaved layout.

    ``kernel``, ``derivative``, ``boundary`` and ``edge_mode`` may be given
    per dimension.  A :class:`StencilSet` can stand in for a kernel; the
    identity stencil with ``m = 0`` yields the identity operator.
    """
    ks = _as_list(kernel, d)
    ders = _as_list(derivative, d)
    bnds = _as_list(boundary, d)
    edges = _as_list(edge_mode, d)
    hs = _as_list(spacing, d)
    parts = []
    for j in range(d):
        if isinstance(ks[j], StencilSet):
            parts.append(build_from_stencils(ks[j], n, m, bnds[j], edges[j], 1.0, 0, None))
        else:
            parts.append(build_tti_1d(ks[j], n, m, ders[j], bnds[j], hs[j], edges[j]))
    return interleave_operators(parts)


def apply_tti_interleaved(op: InterleavedTTIOperator, f: TensorTrain, tol=None) -> TensorTrain:
    if f.ndim != op.d * op.n or any(x != 2 for x in f.dims):
        raise DimensionMismatch(f"expected {op.d * op.n} binary cores, got {f.ndim}")
    return _apply_padded(list(op.cores), f, tol, stop=op.d * op.n)


# --------------------------------------------------------------------------
# Tucker
# --------------------------------------------------------------------------


def apply_tti_factor(op: TTIOperator, factor: TensorTrain, tol=None) -> TensorTrain:
    """Refine a Tucker factor whose first mode is the Tucker leg."""
    r = factor.dims[0]
    if factor.ndim != op.n + 1:
        raise DimensionMismatch(f"factor has {factor.ndim - 1} binary cores, operator expects {op.n}")
    cores = [np.eye(r)[None, :, :, None]] + op.op_cores()
    return _apply_padded(cores, factor, tol, stop=op.n + 1)


def apply_tti_tucker(
    t: TuckerTT,
    kernel,
    m,
    derivative=0,
    tol=None,
    boundary="periodic",
    spacing=None,
    edge_mode="zero",
) -> TuckerTT:
    """Refine every factor independently; the core TT is untouched."""
    d = t.d
    ks, ms, ders = _as_list(kernel, d), _as_list(m, d), _as_list(derivative, d)
    bnds, hs, edges = _as_list(boundary, d), _as_list(spacing, d), _as_list(edge_mode, d)
    factors = []
    for j, f in enumerate(t.factors):
        n = f.ndim - 1
        if isinstance(ks[j], StencilSet):
            op = build_from_stencils(ks[j], n, ms[j], bnds[j], edges[j])
        else:
            op = build_tti_1d(ks[j], n, ms[j], ders[j], bnds[j], hs[j], edges[j])
        factors.append(apply_tti_factor(op, f, tol))
    return TuckerTT(t.core, tuple(factors))


def identity_operator_1d(n: int) -> TTIOperator:
    return build_from_stencils(identity_stencils(), n, 0)
