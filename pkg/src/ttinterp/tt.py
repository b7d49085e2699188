"""Tensor-train containers and their algebra.

A :class:`TensorTrain` stores a d-way tensor as cores ``G_k`` of shape
``(r_{k-1}, n_k, r_k)`` with ``r_0 = r_d = 1``; entry ``(i_1, ..., i_d)`` is
the matrix product ``G_1[:, i_1, :] @ ... @ G_d[:, i_d, :]``.  Index ``i_1``
is the most significant one, so ``to_dense`` returns a C-ordered array and a
length-``2**N`` vector reshaped to ``(2,) * N`` is its QTT view.

A :class:`TTOperator` stores a linear map with cores of shape
``(r_{k-1}, n_k, m_k, r_k)`` (row index first, column index second).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import CapacityError, ConfigError, DimensionMismatch

#: Upper bound on the number of entries any densifying operation may create.
MAX_DENSE_ELEMENTS = 2**26

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Tolerance:
    """Truncation request: relative Frobenius error and optional rank cap."""

    relative_epsilon: float = 0.0
    max_rank: int | None = None

    def __post_init__(self):
        if not self.relative_epsilon >= 0:
            raise ConfigError(f"relative_epsilon must be >= 0, got {self.relative_epsilon}")
        if self.max_rank is not None and self.max_rank < 1:
            raise ConfigError(f"max_rank must be >= 1, got {self.max_rank}")


LOSSLESS = Tolerance()


def as_tolerance(tol: Tolerance | float | None) -> Tolerance:
    if tol is None:
        return LOSSLESS
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def check_capacity(n_elements: int, what: str = "dense tensor") -> None:
    if n_elements > MAX_DENSE_ELEMENTS:
        raise CapacityError(
            f"{what} would hold {n_elements} entries (limit {MAX_DENSE_ELEMENTS})"
        )


def _svd(mat: np.ndarray):
    try:
        return scipy.linalg.svd(mat, full_matrices=False, check_finite=False)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(
            mat, full_matrices=False, check_finite=False, lapack_driver="gesvd"
        )


def _chop(s: np.ndarray, delta: float, max_rank: int | None = None, size: int | None = None) -> int:
    """Smallest rank r with ||s[r:]|| <= delta, ignoring noise-level values.

    Values below ``s[0] * size * eps`` are roundoff (the usual numerical-rank
    threshold), where ``size`` is the larger dimension of the factored matrix.
    """
    if s.size == 0 or s[0] == 0.0:
        return 1
    tail = np.sqrt(np.cumsum(s[::-1] ** 2))[::-1]  # tail[r] = ||s[r:]||
    r = s.size
    ok = np.nonzero(tail <= delta)[0]
    if ok.size:
        r = max(int(ok[0]), 1)
    floor = s[0] * max(size or s.size, s.size) * _EPS
    noise = int(np.count_nonzero(s > floor))
    r = min(r, max(noise, 1))
    if max_rank is not None:
        r = min(r, max_rank)
    return r


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class TensorTrain:
    """Immutable tensor train with open boundary ranks."""

    __slots__ = ("_cores",)

    def __init__(self, cores: Iterable[np.ndarray]):
        cores = tuple(_freeze(c) for c in cores)
        if not cores:
            raise ConfigError("a tensor train needs at least one core")
        for k, c in enumerate(cores):
            if c.ndim != 3:
                raise ConfigError(f"core {k} has {c.ndim} axes, expected 3")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise ConfigError("boundary ranks must be 1")
        for k in range(len(cores) - 1):
            if cores[k].shape[2] != cores[k + 1].shape[0]:
                raise DimensionMismatch(
                    f"rank mismatch between cores {k} and {k + 1}: "
                    f"{cores[k].shape[2]} != {cores[k + 1].shape[0]}"
                )
        self._cores = cores

    @property
    def cores(self) -> tuple[np.ndarray, ...]:
        return self._cores

    @property
    def ndim(self) -> int:
        return len(self._cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self._cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[2] for c in self._cores)

    @property
    def max_rank(self) -> int:
        return max(self.ranks)

    @property
    def parameter_count(self) -> int:
        return sum(c.size for c in self._cores)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def __repr__(self) -> str:
        return f"TensorTrain(dims={self.dims}, ranks={self.ranks})"

    def __len__(self) -> int:
        return len(self._cores)

    def __add__(self, other: TensorTrain) -> TensorTrain:
        return add(self, other)

    def __sub__(self, other: TensorTrain) -> TensorTrain:
        return add(self, scale(other, -1.0))

    def __neg__(self) -> TensorTrain:
        return scale(self, -1.0)

    def __mul__(self, c: float) -> TensorTrain:
        return scale(self, c)

    __rmul__ = __mul__

    def full(self) -> np.ndarray:
        return tt_to_dense(self)


def zeros(dims: Sequence[int]) -> TensorTrain:
    """Zero tensor: rank-1 cores filled with zeros."""
    return TensorTrain(np.zeros((1, n, 1)) for n in dims)


def ones(dims: Sequence[int]) -> TensorTrain:
    return TensorTrain(np.ones((1, n, 1)) for n in dims)


def delta(index: Sequence[int], dims: Sequence[int]) -> TensorTrain:
    """Rank-1 indicator of a single multi-index."""
    cores = []
    for i, n in zip(index, dims):
        c = np.zeros((1, n, 1))
        c[0, i, 0] = 1.0
        cores.append(c)
    return TensorTrain(cores)


def rank_one(vectors: Sequence[np.ndarray]) -> TensorTrain:
    """Outer product of the given vectors as a rank-1 TT."""
    return TensorTrain(np.asarray(v, dtype=float).reshape(1, -1, 1) for v in vectors)


# --------------------------------------------------------------------------
# dense conversion and evaluation
# --------------------------------------------------------------------------


def tt_from_dense(data: np.ndarray, tol: Tolerance | float | None = None) -> TensorTrain:
    """TT-SVD: sequential truncated SVDs of the left-to-right unfoldings.

    Each of the ``d - 1`` truncations discards at most
    ``eps * ||data|| / sqrt(d - 1)`` in Frobenius norm, so the total relative
    error is bounded by ``eps``.
    """
    tol = as_tolerance(tol)
    data = np.asarray(data, dtype=np.float64)
    if data.size == 0:
        raise ConfigError("cannot decompose an empty array")
    check_capacity(data.size)
    dims = data.shape if data.ndim else (1,)
    d = len(dims)
    if d == 1:
        return TensorTrain([data.reshape(1, dims[0], 1)])
    norm = float(np.linalg.norm(data))
    if norm == 0.0:
        return zeros(dims)
    delta_k = tol.relative_epsilon * norm / math.sqrt(d - 1)
    cores = []
    rest = data.reshape(dims[0], -1)
    r_prev = 1
    for k in range(d - 1):
        mat = rest.reshape(r_prev * dims[k], -1)
        u, s, vt = _svd(mat)
        r = _chop(s, delta_k, tol.max_rank, max(mat.shape))
        cores.append(u[:, :r].reshape(r_prev, dims[k], r))
        rest = s[:r, None] * vt[:r]
        r_prev = r
    cores.append(rest.reshape(r_prev, dims[-1], 1))
    return TensorTrain(cores)


def tt_to_dense(tt: TensorTrain) -> np.ndarray:
    """Contract all cores into a C-ordered array of shape ``tt.dims``."""
    check_capacity(tt.size)
    out = tt.cores[0].reshape(tt.dims[0], -1)
    for c in tt.cores[1:]:
        out = (out @ c.reshape(c.shape[0], -1)).reshape(-1, c.shape[2])
    return out.reshape(tt.dims)


def _check_index(tt: TensorTrain, index: Sequence[int]) -> None:
    if len(index) != tt.ndim:
        raise DimensionMismatch(f"index has {len(index)} entries, tensor has {tt.ndim} modes")
    for k, (i, n) in enumerate(zip(index, tt.dims)):
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for mode {k} of size {n}")


def tt_eval(tt: TensorTrain, index: Sequence[int]) -> float:
    """Single entry via the core matrix product, O(d r^2)."""
    index = [int(i) for i in index]
    _check_index(tt, index)
    v = tt.cores[0][:, index[0], :]
    for c, i in zip(tt.cores[1:], index[1:]):
        v = v @ c[:, i, :]
    return float(v[0, 0])


def tt_eval_many(tt: TensorTrain, indices: np.ndarray) -> np.ndarray:
    """Entries at a batch of multi-indices given as an ``(S, d)`` integer array."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim == 1:
        idx = idx[None, :]
    if idx.shape[1] != tt.ndim:
        raise DimensionMismatch(f"indices have {idx.shape[1]} columns, tensor has {tt.ndim} modes")
    if np.any(idx < 0) or np.any(idx >= np.asarray(tt.dims)):
        raise IndexError("index out of range")
    v = tt.cores[0][0, idx[:, 0], :]
    for k in range(1, tt.ndim):
        slices = tt.cores[k][:, idx[:, k], :]  # (r0, S, r1)
        v = np.einsum("sa,asb->sb", v, slices)
    return v[:, 0]


# --------------------------------------------------------------------------
# rounding
# --------------------------------------------------------------------------


def orthogonalize_right(cores: list[np.ndarray], stop: int = 0) -> list[np.ndarray]:
    """Right-orthogonalize cores ``d-1 .. stop+1`` in place of a core list."""
    cores = list(cores)
    for k in range(len(cores) - 1, stop, -1):
        r0, n, r1 = cores[k].shape
        q, r = np.linalg.qr(cores[k].reshape(r0, n * r1).T)
        cores[k] = q.T.reshape(-1, n, r1)
        cores[k - 1] = np.tensordot(cores[k - 1], r.T, axes=(2, 0))
    return cores


def orthogonalize_left(cores: list[np.ndarray], stop: int | None = None) -> list[np.ndarray]:
    """Left-orthogonalize cores ``0 .. stop-1``."""
    cores = list(cores)
    stop = len(cores) - 1 if stop is None else stop
    for k in range(stop):
        r0, n, r1 = cores[k].shape
        q, r = np.linalg.qr(cores[k].reshape(r0 * n, r1))
        cores[k] = q.reshape(r0, n, -1)
        cores[k + 1] = np.tensordot(r, cores[k + 1], axes=(1, 0))
    return cores


def round(tt: TensorTrain, tol: Tolerance | float | None = None, stop: int | None = None) -> TensorTrain:
    """Recompress to the requested relative accuracy.

    Sweeps right-to-left with QR (orthogonalization), then left-to-right with
    truncated SVDs.  Only bonds ``1 .. stop`` (bond ``b`` joins cores ``b-1``
    and ``b``) are truncated; by default all of them.  With the default stop
    every core except the last ends up left-orthogonal.
    """
    tol = as_tolerance(tol)
    d = tt.ndim
    if d == 1:
        return tt
    stop = d - 1 if stop is None else min(stop, d - 1)
    if stop < 1:
        return tt
    cores = orthogonalize_right(list(tt.cores))
    norm = float(np.linalg.norm(cores[0]))
    if norm == 0.0:
        return zeros(tt.dims)
    delta_k = tol.relative_epsilon * norm / math.sqrt(stop)
    for k in range(stop):
        r0, n, r1 = cores[k].shape
        u, s, vt = _svd(cores[k].reshape(r0 * n, r1))
        r = _chop(s, delta_k, tol.max_rank, r0 * n)
        cores[k] = u[:, :r].reshape(r0, n, r)
        cores[k + 1] = np.tensordot(s[:r, None] * vt[:r], cores[k + 1], axes=(1, 0))
    return TensorTrain(cores)


# --------------------------------------------------------------------------
# arithmetic
# --------------------------------------------------------------------------


def _check_same_dims(a: TensorTrain, b: TensorTrain) -> None:
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims differ: {a.dims} vs {b.dims}")


def add(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Exact sum; interior ranks add, boundary cores are concatenated."""
    _check_same_dims(a, b)
    d = a.ndim
    if d == 1:
        return TensorTrain([a.cores[0] + b.cores[0]])
    cores = [np.concatenate([a.cores[0], b.cores[0]], axis=2)]
    for k in range(1, d - 1):
        ca, cb = a.cores[k], b.cores[k]
        c = np.zeros((ca.shape[0] + cb.shape[0], ca.shape[1], ca.shape[2] + cb.shape[2]))
        c[: ca.shape[0], :, : ca.shape[2]] = ca
        c[ca.shape[0] :, :, ca.shape[2] :] = cb
        cores.append(c)
    cores.append(np.concatenate([a.cores[-1], b.cores[-1]], axis=0))
    return TensorTrain(cores)


def add_many(terms: Sequence[TensorTrain]) -> TensorTrain:
    out = terms[0]
    for t in terms[1:]:
        out = add(out, t)
    return out


def scale(a: TensorTrain, c: float) -> TensorTrain:
    cores = list(a.cores)
    cores[0] = cores[0] * float(c)
    return TensorTrain(cores)


def hadamard(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Elementwise product; ranks multiply."""
    _check_same_dims(a, b)
    cores = []
    for ca, cb in zip(a.cores, b.cores):
        c = np.einsum("aib,cid->acibd", ca, cb)
        cores.append(c.reshape(ca.shape[0] * cb.shape[0], ca.shape[1], ca.shape[2] * cb.shape[2]))
    return TensorTrain(cores)


def dot(a: TensorTrain, b: TensorTrain) -> float:
    """Euclidean inner product by left-to-right environment contraction."""
    _check_same_dims(a, b)
    env = np.ones((1, 1))
    for ca, cb in zip(a.cores, b.cores):
        tmp = np.tensordot(env, ca, axes=(0, 0))  # (rb, n, ra')
        env = np.tensordot(tmp, cb, axes=([0, 1], [0, 1]))  # (ra', rb')
    return float(env[0, 0])


def norm2(a: TensorTrain) -> float:
    """Euclidean norm without densification."""
    cores = orthogonalize_right(list(a.cores))
    return float(np.linalg.norm(cores[0]))


def total_sum(a: TensorTrain) -> float:
    v = np.ones((1,))
    for c in a.cores:
        v = v @ c.sum(axis=1)
    return float(v[0])


def kron(a: TensorTrain, b: TensorTrain) -> TensorTrain:
    """Tensor product; the modes of ``b`` follow those of ``a``."""
    return TensorTrain(a.cores + b.cores)


def fix_index(tt: TensorTrain, positions: Sequence[int], values: Sequence[int]) -> TensorTrain:
    """Slice the given modes at fixed indices, absorbing them into neighbours."""
    fixed = dict(zip(positions, values))
    if len(fixed) >= tt.ndim:
        raise ConfigError("cannot fix every mode")
    kept: list[np.ndarray] = []
    pending = np.ones((1, 1))
    for k, c in enumerate(tt.cores):
        if k in fixed:
            pending = pending @ c[:, fixed[k], :]
        else:
            kept.append(np.tensordot(pending, c, axes=(1, 0)))
            pending = None
            pending = np.eye(c.shape[2])
    kept[-1] = np.tensordot(kept[-1], pending, axes=(2, 0))
    return TensorTrain(kept)


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------


class TTOperator:
    """Immutable operator in TT (MPO) form, cores ``(r, n_row, m_col, r')``."""

    __slots__ = ("_cores",)

    def __init__(self, cores: Iterable[np.ndarray]):
        cores = tuple(_freeze(c) for c in cores)
        if not cores:
            raise ConfigError("an operator needs at least one core")
        for k, c in enumerate(cores):
            if c.ndim != 4:
                raise ConfigError(f"operator core {k} has {c.ndim} axes, expected 4")
        if cores[0].shape[0] != 1 or cores[-1].shape[3] != 1:
            raise ConfigError("boundary ranks must be 1")
        for k in range(len(cores) - 1):
            if cores[k].shape[3] != cores[k + 1].shape[0]:
                raise DimensionMismatch(f"rank mismatch between operator cores {k} and {k + 1}")
        self._cores = cores

    @property
    def cores(self) -> tuple[np.ndarray, ...]:
        return self._cores

    @property
    def ndim(self) -> int:
        return len(self._cores)

    @property
    def row_dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self._cores)

    @property
    def col_dims(self) -> tuple[int, ...]:
        return tuple(c.shape[2] for c in self._cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[3] for c in self._cores)

    @property
    def max_rank(self) -> int:
        return max(self.ranks)

    def __repr__(self) -> str:
        return f"TTOperator(rows={self.row_dims}, cols={self.col_dims}, ranks={self.ranks})"

    def __add__(self, other: TTOperator) -> TTOperator:
        return operator_add(self, other)

    def __sub__(self, other: TTOperator) -> TTOperator:
        return operator_add(self, operator_scale(other, -1.0))

    def __mul__(self, c: float) -> TTOperator:
        return operator_scale(self, c)

    __rmul__ = __mul__

    def __matmul__(self, v):
        if isinstance(v, TensorTrain):
            return apply_operator(self, v)
        return NotImplemented

    def as_tt(self) -> TensorTrain:
        """View with merged (row, col) physical modes."""
        return TensorTrain(c.reshape(c.shape[0], c.shape[1] * c.shape[2], c.shape[3]) for c in self._cores)

    def full(self) -> np.ndarray:
        return operator_to_dense(self)


def operator_from_tt(tt: TensorTrain, row_dims: Sequence[int], col_dims: Sequence[int]) -> TTOperator:
    return TTOperator(
        c.reshape(c.shape[0], n, m, c.shape[2]) for c, n, m in zip(tt.cores, row_dims, col_dims)
    )


def identity_operator(dims: Sequence[int]) -> TTOperator:
    return TTOperator(np.eye(n).reshape(1, n, n, 1) for n in dims)


def operator_to_dense(op: TTOperator) -> np.ndarray:
    """Dense matrix of shape ``(prod(row_dims), prod(col_dims))``."""
    rows, cols = math.prod(op.row_dims), math.prod(op.col_dims)
    check_capacity(rows * cols, "dense operator")
    out = np.ones((1, 1, 1))  # (rows_so_far, cols_so_far, r)
    for c in op.cores:
        out = np.einsum("xya,aijb->xiyjb", out, c)
        out = out.reshape(out.shape[0] * out.shape[1], out.shape[2] * out.shape[3], out.shape[4])
    return out[:, :, 0]


def operator_from_dense(
    matrix: np.ndarray,
    row_dims: Sequence[int],
    col_dims: Sequence[int],
    tol: Tolerance | float | None = None,
) -> TTOperator:
    d = len(row_dims)
    t = np.asarray(matrix, dtype=float).reshape(tuple(row_dims) + tuple(col_dims))
    perm = [ax for k in range(d) for ax in (k, d + k)]
    t = t.transpose(perm).reshape([n * m for n, m in zip(row_dims, col_dims)])
    return operator_from_tt(tt_from_dense(t, tol), row_dims, col_dims)


def operator_add(a: TTOperator, b: TTOperator) -> TTOperator:
    if a.row_dims != b.row_dims or a.col_dims != b.col_dims:
        raise DimensionMismatch("operator dimensions differ")
    s = add(a.as_tt(), b.as_tt())
    return operator_from_tt(s, a.row_dims, a.col_dims)


def operator_scale(a: TTOperator, c: float) -> TTOperator:
    cores = list(a.cores)
    cores[0] = cores[0] * float(c)
    return TTOperator(cores)


def operator_round(a: TTOperator, tol: Tolerance | float | None = None) -> TTOperator:
    return operator_from_tt(round(a.as_tt(), tol), a.row_dims, a.col_dims)


def operator_kron(a: TTOperator, b: TTOperator) -> TTOperator:
    return TTOperator(a.cores + b.cores)


def operator_transpose(a: TTOperator) -> TTOperator:
    return TTOperator(c.transpose(0, 2, 1, 3) for c in a.cores)


def _contract_core(op_core: np.ndarray, vec_core: np.ndarray) -> np.ndarray:
    """Merge one operator core with one vector core; bond = op (x) vec."""
    ra, n, m, rb = op_core.shape
    sa, _, sb = vec_core.shape
    c = np.einsum("aijb,sjt->asibt", op_core, vec_core)
    return c.reshape(ra * sa, n, rb * sb)


def zipup(
    op_cores: Sequence[np.ndarray],
    vec_cores: Sequence[np.ndarray],
    carry: np.ndarray | None = None,
    cut: float = 1e-14,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Contract operator and vector cores left to right with on-the-fly SVD.

    ``carry`` maps the incoming (already emitted) bond to the product bond
    ``(op_rank, vec_rank)`` flattened.  Singular values below
    ``cut * sigma_max`` are dropped at each step.  Returns the emitted cores
    and the final carry of shape ``(r_new, op_rank_out * vec_rank_out)``.
    """
    out = []
    if carry is None:
        carry = np.ones((1, 1))
    for oc, vc in zip(op_cores, vec_cores):
        ra, n, m, rb = oc.shape
        sa, _, sb = vc.shape
        p = carry.shape[0]
        c = carry.reshape(p, ra, sa)
        tmp = np.tensordot(c, vc, axes=(2, 0))  # (p, ra, m, sb)
        tmp = np.tensordot(tmp, oc, axes=([1, 2], [0, 2]))  # (p, sb, n, rb)
        tmp = tmp.transpose(0, 2, 3, 1).reshape(p * n, rb * sb)
        u, s, vt = _svd(tmp)
        r = max(int(np.count_nonzero(s > cut * s[0])), 1) if s.size and s[0] > 0 else 1
        out.append(u[:, :r].reshape(p, n, r))
        carry = s[:r, None] * vt[:r]
    return out, carry


def apply_operator(
    op: TTOperator,
    v: TensorTrain,
    tol: Tolerance | float | None = None,
    method: str = "zipup",
) -> TensorTrain:
    """Matrix-vector product ``op @ v`` followed by rounding at ``tol``.

    ``method="naive"`` forms the exact product with ranks ``r_op * r_v``
    before rounding; ``"zipup"`` compresses while contracting.
    """
    if op.col_dims != v.dims:
        raise DimensionMismatch(f"operator columns {op.col_dims} do not match vector dims {v.dims}")
    if method == "naive":
        prod = TensorTrain(_contract_core(o, c) for o, c in zip(op.cores, v.cores))
        return round(prod, tol)
    if method != "zipup":
        raise ConfigError(f"unknown apply method {method!r}")
    cores, carry = zipup(op.cores, v.cores)
    cores[-1] = np.tensordot(cores[-1], carry, axes=(2, 0))
    return round(TensorTrain(cores), tol)
