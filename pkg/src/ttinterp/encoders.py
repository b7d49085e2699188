"""Grid sampling and the three multivariate QTT layouts.

Binary indices are most-significant-bit first: grid index ``i`` of a
dimension with ``N`` scales has bits ``a_1..a_N`` with ``i = sum a_k 2^(N-k)``.

* ``plain``: all bits of dimension 1, then all bits of dimension 2, ...
* ``interleaved``: scale-major, ``(a_{1,1}, a_{2,1}, .., a_{d,1}, a_{1,2}, ..)``.
* ``tucker``: a TT over Tucker legs plus one QTT factor per dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tt as T
from .errors import ConfigError, DimensionMismatch, FormatError
from .tt import TensorTrain, Tolerance, as_tolerance

LAYOUTS = ("plain", "interleaved", "tucker")


@dataclass(frozen=True)
class GridDescriptor:
    scales: tuple
    domain: tuple = ()
    layout: str = "plain"
    periodic: tuple = ()

    def __post_init__(self):
        scales = tuple(int(s) for s in np.atleast_1d(self.scales))
        object.__setattr__(self, "scales", scales)
        d = len(scales)
        if any(s < 1 for s in scales):
            raise ConfigError("each dimension needs at least one scale")
        dom = tuple(tuple(float(v) for v in ab) for ab in self.domain) if self.domain else ((0.0, 1.0),) * d
        if len(dom) != d or any(b <= a for a, b in dom):
            raise ConfigError(f"bad domain {self.domain!r} for {d} dimensions")
        object.__setattr__(self, "domain", dom)
        per = tuple(bool(p) for p in self.periodic) if self.periodic else (True,) * d
        if len(per) != d:
            raise ConfigError("periodic flags must match the dimension count")
        object.__setattr__(self, "periodic", per)
        if self.layout not in LAYOUTS:
            raise ConfigError(f"unknown layout {self.layout!r}")
        if self.layout == "interleaved" and len(set(scales)) > 1:
            raise ConfigError("interleaved layout needs equal scales in every dimension")

    @classmethod
    def uniform(cls, d: int, N: int, layout: str = "plain", **kw) -> "GridDescriptor":
        return cls((N,) * d, layout=layout, **kw)

    @property
    def d(self) -> int:
        return len(self.scales)

    @property
    def shape(self) -> tuple:
        return tuple(2**n for n in self.scales)

    @property
    def spacing(self) -> tuple:
        return tuple((b - a) / 2**n for (a, b), n in zip(self.domain, self.scales))

    @property
    def num_points(self) -> int:
        return math.prod(self.shape)

    def axis(self, m: int) -> np.ndarray:
        a, _ = self.domain[m]
        return a + np.arange(self.shape[m]) * self.spacing[m]

    def refined(self, extra) -> "GridDescriptor":
        extra = np.broadcast_to(np.atleast_1d(extra), (self.d,))
        return GridDescriptor(
            tuple(n + int(e) for n, e in zip(self.scales, extra)), self.domain, self.layout, self.periodic
        )

    def with_layout(self, layout: str) -> "GridDescriptor":
        return GridDescriptor(self.scales, self.domain, layout, self.periodic)

    def to_text(self) -> str:
        lines = [
            f"dims={self.d}",
            "scales=" + ",".join(map(str, self.scales)),
            "domain=" + ";".join(f"{a!r},{b!r}" for a, b in self.domain),
            f"layout={self.layout}",
            "periodic=" + ",".join(str(int(p)) for p in self.periodic),
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridDescriptor":
        from .io import parse_header

        kv = parse_header(text)
        try:
            scales = tuple(int(s) for s in kv["scales"].split(","))
            domain = tuple(tuple(float(v) for v in part.split(",")) for part in kv["domain"].split(";"))
            periodic = tuple(bool(int(p)) for p in kv.get("periodic", "").split(",") if p)
            grid = cls(scales, domain, kv.get("layout", "plain"), periodic)
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad grid header: {exc}") from exc
        if "dims" in kv and int(kv["dims"]) != grid.d:
            raise FormatError("dims field disagrees with scales")
        return grid


# --------------------------------------------------------------------------
# bit permutations
# --------------------------------------------------------------------------


def interleave_order(d: int, N: int) -> list[int]:
    """Axis permutation from plain ``(m, k)`` order to scale-major order."""
    return [m * N + k for k in range(N) for m in range(d)]


def interleave_bits(index: Sequence[int], N: int) -> int:
    """Map per-dimension indices to the flat index in the interleaved layout."""
    d = len(index)
    out = 0
    for k in range(N):
        for m in range(d):
            out = (out << 1) | ((int(index[m]) >> (N - 1 - k)) & 1)
    return out


def deinterleave_bits(flat: int, d: int, N: int) -> tuple[int, ...]:
    idx = [0] * d
    pos = d * N
    for k in range(N):
        for m in range(d):
            pos -= 1
            bit = (int(flat) >> pos) & 1
            idx[m] = (idx[m] << 1) | bit
    return tuple(idx)


def index_bits(index: Sequence[int], grid: GridDescriptor) -> tuple[int, ...]:
    """Binary core indices of a grid point in the grid's layout (plain/interleaved)."""
    bits_per_dim = [[(int(i) >> (n - 1 - k)) & 1 for k in range(n)] for i, n in zip(index, grid.scales)]
    if grid.layout == "interleaved":
        N = grid.scales[0]
        return tuple(bits_per_dim[m][k] for k in range(N) for m in range(grid.d))
    return tuple(b for bits in bits_per_dim for b in bits)


def index_bits_many(indices: np.ndarray, grid: GridDescriptor) -> np.ndarray:
    """Vectorized :func:`index_bits` for an ``(S, d)`` index array."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1, grid.d)
    cols = []
    for m, n in enumerate(grid.scales):
        cols.append([(idx[:, m] >> (n - 1 - k)) & 1 for k in range(n)])
    if grid.layout == "interleaved":
        N = grid.scales[0]
        return np.stack([cols[m][k] for k in range(N) for m in range(grid.d)], axis=1)
    return np.stack([c for per in cols for c in per], axis=1)


def _to_bits_tensor(dense: np.ndarray, grid: GridDescriptor) -> np.ndarray:
    dense = np.asarray(dense, dtype=float)
    if dense.shape != grid.shape:
        raise DimensionMismatch(f"array shape {dense.shape} does not match grid {grid.shape}")
    t = dense.reshape((2,) * sum(grid.scales))
    if grid.layout == "interleaved":
        t = t.transpose(interleave_order(grid.d, grid.scales[0]))
    return t


def _from_bits_tensor(t: np.ndarray, grid: GridDescriptor) -> np.ndarray:
    if grid.layout == "interleaved":
        t = t.transpose(np.argsort(interleave_order(grid.d, grid.scales[0])))
    return np.ascontiguousarray(t).reshape(grid.shape)


# --------------------------------------------------------------------------
# sampling and encoding
# --------------------------------------------------------------------------


def sample(f: Callable, grid: GridDescriptor) -> np.ndarray:
    """Evaluate ``f(x_1, ..., x_d)`` on the full grid (ij indexing)."""
    T.check_capacity(grid.num_points, "sampled grid")
    axes = [grid.axis(m) for m in range(grid.d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(f(*mesh), dtype=float)
    return np.broadcast_to(vals, grid.shape).copy()


def encode_dense(dense: np.ndarray, grid: GridDescriptor, tol: Tolerance | float | None = None):
    """Compress a sampled grid into the grid's layout."""
    if grid.layout == "tucker":
        return to_tucker(dense, grid, tol)
    return T.tt_from_dense(_to_bits_tensor(dense, grid), tol)


def encode_function(f: Callable, grid: GridDescriptor, tol: Tolerance | float | None = None):
    return encode_dense(sample(f, grid), grid, tol)


def interleave(dense: np.ndarray, grid: GridDescriptor, tol: Tolerance | float | None = None) -> TensorTrain:
    if len(set(grid.scales)) > 1:
        raise ConfigError("interleaving needs equal scales in every dimension")
    return T.tt_from_dense(_to_bits_tensor(dense, grid.with_layout("interleaved")), tol)


def deinterleave(tt: TensorTrain, grid: GridDescriptor) -> np.ndarray:
    return _from_bits_tensor(T.tt_to_dense(tt), grid.with_layout("interleaved"))


def decode(obj, grid: GridDescriptor) -> np.ndarray:
    """Dense grid array from any layout."""
    if isinstance(obj, TuckerTT):
        return tucker_to_dense(obj)
    if obj.ndim != sum(grid.scales):
        raise DimensionMismatch(f"TT has {obj.ndim} cores, grid needs {sum(grid.scales)}")
    return _from_bits_tensor(T.tt_to_dense(obj), grid)


def bundle_scales(tt: TensorTrain, d: int) -> TensorTrain:
    """Merge each run of ``d`` consecutive cores into one core of size ``2^d``."""
    if tt.ndim % d:
        raise DimensionMismatch("core count is not a multiple of d")
    cores = []
    for s in range(0, tt.ndim, d):
        c = tt.cores[s]
        for nxt in tt.cores[s + 1 : s + d]:
            c = np.tensordot(c, nxt, axes=(c.ndim - 1, 0))
        cores.append(c.reshape(c.shape[0], -1, c.shape[-1]))
    return TensorTrain(cores)


# --------------------------------------------------------------------------
# Tucker
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TuckerTT:
    """Core TT over Tucker legs plus per-dimension factor QTTs.

    ``factors[m]`` has dims ``(r_m, 2, ..., 2)``; its first mode is the
    Tucker leg, the remaining ones the binary digits of grid dimension m.
    """

    core: TensorTrain
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) != self.core.ndim:
            raise DimensionMismatch("one factor per Tucker leg is required")
        for m, (r, f) in enumerate(zip(self.core.dims, self.factors)):
            if f.dims[0] != r:
                raise DimensionMismatch(f"factor {m} leg size {f.dims[0]} != core leg {r}")

    @property
    def d(self) -> int:
        return self.core.ndim

    @property
    def tucker_ranks(self) -> tuple:
        return self.core.dims

    @property
    def scales(self) -> tuple:
        return tuple(f.ndim - 1 for f in self.factors)

    @property
    def parameter_count(self) -> int:
        return self.core.parameter_count + sum(f.parameter_count for f in self.factors)

    @property
    def max_rank(self) -> int:
        return max([self.core.max_rank] + [f.max_rank for f in self.factors])

    def factor_matrix(self, m: int) -> np.ndarray:
        """Dense factor of shape ``(2^N_m, r_m)``."""
        f = T.tt_to_dense(self.factors[m])
        return f.reshape(f.shape[0], -1).T

    def to_qtt(self) -> TensorTrain:
        """1D degeneration: contract the single leg into its factor."""
        if self.d != 1:
            raise ConfigError("only a one-dimensional Tucker tensor is a plain QTT")
        g = self.core.cores[0][0, :, 0]
        f = self.factors[0]
        first = np.tensordot(g, f.cores[0][0], axes=(0, 0))  # (s,)
        second = np.tensordot(first, f.cores[1], axes=(0, 0))[None]
        return TensorTrain((second,) + f.cores[2:])

    def full(self) -> np.ndarray:
        return tucker_to_dense(self)


def _leg_rank(s: np.ndarray, delta: float) -> int:
    return T._chop(s, delta)


def to_tucker(dense: np.ndarray, grid: GridDescriptor | None = None, tol: Tolerance | float | None = None) -> TuckerTT:
    """HOSVD, then TT-SVD of the core and QTT compression of each factor.

    The relative error budget is split: half for the HOSVD truncation, a
    quarter for the core TT, a quarter for the factor QTTs.
    """
    tol = as_tolerance(tol)
    a = np.asarray(dense, dtype=float)
    T.check_capacity(a.size)
    d = a.ndim
    for n in a.shape:
        if n & (n - 1) or n < 2:
            raise ConfigError(f"dimension {n} is not a power of two >= 2")
    if grid is not None and grid.shape != a.shape:
        raise DimensionMismatch("array does not match grid")
    norm = float(np.linalg.norm(a))
    eps = tol.relative_epsilon
    delta_h = 0.5 * eps * norm / math.sqrt(d)
    us = []
    core = a
    for m in range(d):
        unf = np.moveaxis(a, m, 0).reshape(a.shape[m], -1)
        u, s, _ = T._svd(unf)
        r = _leg_rank(s, delta_h)
        if tol.max_rank is not None:
            r = min(r, tol.max_rank)
        us.append(u[:, :r])
    for m, u in enumerate(us):
        core = np.moveaxis(np.tensordot(core, u, axes=(m, 0)), -1, m)
    core_tt = T.tt_from_dense(core, Tolerance(0.25 * eps, tol.max_rank))
    factors = []
    for u in us:
        N = int(round(math.log2(u.shape[0])))
        r = u.shape[1]
        ft = u.T.reshape((r,) + (2,) * N)
        ftol = 0.25 * eps / math.sqrt(d * r)
        factors.append(T.tt_from_dense(ft, Tolerance(ftol, tol.max_rank)))
    return TuckerTT(core_tt, tuple(factors))


def tucker_to_dense(t: TuckerTT) -> np.ndarray:
    shape = [2**n for n in t.scales]
    T.check_capacity(math.prod(shape))
    out = T.tt_to_dense(t.core)
    for m in range(t.d):
        out = np.moveaxis(np.tensordot(out, t.factor_matrix(m), axes=(m, 1)), -1, m)
    return out


def _absorb_factor_heads(t: TuckerTT) -> tuple[list[np.ndarray], list[list[np.ndarray]]]:
    """Make every factor an isometry on its leg; push the rest into the core."""
    core = list(t.core.cores)
    factors = []
    for m, f in enumerate(t.factors):
        fc = T.orthogonalize_right(list(f.cores), stop=0)
        head = fc[0][0]  # (r_m, s)
        core[m] = np.einsum("aib,is->asb", core[m], head)
        s = head.shape[1]
        fc[0] = np.eye(s)[None]
        factors.append(fc)
    return core, factors


def tucker_round(t: TuckerTT, tol: Tolerance | float | None = None) -> TuckerTT:
    """Recompress Tucker legs, the core TT and the factor QTTs."""
    tol = as_tolerance(tol)
    core, factors = _absorb_factor_heads(t)
    d = t.d
    eps = tol.relative_epsilon
    pieces = 2 * d + 1
    norm = float(np.linalg.norm(T.orthogonalize_right(core)[0]))
    delta = eps * norm / math.sqrt(pieces)
    for m in range(d):
        core = T.orthogonalize_left(T.orthogonalize_right(core, stop=m), stop=m)
        rl, n, rr = core[m].shape
        mat = core[m].transpose(1, 0, 2).reshape(n, rl * rr)
        u, s, vt = T._svd(mat)
        r = T._chop(s, delta, tol.max_rank, max(mat.shape))
        core[m] = (s[:r, None] * vt[:r]).reshape(r, rl, rr).transpose(1, 0, 2)
        factors[m][0] = np.tensordot(u[:, :r].T, factors[m][0][0], axes=(1, 0))[None]
    core_tt = T.round(TensorTrain(core), Tolerance(eps / math.sqrt(pieces), tol.max_rank))
    new_factors = []
    for m, fc in enumerate(factors):
        f = TensorTrain(fc)
        # the factor is an isometry on its leg, so a relative error e costs
        # at most e * sqrt(r_m) * ||A|| in the full tensor
        r = f.dims[0]
        new_factors.append(T.round(f, Tolerance(eps / math.sqrt(pieces * r), tol.max_rank)))
    return TuckerTT(core_tt, tuple(new_factors))


def _pad_leg(f: TensorTrain, before: int, after: int) -> TensorTrain:
    c = f.cores[0]
    c = np.pad(c, ((0, 0), (before, after), (0, 0)))
    return TensorTrain((c,) + f.cores[1:])


def tucker_add(a: TuckerTT, b: TuckerTT) -> TuckerTT:
    """Exact sum: legs and core ranks add."""
    if a.scales != b.scales:
        raise DimensionMismatch("Tucker tensors live on different grids")
    ra, rb = a.tucker_ranks, b.tucker_ranks
    ca = TensorTrain(np.pad(c, ((0, 0), (0, rb[m]), (0, 0))) for m, c in enumerate(a.core.cores))
    cb = TensorTrain(np.pad(c, ((0, 0), (ra[m], 0), (0, 0))) for m, c in enumerate(b.core.cores))
    core = T.add(ca, cb)
    factors = tuple(
        T.add(_pad_leg(fa, 0, rb[m]), _pad_leg(fb, ra[m], 0))
        for m, (fa, fb) in enumerate(zip(a.factors, b.factors))
    )
    return TuckerTT(core, factors)


def tucker_scale(a: TuckerTT, c: float) -> TuckerTT:
    return TuckerTT(T.scale(a.core, c), a.factors)


def tucker_eval_many(t: TuckerTT, indices: np.ndarray) -> np.ndarray:
    """Values at an ``(S, d)`` array of grid indices."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1, t.d)
    env = np.ones((idx.shape[0], 1))
    for m in range(t.d):
        f = t.factors[m]
        n = f.ndim - 1
        right = np.ones((idx.shape[0], 1))
        for k in range(n, 0, -1):
            bit = (idx[:, m] >> (n - k)) & 1
            right = np.einsum("asb,sb->sa", f.cores[k][:, bit, :], right)
        leg = np.einsum("rs,qs->qr", f.cores[0][0], right)  # (S, r_m)
        env = np.einsum("qa,arb,qr->qb", env, t.core.cores[m], leg)
    return env[:, 0]
