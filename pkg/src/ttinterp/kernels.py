"""Compactly supported piecewise-polynomial interpolation kernels.

A kernel ``phi`` is stored exactly (``fractions.Fraction`` coefficients) as
``q`` polynomial pieces in the global variable ``r``; piece ``j`` lives on
``[lo + j, lo + j + 1)`` with ``lo = -(q // 2)``.  Convolution interpolation
on a unit-spaced grid reads, for ``x = i + t`` with ``t`` in ``[0, 1)``,

    F(x) = sum_k f_{i+k} P^(k)(t),      P^(k)(t) = phi(t - k),

with offsets ``k = -((q-1)//2) .. q//2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import ConfigError

Poly = tuple  # tuple of Fraction, lowest power first


def _trim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(Fraction(c) for c in p)


def poly_eval(p: Sequence, x):
    out = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(p):
        out = out * x + float(c)
    return out


def poly_shift(p: Sequence[Fraction], s) -> Poly:
    """Coefficients of ``t -> p(t + s)``."""
    s = Fraction(s)
    out = [Fraction(0)] * len(p)
    for n, c in enumerate(p):
        for j in range(n + 1):
            out[j] += c * comb(n, j) * s ** (n - j)
    return _trim(out)


def poly_deriv(p: Sequence[Fraction], order: int = 1) -> Poly:
    p = list(p)
    for _ in range(order):
        p = [n * p[n] for n in range(1, len(p))] or [Fraction(0)]
    return _trim(p)


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def poly_add(a, b) -> Poly:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([Fraction(x) + Fraction(y) for x, y in zip(a, b)])


def _abs_pieces(inner: Sequence[Sequence]) -> list[Poly]:
    """Symmetric kernel from pieces given in ``|r|`` on [0,1), [1,2), ...

    Pieces for negative r are obtained by substituting ``|r| = -r``.
    """
    inner = [_trim([Fraction(c) for c in p]) for p in inner]
    neg = [_trim([c * (-1) ** n for n, c in enumerate(p)]) for p in inner]
    return neg[::-1] + inner


@dataclass(frozen=True)
class Kernel:
    name: str
    q: int
    pieces: tuple  # q exact polynomials in r
    smoothness: int  # C^k class
    kind: str = field(default="")  # "interpolating" | "quasi"

    def __post_init__(self):
        if len(self.pieces) != self.q:
            raise ConfigError(f"kernel {self.name}: expected {self.q} pieces")
        if not self.kind:
            object.__setattr__(self, "kind", "interpolating" if self._is_interpolating() else "quasi")

    @property
    def lo(self) -> int:
        return -(self.q // 2)

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.pieces) - 1

    @property
    def p(self) -> int:
        return self.degree

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(range(-((self.q - 1) // 2), self.q // 2 + 1))

    @property
    def max_derivative(self) -> int:
        return self.smoothness

    def piece_exact(self, r: Fraction) -> Fraction:
        j = int(np.floor(float(r))) - self.lo
        if not 0 <= j < self.q:
            return Fraction(0)
        return sum((c * r**n for n, c in enumerate(self.pieces[j])), Fraction(0))

    def _is_interpolating(self) -> bool:
        if self.piece_exact(Fraction(0)) != 1:
            return False
        return all(self.piece_exact(Fraction(j)) == 0 for j in range(self.lo, self.lo + self.q + 1) if j)

    def __call__(self, r, derivative: int = 0) -> np.ndarray:
        """Evaluate ``phi`` (or a derivative) at real points ``r``."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        idx = np.floor(r).astype(np.int64) - self.lo
        for j, piece in enumerate(self.pieces):
            sel = idx == j
            if np.any(sel):
                out[sel] = poly_eval(poly_deriv(piece, derivative), r[sel])
        return out

    def stencil_polys(self, derivative: int = 0) -> dict[int, Poly]:
        """Exact ``P^(k)(t) = phi^(derivative)(t - k)`` on [0, 1)."""
        if derivative < 0 or derivative > self.max_derivative:
            raise ConfigError(
                f"kernel {self.name} is C^{self.smoothness}; derivative {derivative} unavailable"
            )
        out = {}
        for k in self.offsets:
            piece = self.pieces[-k - self.lo]
            out[k] = poly_deriv(poly_shift(piece, -k), derivative)
        return out


@dataclass(frozen=True)
class StencilSet:
    """Per-offset polynomials on the unit cell; ``coeffs[k]`` lowest power first."""

    offsets: tuple
    coeffs: dict
    degree: int

    def matrix(self) -> np.ndarray:
        """Row ``j`` holds the monomial coefficients of the j-th offset."""
        m = np.zeros((len(self.offsets), self.degree + 1))
        for row, k in enumerate(self.offsets):
            c = self.coeffs[k]
            m[row, : len(c)] = c
        return m

    def __call__(self, t) -> np.ndarray:
        """Weights at points ``t``; returns shape ``(len(t), len(offsets))``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        powers = t[:, None] ** np.arange(self.degree + 1)
        return powers @ self.matrix().T


def stencils(kernel: Kernel, derivative: int = 0) -> StencilSet:
    polys = kernel.stencil_polys(derivative)
    deg = max(kernel.degree - derivative, 0)
    coeffs = {}
    for k, p in polys.items():
        c = np.zeros(deg + 1)
        c[: len(p)] = [float(x) for x in p]
        coeffs[k] = c
    return StencilSet(tuple(kernel.offsets), coeffs, deg)


def stencil_set(coeffs: dict, degree: int | None = None) -> StencilSet:
    """Custom stencil set from ``{offset: monomial coefficients}``."""
    offs = tuple(sorted(coeffs))
    deg = max(len(np.atleast_1d(c)) for c in coeffs.values()) - 1 if degree is None else degree
    out = {}
    for k in offs:
        c = np.zeros(deg + 1)
        src = np.atleast_1d(np.asarray(coeffs[k], dtype=float))
        c[: src.size] = src
        out[k] = c
    return StencilSet(offs, out, deg)


def identity_stencils() -> StencilSet:
    return StencilSet((0,), {0: np.ones(1)}, 0)


# --------------------------------------------------------------------------
# shipped kernels
# --------------------------------------------------------------------------

F = Fraction


def linear_kernel() -> Kernel:
    return Kernel("linear", 2, tuple(_abs_pieces([[1, -1]])), smoothness=0)


def keys_cubic() -> Kernel:
    pieces = _abs_pieces([[1, 0, F(-5, 2), F(3, 2)], [2, -4, F(5, 2), F(-1, 2)]])
    return Kernel("keys", 4, tuple(pieces), smoothness=1)


def bspline_cubic() -> Kernel:
    # (4 - 6 r^2 + 3 r^3)/6 and (2 - r)^3 / 6
    pieces = _abs_pieces([[F(4, 6), 0, -1, F(1, 2)], [F(8, 6), -2, 1, F(-1, 6)]])
    return Kernel("bspline3", 4, tuple(pieces), smoothness=2, kind="quasi")


def cubic_sixpoint() -> Kernel:
    pieces = _abs_pieces(
        [
            [1, 0, F(-7, 3), F(4, 3)],
            [F(15, 6), F(-59, 12), 3, F(-7, 12)],
            [F(-3, 2), F(21, 12), F(-2, 3), F(1, 12)],
        ]
    )
    return Kernel("cubic6", 6, tuple(pieces), smoothness=1)


def mitchell_netravali(B, C) -> Kernel:
    B, C = F(B), F(C)
    inner = [
        [(6 - 2 * B) / 6, 0, -(18 - 12 * B - 6 * C) / 6, (12 - 9 * B - 6 * C) / 6],
        [(8 * B + 24 * C) / 6, -(12 * B + 48 * C) / 6, (6 * B + 30 * C) / 6, (-B - 6 * C) / 6],
    ]
    smooth = 2 if (B, C) == (1, 0) else 1
    return Kernel(f"mn:{B},{C}", 4, tuple(_abs_pieces(inner)), smoothness=smooth)


def lagrange_kernel(m: int) -> Kernel:
    """Piecewise Lagrange interpolation of degree ``m`` on nodes -m//2 .. ceil(m/2)."""
    if m < 1:
        raise ConfigError("lagrange degree must be >= 1")
    q = m + 1
    nodes = list(range(-(m // 2), -(m // 2) + q))
    basis = {}
    for k in nodes:
        p: Poly = (F(1),)
        for j in nodes:
            if j != k:
                p = poly_mul(p, (F(-j, k - j), F(1, k - j)))
        basis[k] = p
    lo = -(q // 2)
    pieces = []
    for j in range(q):
        k = -(lo + j)  # piece on [lo+j, lo+j+1) is ell_k(r + k)
        pieces.append(poly_shift(basis[k], k))
    return Kernel(f"lagrange:{m}", q, tuple(pieces), smoothness=0)


def by_name(name: str) -> Kernel:
    """Resolve ``linear``, ``keys``, ``bspline3``, ``cubic6``, ``mn:B,C`` or ``lagrange:m``."""
    name = name.strip().lower()
    simple = {
        "linear": linear_kernel,
        "keys": keys_cubic,
        "bspline3": bspline_cubic,
        "cubic6": cubic_sixpoint,
    }
    if name in simple:
        return simple[name]()
    try:
        if name.startswith("mn:"):
            b, c = name[3:].split(",")
            return mitchell_netravali(F(b), F(c))
        if name.startswith("lagrange:"):
            return lagrange_kernel(int(name.split(":", 1)[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad kernel spec {name!r}") from exc
    raise ConfigError(f"unknown kernel {name!r}")


SHIPPED = ("linear", "keys", "bspline3", "cubic6")


# fades ---------------------------------------------------------------------

_FADES = {
    "f3": (F(0), F(0), F(3), F(-2)),
    "f5": (F(0), F(0), F(0), F(10), F(-15), F(6)),
}


def fade_poly(kind: str = "f5") -> Poly:
    try:
        return _FADES[kind]
    except KeyError:
        raise ConfigError(f"unknown fade {kind!r}; use f3 or f5") from None


def fade(kind: str = "f5", derivative: int = 0):
    """Return the fade ramp ``f`` (or a derivative) as a vectorized callable."""
    p = poly_deriv(fade_poly(kind), derivative)
    return lambda t: poly_eval(p, np.asarray(t, dtype=float))
