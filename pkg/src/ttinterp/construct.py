"""Closed-form low-rank constructions: polynomial QTTs and shift operators.

Shift conventions (vectors of length ``2**N``)::

    S^k : (S f)_a = f_{(a + k) mod 2^N}
    L^k : (L f)_a = f_{a + k}, zero when a + k >= 2^N
    R^k : (R f)_a = f_{a - k}, zero when a < k

so ``L^k = (R^k)^T`` and ``S^{-k} = S^{2^N - k}``.
"""
from __future__ import annotations

from math import comb
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .tt import TensorTrain, TTOperator, operator_add, operator_scale

SHIFT_KINDS = ("S", "L", "R")


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------


def _binomials(p: int) -> np.ndarray:
    """Pascal triangle ``B[i, j] = C(i, j)`` for ``0 <= j <= i <= p``."""
    if p > 16:
        raise ConfigError("polynomial degree above 16 is not supported")
    b = np.zeros((p + 1, p + 1))
    for i in range(p + 1):
        b[i, 0] = 1.0
        for j in range(1, i + 1):
            b[i, j] = b[i - 1, j - 1] + b[i - 1, j]
    return b


def abel_parameter(N: int) -> float:
    return (1.0 - 2.0**N) / 2.0**N


def abel_polynomial(n: int, x, a: float):
    """A_0 = 1, A_n(x) = x (x - a n)^(n-1)."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    return x * (x - a * n) ** (n - 1)


def monomial_to_abel(coeffs: Sequence[float], a: float) -> np.ndarray:
    """Coefficients d with sum_n d_n A_n(x) = sum_k c_k x^k (triangular solve)."""
    c = np.asarray(coeffs, dtype=float)
    p = c.size - 1
    # T[k, n] = coefficient of x^k in A_n(x)
    t = np.zeros((p + 1, p + 1))
    t[0, 0] = 1.0
    for n in range(1, p + 1):
        for j in range(n):
            t[1 + j, n] = comb(n - 1, j) * (-a * n) ** (n - 1 - j)
    from scipy.linalg import solve_triangular

    return solve_triangular(t, c, lower=False)


def _basis_values(basis: str, t: float, p: int, a: float) -> np.ndarray:
    if basis == "monomial":
        return t ** np.arange(p + 1, dtype=float)
    return np.array([float(abel_polynomial(n, t, a)) for n in range(p + 1)])


def polynomial_cores(coeffs: Sequence[float], N: int, basis: str = "monomial") -> list[np.ndarray]:
    """Cores of the QTT of ``x -> sum c_k x^k`` sampled at ``x_i = i / 2^N``.

    Works for any ``N >= 1``; the first core has shape ``(1, 2, p+1)``, the
    middle ones ``(p+1, 2, p+1)`` and the last ``(p+1, 2, 1)``.
    """
    if basis not in ("monomial", "abel"):
        raise ConfigError(f"unknown polynomial basis {basis!r}")
    if N < 1:
        raise ConfigError("need at least one core")
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    p = c.size - 1
    a = abel_parameter(N)
    d = c if basis == "monomial" else monomial_to_abel(c, a)
    binom = _binomials(p)
    if N == 1:
        core = np.zeros((1, 2, 1))
        for bit in (0, 1):
            vals = _basis_values(basis, bit / 2.0, p, a)
            core[0, bit, 0] = d @ vals
        return [core]
    cores = []
    first = np.zeros((1, 2, p + 1))
    for bit in (0, 1):
        vals = _basis_values(basis, bit / 2.0, p, a)
        for s in range(p + 1):
            first[0, bit, s] = sum(d[n] * binom[n, s] * vals[n - s] for n in range(s, p + 1))
    cores.append(first)
    for k in range(2, N):
        mid = np.zeros((p + 1, 2, p + 1))
        for bit in (0, 1):
            vals = _basis_values(basis, bit * 2.0**-k, p, a)
            for i in range(p + 1):
                for j in range(i + 1):
                    mid[i, bit, j] = binom[i, j] * vals[i - j]
        cores.append(mid)
    last = np.zeros((p + 1, 2, 1))
    for bit in (0, 1):
        last[:, bit, 0] = _basis_values(basis, bit * 2.0**-N, p, a)
    cores.append(last)
    return cores


def polynomial_qtt(coeffs: Sequence[float], N: int, basis: str = "monomial") -> TensorTrain:
    """QTT of a polynomial (monomial coefficients ``c_0..c_p``) on ``[0, 1)``."""
    if N < 2:
        raise ConfigError("polynomial_qtt needs N >= 2")
    return TensorTrain(polynomial_cores(coeffs, N, basis))


# --------------------------------------------------------------------------
# shifts
# --------------------------------------------------------------------------


def _shift_core(kind: str, kbit: int, first: bool, last: bool) -> np.ndarray:
    """Carry-automaton core ``C[c_out, a, a', c_in]``.

    For ``S``/``L`` a bit obeys ``a + kbit + c_in = a' + 2 c_out``; for ``R``
    the roles of ``a`` and ``a'`` swap.
    """
    core = np.zeros((2, 2, 2, 2))
    for cin in (0, 1):
        for x in (0, 1):
            total = x + kbit + cin
            y, cout = total % 2, total // 2
            if kind == "R":
                core[cout, y, x, cin] = 1.0
            else:
                core[cout, x, y, cin] = 1.0
    if last:
        core = core[:, :, :, :1]
    if first:
        if kind == "S":
            core = core.sum(axis=0, keepdims=True)
        else:
            core = core[:1]
    return core


def shift_mpo(kind: str, k: int, N: int) -> TTOperator:
    """Shift operator of the given kind (``"S"``, ``"L"`` or ``"R"``) by ``k``."""
    if kind not in SHIFT_KINDS:
        raise ConfigError(f"unknown shift kind {kind!r}")
    if N < 1:
        raise ConfigError("need at least one core")
    if not 0 <= k < 2**N:
        raise ConfigError(f"shift {k} out of range for N={N}")
    cores = []
    for i in range(N):
        kbit = (k >> (N - 1 - i)) & 1
        cores.append(_shift_core(kind, kbit, i == 0, i == N - 1))
    return TTOperator(cores)


def signed_shift_mpo(k: int, N: int, periodic: bool = True) -> TTOperator:
    """Operator returning ``f_{a+k}`` for a signed offset ``k``."""
    if periodic:
        return shift_mpo("S", k % 2**N, N)
    if k >= 0:
        return shift_mpo("L", k, N)
    return shift_mpo("R", -k, N)


def shift_matrix(kind: str, k: int, N: int) -> np.ndarray:
    """Dense definition of the shift operators, used as a reference."""
    n = 2**N
    a = np.arange(n)[:, None]
    ap = np.arange(n)[None, :]
    if kind == "S":
        return (a == (ap - k) % n).astype(float)
    if kind == "R":
        return (a == ap + k).astype(float)
    if kind == "L":
        return (ap == a + k).astype(float)
    raise ConfigError(f"unknown shift kind {kind!r}")


def derivative_mpo(N: int, h: float) -> TTOperator:
    """Periodic central difference ``(S^1 - S^{-1}) / (2h)``."""
    if N < 2:
        raise ConfigError("derivative_mpo needs N >= 2")
    plus = shift_mpo("S", 1, N)
    minus = shift_mpo("S", 2**N - 1, N)
    return operator_scale(operator_add(plus, operator_scale(minus, -1.0)), 1.0 / (2.0 * h))
