"""Dense reference implementations, written independently of the package.

Kernels are typed in from their textbook closed forms as polynomials in
``|x|``; refinement is a direct convolution sum; the noise generators follow
the scalar recipes loop by loop.  Only the random draws are shared with
the package so that both sides consume identical numbers.
"""
import numpy as np

# piecewise polynomials in |x| on [0,1), [1,2), [2,3); coefficients low to high
KERNEL_PIECES = {
    "linear": [[1.0, -1.0]],
    "keys": [[1.0, 0.0, -2.5, 1.5], [2.0, -4.0, 2.5, -0.5]],
    "bspline3": [[2 / 3, 0.0, -1.0, 0.5], [4 / 3, -2.0, 1.0, -1 / 6]],
    "cubic6": [
        [1.0, 0.0, -7 / 3, 4 / 3],
        [5 / 2, -59 / 12, 3.0, -7 / 12],
        [-3 / 2, 7 / 4, -2 / 3, 1 / 12],
    ],
}


def phi(name, x, der=0):
    """Symmetric kernel (or its ``der``-th derivative) at real points ``x``."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    out = np.zeros_like(a)
    for j, coeffs in enumerate(KERNEL_PIECES[name]):
        poly = np.polynomial.Polynomial(coeffs).deriv(der)
        sel = (a >= j) & (a < j + 1)
        out[sel] = poly(a[sel])
    return out * np.sign(x) ** der if der % 2 else out


def support(name):
    return len(KERNEL_PIECES[name])


def conv_periodic(f, name, m, der=0):
    """Fine samples of ``sum_j f_j phi((x - x_j)/h)`` on the periodic unit interval."""
    f = np.asarray(f, dtype=float)
    n = f.size
    u = np.arange(n * 2**m) / 2**m
    out = np.zeros_like(u)
    for j in range(n):
        d = (u - j + n / 2) % n - n / 2
        out += f[j] * phi(name, d, der)
    return out * float(n) ** der


def conv_clamped(f, name, m, mode="edge", der=0):
    """Non-periodic convolution; out-of-range samples are zero, edge copies or mirrored."""
    f = np.asarray(f, dtype=float)
    n = f.size
    s = support(name) + 1
    u = np.arange(n * 2**m) / 2**m
    out = np.zeros_like(u)
    for j in range(-s, n + s):
        if 0 <= j < n:
            v = f[j]
        elif mode == "zero":
            continue
        elif mode == "edge":
            v = f[min(max(j, 0), n - 1)]
        else:  # reflect about the end samples
            jj = -j if j < 0 else 2 * (n - 1) - j
            v = f[jj]
        out += v * phi(name, u - j, der)
    return out * float(n) ** der


def conv_separable(arr, name, m, mode="periodic", der=None):
    """Apply the 1D refinement along every axis of ``arr``."""
    der = der or [0] * arr.ndim
    out = arr
    for ax in range(arr.ndim):
        moved = np.moveaxis(out, ax, -1)
        flat = moved.reshape(-1, moved.shape[-1])
        if mode == "periodic":
            rows = [conv_periodic(r, name, m, der[ax]) for r in flat]
        else:
            rows = [conv_clamped(r, name, m, mode, der[ax]) for r in flat]
        res = np.array(rows).reshape(moved.shape[:-1] + (-1,))
        out = np.moveaxis(res, -1, ax)
    return out


# --------------------------------------------------------------------------
# shifts and polynomials
# --------------------------------------------------------------------------


def shift_dense(kind, k, N):
    n = 2**N
    if kind == "S":
        return np.roll(np.eye(n), k, axis=1)
    if kind == "L":
        return np.eye(n, k=k)
    return np.eye(n, k=-k)


def poly_samples(coeffs, N):
    x = np.arange(2**N) / 2**N
    return np.polynomial.polynomial.polyval(x, coeffs)


# --------------------------------------------------------------------------
# noise generators, scalar loops
# --------------------------------------------------------------------------


def fade5(t):
    return 6 * t**5 - 15 * t**4 + 10 * t**3


def fade3(t):
    return 3 * t**2 - 2 * t**3


def midpoint_displacement(N, h0, hN, R, alpha, draws):
    """Recursive midpoint displacement; ``draws[l][m]`` replaces rand at level l, index m."""
    k = int(np.log2(N))
    H = np.zeros(N + 1)
    H[0], H[N] = h0, hN
    for level in range(1, k + 1):
        d = N // 2 ** (level - 1)
        for i in range(0, N - d + 1, d):
            m = i + d // 2
            H[m] = 0.5 * (H[i] + H[i + d]) + R * draws[level][m]
        R *= alpha
    return H


def value_noise(lattice, name, M):
    """d-dimensional cubic noise on ``2^M`` points per axis, periodic lattice."""
    L = lattice.shape[0]
    d = lattice.ndim
    x = np.arange(2**M) * L / 2**M
    i0 = np.floor(x).astype(int)
    t = x - i0
    out = np.zeros((2**M,) * d)
    grids = np.meshgrid(*[np.arange(2**M)] * d, indexing="ij")
    for offs in np.ndindex(*(4,) * d):
        js = [o - 1 for o in offs]
        idx = tuple((i0[g] + j) % L for g, j in zip(grids, js))
        w = np.ones_like(out)
        for g, j in zip(grids, js):
            w = w * phi(name, t[g] - j)
        out += lattice[idx] * w
    return out


def perlin1d(grads, M, fade=fade5):
    L = grads.size
    out = np.zeros(2**M)
    for p in range(2**M):
        x = p * L / 2**M
        i0 = int(np.floor(x))
        u = x - i0
        n0 = grads[i0 % L] * u
        n1 = grads[(i0 + 1) % L] * (u - 1)
        s = fade(u)
        out[p] = (1 - s) * n0 + s * n1
    return out


def perlin3d(grads, M, fade=fade5):
    """Gradient noise evaluated point by point with the trilinear fade."""
    L = grads.shape[0]
    P = 2**M
    out = np.zeros((P, P, P))
    for p in np.ndindex(P, P, P):
        x = np.array(p) * L / P
        i0 = np.floor(x).astype(int)
        u, v, w = x - i0
        n = {}
        for a, b, c in np.ndindex(2, 2, 2):
            g = grads[(i0[0] + a) % L, (i0[1] + b) % L, (i0[2] + c) % L]
            n[a, b, c] = g @ np.array([u - a, v - b, w - c])
        s, t, r = fade(u), fade(v), fade(w)
        pc = []
        for c in (0, 1):
            m0 = (1 - s) * n[0, 0, c] + s * n[1, 0, c]
            m1 = (1 - s) * n[0, 1, c] + s * n[1, 1, c]
            pc.append((1 - t) * m0 + t * m1)
        out[p] = (1 - r) * pc[0] + r * pc[1]
    return out


def fractal(base, octaves, persistence):
    """``sum_k a^k n(2^k x)`` for a periodic dense 1D or d-D base."""
    out = np.zeros_like(base)
    for k in range(octaves):
        sl = tuple(slice(None, None, 2**k) for _ in range(base.ndim))
        sub = base[sl]
        out += persistence**k * np.tile(sub, (2**k,) * base.ndim)
    return out


def spline_field(values, x, ders, name="bspline3"):
    """Periodic tensor-product spline derivative at continuous points ``x`` (S, 3)."""
    L = values.shape[0]
    u = np.asarray(x) * L
    out = np.zeros(u.shape[0])
    base = np.floor(u).astype(int)
    r = support(name)
    for offs in np.ndindex(*(2 * r + 1,) * 3):
        node = base + np.array(offs) - r
        w = np.ones(u.shape[0])
        for ax in range(3):
            w = w * phi(name, u[:, ax] - node[:, ax], ders[ax]) * float(L) ** ders[ax]
        out += values[node[:, 0] % L, node[:, 1] % L, node[:, 2] % L] * w
    return out
