"""Test functions and soft masks used by the CLI and the benchmarks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Fixture:
    name: str
    func: Callable
    dim: int
    base_scales: int
    deriv: Callable | None = None  # d/dx for 1D fixtures, if known

    def __call__(self, *x):
        return self.func(*x)


def _gauss(x, a, s):
    return np.exp(-((x - a) ** 2) / (2.0 * s**2))


def _pos(x):
    return np.maximum(x, 0.0)


def _chirp(x, f0, f1):
    # instantaneous frequency sweeps linearly from f0 at x=0 to f1 at x=1
    return np.sin(2.0 * np.pi * (f0 * x + 0.5 * (f1 - f0) * x**2))


_H_PLUS = ((0.22, 0.030, 0.8), (0.37, 0.025, -0.6), (0.61, 0.035, 0.7), (0.82, 0.022, -0.5))
_H_MINUS = ((0.28, 0.030, -0.6), (0.42, 0.028, 0.5), (0.68, 0.030, -0.5), (0.88, 0.022, 0.4))


def benchmark_1d(x):
    """Multi-band C^2 test signal with localized wave packets and cubic kinks."""
    x = np.asarray(x, dtype=float)
    b = (
        0.28 * np.sin(16 * np.pi * x) * _gauss(x, 0.20, 0.07)
        + 0.24 * np.cos(44 * np.pi * x) * _gauss(x, 0.36, 0.05)
        + 0.20 * _chirp(x, 5.0, 18.0) * _gauss(x, 0.58, 0.12)
        + 0.18 * np.sin(120 * np.pi * x) * _gauss(x, 0.73, 0.03)
    )
    bg = 0.07 * np.sin(2 * np.pi * 1.8 * x + 0.2) + 0.05 * np.cos(2 * np.pi * 3.3 * x + 0.9)
    kp = sum(w * _pos(x - a) ** 3 * _gauss(x, a, s) for a, s, w in _H_PLUS)
    km = sum(w * _pos(b0 - x) ** 3 * _gauss(x, b0, s) for b0, s, w in _H_MINUS)
    return np.tanh((b + bg + kp + km) / 2.5)


def correlated_gaussian(x, y, sigma=0.15, rho=0.6, center=(0.5, 0.5)):
    dx, dy = x - center[0], y - center[1]
    q = (dx**2 - 2 * rho * dx * dy + dy**2) / (sigma**2 * (1 - rho**2))
    return np.exp(-0.5 * q)


def soft_step(s, width):
    """Smoothed indicator of ``s < 0``."""
    return 0.5 * (1.0 - np.tanh(s / width))


def circle_mask(x, y, radius=0.3, width=0.02, center=(0.5, 0.5)):
    return soft_step(np.hypot(x - center[0], y - center[1]) - radius, width)


def naca_thickness(xi, t=0.12):
    xi = np.clip(xi, 0.0, 1.0)
    return 5 * t * (0.2969 * np.sqrt(xi) - 0.1260 * xi - 0.3516 * xi**2 + 0.2843 * xi**3 - 0.1015 * xi**4)


def airfoil_mask(x, y, width=0.01, chord=0.7, lead=(0.15, 0.5), t=0.12, camber=0.02, pos=0.4):
    """Soft mask of a NACA 4-digit style profile (approximate signed distance)."""
    xi = (x - lead[0]) / chord
    xc = np.clip(xi, 0.0, 1.0)
    yc = np.where(
        xc < pos,
        camber / pos**2 * (2 * pos * xc - xc**2),
        camber / (1 - pos) ** 2 * ((1 - 2 * pos) + 2 * pos * xc - xc**2),
    )
    half = chord * naca_thickness(xc, t)
    dy = np.abs(y - (lead[1] + chord * yc)) - half
    outside = chord * np.maximum(np.maximum(-xi, xi - 1.0), 0.0)
    s = np.where(outside > 0, np.hypot(outside, np.maximum(dy, 0.0)), dy)
    return soft_step(s, width)


def _two_pi(f):
    return lambda x: f(2 * np.pi * np.asarray(x, dtype=float))


FIXTURES = {
    "eqg1": Fixture("eqg1", benchmark_1d, 1, 14),
    "sin": Fixture("sin", _two_pi(np.sin), 1, 8, lambda x: 2 * np.pi * np.cos(2 * np.pi * np.asarray(x))),
    "cos": Fixture("cos", _two_pi(np.cos), 1, 8, lambda x: -2 * np.pi * np.sin(2 * np.pi * np.asarray(x))),
    "exp": Fixture("exp", np.exp, 1, 8, np.exp),
    "poly": Fixture("poly", lambda x: 1 - 3 * x + 3 * x**2, 1, 6, lambda x: -3 + 6 * np.asarray(x)),
    "ones": Fixture("ones", lambda *x: np.ones_like(x[0], dtype=float), 1, 4, lambda x: np.zeros_like(x)),
    "gaussian2d": Fixture("gaussian2d", correlated_gaussian, 2, 7),
    "circle": Fixture("circle", circle_mask, 2, 7),
    "airfoil": Fixture("airfoil", airfoil_mask, 2, 8),
}


def get(name: str, width: float | None = None) -> Fixture:
    try:
        fx = FIXTURES[name]
    except KeyError:
        raise ConfigError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None
    if width is not None and name in ("circle", "airfoil"):
        base = fx.func
        return Fixture(fx.name, lambda x, y: base(x, y, width=width), fx.dim, fx.base_scales)
    return fx
