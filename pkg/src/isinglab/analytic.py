"""Closed-form results for the d=2 square lattice.

The exact critical temperature of the Q-state model, the spontaneous
magnetization curve below it, the 1/8 power-law fit near the transition,
and the hyperbolic-tangent reparametrization used by high-temperature
series.  All pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CriticalPoint:
    q: int
    t_c: float


def critical_temperature(q: float) -> float:
    """Exact d=2 square-lattice critical temperature 2/ln(1 + sqrt(Q)).

    For Q = 2 this is the classic self-dual point, equivalently the solution
    of sinh(2/T_c) = 1.
    """
    if q < 1:
        raise ValueError(f"need Q >= 1, got {q}")
    return 2.0 / math.log(1.0 + math.sqrt(q))


def critical_point(q: int) -> CriticalPoint:
    return CriticalPoint(q, critical_temperature(q))


T_C_ISING = critical_temperature(2)


def onsager_magnetization(temperature: float) -> float:
    """Spontaneous magnetization (1 - sinh(2/T)^-4)^(1/8) for T <= T_c, else 0.

    Returns exactly 0 above T_c, so the curve is continuous at T_c by
    construction and monotone down to 0 on (0, T_c].
    """
    if temperature <= 0:
        raise ValueError(f"need T > 0, got {temperature}")
    if temperature > T_C_ISING:
        return 0.0
    s = math.sinh(2.0 / temperature)
    inner = 1.0 - s ** -4
    if inner <= 0.0:  # T at (floating) T_c
        return 0.0
    return inner ** 0.125


def onsager_exponent_fit(temperatures) -> float:
    """Least-squares slope of ln m against ln(T_c - T).

    The window must sit strictly below T_c; close to it the slope approaches
    the exact exponent 1/8.
    """
    t = np.asarray(temperatures, dtype=float)
    if t.size < 2:
        raise ValueError("need at least two temperatures")
    if np.any(t >= T_C_ISING):
        raise ValueError("fit window must lie strictly below the critical temperature")
    x = np.log(T_C_ISING - t)
    y = np.log([onsager_magnetization(ti) for ti in t])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def exponent_fit_window(gap_min: float = 1e-4, gap_max: float = 5e-2,
                        n: int = 50) -> np.ndarray:
    """Log-spaced temperatures with T_c - T spanning [gap_min, gap_max]."""
    gaps = np.geomspace(gap_min, gap_max, n)
    return T_C_ISING - gaps


def tanh_reparam(beta: float) -> float:
    """High-temperature expansion parameter t = tanh(beta).

    Satisfies exp(beta*s) = cosh(beta) * (1 + t*s) for s = +/-1, which is why
    small-beta series organize themselves in powers of t.
    """
    return math.tanh(beta)
