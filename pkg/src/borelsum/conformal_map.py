"""
Conformal mapping of the doubly cut Borel plane onto the unit disc.

With cuts along ``u >= q`` and ``u <= -p`` the map is::

    w(u) = (sqrt(1 + u/p) - sqrt(1 - u/q)) / (sqrt(1 + u/p) + sqrt(1 - u/q))

using principal square roots.  Its inverse is rational,
``u(w) = 4 p q w / (p (1 + w)**2 + q (1 - w)**2)``, which makes the
re-expansion ``B(u) = sum_n c_n w**n`` a plain series composition.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import binom

from .errors import BranchError, ParameterError, RangeError
from .series_core import PowerSeries, divide_series, evaluate_truncated

__all__ = [
    "ConformalMap",
    "ConvergenceTable",
    "map_w",
    "map_u",
    "recompose",
    "evaluate_conformal",
    "convergence_compare",
]


@dataclass(frozen=True)
class ConformalMap:
    """Optimal map for an IR cut starting at ``cut_positive`` and a UV cut at ``cut_negative``."""

    cut_positive: float = 2.0
    cut_negative: float = -1.0

    def __post_init__(self):
        if not (self.cut_positive > 0 and self.cut_negative < 0):
            raise ParameterError("need cut_positive > 0 > cut_negative")

    @property
    def p(self) -> float:
        return -float(self.cut_negative)

    @property
    def q(self) -> float:
        return float(self.cut_positive)

    def w(self, u):
        """Vectorised ``w(u)`` without cut checks."""
        u = np.asarray(u, dtype=complex)
        x = np.sqrt(1.0 + u / self.p)
        y = np.sqrt(1.0 - u / self.q)
        return (x - y) / (x + y)

    def u(self, w):
        """Vectorised ``u(w)`` without range checks."""
        w = np.asarray(w, dtype=complex)
        p, q = self.p, self.q
        return 4.0 * p * q * w / (p * (1.0 + w) ** 2 + q * (1.0 - w) ** 2)

    def on_cut(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        return (u.imag == 0) & ((u.real > self.q) | (u.real < -self.p))

    def u_taylor(self, N: int) -> np.ndarray:
        """Taylor coefficients of ``u(w)`` about ``w = 0``."""
        p, q = self.p, self.q
        den = [p + q, 2.0 * (p - q), p + q]
        return divide_series([0.0, 4.0 * p * q], den, N)

    def w_taylor(self, N: int) -> np.ndarray:
        """Taylor coefficients of ``w(u)`` about ``u = 0``."""
        k = np.arange(N + 1)
        x = binom(0.5, k) * (1.0 / self.p) ** k
        y = binom(0.5, k) * (-1.0 / self.q) ** k
        return divide_series(x - y, x + y, N)

    def to_dict(self) -> dict:
        return {"cut_positive": self.cut_positive, "cut_negative": self.cut_negative}


def map_w(u, cmap: ConformalMap = ConformalMap()):
    """``w(u)``; raises :class:`BranchError` for points on either cut."""
    if np.any(cmap.on_cut(u)):
        raise BranchError("u lies on a branch cut of the Borel plane")
    out = cmap.w(u)
    return complex(out) if out.ndim == 0 else out


def map_u(w, cmap: ConformalMap = ConformalMap()):
    """Inverse map ``u(w)`` on the open unit disc."""
    if np.any(np.abs(np.asarray(w)) >= 1.0):
        raise RangeError("|w| must be < 1")
    out = cmap.u(w)
    return complex(out) if out.ndim == 0 else out


def _exact_u_taylor(cmap: ConformalMap, N: int) -> list:
    p, q = Fraction(cmap.p), Fraction(cmap.q)
    d0, d1 = p + q, 2 * (p - q)
    out = [Fraction(0)] * (N + 1)
    # (d0 + d1 w + d0 w^2) u(w) = 4 p q w
    for n in range(1, N + 1):
        acc = 4 * p * q if n == 1 else Fraction(0)
        acc -= d1 * out[n - 1]
        if n >= 2:
            acc -= d0 * out[n - 2]
        out[n] = acc / d0
    return out


def _exact_compose(outer: list, inner: list, N: int) -> list:
    acc = [Fraction(0)] * (N + 1)
    for c in reversed(outer[: N + 1]):
        nxt = [Fraction(0)] * (N + 1)
        for i, a in enumerate(acc):
            if a:
                for j in range(1, N + 1 - i):
                    nxt[i + j] += a * inner[j]
        nxt[0] += c
        acc = nxt
    return acc


def recompose(b: PowerSeries, cmap: ConformalMap = ConformalMap(), N: int | None = None) -> PowerSeries:
    """Coefficients ``c_n`` of ``B(u(w)) = sum c_n w**n`` through order ``N``.

    The composition runs in exact rational arithmetic on the binary values
    of ``b`` and of the cut positions.  High orders involve large
    cancellations, so the only error left is the rounding of the inputs
    themselves (and of the final conversion to double).
    """
    N = b.order if N is None else N
    if N > b.order:
        raise RangeError(f"order {N} exceeds available order {b.order}")
    inner = _exact_u_taylor(cmap, N)
    dense = b.dense(N)
    parts = []
    for comp in (dense.real, dense.imag):
        if np.any(comp):
            parts.append([float(x) for x in _exact_compose([Fraction(float(v)) for v in comp], inner, N)])
        else:
            parts.append([0.0] * (N + 1))
    return PowerSeries(np.array(parts[0]) + 1j * np.array(parts[1]), 0)


def evaluate_conformal(c: PowerSeries, u, cmap: ConformalMap = ConformalMap(), N: int | None = None):
    """Partial sum ``sum_{n<=N} c_n w(u)**n``."""
    N = c.order if N is None else N
    w = map_w(u, cmap)
    return evaluate_truncated(c, w, N)


@dataclass
class ConvergenceTable:
    N: np.ndarray
    err_u: np.ndarray
    err_w: np.ndarray
    rate_u: float
    rate_w: float
    w_probe: complex
    u_probe: complex

    def rows(self):
        return [(int(n), float(eu), float(ew)) for n, eu, ew in zip(self.N, self.err_u, self.err_w)]


def _geometric_rate(N: np.ndarray, err: np.ndarray, floor: float) -> float:
    """Fit ``err ~ C rate**N`` over the second half of the table above ``floor``."""
    half = N.size // 2
    n, e = N[half:], err[half:]
    mask = (e > floor) & np.isfinite(e)
    if mask.sum() < 3:
        return math.nan
    slope = np.polyfit(n[mask], np.log(e[mask]), 1)[0]
    return float(math.exp(slope))


def convergence_compare(b: PowerSeries, c: PowerSeries, u_probe: complex, N_range: Sequence[int],
                        exact, cmap: ConformalMap = ConformalMap()) -> ConvergenceTable:
    """Truncation errors of the u-series and the w-series at one probe point.

    ``exact`` is the true ``B(u_probe)`` or a callable returning it.
    """
    value = complex(exact(u_probe) if callable(exact) else exact)
    N = np.asarray(list(N_range), dtype=int)
    w = complex(map_w(u_probe, cmap))
    bu = b.dense(int(N.max()))
    cw = c.dense(int(N.max()))
    pu = np.cumsum(bu * complex(u_probe) ** np.arange(bu.size))
    pw = np.cumsum(cw * w ** np.arange(cw.size))
    err_u = np.abs(value - pu[N])
    err_w = np.abs(value - pw[N])
    floor = 64 * np.finfo(float).eps * max(1.0, abs(value))
    return ConvergenceTable(N, err_u, err_w, _geometric_rate(N, err_u, floor),
                            _geometric_rate(N, err_w, floor), w, complex(u_probe))
