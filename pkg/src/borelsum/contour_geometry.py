"""
Contours ``G(r) = r exp(i g(r))`` in the Borel plane and their validity sectors.

The phase ``g`` is piecewise linear between ``phase_nodes`` and constant
beyond the last node, so an infinite contour always ends in a straight ray.
Because ``|G(r)| = r`` by construction, curves that touch or re-cross a
circle about the origin cannot be expressed at all; a repeated ``r`` node
(a jump in ``g``) is rejected instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ParameterError, RangeError, ValidationError

__all__ = [
    "Contour",
    "ContourValidation",
    "Sector",
    "validate",
    "sector_lambda",
    "sector_z",
    "point",
    "derivative",
]

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True, eq=False)
class Contour:
    """Piecewise-linear phase contour.

    Parameters
    ----------
    phase_nodes : sequence of (r, g)
        Strictly increasing radii starting at ``r = 0``; ``g`` in radians.
    c : float
        Endpoint radius, ``math.inf`` for an unbounded contour.
    r0 : float
        Radius beyond which the growth and phase conditions are imposed.
    """

    phase_nodes: tuple
    c: float = math.inf
    r0: float = 1.0

    def __post_init__(self):
        nodes = np.array(self.phase_nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or nodes.shape[0] == 0:
            raise ParameterError("phase_nodes must be a non-empty list of (r, g) pairs")
        if not np.all(np.isfinite(nodes)):
            raise ParameterError("phase nodes must be finite")
        r = nodes[:, 0]
        if r[0] != 0.0:
            raise ParameterError("the first phase node must sit at r = 0")
        if np.any(np.diff(r) <= 0):
            raise ParameterError("phase-node radii must be strictly increasing")
        c = float(self.c)
        if not c > 0:
            raise ParameterError("endpoint c must be positive")
        if r[-1] > c:
            raise ParameterError("phase nodes extend beyond the endpoint c")
        if not (0 < self.r0 < c):
            raise ParameterError("need 0 < r0 < c")
        nodes.setflags(write=False)
        object.__setattr__(self, "phase_nodes", nodes)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r0", float(self.r0))

    @classmethod
    def ray(cls, theta: float = 0.0, c: float = math.inf, r0: float = 1.0) -> "Contour":
        """Straight ray ``G(r) = r exp(i theta)``."""
        return cls(((0.0, float(theta)),), c, r0)

    @property
    def radii(self) -> np.ndarray:
        return self.phase_nodes[:, 0]

    @property
    def phases(self) -> np.ndarray:
        return self.phase_nodes[:, 1]

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.c)

    @property
    def tail_phase(self) -> float:
        return float(self.phases[-1])

    def breakpoints(self) -> np.ndarray:
        """Radii where ``g'`` may jump, including 0 (and ``c`` if finite)."""
        pts = [float(x) for x in self.radii if x < self.c]
        if not self.is_infinite and pts[-1] != self.c:
            pts.append(self.c)
        return np.array(pts)

    def _check_range(self, r: np.ndarray):
        if np.any(r < 0) or np.any(r >= self.c) or not np.all(np.isfinite(r)):
            raise RangeError(f"r outside [0, {self.c})")

    def phase(self, r):
        r = np.asarray(r, dtype=float)
        return np.interp(r, self.radii, self.phases)

    def phase_slope(self, r):
        """Right-sided ``g'(r)``; zero on the constant tail."""
        r = np.asarray(r, dtype=float)
        radii, phases = self.radii, self.phases
        if radii.size == 1:
            return np.zeros_like(r)
        slopes = np.append(np.diff(phases) / np.diff(radii), 0.0)
        idx = np.searchsorted(radii, r, side="right") - 1
        return slopes[np.clip(idx, 0, slopes.size - 1)]

    def _point(self, r):
        return r * np.exp(1j * self.phase(r))

    def _derivative(self, r):
        return (1.0 + 1j * r * self.phase_slope(r)) * np.exp(1j * self.phase(r))

    def distance_to(self, u: complex) -> float:
        """Minimum distance between the curve and the point ``u``."""
        u = complex(u)
        bp = list(self.breakpoints())
        best = math.inf
        if self.is_infinite:
            r_last = bp[-1]
            theta = self.tail_phase
            t = max((u * complex(math.cos(-theta), math.sin(-theta))).real, r_last)
            best = abs(u - t * complex(math.cos(theta), math.sin(theta)))
        else:
            bp = bp[:-1] + [self.c]
        for a, b in zip(bp[:-1], bp[1:]):
            rs = np.linspace(a, b, 129)
            d = np.abs(self._point(rs) - u)
            i = int(np.argmin(d))
            lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, rs.size - 1)]
            if hi > lo:
                res = minimize_scalar(lambda x: abs(x * np.exp(1j * self.phase(x)) - u),
                                      bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-12 * max(1.0, hi)})
                best = min(best, float(d[i]), float(res.fun))
            else:
                best = min(best, float(d[i]))
        return best

    def to_dict(self) -> dict:
        return {
            "r0": self.r0,
            "c": "inf" if self.is_infinite else self.c,
            "nodes": [[float(r), float(g)] for r, g in self.phase_nodes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Contour":
        try:
            nodes = [tuple(map(float, n)) for n in data["nodes"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError("contour record needs 'nodes': [[r, g], ...]") from exc
        c = data.get("c", "inf")
        c = math.inf if (isinstance(c, str) and c.lower() in ("inf", "infinity")) else float(c)
        return cls(tuple(nodes), c, float(data.get("r0", 1.0)))


def point(contour: Contour, r):
    """``G(r) = r exp(i g(r))`` for ``0 <= r < c``."""
    r_arr = np.asarray(r, dtype=float)
    contour._check_range(r_arr)
    out = contour._point(r_arr)
    return complex(out) if out.ndim == 0 else out


def derivative(contour: Contour, r):
    """``G'(r) = (1 + i r g'(r)) exp(i g(r))``, right-sided at phase nodes."""
    r_arr = np.asarray(r, dtype=float)
    contour._check_range(r_arr)
    out = contour._derivative(r_arr)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Sector:
    """Open angular sector ``phi_min < arg < phi_max`` in the lambda- or z-plane."""

    phi_min: float
    phi_max: float
    plane: str = "lambda"

    def __post_init__(self):
        if self.plane not in ("lambda", "z"):
            raise ParameterError("plane must be 'lambda' or 'z'")
        if not self.phi_min < self.phi_max:
            raise ValidationError("sector has non-positive width")
        if self.phi_max - self.phi_min > 2 * math.pi:
            raise ValidationError("sector wider than 2 pi")

    @property
    def width(self) -> float:
        return self.phi_max - self.phi_min

    @property
    def center(self) -> float:
        return 0.5 * (self.phi_min + self.phi_max)

    def contains(self, angle: float) -> bool:
        shifted = (angle - self.phi_min) % (2 * math.pi)
        return 0.0 < shifted < self.width

    def reflected(self) -> "Sector":
        other = "z" if self.plane == "lambda" else "lambda"
        return Sector(-self.phi_max, -self.phi_min, other)


@dataclass(frozen=True)
class ContourValidation:
    A: float
    B: float
    K1: float
    gamma1: float
    K2: float | None
    gamma2: float
    epsilon_max: float

    @property
    def spread(self) -> float:
        return self.B - self.A


def _phase_extrema(contour: Contour) -> tuple[float, float]:
    # g is piecewise linear: extrema over [r0, c) sit at nodes or at r0
    radii, phases = contour.radii, contour.phases
    upper = contour.c
    vals = [float(contour.phase(contour.r0))]
    vals += [float(g) for r, g in zip(radii, phases) if contour.r0 <= r < upper]
    if not contour.is_infinite:
        # supremum over the half-open range is attained in the limit r -> c
        vals.append(float(contour.phase(upper)))
    return min(vals), max(vals)


def _k1(contour: Contour, gamma1: float) -> float:
    pts = [contour.r0] + [float(r) for r in contour.radii if contour.r0 < r < contour.c]
    best = 0.0
    for r in pts:
        best = max(best, abs(complex(contour._derivative(np.array(r)))) * r ** (-gamma1))
    # left limits at interior nodes and at the finite endpoint
    radii, phases = contour.radii, contour.phases
    ends = [float(r) for r in radii[1:] if contour.r0 < r < contour.c]
    if not contour.is_infinite:
        ends.append(contour.c)
    for r in ends:
        i = int(np.searchsorted(radii, r, side="left")) - 1
        if i < 0 or i + 1 >= radii.size:
            m = 0.0
        else:
            m = (phases[i + 1] - phases[i]) / (radii[i + 1] - radii[i])
        best = max(best, math.hypot(1.0, m * r) * r ** (-gamma1))
    if contour.is_infinite and gamma1 < 0:
        return math.inf
    return best


def _k2(contour: Contour, f: Callable, gamma2: float) -> float:
    hi = contour.c if not contour.is_infinite else max(1e6, 1e3 * float(contour.radii[-1]))
    rs = np.geomspace(contour.r0, hi, 4001)
    rs = np.unique(np.concatenate([rs, [r for r in contour.radii if contour.r0 <= r < hi]]))
    if not contour.is_infinite:
        rs = rs[rs < contour.c]
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(f(contour._point(rs))) * rs ** (-gamma2)
    if not np.all(np.isfinite(vals)):
        return math.inf
    return float(np.max(vals))


def validate(contour: Contour, epsilon: float, f: Callable | None = None,
             gamma1: float = 0.0, gamma2: float = 0.0) -> ContourValidation:
    """Check the growth and phase-spread hypotheses on ``[r0, c)``.

    ``K1`` and ``K2`` are the smallest constants for which
    ``|G'(r)| <= K1 r**gamma1`` and ``|f(G(r))| <= K2 r**gamma2`` hold on
    the sampled contour (``K2`` is ``None`` when no ``f`` is given).
    """
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    A, B = _phase_extrema(contour)
    if B - A >= math.pi - 2 * epsilon:
        raise ValidationError(
            f"phase spread violates B - A < pi - 2 eps: B - A = {B - A:.6g}, "
            f"pi - 2 eps = {math.pi - 2 * epsilon:.6g}")
    K1 = _k1(contour, gamma1)
    if not math.isfinite(K1):
        raise ValidationError(f"|G'(r)| <= K1 r^gamma1 fails for gamma1 = {gamma1}")
    K2 = None
    if f is not None:
        K2 = _k2(contour, f, gamma2)
        if not math.isfinite(K2):
            raise ValidationError(f"|f(G(r))| <= K2 r^gamma2 fails for gamma2 = {gamma2}")
    return ContourValidation(A, B, K1, gamma1, K2, gamma2, HALF_PI - 0.5 * (B - A))


def _check_width(validation: ContourValidation, epsilon: float):
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    width = math.pi - validation.spread - 2 * epsilon
    if width <= 0:
        raise ValidationError(f"sector width pi - (B - A) - 2 eps = {width:.6g} is not positive")


def sector_lambda(validation: ContourValidation, epsilon: float) -> Sector:
    """Sector of ``arg lambda`` where the large-lambda expansion holds."""
    _check_width(validation, epsilon)
    return Sector(-HALF_PI - validation.A + epsilon, HALF_PI - validation.B - epsilon, "lambda")


def sector_z(validation: ContourValidation, epsilon: float) -> Sector:
    """Sector of ``arg z`` (``z = 1/lambda``) where the small-z expansion holds."""
    _check_width(validation, epsilon)
    return Sector(-HALF_PI + validation.B + epsilon, HALF_PI + validation.A - epsilon, "z")
