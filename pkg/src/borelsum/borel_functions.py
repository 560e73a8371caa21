"""
Concrete Borel-plane functions ``f(u)`` for the Laplace engine.

Every model exposes vectorised evaluation, its Taylor coefficients at the
origin, the list of declared singular points and the radius ``rho`` of
the disc of holomorphy around ``u = 0``.

Singular building block::

    strength * (1 - u/location)**(-exponent)

A positive integer exponent gives a pole; any other exponent gives a
branch point whose cut runs from ``location`` radially outward (principal
branch).
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conformal_map import ConformalMap
from .errors import ParameterError
from .series_core import PowerSeries, compose_series

__all__ = [
    "BorelFunction",
    "SingularTerm",
    "Rational",
    "BranchCut",
    "TruncatedSeries",
    "ConformalSeries",
    "Composite",
    "function_from_dict",
]


class BorelFunction(ABC):
    """Abstract evaluator of a Borel transform."""

    kind: str = "abstract"

    @abstractmethod
    def __call__(self, u):
        ...

    @abstractmethod
    def taylor(self, n: int) -> np.ndarray:
        """Taylor coefficients ``f^(k)(0)/k!`` for ``k = 0..n``."""

    @property
    @abstractmethod
    def singularities(self) -> tuple:
        ...

    @abstractmethod
    def to_dict(self) -> dict:
        ...

    def derivatives(self, n: int) -> np.ndarray:
        """``f^(k)(0)`` for ``k = 0..n``."""
        fact = np.array([math.factorial(k) for k in range(n + 1)], dtype=float)
        return self.taylor(n) * fact

    @property
    def rho(self) -> float:
        sing = self.singularities
        return min(abs(s) for s in sing) if sing else math.inf

    def __add__(self, other: "BorelFunction") -> "Composite":
        return Composite((self, other))


def _as_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)


@dataclass(frozen=True)
class SingularTerm:
    location: complex
    strength: complex = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.location == 0:
            raise ParameterError("a singular term cannot sit at the origin")
        object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "strength", complex(self.strength))
        object.__setattr__(self, "exponent", float(self.exponent))

    @property
    def is_pole(self) -> bool:
        return self.exponent > 0 and float(self.exponent).is_integer()

    @property
    def residue(self) -> complex:
        """Residue of a simple pole (``exponent == 1``)."""
        if self.exponent != 1:
            raise ParameterError("residue defined only for simple poles")
        return -self.strength * self.location

    @classmethod
    def simple_pole(cls, location: complex, residue: complex) -> "SingularTerm":
        """Term equal to ``residue / (u - location)``."""
        location = complex(location)
        return cls(location, -complex(residue) / location, 1.0)

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        base = 1.0 - u / self.location
        if self.is_pole:
            return self.strength / base ** int(self.exponent)
        return self.strength * base ** (-self.exponent)

    def taylor(self, n: int) -> np.ndarray:
        out = np.empty(n + 1, dtype=complex)
        term = self.strength
        for k in range(n + 1):
            out[k] = term
            term = term * (self.exponent + k) / (k + 1) / self.location
        return out

    def to_dict(self) -> dict:
        return {
            "location": [self.location.real, self.location.imag],
            "strength": [self.strength.real, self.strength.imag],
            "exponent": self.exponent,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SingularTerm":
        if "residue" in d:
            return cls.simple_pole(_as_complex(d["location"]), _as_complex(d["residue"]))
        return cls(_as_complex(d["location"]), _as_complex(d.get("strength", 1.0)),
                   float(d.get("exponent", 1.0)))


class _SingularSum(BorelFunction):
    def __init__(self, terms: Sequence[SingularTerm], polynomial: PowerSeries | None = None):
        self.terms = tuple(terms)
        if polynomial is not None and polynomial.start_index != 0:
            polynomial = PowerSeries(polynomial.dense(), 0)
        self.polynomial = polynomial
        self._check()

    def _check(self):
        pass

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        out = np.zeros_like(u)
        for t in self.terms:
            out = out + t(u)
        if self.polynomial is not None:
            out = out + self.polynomial(u)
        return out

    def taylor(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, dtype=complex)
        for t in self.terms:
            out += t.taylor(n)
        if self.polynomial is not None:
            m = min(n, self.polynomial.order)
            out[: m + 1] += self.polynomial.dense(m)
        return out

    @property
    def singularities(self) -> tuple:
        return tuple(t.location for t in self.terms if not (t.exponent <= 0 and t.exponent.is_integer()))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "terms": [t.to_dict() for t in self.terms]}
        if self.polynomial is not None:
            d["polynomial"] = self.polynomial.to_dict()
        return d

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.terms)!r})"


class Rational(_SingularSum):
    """Finite sum of poles plus an optional polynomial."""

    kind = "rational"

    def _check(self):
        for t in self.terms:
            if not t.is_pole:
                raise ParameterError("rational functions take positive integer exponents only")

    @classmethod
    def from_poles(cls, poles: Sequence[tuple], polynomial: PowerSeries | None = None) -> "Rational":
        """Build ``sum_i R_i / (u - u_i)`` from ``(u_i, R_i)`` pairs."""
        return cls([SingularTerm.simple_pole(u, r) for u, r in poles], polynomial)


class BranchCut(_SingularSum):
    """Sum of algebraic branch points (poles are allowed as special cases)."""

    kind = "branch_cut"


class TruncatedSeries(BorelFunction):
    """Polynomial ``sum_k b_k u**k`` from a finite Borel series (entire)."""

    kind = "truncated_series"

    def __init__(self, series: PowerSeries):
        self.series = series

    def __call__(self, u):
        return self.series(np.asarray(u, dtype=complex))

    def taylor(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, dtype=complex)
        m = min(n, self.series.order)
        out[: m + 1] = self.series.dense(m)
        return out

    @property
    def singularities(self) -> tuple:
        return ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "series": self.series.to_dict()}


class ConformalSeries(BorelFunction):
    """Truncated expansion ``sum_n c_n w(u)**n`` in the conformal variable."""

    kind = "conformal_series"

    def __init__(self, series: PowerSeries, cmap: ConformalMap = ConformalMap()):
        if series.start_index != 0:
            series = PowerSeries(series.dense(), 0)
        self.series = series
        self.cmap = cmap

    def __call__(self, u):
        return self.series(self.cmap.w(u))

    def taylor(self, n: int) -> np.ndarray:
        c = self.series.dense(min(n, self.series.order))
        outer = np.zeros(n + 1, dtype=complex)
        outer[: c.size] = c
        return compose_series(outer, self.cmap.w_taylor(n), n)

    @property
    def singularities(self) -> tuple:
        return (complex(self.cmap.cut_positive), complex(self.cmap.cut_negative))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "series": self.series.to_dict(), **self.cmap.to_dict()}


class Composite(BorelFunction):
    """Sum of other Borel functions."""

    kind = "composite"

    def __init__(self, parts: Sequence[BorelFunction]):
        if not parts:
            raise ParameterError("composite needs at least one part")
        self.parts = tuple(parts)

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        out = np.zeros_like(u)
        for p in self.parts:
            out = out + p(u)
        return out

    def taylor(self, n: int) -> np.ndarray:
        return sum(p.taylor(n) for p in self.parts)

    @property
    def singularities(self) -> tuple:
        seen = []
        for p in self.parts:
            for s in p.singularities:
                if s not in seen:
                    seen.append(s)
        return tuple(seen)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parts": [p.to_dict() for p in self.parts]}


def function_from_dict(d: dict) -> BorelFunction:
    """Rebuild a Borel function from its record (inverse of ``to_dict``)."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ParameterError("function record needs a 'kind' field")
    kind = d["kind"]
    poly = PowerSeries.from_dict(d["polynomial"]) if "polynomial" in d else None
    if kind == "rational":
        return Rational([SingularTerm.from_dict(t) for t in d.get("terms", [])], poly)
    if kind == "branch_cut":
        return BranchCut([SingularTerm.from_dict(t) for t in d.get("terms", [])], poly)
    if kind == "truncated_series":
        return TruncatedSeries(PowerSeries.from_dict(d["series"]))
    if kind == "conformal_series":
        cmap = ConformalMap(float(d.get("cut_positive", 2.0)), float(d.get("cut_negative", -1.0)))
        return ConformalSeries(PowerSeries.from_dict(d["series"]), cmap)
    if kind == "composite":
        return Composite([function_from_dict(p) for p in d["parts"]])
    if kind == "renormalon":
        from .qcd_adler import RenormalonModel

        return RenormalonModel.from_dict(d)
    raise ParameterError(f"unknown function kind {kind!r}")
