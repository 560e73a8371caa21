"""
Power-series algebra for perturbative coefficients.

A :class:`PowerSeries` is a dense, finite list of complex coefficients
attached to consecutive powers of the expansion variable, starting at
``start_index``.  The same container carries perturbative coefficients
``D_n`` (start 1), Borel coefficients ``b_n`` (start 0) and conformal
coefficients ``c_n`` (start 0).

The Borel transform used throughout is::

    B(u) = sum_n b_n u^n,      b_n = D_{n+1} / (beta0^n n!)

Gamma functions come from :mod:`math` (Lanczos-type approximation in
CPython); factorials too large for a double are handled in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, RangeError

__all__ = [
    "GAMMA_RELATIVE_ACCURACY",
    "PowerSeries",
    "WatsonParams",
    "borel_transform",
    "inverse_borel",
    "watson_coefficients",
    "evaluate_truncated",
    "multiply_series",
    "divide_series",
    "compose_series",
]

#: Relative accuracy target of the Gamma function used for coefficients.
GAMMA_RELATIVE_ACCURACY = 1e-13


def _as_coeff_array(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=complex).ravel()
    if arr.size == 0:
        raise ParameterError("a power series needs at least one coefficient")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("power-series coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Truncated power series ``sum_k coeffs[k] * z**(start_index + k)``."""

    coeffs: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs))
        if int(self.start_index) != self.start_index or self.start_index < 0:
            raise ParameterError("start_index must be a non-negative integer")
        object.__setattr__(self, "start_index", int(self.start_index))

    def __len__(self) -> int:
        return self.coeffs.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return (self.start_index == other.start_index
                and self.coeffs.shape == other.coeffs.shape
                and bool(np.all(self.coeffs == other.coeffs)))

    def __repr__(self) -> str:
        return f"PowerSeries({self.coeffs.tolist()!r}, start_index={self.start_index})"

    @property
    def order(self) -> int:
        """Highest power carried by the series."""
        return self.start_index + self.coeffs.size - 1

    def coefficient(self, n: int) -> complex:
        """Coefficient of ``z**n`` (zero below ``start_index``)."""
        if n > self.order:
            raise RangeError(f"order {n} exceeds available order {self.order}")
        if n < self.start_index:
            return 0j
        return complex(self.coeffs[n - self.start_index])

    def dense(self, order: int | None = None) -> np.ndarray:
        """Coefficients of ``z**0 .. z**order`` with explicit leading zeros."""
        order = self.order if order is None else order
        if order > self.order:
            raise RangeError(f"order {order} exceeds available order {self.order}")
        out = np.zeros(order + 1, dtype=complex)
        if order >= self.start_index:
            out[self.start_index:] = self.coeffs[: order + 1 - self.start_index]
        return out

    def __call__(self, z):
        return evaluate_truncated(self, z, self.order)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        order = min(self.order, other.order)
        start = min(self.start_index, other.start_index)
        dense = self.dense(order) + other.dense(order)
        return PowerSeries(dense[start:], start)

    def __mul__(self, scalar) -> "PowerSeries":
        return PowerSeries(self.coeffs * complex(scalar), self.start_index)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {
            "start_index": self.start_index,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PowerSeries":
        try:
            raw = data["coeffs"]
            start = data.get("start_index", 0)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParameterError("series record needs 'coeffs' (and optional 'start_index')") from exc
        coeffs = []
        for i, c in enumerate(raw):
            if isinstance(c, (list, tuple)):
                if len(c) != 2:
                    raise ParameterError(f"coeffs[{i}] must be [re, im]")
                coeffs.append(complex(float(c[0]), float(c[1])))
            else:
                coeffs.append(complex(float(c)))
        return cls(coeffs, start)


@dataclass(frozen=True)
class WatsonParams:
    """Exponents of the classic Watson integral ``exp(-lam x**alpha) x**(beta-1)``."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterError("Watson lemma needs alpha > 0 and beta > 0")


def _log_scale(n: int, beta0: float) -> float:
    return n * math.log(beta0) + math.lgamma(n + 1)


def _borel_scales(n_terms: int, beta0: float):
    """Return (scale, use_log) per order: scale = beta0**n * n! or its log."""
    scales = []
    for n in range(n_terms):
        try:
            s = float(beta0) ** n * float(math.factorial(n))
        except OverflowError:
            s = math.inf
        if math.isfinite(s) and s > 0:
            scales.append((s, False))
        else:
            scales.append((_log_scale(n, beta0), True))
    return scales


def _log_scaled(x: float, log_factor: float) -> float:
    """``x * exp(log_factor)`` without forming the factor itself."""
    if x == 0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(x)) + log_factor), x)


def _check_beta0(beta0) -> float:
    beta0 = float(beta0)
    if not beta0 > 0 or not math.isfinite(beta0):
        raise ParameterError(f"beta0 must be positive, got {beta0}")
    return beta0


def borel_transform(D: PowerSeries, beta0: float) -> PowerSeries:
    """Borel coefficients ``b_n = D_{n+1} / (beta0**n n!)`` of a perturbative series.

    ``D`` must start at the first power of the coupling.
    """
    beta0 = _check_beta0(beta0)
    if D.start_index != 1:
        raise ParameterError("perturbative series must have start_index 1")
    out = np.empty(len(D), dtype=complex)
    for n, (scale, use_log) in enumerate(_borel_scales(len(D), beta0)):
        d = D.coeffs[n]
        if use_log:
            out[n] = complex(_log_scaled(d.real, -scale), _log_scaled(d.imag, -scale))
        else:
            out[n] = complex(d.real / scale, d.imag / scale)
    return PowerSeries(out, 0)


def inverse_borel(b: PowerSeries, beta0: float) -> PowerSeries:
    """Perturbative coefficients ``D_{n+1} = b_n beta0**n n!``."""
    beta0 = _check_beta0(beta0)
    if b.start_index != 0:
        raise ParameterError("Borel series must have start_index 0")
    out = np.empty(len(b), dtype=complex)
    for n, (scale, use_log) in enumerate(_borel_scales(len(b), beta0)):
        c = b.coeffs[n]
        if use_log:
            try:
                out[n] = complex(_log_scaled(c.real, scale), _log_scaled(c.imag, scale))
            except OverflowError:
                raise RangeError(f"D_{n + 1} overflows double precision") from None
        else:
            out[n] = complex(c.real * scale, c.imag * scale)
    if not np.all(np.isfinite(out)):
        raise RangeError("perturbative coefficients overflow double precision")
    return PowerSeries(out, 1)


def watson_coefficients(f_derivs: Sequence[complex], params: WatsonParams = WatsonParams()):
    """Terms of the Watson expansion in inverse powers of ``lam``.

    Parameters
    ----------
    f_derivs : sequence of complex
        Derivatives ``f^(k)(0)`` for ``k = 0..N``.
    params : WatsonParams

    Returns
    -------
    list of (exponent, coefficient)
        The k-th entry multiplies ``lam**(-exponent)`` with
        ``exponent = (k + beta)/alpha`` and
        ``coefficient = Gamma(exponent) f^(k)(0) / (alpha k!)``.
    """
    alpha, beta = params.alpha, params.beta
    terms = []
    for k, d in enumerate(f_derivs):
        d = complex(d)
        if not (math.isfinite(d.real) and math.isfinite(d.imag)):
            raise ParameterError(f"derivative {k} is not finite")
        x = (k + beta) / alpha
        try:
            scale = math.gamma(x) / math.factorial(k) / alpha
        except OverflowError:
            log_scale = math.lgamma(x) - math.lgamma(k + 1) - math.log(alpha)
            if log_scale > 709.0:
                raise RangeError(f"Watson coefficient {k} overflows double precision")
            scale = math.exp(log_scale)
        coeff = d * scale
        if not (math.isfinite(coeff.real) and math.isfinite(coeff.imag)):
            raise RangeError(f"Watson coefficient {k} overflows double precision")
        terms.append((x, coeff))
    return terms


def evaluate_truncated(s: PowerSeries, z, N: int):
    """Partial sum of ``s`` through the power ``z**N`` (Horner scheme).

    Works elementwise on array ``z``.
    """
    if N > s.order:
        raise RangeError(f"truncation order {N} exceeds available order {s.order}")
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    if N < s.start_index:
        return acc[()] if acc.ndim == 0 else acc
    for c in s.coeffs[: N - s.start_index + 1][::-1]:
        acc = acc * z + c
    acc = acc * z ** s.start_index
    return acc[()] if acc.ndim == 0 else acc


def multiply_series(a, b, N: int) -> np.ndarray:
    """Cauchy product of dense coefficient arrays, truncated after ``z**N``."""
    out = np.zeros(N + 1, dtype=complex)
    prod = np.convolve(np.asarray(a, dtype=complex)[: N + 1], np.asarray(b, dtype=complex)[: N + 1])[: N + 1]
    out[: prod.size] = prod
    return out


def divide_series(num, den, N: int) -> np.ndarray:
    """Coefficients of ``num/den`` through ``z**N``; needs ``den[0] != 0``."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    if den[0] == 0:
        raise ParameterError("series division needs a non-zero constant term")
    a = np.zeros(N + 1, dtype=complex)
    a[: min(num.size, N + 1)] = num[: N + 1]
    d = np.zeros(N + 1, dtype=complex)
    d[: min(den.size, N + 1)] = den[: N + 1]
    out = np.zeros(N + 1, dtype=complex)
    for n in range(N + 1):
        out[n] = (a[n] - np.dot(d[1 : n + 1], out[n - 1 :: -1][:n])) / d[0] if n else a[0] / d[0]
    return out


def compose_series(outer, inner, N: int) -> np.ndarray:
    """Coefficients of ``outer(inner(z))`` through ``z**N``.

    ``inner`` must vanish at the origin; Horner composition, O(N^3).
    """
    outer = np.asarray(outer, dtype=complex)
    inner = np.asarray(inner, dtype=complex)
    if inner.size and inner[0] != 0:
        raise ParameterError("inner series must vanish at the origin")
    if outer.size - 1 < N:
        raise RangeError(f"outer series of order {outer.size - 1} cannot supply order {N}")
    inner = np.pad(inner[: N + 1], (0, max(0, N + 1 - inner.size)))
    acc = np.zeros(N + 1, dtype=complex)
    for c in outer[: N + 1][::-1]:
        acc = multiply_series(acc, inner, N)
        acc[0] += c
    return acc
