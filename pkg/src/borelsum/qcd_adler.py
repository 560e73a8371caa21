"""
Renormalon models of the Adler function and contour prescriptions.

One-loop coupling in the spacelike variable ``s``::

    a(s) = 1 / (beta0 ln(s / Lambda2)),     lam = 1 / (beta0 a) = ln(s / Lambda2)

and the contour-resummed Adler function::

    D(s) = (1/beta0) int exp(-lam G) B(G) dG.

Two prescriptions around the IR singularities on ``u > 0`` are provided:
the integral passing above them (``up``) and below them (``down``).
Each is evaluated on a ray whose angle is adapted to ``arg lam`` inside
its own half-plane; by Cauchy's theorem that is the analytic continuation
of the fixed displaced contour.  Where no such ray decays, the value is
obtained from the other side plus the closed-form Stokes jump::

    up(lam) - down(lam) = 2 pi i sum_j s_j u_j^g_j lam^(g_j - 1) exp(-lam u_j) / Gamma(g_j)

for IR terms ``s_j (1 - u/u_j)^(-g_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import rgamma

from .borel_functions import BorelFunction, BranchCut, Composite, SingularTerm, TruncatedSeries
from .contour_geometry import Contour
from .errors import GeometryError, LandauPoleError, ParameterError
from .laplace_engine import (
    DEFAULT_CLEARANCE,
    AsymptoticReport,
    QuadratureResult,
    asymptotic_verdict,
    laplace_derivatives,
    laplace_integral,
)
from .series_core import PowerSeries, inverse_borel

__all__ = [
    "DEFAULT_DISPLACEMENT",
    "PRESCRIPTIONS",
    "CouplingModel",
    "RenormalonModel",
    "ProbeReport",
    "running_coupling",
    "borel_variable",
    "adler_series",
    "adler_resum",
    "adler_asymptoticity",
    "pv_resum",
    "stokes_jump",
    "prescription_value",
    "analyticity_probe",
    "segment_path",
    "arc_path",
]

#: Phase (radians) of the rays displaced above and below the positive axis.
DEFAULT_DISPLACEMENT = 0.3
PRESCRIPTIONS = ("pv", "fixed_contour", "sign_switched")
# rays closer than this to decay-free directions are not used natively
_MIN_DECAY_COS = 0.2
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class CouplingModel:
    beta0: float = 1.0
    Lambda2: float = 1.0

    def __post_init__(self):
        if not (self.beta0 > 0 and self.Lambda2 > 0):
            raise ParameterError("beta0 and Lambda2 must be positive")


def borel_variable(s, coupling: CouplingModel) -> complex:
    """``lam = 1/(beta0 a(s)) = ln(s/Lambda2)`` (principal logarithm)."""
    s = complex(s)
    if s == coupling.Lambda2:
        raise LandauPoleError("s sits on the Landau pole s = Lambda2")
    if s == 0:
        raise ParameterError("s = 0 is not admissible")
    return complex(np.log(s / coupling.Lambda2))


def running_coupling(s, coupling: CouplingModel):
    """One-loop ``a(s)``; real for real ``s > 0`` (negative below the Landau pole)."""
    if isinstance(s, (int, float, np.floating, np.integer)):
        s = float(s)
        if s <= 0:
            raise ParameterError("real s must be positive (spacelike convention)")
        if s == coupling.Lambda2:
            raise LandauPoleError("s sits on the Landau pole s = Lambda2")
        return 1.0 / (coupling.beta0 * math.log(s / coupling.Lambda2))
    return 1.0 / (coupling.beta0 * borel_variable(s, coupling))


class RenormalonModel(BorelFunction):
    """Borel transform with IR poles on ``u >= 2``, UV poles on ``u <= -1``,
    optional branch terms on either ray, and an entire analytic part."""

    kind = "renormalon"

    def __init__(self, ir_poles: Sequence[tuple] = ((2.0, -1.0),), uv_poles: Sequence[tuple] = (),
                 branch_terms: Sequence[tuple] = (), analytic_part: PowerSeries | None = None):
        self.ir_poles = tuple((float(u), complex(r)) for u, r in ir_poles)
        self.uv_poles = tuple((float(u), complex(r)) for u, r in uv_poles)
        terms = []
        for bt in branch_terms:
            u, g = float(bt[0]), float(bt[1])
            strength = complex(bt[2]) if len(bt) > 2 else 1.0
            terms.append((u, g, strength))
        self.branch_terms = tuple(terms)
        self.analytic_part = analytic_part
        for u, _ in self.ir_poles:
            if u < 2:
                raise ParameterError(f"IR renormalon at u = {u} lies below u = 2")
        for u, _ in self.uv_poles:
            if u > -1:
                raise ParameterError(f"UV renormalon at u = {u} lies above u = -1")
        for u, _, _ in self.branch_terms:
            if -1 < u < 2:
                raise ParameterError(f"branch point at u = {u} lies off the renormalon rays")
        singular = [SingularTerm.simple_pole(u, r) for u, r in self.ir_poles + self.uv_poles]
        singular += [SingularTerm(u, s, g) for u, g, s in self.branch_terms]
        parts = []
        if singular:
            parts.append(BranchCut(singular))
        if analytic_part is not None:
            parts.append(TruncatedSeries(PowerSeries(analytic_part.dense(), 0)))
        if not parts:
            raise ParameterError("renormalon model is empty")
        self._impl = Composite(parts)
        self.terms = tuple(singular)

    @property
    def ir_terms(self) -> tuple:
        return tuple(t for t in self.terms if t.location.real > 0)

    def __call__(self, u):
        return self._impl(u)

    def taylor(self, n: int) -> np.ndarray:
        return self._impl.taylor(n)

    @property
    def singularities(self) -> tuple:
        return self._impl.singularities

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "ir_poles": [[u, [r.real, r.imag]] for u, r in self.ir_poles],
            "uv_poles": [[u, [r.real, r.imag]] for u, r in self.uv_poles],
            "branch_terms": [[u, g, [s.real, s.imag]] for u, g, s in self.branch_terms],
        }
        if self.analytic_part is not None:
            d["analytic_part"] = self.analytic_part.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RenormalonModel":
        def cx(x):
            return complex(float(x[0]), float(x[1])) if isinstance(x, (list, tuple)) else complex(x)

        try:
            ir = [(float(u), cx(r)) for u, r in d.get("ir_poles", [])]
            uv = [(float(u), cx(r)) for u, r in d.get("uv_poles", [])]
            br = [(float(t[0]), float(t[1]), cx(t[2]) if len(t) > 2 else 1.0)
                  for t in d.get("branch_terms", [])]
        except (TypeError, ValueError, IndexError) as exc:
            raise ParameterError("malformed renormalon model record") from exc
        ap = PowerSeries.from_dict(d["analytic_part"]) if "analytic_part" in d else None
        return cls(ir, uv, br, ap)


def adler_series(B: BorelFunction, beta0: float, order: int) -> PowerSeries:
    """Perturbative coefficients ``D_1 .. D_{order+1}`` implied by ``B``."""
    return inverse_borel(PowerSeries(B.taylor(order), 0), beta0)


def adler_resum(s, coupling: CouplingModel, B: BorelFunction, contour: Contour,
                kernel: str = "consistent", tol: float = 1e-10,
                clearance: float = DEFAULT_CLEARANCE) -> QuadratureResult:
    """Contour-resummed Adler function at ``s``."""
    lam = borel_variable(s, coupling)
    q = laplace_integral(B, contour, lam, kernel, tol, clearance)
    return QuadratureResult(q.value / coupling.beta0, q.abs_error_estimate / coupling.beta0,
                            q.truncation_radius, q.evaluations, q.converged)


def adler_asymptoticity(coupling: CouplingModel, B: BorelFunction, contour: Contour,
                        a_values: Sequence[float], N_max: int, tol: float = 1e-12) -> AsymptoticReport:
    """Check ``D(s) - sum_{n<=N+1} D_n a^n = o(a^N)`` on a shrinking grid of real ``a > 0``."""
    a = np.sort(np.asarray(a_values, dtype=float))[::-1]
    if np.any(a <= 0):
        raise ParameterError("coupling grid must be positive")
    s = coupling.Lambda2 * np.exp(1.0 / (coupling.beta0 * a))
    vals, errs = [], []
    for ss in s:
        q = adler_resum(float(ss), coupling, B, contour, tol=tol)
        vals.append(q.value)
        errs.append(q.abs_error_estimate)
    vals, errs = np.array(vals), np.array(errs)
    D = adler_series(B, coupling.beta0, N_max)
    remainders, verdicts, exact = {}, {}, {}
    for N in range(N_max + 1):
        terms = np.array([D.coefficient(n) * a ** n for n in range(1, N + 2)])
        R = vals - terms.sum(axis=0)
        remainders[N] = R
        noise = errs + 8 * _EPS * (np.abs(terms).sum(axis=0) + np.abs(vals))
        verdicts[N], exact[N] = asymptotic_verdict(a, R, noise, N)
    return AsymptoticReport(0.0, a.astype(complex), vals, errs, remainders, verdicts, exact, None, None)


def pv_resum(s, coupling: CouplingModel, B: BorelFunction, displacement: float = DEFAULT_DISPLACEMENT,
             tol: float = 1e-10, clearance: float = DEFAULT_CLEARANCE) -> QuadratureResult:
    """Principal value: mean of the contours displaced by ``+-displacement``."""
    if not displacement > 0:
        raise ParameterError("displacement must be positive")
    up = adler_resum(s, coupling, B, Contour.ray(displacement), tol=tol, clearance=clearance)
    dn = adler_resum(s, coupling, B, Contour.ray(-displacement), tol=tol, clearance=clearance)
    return QuadratureResult(0.5 * (up.value + dn.value),
                            0.5 * (up.abs_error_estimate + dn.abs_error_estimate),
                            max(up.truncation_radius, dn.truncation_radius),
                            up.evaluations + dn.evaluations, up.converged and dn.converged)


def _falling(x: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= x - i
    return out


def stokes_jump(B: BorelFunction, lam: complex, order: int = 0) -> np.ndarray:
    """``d^k/dlam^k [up(lam) - down(lam)]`` for ``k = 0..order``.

    Sums the closed-form contributions of every singular term of ``B`` on
    the positive real axis; ``lam**(g-1)`` uses the principal branch.
    """
    lam = complex(lam)
    out = np.zeros(order + 1, dtype=complex)
    terms = getattr(B, "terms", None)
    if terms is None:
        if B.singularities:
            raise ParameterError("stokes_jump needs a model built from singular terms")
        return out
    for t in terms:
        u = t.location
        if u.imag != 0 or u.real <= 0:
            continue
        u = u.real
        g = t.exponent
        pref = 2j * math.pi * t.strength * u ** g * float(rgamma(g))
        if pref == 0:
            continue
        e = np.exp(-lam * u)
        for k in range(order + 1):
            acc = 0j
            for j in range(k + 1):
                acc += math.comb(k, j) * _falling(g - 1, j) * lam ** (g - 1 - j) * (-u) ** (k - j)
            out[k] += pref * e * acc
    return out


def _ray_for(lam: complex, side: int, displacement: float):
    """Best decaying ray angle in the half-plane of ``side`` (+1 up, -1 down), or None."""
    phi = math.atan2(lam.imag, lam.real)
    lo, hi = (displacement, math.pi - displacement) if side > 0 else (-math.pi + displacement, -displacement)
    theta = min(max(-phi, lo), hi)
    if math.cos(phi + theta) < _MIN_DECAY_COS:
        return None
    return theta


def _side(B, lam, side, order, displacement, tol, clearance):
    theta = _ray_for(lam, side, displacement)
    if theta is not None:
        return laplace_derivatives(B, Contour.ray(theta), lam, order, tol=tol, clearance=clearance)
    theta = _ray_for(lam, -side, displacement)
    if theta is None:
        raise GeometryError(f"no decaying ray on either side of the IR axis at lambda = {lam:.6g}")
    val, err = laplace_derivatives(B, Contour.ray(theta), lam, order, tol=tol, clearance=clearance)
    jump = stokes_jump(B, lam, order)
    return val + side * jump, err + 8 * _EPS * np.abs(jump)


def prescription_value(B: BorelFunction, lam: complex, prescription: str, order: int = 0,
                       displacement: float = DEFAULT_DISPLACEMENT, tol: float = 1e-12,
                       clearance: float = DEFAULT_CLEARANCE):
    """Laplace integral of ``B`` under a prescription, with ``lam``-derivatives.

    ``pv`` is the mean of the up and down continuations, ``fixed_contour``
    is the up continuation everywhere, ``sign_switched`` uses up where
    ``Re lam > 0`` and down elsewhere.
    """
    lam = complex(lam)
    if prescription == "pv":
        vu, eu = _side(B, lam, +1, order, displacement, tol, clearance)
        vd, ed = _side(B, lam, -1, order, displacement, tol, clearance)
        return 0.5 * (vu + vd), 0.5 * (eu + ed)
    if prescription == "fixed_contour":
        return _side(B, lam, +1, order, displacement, tol, clearance)
    if prescription == "sign_switched":
        return _side(B, lam, +1 if lam.real > 0 else -1, order, displacement, tol, clearance)
    raise ParameterError(f"prescription must be one of {PRESCRIPTIONS}")


@dataclass
class ProbeReport:
    prescription: str
    s: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    jumps: np.ndarray
    local_errors: np.ndarray
    discontinuities: list

    @property
    def max_jump(self) -> float:
        return float(np.max(self.jumps)) if self.jumps.size else 0.0

    @property
    def max_jump_ratio(self) -> float:
        return float(np.max(self.jumps / self.local_errors)) if self.jumps.size else 0.0

    @property
    def continuous(self) -> bool:
        return not self.discontinuities

    def rows(self):
        jumps = np.append(self.jumps, 0.0)
        return [(i, s.real, s.imag, v.real, v.imag, float(j))
                for i, (s, v, j) in enumerate(zip(self.s, self.values, jumps))]


def segment_path(s_start: complex, s_end: complex, n: int) -> np.ndarray:
    return np.linspace(complex(s_start), complex(s_end), n)


def arc_path(center: complex, radius: float, angle_start: float, angle_end: float, n: int) -> np.ndarray:
    t = np.linspace(angle_start, angle_end, n)
    return complex(center) + radius * np.exp(1j * t)


def _check_path(s: np.ndarray, coupling: CouplingModel, clearance: float):
    L2 = coupling.Lambda2
    for x in s:
        if abs(x - L2) < clearance:
            raise GeometryError(f"path point {x:.6g} within {clearance:g} of the Landau pole")
        if abs(x.imag) < clearance and x.real < L2:
            raise GeometryError(f"path point {x:.6g} within {clearance:g} of the real axis below "
                                f"Lambda2 (timelike cut or Landau segment)")


def _taylor_step(derivs: np.ndarray, h: complex) -> complex:
    k = np.arange(derivs.size)
    fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
    return complex(np.sum(derivs * h ** k / fact))


def analyticity_probe(coupling: CouplingModel, B: BorelFunction, prescription: str,
                      s_path: Sequence[complex], tol: float = 1e-12,
                      displacement: float = DEFAULT_DISPLACEMENT, taylor_order: int = 14,
                      clearance: float = 1e-3) -> ProbeReport:
    """Follow a prescription along a path in the s-plane and look for jumps.

    At every point the value and its first ``taylor_order`` derivatives in
    ``lam`` are computed.  The Taylor patch of each point predicts its
    neighbour (in both directions); the jump across an interval is the
    larger prediction miss.  Intervals whose jump exceeds 10 times the
    propagated local error are listed as discontinuities.
    """
    if prescription not in PRESCRIPTIONS:
        raise ParameterError(f"prescription must be one of {PRESCRIPTIONS}")
    s = np.asarray(s_path, dtype=complex)
    if s.size < 2:
        raise ParameterError("probe path needs at least two points")
    _check_path(s, coupling, clearance * coupling.Lambda2)
    lam = np.array([borel_variable(x, coupling) for x in s])
    derivs, errs = [], []
    for l in lam:
        v, e = prescription_value(B, l, prescription, taylor_order, displacement, tol)
        derivs.append(v / coupling.beta0)
        errs.append(e / coupling.beta0)
    derivs, errs = np.array(derivs), np.array(errs)
    jumps, local = [], []
    fact = np.array([math.factorial(k) for k in range(taylor_order + 1)], dtype=float)
    for i in range(s.size - 1):
        h = lam[i + 1] - lam[i]
        w = np.abs(h) ** np.arange(taylor_order + 1) / fact
        fwd = abs(_taylor_step(derivs[i], h) - derivs[i + 1, 0])
        bwd = abs(_taylor_step(derivs[i + 1], -h) - derivs[i, 0])
        trunc = max(abs(derivs[i, -1]), abs(derivs[i + 1, -1])) * w[-1]
        err_f = np.sum(w * errs[i]) + errs[i + 1, 0]
        err_b = np.sum(w * errs[i + 1]) + errs[i, 0]
        jumps.append(max(fwd, bwd))
        local.append(max(err_f, err_b) + trunc)
    jumps, local = np.array(jumps), np.array(local)
    disc = [int(i) for i in np.nonzero(jumps > 10.0 * local)[0]]
    return ProbeReport(prescription, s, derivs[:, 0], errs[:, 0], jumps, local, disc)
