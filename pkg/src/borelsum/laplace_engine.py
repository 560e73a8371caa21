"""
Generalised Laplace-Borel integrals along bent contours.

The central object is::

    Phi(lam) = int_0^c exp(-lam G(r)) f(G(r)) G'(r) dr

(the ``consistent`` kernel), whose large-``lam`` expansion is
``sum_k k! a_k lam**-(k+1)`` with ``a_k`` the Taylor coefficients of ``f``.
The ``literal`` kernel carries an extra factor ``G(r)`` and expands as
``sum_k (k+1)! a_k lam**-(k+2)``.  Setting ``lam = 1/z`` gives the
resummed function of the perturbative variable ``z``.

Integration is segment-wise adaptive Gauss-Kronrod between phase nodes.
Unbounded contours are cut at a radius where the kernel bound on the
constant-phase tail drops below ``tol`` times the accumulated value; the
neglected tail is added to the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .borel_functions import BorelFunction
from .contour_geometry import Contour, Sector, sector_lambda, sector_z, validate
from .errors import DivergenceError, GeometryError, InsufficientSignalError, ParameterError, RangeError
from .quadrature import gauss_kronrod

__all__ = [
    "KERNELS",
    "LAMBDA_MAX",
    "DEFAULT_CLEARANCE",
    "VERDICT_DECAY_FACTOR",
    "QuadratureResult",
    "AsymptoticReport",
    "BoundReport",
    "AmbiguityFit",
    "laplace_integral",
    "laplace_derivatives",
    "resum",
    "expansion_terms",
    "expansion_partial_sum",
    "asymptotic_verdict",
    "check_asymptoticity",
    "bound_check",
    "ambiguity_scan",
]

KERNELS = ("consistent", "literal")
LAMBDA_MAX = 1e4
DEFAULT_CLEARANCE = 1e-3
#: ``|R_N/z^N|`` must end below this fraction of its first value to count as -> 0.
VERDICT_DECAY_FACTOR = 0.1
#: A remainder within this multiple of its noise estimate is treated as zero.
NOISE_MULTIPLE = 10.0
#: Tail decay rate relative to ``|lam|`` below which the kernel counts as
#: non-decaying (directions within ~1e-6 rad of the sector boundary).
DECAY_FLOOR = 1e-6

_EPS = np.finfo(float).eps


@dataclass
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    truncation_radius: float
    evaluations: int
    converged: bool = True

    def __post_init__(self):
        self.value = complex(self.value)
        self.abs_error_estimate = float(self.abs_error_estimate)


def _check_kernel(kernel: str):
    if kernel not in KERNELS:
        raise ParameterError(f"kernel must be one of {KERNELS}, got {kernel!r}")


@lru_cache(maxsize=512)
def _clearance_cached(contour: Contour, singularities: tuple, clearance: float):
    for s in singularities:
        d = contour.distance_to(s)
        if d < clearance:
            raise GeometryError(
                f"contour passes within {d:.3g} of the singularity at u = {s:.6g} "
                f"(clearance {clearance:.3g})")


def _check_clearance(f: BorelFunction, contour: Contour, clearance: float):
    _clearance_cached(contour, tuple(complex(s) for s in f.singularities), float(clearance))


def _tail_sector(contour: Contour) -> tuple[float, float]:
    th = contour.tail_phase
    return (-0.5 * math.pi - th, 0.5 * math.pi - th)


def _integrand(f: BorelFunction, contour: Contour, lam: complex, kernel: str, order: int):
    literal = kernel == "literal"

    def h(r):
        G = contour._point(r)
        base = np.exp(-lam * G) * f(G) * contour._derivative(r)
        if literal:
            base = base * G
        if order == 0:
            return base[None, :]
        powers = (-G)[None, :] ** np.arange(order + 1)[:, None]
        return powers * base[None, :]

    return h


def _tail_bound(f, contour, lam, kernel, order, R) -> np.ndarray:
    """Bound on ``int_R^inf |integrand|`` per derivative order, inf if not yet valid."""
    th = contour.tail_phase
    kappa = (lam * complex(math.cos(th), math.sin(th))).real
    e = complex(math.cos(th), math.sin(th))
    f1, f2 = abs(complex(f(R * e))), abs(complex(f(2 * R * e)))
    fmax = max(f1, f2, abs(complex(f(1.5 * R * e))))
    grow = math.log2(f2 / f1) if f1 > 0 and f2 > 0 else 0.0
    extra = 1.0 if kernel == "literal" else 0.0
    out = np.empty(order + 1)
    for k in range(order + 1):
        gamma = max(grow, 0.0) + extra + k
        if kappa * R <= 2 * (gamma + 1):
            out[k] = math.inf
        else:
            out[k] = 2.0 * math.exp(-kappa * R) * fmax * R ** (extra + k) / kappa
    return out


def _integrate(f: BorelFunction, contour: Contour, lam: complex, kernel: str, tol: float,
               clearance: float, order: int = 0):
    _check_kernel(kernel)
    lam = complex(lam)
    if not (0 < tol <= 1e-3):
        raise ParameterError("tol must lie in (0, 1e-3]")
    if lam == 0 or not np.isfinite(lam):
        raise ParameterError("lambda must be finite and non-zero")
    if abs(lam) > LAMBDA_MAX:
        raise ParameterError(f"|lambda| = {abs(lam):.3g} exceeds the cap {LAMBDA_MAX:g}")
    _check_clearance(f, contour, clearance)
    h = _integrand(f, contour, lam, kernel, order)
    bp = list(contour.breakpoints())
    if not contour.is_infinite:
        res = gauss_kronrod(h, bp, epsrel=tol, ncomp=order + 1)
        return res.value, res.error, contour.c, res.evaluations, res.converged

    th = contour.tail_phase
    kappa = (lam * complex(math.cos(th), math.sin(th))).real
    if kappa <= DECAY_FLOOR * abs(lam):
        lo, hi = _tail_sector(contour)
        raise DivergenceError(
            f"kernel exp(-lambda G) does not decay on the contour tail: arg lambda = "
            f"{math.atan2(lam.imag, lam.real):.6g} outside ({lo:.6g}, {hi:.6g})")
    step = 1.0 / kappa
    r_last = bp[-1]
    # rough magnitude from a first pass over a few decay lengths
    R = r_last + 12.0 * step
    pilot = gauss_kronrod(h, bp + [R] if R > r_last else bp, epsrel=min(1e-4, 10 * tol), ncomp=order + 1)
    scale = np.maximum(np.abs(pilot.value), 1e-300)
    evals = pilot.evaluations
    for _ in range(100000):
        tb = _tail_bound(f, contour, lam, kernel, order, R)
        if np.all(tb <= 0.1 * tol * scale):
            break
        R += max(4.0 * step, 0.25 * R)
    else:  # pragma: no cover - pathological growth
        raise DivergenceError("could not find a truncation radius for the contour tail")
    pts = bp + [x for x in np.linspace(r_last, R, 2 + int(min(64, (R - r_last) / (8 * step))))[1:]]
    res = gauss_kronrod(h, pts, epsrel=tol, ncomp=order + 1)
    tail = _tail_bound(f, contour, lam, kernel, order, R)
    return res.value, res.error + tail, R, evals + res.evaluations, res.converged


def laplace_integral(f: BorelFunction, contour: Contour, lam: complex, kernel: str = "consistent",
                     tol: float = 1e-10, clearance: float = DEFAULT_CLEARANCE) -> QuadratureResult:
    """Laplace-Borel integral of ``f`` along ``contour`` at ``lam``."""
    val, err, R, n, ok = _integrate(f, contour, lam, kernel, tol, clearance)
    return QuadratureResult(val[0], err[0], R, n, ok)


def laplace_derivatives(f: BorelFunction, contour: Contour, lam: complex, order: int,
                        kernel: str = "consistent", tol: float = 1e-10,
                        clearance: float = DEFAULT_CLEARANCE):
    """``d^k Phi / d lam^k`` for ``k = 0..order`` and their error estimates."""
    val, err, _, _, _ = _integrate(f, contour, lam, kernel, tol, clearance, order)
    return val, err


def resum(f: BorelFunction, contour: Contour, z: complex, kernel: str = "consistent",
          tol: float = 1e-10, clearance: float = DEFAULT_CLEARANCE) -> QuadratureResult:
    """Borel-resummed value at coupling ``z`` (``lam = 1/z``)."""
    z = complex(z)
    if z == 0:
        raise ParameterError("z = 0 is the expansion point, not an evaluation point")
    return laplace_integral(f, contour, 1.0 / z, kernel, tol, clearance)


def expansion_terms(f: BorelFunction, N: int, kernel: str = "consistent"):
    """Asymptotic expansion of the integral as ``[(power, coefficient)]``.

    ``power`` is the exponent of ``z`` (equivalently of ``1/lam``).
    """
    _check_kernel(kernel)
    a = f.taylor(N)
    shift = 1 if kernel == "consistent" else 2
    return [(k + shift, complex(math.gamma(k + shift) * a[k])) for k in range(N + 1)]


def expansion_partial_sum(f: BorelFunction, z, N: int, kernel: str = "consistent"):
    """Sum of the first ``N + 1`` expansion terms at ``z`` and the sum of their moduli."""
    z = np.asarray(z, dtype=complex)
    total = np.zeros_like(z)
    mod = np.zeros(z.shape)
    for p, c in expansion_terms(f, N, kernel):
        t = c * z ** p
        total = total + t
        mod = mod + np.abs(t)
    return total, mod


def asymptotic_verdict(z_abs: np.ndarray, remainders: np.ndarray, noise: np.ndarray, N: int):
    """Decide whether ``R_N(z) = o(z^N)`` on a shrinking grid.

    Returns ``(passed, exact)``.  Remainders within ``NOISE_MULTIPLE``
    times their noise are treated as zero; if all of them are, the case is
    exact.  Otherwise ``|R_N/z^(N+1)|`` must stay bounded and ``|R_N/z^N|``
    must decrease over the last half of the grid, ending below
    ``VERDICT_DECAY_FACTOR`` times its first value.
    """
    z_abs = np.asarray(z_abs, dtype=float)
    R = np.abs(np.asarray(remainders))
    noise = np.asarray(noise, dtype=float)
    quiet = R <= NOISE_MULTIPLE * noise
    if np.all(quiet):
        return True, True
    ratio = np.where(quiet, NOISE_MULTIPLE * noise, R) / z_abs ** N
    ratio1 = np.where(quiet, NOISE_MULTIPLE * noise, R) / z_abs ** (N + 1)
    half = z_abs.size // 2
    first_half, last_half = ratio1[: max(half, 1)], ratio1[half:]
    bounded = np.max(last_half) <= 10.0 * max(np.max(first_half), np.finfo(float).tiny)
    tail = ratio[half:]
    loud = ~quiet[half:]
    seq = tail[loud]
    decreasing = bool(np.all(np.diff(seq) <= 1e-9 * seq[:-1])) if seq.size > 1 else True
    vanishing = ratio[-1] < VERDICT_DECAY_FACTOR * ratio[0]
    return bool(bounded and decreasing and vanishing), False


@dataclass
class AsymptoticReport:
    direction: float
    z: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    remainders: dict
    verdicts: dict
    exact: dict
    in_sector: bool | None
    sector: Sector | None
    diverged: bool = False
    message: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values()) and not self.diverged

    def rows(self):
        out = []
        for N, R in self.remainders.items():
            for zz, rr in zip(self.z, R):
                out.append((N, zz.real, zz.imag, rr.real, rr.imag, abs(rr) / abs(zz) ** N))
        return out


def _z_grid(direction: float, z_abs: Sequence[float]) -> np.ndarray:
    z_abs = np.sort(np.asarray(z_abs, dtype=float))[::-1]
    if np.any(z_abs <= 0):
        raise ParameterError("z-grid moduli must be positive")
    return z_abs * complex(math.cos(direction), math.sin(direction))


def check_asymptoticity(f: BorelFunction, contour: Contour, epsilon: float, direction: float,
                        z_abs: Sequence[float], N_max: int, kernel: str = "consistent",
                        tol: float = 1e-12, clearance: float = DEFAULT_CLEARANCE) -> AsymptoticReport:
    """Tabulate ``R_N(z)`` along the ray ``arg z = direction`` for ``N <= N_max``."""
    try:
        sector = sector_z(validate(contour, epsilon), epsilon)
        in_sector = sector.contains(direction)
    except Exception:  # inadmissible contour: still measurable, just no prediction
        sector, in_sector = None, None
    z = _z_grid(direction, z_abs)
    values, errors = [], []
    diverged, message = False, ""
    for zz in z:
        try:
            q = resum(f, contour, zz, kernel, tol, clearance)
        except DivergenceError as exc:
            diverged, message = True, str(exc)
            break
        values.append(q.value)
        errors.append(q.abs_error_estimate)
    values = np.array(values, dtype=complex)
    errors = np.array(errors, dtype=float)
    zs = z[: values.size]
    remainders, verdicts, exact = {}, {}, {}
    for N in range(N_max + 1):
        partial, mod = expansion_partial_sum(f, zs, N, kernel)
        R = values - partial
        remainders[N] = R
        if diverged or values.size < 4:
            verdicts[N], exact[N] = False, False
            continue
        noise = errors + 8 * _EPS * (mod + np.abs(values))
        verdicts[N], exact[N] = asymptotic_verdict(np.abs(zs), R, noise, N)
    return AsymptoticReport(direction, zs, values, errors, remainders, verdicts, exact,
                            in_sector, sector, diverged, message)


@dataclass
class BoundReport:
    N: int
    epsilon: float
    r0: float
    lambda_abs: np.ndarray
    directions: np.ndarray
    remainder_abs: np.ndarray
    noise: np.ndarray
    slope: float
    slope_full: float
    a_fit: float
    C_N: float
    sector_constant: float
    power_law_dominated: bool
    exact: bool

    def exp_term(self, lam_abs):
        s = math.sin(self.epsilon)
        lam_abs = np.asarray(lam_abs, dtype=float)
        return np.exp(-(lam_abs - 1) * self.r0 * s) / ((lam_abs - 1) * s)

    def power_term(self, lam_abs):
        return (np.asarray(lam_abs, dtype=float) * math.sin(self.epsilon)) ** (-(self.N + 2))

    def rows(self):
        # main direction only (first block)
        n = self.lambda_abs.size
        R = self.remainder_abs[0]
        b_exp = self.a_fit * self.exp_term(self.lambda_abs)
        b_pow = self.C_N * self.power_term(self.lambda_abs)
        return [(float(self.lambda_abs[i]), float(R[i]), float(b_exp[i]), float(b_pow[i])) for i in range(n)]


def _loglog_slope(x, y, mask) -> float:
    if mask.sum() < 3:
        return math.nan
    return float(np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)[0])


def bound_check(f: BorelFunction, contour: Contour, epsilon: float, lambda_abs: Sequence[float],
                N: int, r0: float | None = None, direction: float | None = None,
                n_directions: int = 1, kernel: str = "consistent", tol: float = 1e-13,
                clearance: float = DEFAULT_CLEARANCE) -> BoundReport:
    """Measure ``|R_N(lam)|`` in the lambda-sector and fit the two bound shapes.

    The power-law slope is fitted on the large-``|lam|`` half of the grid.
    ``C_N`` and ``a_fit`` are the smallest constants making
    ``C_N (|lam| sin eps)^-(N+2)`` and ``a exp(-(|lam|-1) r0 sin eps)/((|lam|-1) sin eps)``
    dominate every measured remainder.  With ``n_directions > 1`` the
    sector is also swept and ``sector_constant`` (the sup of
    ``|R_N| |lam|^(N+2)``) describes the worst direction.
    """
    lam_abs = np.sort(np.asarray(lambda_abs, dtype=float))
    if lam_abs.size < 6:
        raise ParameterError("bound_check needs at least 6 grid points")
    if np.any(lam_abs <= 1):
        raise ParameterError("|lambda| grid must exceed 1")
    r0 = contour.r0 if r0 is None else float(r0)
    sector = sector_lambda(validate(contour, epsilon), epsilon)
    if direction is None:
        direction = sector.center
    if not sector.contains(direction):
        raise ParameterError(f"direction {direction:.6g} is outside the lambda-sector "
                             f"({sector.phi_min:.6g}, {sector.phi_max:.6g})")
    dirs = [direction]
    if n_directions > 1:
        margin = 1e-6 * sector.width
        dirs += list(np.linspace(sector.phi_min + margin, sector.phi_max - margin, n_directions))
    rem, noi = [], []
    for phi in dirs:
        lam = lam_abs * complex(math.cos(phi), math.sin(phi))
        vals, errs = [], []
        for l in lam:
            q = laplace_integral(f, contour, l, kernel, tol, clearance)
            vals.append(q.value)
            errs.append(q.abs_error_estimate)
        partial, mod = expansion_partial_sum(f, 1.0 / lam, N, kernel)
        rem.append(np.abs(np.array(vals) - partial))
        noi.append(np.array(errs) + 8 * _EPS * (mod + np.abs(vals)))
    rem, noi = np.array(rem), np.array(noi)
    loud = rem > NOISE_MULTIPLE * noi
    exact = not np.any(loud)
    R0, m0 = rem[0], loud[0]
    upper = lam_abs >= np.sqrt(lam_abs[0] * lam_abs[-1])
    slope = _loglog_slope(lam_abs, R0, m0 & upper)
    slope_full = _loglog_slope(lam_abs, R0, m0)
    s = math.sin(epsilon)
    t16 = np.exp(-(lam_abs - 1) * r0 * s) / ((lam_abs - 1) * s)
    t17 = (lam_abs * s) ** (-(N + 2))
    with np.errstate(over="ignore", divide="ignore"):
        a_fit = float(np.max(R0 / t16))
    C_N = float(np.max(R0 / t17))
    sector_constant = float(np.max(rem * lam_abs[None, :] ** (N + 2)))
    dominated = (not exact) and math.isfinite(slope) and abs(slope + (N + 2)) <= 0.2
    return BoundReport(N, float(epsilon), r0, lam_abs, np.array(dirs), rem, noi, slope,
                       slope_full, a_fit, C_N, sector_constant, dominated, exact)


@dataclass
class AmbiguityFit:
    d: float
    h_abs: float
    h_phase: float
    residual: float
    z: np.ndarray
    delta: np.ndarray
    noise: np.ndarray
    used: np.ndarray

    def rows(self):
        return [(zz.real, zz.imag, dd.real, dd.imag, float(nn), bool(u))
                for zz, dd, nn, u in zip(self.z, self.delta, self.noise, self.used)]


def ambiguity_scan(f: BorelFunction, contour_a: Contour, contour_b: Contour, z: Sequence[complex],
                   beta0: float = 1.0, kernel: str = "consistent", tol: float = 1e-13,
                   clearance: float = DEFAULT_CLEARANCE) -> AmbiguityFit:
    """Fit ``resum_A(z) - resum_B(z) = h exp(-d/(beta0 z))`` on a grid of ``z``.

    ``log|Delta|`` is regressed on ``Re 1/(beta0 z)``; the phase of ``h`` is
    read at the grid point with the largest ``|Delta|``.
    """
    if not beta0 > 0:
        raise ParameterError("beta0 must be positive")
    z = np.asarray(z, dtype=complex)
    delta = np.empty(z.size, dtype=complex)
    noise = np.empty(z.size)
    for i, zz in enumerate(z):
        qa = resum(f, contour_a, zz, kernel, tol, clearance)
        qb = resum(f, contour_b, zz, kernel, tol, clearance)
        delta[i] = qa.value - qb.value
        noise[i] = qa.abs_error_estimate + qb.abs_error_estimate + 4 * _EPS * (abs(qa.value) + abs(qb.value))
    used = np.abs(delta) > NOISE_MULTIPLE * noise
    if used.sum() * 2 <= z.size or used.sum() < 2:
        raise InsufficientSignalError(
            f"contour difference is below quadrature noise on {int((~used).sum())} of {z.size} points")
    x = (1.0 / (beta0 * z)).real
    y = np.log(np.abs(delta))
    A = np.vstack([x[used], np.ones(used.sum())]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y[used], rcond=None)
    d = -float(slope)
    resid = y[used] - (slope * x[used] + intercept)
    i_max = int(np.argmax(np.where(used, np.abs(delta), -np.inf)))
    h_ref = delta[i_max] * np.exp(d / (beta0 * z[i_max]))
    return AmbiguityFit(d, float(math.exp(intercept)), float(np.angle(h_ref)),
                        float(np.sqrt(np.mean(resid ** 2))), z, delta, noise, used)
