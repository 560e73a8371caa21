"""
Command-line front end.

Every subcommand writes ``<out>/<subcommand>.json`` (summary) and
``<out>/<subcommand>.csv`` (detail table).  Both carry a hash of the
configuration and input files.  Exit status: 0 success, 1 verdict FAIL,
2 input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .borel_functions import function_from_dict
from .conformal_map import ConformalMap, convergence_compare, recompose
from .contour_geometry import Contour
from .errors import BorelError, DivergenceError, InsufficientSignalError
from .laplace_engine import ambiguity_scan, bound_check, check_asymptoticity, resum
from .qcd_adler import (
    PRESCRIPTIONS,
    CouplingModel,
    adler_resum,
    analyticity_probe,
    pv_resum,
    segment_path,
)
from .series_core import PowerSeries, borel_transform, inverse_borel

SUBCOMMANDS = ("transform", "resum", "verify", "bounds", "ambiguity", "conformal", "adler", "probe")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    tol: float = 1e-10
    epsilon: float = 0.1
    kernel: str = "consistent"
    out: str = "."
    seed: int = 0

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        if not (0 < self.tol <= 1e-3):
            raise InputError("--tol must lie in (0, 1e-3]")
        if not (0 < self.epsilon < math.pi / 2):
            raise InputError("--epsilon must lie in (0, pi/2)")

    def digest(self, contents: dict) -> str:
        payload = {k: v for k, v in asdict(self).items() if k != "out"}
        payload["contents"] = contents
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


def _locate(text: str, message: str) -> int:
    for key in re.findall(r"'(\w+)'", message):
        for i, line in enumerate(text.splitlines(), 1):
            if f'"{key}"' in line:
                return i
    return 1


class _Loader:
    """Reads JSON inputs and remembers their text for hashing and diagnostics."""

    def __init__(self):
        self.contents = {}

    def read(self, path: str):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from exc
        self.contents[path] = text
        try:
            return json.loads(text), text
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc

    def build(self, path: str, builder):
        data, text = self.read(path)
        try:
            return builder(data)
        except (BorelError, KeyError, TypeError, ValueError) as exc:
            msg = str(exc) or type(exc).__name__
            raise InputError(f"{path}:{_locate(text, msg)}: {msg}") from exc


def _cx(x: complex) -> list:
    return [float(complex(x).real), float(complex(x).imag)]


def _write(cfg: RunConfig, digest: str, summary: dict, header: list, rows: list):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"subcommand": cfg.subcommand, "config_hash": digest, "version": __version__, **summary}
    (out / f"{cfg.subcommand}.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    buf = io.StringIO()
    buf.write(f"# config_hash={digest}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    with open(out / f"{cfg.subcommand}.csv", "w", newline="") as fh:
        fh.write(buf.getvalue())


def _contour(loader: _Loader, path: str | None, default_theta: float = 0.0) -> Contour:
    if path is None:
        return Contour.ray(default_theta)
    return loader.build(path, Contour.from_dict)


def _series_record(inverse: bool):
    # a bare list is D_1, D_2, ... (or b_0, b_1, ... for the inverse)
    def build(data):
        if isinstance(data, list):
            data = {"coeffs": data, "start_index": 0 if inverse else 1}
        return PowerSeries.from_dict(data)

    return build


def _run_transform(cfg, loader):
    series = loader.build(cfg.inputs["series"], _series_record(cfg.options["inverse"]))
    beta0 = cfg.options["beta0"]
    if cfg.options["inverse"]:
        result = inverse_borel(series, beta0)
    else:
        result = borel_transform(series, beta0)
    summary = {"beta0": beta0, "inverse": cfg.options["inverse"], "result": result.to_dict()}
    samples = cfg.options["roundtrip_samples"]
    if samples:
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        for _ in range(samples):
            n = int(rng.integers(1, 30))
            D = PowerSeries(rng.normal(size=n) + 1j * rng.normal(size=n), 1)
            b0 = float(rng.uniform(0.1, 10.0))
            back = inverse_borel(borel_transform(D, b0), b0).coeffs
            for part in (np.real, np.imag):
                ulp = np.spacing(np.abs(part(D.coeffs)))
                worst = max(worst, float(np.max(np.abs(part(back) - part(D.coeffs)) / ulp)))
        summary["roundtrip_samples"] = samples
        summary["roundtrip_max_ulp"] = worst
    rows = [(result.start_index + i, float(c.real), float(c.imag)) for i, c in enumerate(result.coeffs)]
    return 0, summary, ["n", "re", "im"], rows


def _run_resum(cfg, loader):
    f = loader.build(cfg.inputs["function"], function_from_dict)
    contour = _contour(loader, cfg.inputs.get("contour"))
    rows, values = [], []
    for z in cfg.options["z"]:
        q = resum(f, contour, z, cfg.kernel, cfg.tol)
        rows.append((z.real, z.imag, q.value.real, q.value.imag, q.abs_error_estimate))
        values.append({"z": _cx(z), "value": _cx(q.value), "abs_error": q.abs_error_estimate,
                       "truncation_radius": q.truncation_radius})
    return 0, {"results": values}, ["z_re", "z_im", "value_re", "value_im", "abs_error"], rows


def _run_verify(cfg, loader):
    f = loader.build(cfg.inputs["function"], function_from_dict)
    contour = _contour(loader, cfg.inputs.get("contour"))
    o = cfg.options
    z_abs = np.geomspace(o["z_max"], o["z_min"], o["points"])
    rep = check_asymptoticity(f, contour, cfg.epsilon, o["direction"], z_abs, o["nmax"],
                              cfg.kernel, min(cfg.tol, 1e-12))
    summary = {
        "direction": o["direction"],
        "verdicts": {str(k): ("PASS" if v else "FAIL") for k, v in rep.verdicts.items()},
        "exact": {str(k): v for k, v in rep.exact.items()},
        "diverged": rep.diverged,
        "message": rep.message,
        "in_predicted_sector": rep.in_sector,
        "sector_z": None if rep.sector is None else [rep.sector.phi_min, rep.sector.phi_max],
        "verdict": "PASS" if rep.passed else "FAIL",
    }
    if rep.diverged:
        print(f"divergence: {rep.message}", file=sys.stderr)
    header = ["N", "z_re", "z_im", "remainder_re", "remainder_im", "ratio_abs"]
    return (0 if rep.passed else 1), summary, header, rep.rows()


def _run_bounds(cfg, loader):
    f = loader.build(cfg.inputs["function"], function_from_dict)
    contour = _contour(loader, cfg.inputs.get("contour"))
    o = cfg.options
    lam = np.geomspace(o["lambda_min"], o["lambda_max"], o["points"])
    rep = bound_check(f, contour, cfg.epsilon, lam, o["order"], o["r0"], o["direction"],
                      kernel=cfg.kernel, tol=min(cfg.tol, 1e-13))
    ok = rep.exact or rep.power_law_dominated
    summary = {
        "order": rep.N, "slope": rep.slope, "slope_full_grid": rep.slope_full,
        "expected_slope": -(rep.N + 2), "a_fit": rep.a_fit, "C_N": rep.C_N,
        "exact": rep.exact, "power_law_dominated": rep.power_law_dominated,
        "verdict": "PASS" if ok else "FAIL",
    }
    header = ["lambda_abs", "remainder_abs", "bound_exp", "bound_power"]
    return (0 if ok else 1), summary, header, rep.rows()


def _run_ambiguity(cfg, loader):
    f = loader.build(cfg.inputs["function"], function_from_dict)
    o = cfg.options
    ca = _contour(loader, cfg.inputs.get("contour_a"), o["displacement"])
    cb = _contour(loader, cfg.inputs.get("contour_b"), -o["displacement"])
    z = np.geomspace(o["z_min"], o["z_max"], o["points"]) * np.exp(1j * o["direction"])
    header = ["z_re", "z_im", "delta_re", "delta_im", "noise", "used"]
    try:
        fit = ambiguity_scan(f, ca, cb, z, o["beta0"], cfg.kernel, min(cfg.tol, 1e-13))
    except InsufficientSignalError as exc:
        return 1, {"verdict": "FAIL", "message": str(exc)}, header, []
    summary = {"d": fit.d, "h_abs": fit.h_abs, "h_phase": fit.h_phase, "residual": fit.residual,
               "beta0": o["beta0"], "verdict": "PASS"}
    rows = [(a, b, c, d, e, int(u)) for a, b, c, d, e, u in fit.rows()]
    return 0, summary, header, rows


def _run_conformal(cfg, loader):
    f = loader.build(cfg.inputs["function"], function_from_dict)
    o = cfg.options
    cmap = ConformalMap(o["cut_positive"], o["cut_negative"])
    b = PowerSeries(f.taylor(o["nmax"]), 0)
    c = recompose(b, cmap, o["nmax"])
    table = convergence_compare(b, c, o["u_probe"], range(o["nmax"] + 1), f, cmap)
    summary = {
        "u_probe": _cx(o["u_probe"]), "w_probe": _cx(table.w_probe), "abs_w": abs(table.w_probe),
        "rate_u": table.rate_u, "rate_w": table.rate_w, "c": c.to_dict(),
    }
    return 0, summary, ["N", "err_u_series", "err_w_series"], table.rows()


def _run_adler(cfg, loader):
    B = loader.build(cfg.inputs["model"], function_from_dict)
    o = cfg.options
    coupling = CouplingModel(o["beta0"], o["lambda2"])
    contour = _contour(loader, cfg.inputs.get("contour"), o["displacement"])
    rows, results = [], []
    for s in o["s"]:
        if o["pv"]:
            q = pv_resum(s, coupling, B, o["displacement"], cfg.tol)
        else:
            q = adler_resum(s, coupling, B, contour, cfg.kernel, cfg.tol)
        rows.append((s.real, s.imag, q.value.real, q.value.imag, q.abs_error_estimate))
        results.append({"s": _cx(s), "value": _cx(q.value), "abs_error": q.abs_error_estimate})
    summary = {"prescription": "pv" if o["pv"] else "contour", "results": results}
    return 0, summary, ["s_re", "s_im", "value_re", "value_im", "abs_error"], rows


def _run_probe(cfg, loader):
    B = loader.build(cfg.inputs["model"], function_from_dict)
    o = cfg.options
    coupling = CouplingModel(o["beta0"], o["lambda2"])
    if "path" in cfg.inputs:
        path = loader.build(cfg.inputs["path"],
                            lambda d: np.array([complex(float(p[0]), float(p[1])) for p in d]))
    else:
        path = segment_path(o["segment"][0], o["segment"][1], o["points"])
    rep = analyticity_probe(coupling, B, o["prescription"], path, min(cfg.tol, 1e-12), o["displacement"])
    summary = {
        "prescription": rep.prescription, "max_jump": rep.max_jump,
        "max_jump_ratio": rep.max_jump_ratio, "discontinuities": rep.discontinuities,
        "verdict": "PASS" if rep.continuous else "FAIL",
    }
    header = ["path_index", "s_re", "s_im", "value_re", "value_im", "jump"]
    return (0 if rep.continuous else 1), summary, header, rep.rows()


_RUNNERS = {
    "transform": _run_transform, "resum": _run_resum, "verify": _run_verify,
    "bounds": _run_bounds, "ambiguity": _run_ambiguity, "conformal": _run_conformal,
    "adler": _run_adler, "probe": _run_probe,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured workflow and write its reports."""
    loader = _Loader()
    try:
        status, summary, header, rows = _RUNNERS[cfg.subcommand](cfg, loader)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        summary, header, rows, status = {"verdict": "FAIL", "message": str(exc)}, ["message"], [], 1
        print(f"divergence: {exc}", file=sys.stderr)
    except BorelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(cfg, cfg.digest(loader.contents), summary, header, rows)
    return status


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--epsilon", type=float, default=0.1)
    common.add_argument("--kernel", choices=("consistent", "literal"), default="consistent")
    common.add_argument("--out", default=".")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="borelsum", description="Borel-Laplace resummation along bent contours")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("transform", parents=[common], help="Borel transform of perturbative coefficients")
    s.add_argument("--series", required=True)
    s.add_argument("--beta0", type=float, default=1.0)
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--roundtrip-samples", type=int, default=0)

    s = sub.add_parser("resum", parents=[common], help="resummed value at given couplings")
    s.add_argument("--function", required=True)
    s.add_argument("--contour")
    s.add_argument("--z", type=_complex, action="append", required=True)

    s = sub.add_parser("verify", parents=[common], help="asymptoticity check along a ray in z")
    s.add_argument("--function", required=True)
    s.add_argument("--contour")
    s.add_argument("--direction", type=float, default=0.0)
    s.add_argument("--z-max", type=float, default=0.3)
    s.add_argument("--z-min", type=float, default=0.03)
    s.add_argument("--points", type=int, default=16)
    s.add_argument("--nmax", type=int, default=6)

    s = sub.add_parser("bounds", parents=[common], help="remainder-bound scaling in lambda")
    s.add_argument("--function", required=True)
    s.add_argument("--contour")
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--lambda-min", type=float, default=5.0)
    s.add_argument("--lambda-max", type=float, default=100.0)
    s.add_argument("--points", type=int, default=16)
    s.add_argument("--direction", type=float)
    s.add_argument("--r0", type=float)

    s = sub.add_parser("ambiguity", parents=[common], help="power-correction fit between two contours")
    s.add_argument("--function", required=True)
    s.add_argument("--contour-a")
    s.add_argument("--contour-b")
    s.add_argument("--displacement", type=float, default=0.3)
    s.add_argument("--direction", type=float, default=0.0)
    s.add_argument("--z-min", type=float, default=0.1)
    s.add_argument("--z-max", type=float, default=0.5)
    s.add_argument("--points", type=int, default=12)
    s.add_argument("--beta0", type=float, default=1.0)

    s = sub.add_parser("conformal", parents=[common], help="u-series versus w-series convergence")
    s.add_argument("--function", required=True)
    s.add_argument("--u-probe", type=_complex, required=True)
    s.add_argument("--nmax", type=int, default=50)
    s.add_argument("--cut-positive", type=float, default=2.0)
    s.add_argument("--cut-negative", type=float, default=-1.0)

    s = sub.add_parser("adler", parents=[common], help="contour-resummed Adler function")
    s.add_argument("--model", required=True)
    s.add_argument("--contour")
    s.add_argument("--s", type=_complex, action="append", required=True)
    s.add_argument("--beta0", type=float, default=1.0)
    s.add_argument("--lambda2", type=float, default=1.0)
    s.add_argument("--pv", action="store_true")
    s.add_argument("--displacement", type=float, default=0.3)

    s = sub.add_parser("probe", parents=[common], help="continuity of a prescription along an s-path")
    s.add_argument("--model", required=True)
    s.add_argument("--prescription", choices=PRESCRIPTIONS, default="pv")
    s.add_argument("--path")
    s.add_argument("--segment", type=_complex, nargs=2)
    s.add_argument("--points", type=int, default=41)
    s.add_argument("--beta0", type=float, default=1.0)
    s.add_argument("--lambda2", type=float, default=1.0)
    s.add_argument("--displacement", type=float, default=0.3)
    return p


_INPUT_KEYS = ("series", "function", "contour", "contour_a", "contour_b", "model", "path")
_COMMON_KEYS = ("subcommand", "tol", "epsilon", "kernel", "out", "seed")


def config_from_args(argv=None) -> RunConfig:
    ns = vars(_parser().parse_args(argv))
    inputs = {k: ns.pop(k) for k in _INPUT_KEYS if ns.get(k) is not None}
    for k in _INPUT_KEYS:
        ns.pop(k, None)
    common = {k: ns.pop(k) for k in _COMMON_KEYS}
    if common["subcommand"] == "probe" and "path" not in inputs and ns.get("segment") is None:
        raise InputError("probe needs --path or --segment")
    return RunConfig(inputs=inputs, options=ns, **common)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
