"""Report assembly, schema validation, and CSV curve exports.

One JSON report per command.  Every numeric field is finite or null with a
flag explaining why; volatile data (timestamps, wall clock) lives under
``meta`` so reports diff cleanly across runs and thread counts.  Findings
are hypothesis failures (they drive exit code 1); notes are informational.
"""

from __future__ import annotations

import datetime as _dt
import math
import time
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .errors import DiagnosticRefused, HypothesisFailure, PrecisionExhausted
from .kernels import (
    default_table_grids,
    kernel_table,
    oscillation_kernel_fit,
    pointwise_bound_fit,
    small_n_regime_check,
    smoothness_difference_fit,
)
from .maximal import LatticeSequence, default_lambda_grid, maximal_function, weak_type_curve
from .measure import LatticeMeasure, expectation, is_strictly_aperiodic, moment
from .spectral import (
    DEFAULT_GRID_SIZE,
    DEFAULT_PUNCTURE,
    SpectralProfile,
    angular_ratio_sup,
    component_ratio_report,
    envelope_integrals,
    gaussian_decay_rate,
    majorant_fit,
    phi_interpolator,
    phi_property_report,
    transform_aperiodicity_check,
)
from .tails import (
    fit_growth_curve,
    lipschitz_exponent_estimate,
    partial_second_moment_curve,
)
from .zoo import MeasureSpec

DEFAULT_ENVELOPE_N = (10, 100, 1000, 10000)


def _finite(x):
    """Floats for JSON: non-finite values become None."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _parallel_map(tasks, threads: int):
    """Run (key, fn) tasks, merging results in task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [(key, fn()) for key, fn in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [(key, pool.submit(fn)) for key, fn in tasks]
        return [(key, fut.result()) for key, fut in futures]


class _Collector:
    def __init__(self):
        self.findings = []
        self.notes = []
        self.timings = {}

    def finding(self, section: str, code: str, message: str):
        self.findings.append({"section": section, "code": code, "message": message})

    def note(self, section: str, message: str):
        self.notes.append(f"{section}: {message}")

    def timed(self, name: str, fn):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[name] = time.perf_counter() - start


def _measure_section(spec: MeasureSpec, mu: LatticeMeasure) -> dict:
    return {
        "spec": spec.to_dict(),
        "offset": int(mu.offset),
        "width": int(mu.width),
        "radius": int(mu.radius),
        "tail_mass": float(mu.tail_mass),
        "pre_truncation_deficit": float(mu.pre_truncation_deficit),
        "transform_is_proxy": bool(mu.is_truncated_proxy),
        "expectation": _finite(expectation(mu)),
        "moment_1": _finite(moment(mu, 1.0)),
        "moment_2": _finite(moment(mu, 2.0)),
        "strict_aperiodicity": bool(is_strictly_aperiodic(mu)),
        "transform_aperiodicity_check": bool(transform_aperiodicity_check(mu)),
    }


def _bound_fit_json(fit) -> dict:
    return {
        "regime": fit.regime,
        "fitted_constant": _finite(fit.fitted_constant),
        "worst": [float(v) for v in fit.worst],
        "sample_count": int(fit.sample_count),
        "empty": bool(fit.empty),
    }


def _base_report(command: str, spec: MeasureSpec, mu: LatticeMeasure, col: _Collector) -> dict:
    # sections may run on worker threads; canonical ordering keeps reports
    # identical across runs and thread counts
    findings = sorted(col.findings, key=lambda f: (f["section"], f["code"], f["message"]))
    return {
        "schema_version": 1,
        "tool": {"name": "convpow", "version": __version__},
        "command": command,
        "measure": _measure_section(spec, mu),
        "findings": findings,
        "notes": sorted(col.notes),
        "meta": {
            "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "timings": col.timings,
        },
    }


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def analyze_report(spec: MeasureSpec, *, grid_size: int = DEFAULT_GRID_SIZE,
                   puncture_radius: float = DEFAULT_PUNCTURE,
                   majorant_delta: float = 0.25,
                   envelope_n=DEFAULT_ENVELOPE_N,
                   threads: int = 1):
    """Transform and tail diagnostics; returns (report, csv sidecars)."""
    col = _Collector()
    mu = spec.build()
    profile = col.timed("profile", lambda: SpectralProfile(mu, grid_size, puncture_radius))
    aperiodic = is_strictly_aperiodic(mu)

    def angular():
        try:
            rep = angular_ratio_sup(profile)
        except DiagnosticRefused as exc:
            col.finding("spectral", "angular_ratio_refused", str(exc))
            return {"value": None, "unbounded": None, "refinement_sups": [],
                    "refused": True, "detail": str(exc)}
        out = {"value": _finite(rep.value), "unbounded": bool(rep.unbounded),
               "refinement_sups": [_finite(v) for v in rep.refinement_sups],
               "refused": False, "detail": None}
        if rep.unbounded:
            col.finding("spectral", "angular_ratio_unbounded",
                        "near-zero refinement shows geometric growth of the angular ratio")
        return out

    def decay():
        if not aperiodic:
            msg = "measure is not strictly aperiodic; decay rate undefined"
            col.finding("spectral", "gaussian_decay_skipped", msg)
            return {"value": None, "failed": True, "detail": msg}
        try:
            return {"value": _finite(gaussian_decay_rate(profile)), "failed": False, "detail": None}
        except HypothesisFailure as exc:
            col.finding("spectral", "gaussian_decay_nonpositive", str(exc))
            return {"value": None, "failed": True, "detail": str(exc)}

    def phi_props():
        try:
            rep = phi_property_report(profile)
        except (DiagnosticRefused, ValueError) as exc:
            col.note("spectral", f"phi properties skipped: {exc}")
            return None
        return {
            "window": rep.window,
            "even_max_violation": _finite(rep.even_max_violation),
            "c1": _finite(rep.c1),
            "c2": _finite(rep.c2),
            "c3": _finite(rep.c3),
            "tphi_derivative_ratio": _finite(rep.tphi_derivative_ratio),
            "tphi_window_maxima": [_finite(v) for v in rep.tphi_window_maxima],
            "tphi_monotone": bool(rep.tphi_monotone),
            "notes": list(rep.notes),
        }

    def ratios():
        rep = component_ratio_report(profile)
        return {"sup_first": _finite(rep.sup_first), "sup_second": _finite(rep.sup_second),
                "denominator_floor": rep.denominator_floor}

    def majorant_and_envelope():
        try:
            fit = majorant_fit(profile, majorant_delta)
        except (DiagnosticRefused, HypothesisFailure, ValueError) as exc:
            col.finding("spectral", "majorant_failed", str(exc))
            return ({"k_star": None, "delta": majorant_delta, "worst_t": None,
                     "side_condition_ok": None, "failed": True, "detail": str(exc)}, None)
        maj = {"k_star": _finite(fit.k_star), "delta": fit.delta,
               "worst_t": _finite(fit.worst_t),
               "side_condition_ok": bool(fit.side_condition_ok),
               "failed": False, "detail": None}
        try:
            env = envelope_integrals(phi_interpolator(profile), fit.k_star,
                                     majorant_delta, envelope_n)
        except DiagnosticRefused as exc:
            col.finding("spectral", "envelope_refused", str(exc))
            return (maj, None)
        ref = dict(zip(env.n_values, env.j1))
        reference_n = 100 if 100 in ref else env.n_values[0]
        env_json = {
            "k": env.k, "delta": env.delta,
            "n_values": list(env.n_values),
            "j1": [_finite(v) for v in env.j1],
            "j2": [_finite(v) if v is not None else None for v in env.j2],
            "j1_max": _finite(env.j1_max), "j2_max": _finite(env.j2_max),
            "reference_n": int(reference_n),
        }
        return (maj, env_json)

    def growth():
        try:
            curve = partial_second_moment_curve(mu)
        except ValueError as exc:
            col.note("tails", f"growth curve skipped: {exc}")
            return None, None
        try:
            fitted = fit_growth_curve(curve)
        except ValueError as exc:
            col.note("tails", f"growth fit skipped: {exc}")
            return curve, None
        return fitted, {
            "exponent": _finite(fitted.fitted_exponent),
            "log_correction": _finite(fitted.log_correction),
            "residual": _finite(fitted.residual),
            "window": list(fitted.fit_window),
            "points": len(fitted.n_values),
            "proxy": fitted.proxy,
        }

    def lipschitz():
        try:
            fit = lipschitz_exponent_estimate(profile)
        except ValueError as exc:
            col.note("tails", f"lipschitz fit skipped: {exc}")
            return None
        return {
            "exponent": _finite(fit.exponent),
            "infinite": bool(math.isinf(fit.exponent)),
            "residual": _finite(fit.residual),
            "steps": len(fit.h_values),
        }

    results = dict(_parallel_map(
        [
            ("angular", lambda: col.timed("angular_ratio", angular)),
            ("decay", lambda: col.timed("gaussian_decay", decay)),
            ("phi", lambda: col.timed("phi_properties", phi_props)),
            ("ratios", lambda: col.timed("component_ratios", ratios)),
            ("majenv", lambda: col.timed("majorant_envelope", majorant_and_envelope)),
            ("growth", lambda: col.timed("growth", growth)),
            ("lipschitz", lambda: col.timed("lipschitz", lipschitz)),
        ],
        threads,
    ))
    majorant_json, envelope_json = results["majenv"]
    growth_curve, growth_json = results["growth"]

    report = _base_report("analyze", spec, mu, col)
    report["spectral"] = {
        "grid_size": int(grid_size),
        "puncture_radius": float(puncture_radius),
        "angular_ratio": results["angular"],
        "gaussian_decay_rate": results["decay"],
        "phi_properties": results["phi"],
        "component_ratios": results["ratios"],
        "majorant": majorant_json,
        "envelope_integrals": envelope_json,
    }
    report["tails"] = {"growth": growth_json, "lipschitz": results["lipschitz"]}

    sidecars = {"profile": _profile_rows(profile)}
    if growth_curve is not None:
        sidecars["growth"] = _growth_rows(growth_curve)
    return report, sidecars


# ---------------------------------------------------------------------------
# verify bounds
# ---------------------------------------------------------------------------

def verify_bounds_report(spec: MeasureSpec, *, n_max: int = 512, x_max: int = 512,
                         delta: float | None = None, alpha: float | None = None,
                         threads: int = 1):
    col = _Collector()
    mu = spec.build()

    if delta is None:
        def estimate():
            profile = SpectralProfile(mu, 2**14 + 1)
            est = lipschitz_exponent_estimate(profile).exponent
            if math.isinf(est):
                return 1.0
            return min(1.0, max(0.05, est))
        delta = col.timed("delta_estimate", estimate)
        col.note("kernel_bounds", f"delta estimated from the transform: {delta:.4g}")
    if alpha is None:
        alpha = min(1.0, delta)

    n_values, x_values = default_table_grids(n_max, x_max)
    try:
        table = col.timed("kernel_table",
                          lambda: kernel_table(mu, n_values, x_values, label=spec.to_json()))
    except PrecisionExhausted as exc:
        col.finding("kernel_bounds", "precision_exhausted", str(exc))
        report = _base_report("verify_bounds", spec, mu, col)
        report["kernel_bounds"] = {
            "delta": float(delta), "alpha": float(alpha),
            "n_max": int(n_max), "x_max": int(x_max),
            "pointwise": None, "small_n": None,
            "smoothness_restricted": None, "smoothness_global": None,
            "oscillation_kernel": None,
        }
        return report, {}

    def small_n():
        fit = small_n_regime_check(table, delta)
        if fit.empty:
            col.note("kernel_bounds", "small-n regime is empty at this table size")
        return fit

    def smoothness():
        fits = smoothness_difference_fit(table, delta, alpha)
        for name, fit in (("restricted", fits.restricted), ("global", fits.global_holder)):
            if fit.empty:
                col.note("kernel_bounds", f"{name} difference regime is empty at this table size")
        return fits

    def oscillation():
        ts = np.linspace(-0.5, 0.5, 201)
        pairs = [(x, y) for x in (8, 32, 100, 256) if x <= x_max
                 for y in (1, 2, x // 4) if 0 < 2 * y < x]
        return oscillation_kernel_fit(ts, sorted(set(pairs)))

    results = dict(_parallel_map(
        [
            ("pointwise", lambda: col.timed("pointwise_fit",
                                            lambda: pointwise_bound_fit(table, delta))),
            ("small_n", lambda: col.timed("small_n_fit", small_n)),
            ("smooth", lambda: col.timed("smoothness_fit", smoothness)),
            ("oscillation", lambda: col.timed("oscillation_fit", oscillation)),
        ],
        threads,
    ))

    report = _base_report("verify_bounds", spec, mu, col)
    report["kernel_bounds"] = {
        "delta": float(delta),
        "alpha": float(alpha),
        "n_max": int(n_max),
        "x_max": int(x_max),
        "pointwise": _bound_fit_json(results["pointwise"]),
        "small_n": _bound_fit_json(results["small_n"]),
        "smoothness_restricted": _bound_fit_json(results["smooth"].restricted),
        "smoothness_global": _bound_fit_json(results["smooth"].global_holder),
        "oscillation_kernel": _bound_fit_json(results["oscillation"]),
    }
    return report, {"kernel": _kernel_rows(table)}


# ---------------------------------------------------------------------------
# maximal
# ---------------------------------------------------------------------------

def maximal_report(spec: MeasureSpec, phi: LatticeSequence, *, n_max: int = 256,
                   lambda_min: float = 1e-4, threads: int = 1):
    col = _Collector()
    mu = spec.build()
    if phi.l1_norm() <= 0.0:
        raise DiagnosticRefused("test sequence has zero l1 norm")
    grid = default_lambda_grid(lambda_min)

    def run(depth):
        m = maximal_function(mu, phi, depth)
        return m, weak_type_curve(m, grid)

    results = dict(_parallel_map(
        [
            ("base", lambda: col.timed("maximal_base", lambda: run(n_max))),
            ("doubled", lambda: col.timed("maximal_doubled", lambda: run(2 * n_max))),
        ],
        threads,
    ))
    m_base, curve_base = results["base"]
    _, curve_doubled = results["doubled"]
    h0 = curve_base.headline_constant
    h1 = curve_doubled.headline_constant
    growth_ratio = h1 / h0 if h0 > 0 else None

    report = _base_report("maximal", spec, mu, col)
    report["maximal"] = {
        "n_max": int(n_max),
        "phi_norm": _finite(curve_base.phi_norm),
        "lambda_min": float(lambda_min),
        "max_value": _finite(float(m_base.values.max())),
        "headline_constant": _finite(h0),
        "doubling": {
            "n_max": int(2 * n_max),
            "headline_constant": _finite(h1),
            "growth_ratio": _finite(growth_ratio),
            "within_25pct": (growth_ratio is not None and growth_ratio <= 1.25)
            if growth_ratio is not None else None,
        },
    }
    return report, {"levelsets": _levelset_rows(curve_base)}


# ---------------------------------------------------------------------------
# CSV rows
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _profile_rows(profile: SpectralProfile):
    header = ["t", "re_theta", "im_theta", "abs_theta",
              "re_d1", "im_d1", "re_d2", "im_d2", "phi"]
    rows = [
        [_fmt(t), _fmt(th.real), _fmt(th.imag), _fmt(abs(th)),
         _fmt(d1.real), _fmt(d1.imag), _fmt(d2.real), _fmt(d2.imag), _fmt(p)]
        for t, th, d1, d2, p in zip(profile.grid, profile.theta,
                                    profile.d1, profile.d2, profile.phi)
    ]
    return header, rows

def _growth_rows(curve):
    return ["n", "s"], [[str(n), _fmt(s)] for n, s in zip(curve.n_values, curve.s_values)]


def _kernel_rows(table):
    header = ["n", "x", "value"]
    rows = []
    for i, n in enumerate(table.n_values):
        for j, x in enumerate(table.x_values):
            rows.append([str(n), str(x), _fmt(table.values[i, j])])
    return header, rows


def _levelset_rows(curve):
    header = ["lambda", "count", "constant"]
    rows = [[_fmt(lam), str(c), _fmt(k)]
            for lam, c, k in zip(curve.lambda_values, curve.counts, curve.constants)]
    return header, rows


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

_NUM_OR_NULL = {"type": ["number", "null"]}
_BOOL_OR_NULL = {"type": ["boolean", "null"]}

_BOUND_FIT_SCHEMA = {
    "type": ["object", "null"],
    "properties": {
        "regime": {"type": "string"},
        "fitted_constant": _NUM_OR_NULL,
        "worst": {"type": "array", "items": {"type": "number"}},
        "sample_count": {"type": "integer", "minimum": 0},
        "empty": {"type": "boolean"},
    },
    "required": ["regime", "fitted_constant", "worst", "sample_count"],
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "tool": {
            "type": "object",
            "properties": {"name": {"const": "convpow"}, "version": {"type": "string"}},
            "required": ["name", "version"],
            "additionalProperties": False,
        },
        "command": {"enum": ["analyze", "verify_bounds", "maximal"]},
        "measure": {
            "type": "object",
            "properties": {
                "spec": {"type": "object"},
                "offset": {"type": "integer"},
                "width": {"type": "integer", "minimum": 1},
                "radius": {"type": "integer", "minimum": 0},
                "tail_mass": {"type": "number", "minimum": 0},
                "pre_truncation_deficit": {"type": "number", "minimum": 0},
                "transform_is_proxy": {"type": "boolean"},
                "expectation": _NUM_OR_NULL,
                "moment_1": _NUM_OR_NULL,
                "moment_2": _NUM_OR_NULL,
                "strict_aperiodicity": {"type": "boolean"},
                "transform_aperiodicity_check": {"type": "boolean"},
            },
            "required": ["spec", "strict_aperiodicity", "expectation"],
            "additionalProperties": False,
        },
        "spectral": {
            "type": "object",
            "properties": {
                "grid_size": {"type": "integer"},
                "puncture_radius": {"type": "number"},
                "angular_ratio": {
                    "type": "object",
                    "properties": {
                        "value": _NUM_OR_NULL,
                        "unbounded": _BOOL_OR_NULL,
                        "refinement_sups": {"type": "array", "items": _NUM_OR_NULL},
                        "refused": {"type": "boolean"},
                        "detail": {"type": ["string", "null"]},
                    },
                    "required": ["value", "unbounded", "refused"],
                    "additionalProperties": False,
                },
                "gaussian_decay_rate": {
                    "type": "object",
                    "properties": {
                        "value": _NUM_OR_NULL,
                        "failed": {"type": "boolean"},
                        "detail": {"type": ["string", "null"]},
                    },
                    "required": ["value", "failed"],
                    "additionalProperties": False,
                },
                "phi_properties": {
                    "type": ["object", "null"],
                    "properties": {
                        "window": {"type": "number"},
                        "even_max_violation": _NUM_OR_NULL,
                        "c1": _NUM_OR_NULL,
                        "c2": _NUM_OR_NULL,
                        "c3": _NUM_OR_NULL,
                        "tphi_derivative_ratio": _NUM_OR_NULL,
                        "tphi_window_maxima": {"type": "array", "items": _NUM_OR_NULL},
                        "tphi_monotone": {"type": "boolean"},
                        "notes": {"type": "array", "items": {"type": "string"}},
                    },
                    "additionalProperties": False,
                },
                "component_ratios": {
                    "type": "object",
                    "properties": {
                        "sup_first": _NUM_OR_NULL,
                        "sup_second": _NUM_OR_NULL,
                        "denominator_floor": {"type": "number"},
                    },
                    "additionalProperties": False,
                },
                "majorant": {
                    "type": "object",
                    "properties": {
                        "k_star": _NUM_OR_NULL,
                        "delta": {"type": "number"},
                        "worst_t": _NUM_OR_NULL,
                        "side_condition_ok": _BOOL_OR_NULL,
                        "failed": {"type": "boolean"},
                        "detail": {"type": ["string", "null"]},
                    },
                    "required": ["k_star", "failed"],
                    "additionalProperties": False,
                },
                "envelope_integrals": {
                    "type": ["object", "null"],
                    "properties": {
                        "k": {"type": "number"},
                        "delta": {"type": "number"},
                        "n_values": {"type": "array", "items": {"type": "integer"}},
                        "j1": {"type": "array", "items": _NUM_OR_NULL},
                        "j2": {"type": "array", "items": _NUM_OR_NULL},
                        "j1_max": _NUM_OR_NULL,
                        "j2_max": _NUM_OR_NULL,
                        "reference_n": {"type": "integer"},
                    },
                    "additionalProperties": False,
                },
            },
            "required": ["angular_ratio", "gaussian_decay_rate", "majorant"],
            "additionalProperties": False,
        },
        "tails": {
            "type": "object",
            "properties": {
                "growth": {
                    "type": ["object", "null"],
                    "properties": {
                        "exponent": _NUM_OR_NULL,
                        "log_correction": _NUM_OR_NULL,
                        "residual": _NUM_OR_NULL,
                        "window": {"type": "array", "items": {"type": "integer"}},
                        "points": {"type": "integer"},
                        "proxy": {"type": "boolean"},
                    },
                    "additionalProperties": False,
                },
                "lipschitz": {
                    "type": ["object", "null"],
                    "properties": {
                        "exponent": _NUM_OR_NULL,
                        "infinite": {"type": "boolean"},
                        "residual": _NUM_OR_NULL,
                        "steps": {"type": "integer"},
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "kernel_bounds": {
            "type": "object",
            "properties": {
                "delta": {"type": "number"},
                "alpha": {"type": "number"},
                "n_max": {"type": "integer"},
                "x_max": {"type": "integer"},
                "pointwise": _BOUND_FIT_SCHEMA,
                "small_n": _BOUND_FIT_SCHEMA,
                "smoothness_restricted": _BOUND_FIT_SCHEMA,
                "smoothness_global": _BOUND_FIT_SCHEMA,
                "oscillation_kernel": _BOUND_FIT_SCHEMA,
            },
            "required": ["delta", "alpha", "pointwise", "small_n",
                         "smoothness_restricted", "smoothness_global"],
            "additionalProperties": False,
        },
        "maximal": {
            "type": "object",
            "properties": {
                "n_max": {"type": "integer", "minimum": 1},
                "phi_norm": _NUM_OR_NULL,
                "lambda_min": {"type": "number"},
                "max_value": _NUM_OR_NULL,
                "headline_constant": _NUM_OR_NULL,
                "doubling": {
                    "type": "object",
                    "properties": {
                        "n_max": {"type": "integer"},
                        "headline_constant": _NUM_OR_NULL,
                        "growth_ratio": _NUM_OR_NULL,
                        "within_25pct": _BOOL_OR_NULL,
                    },
                    "additionalProperties": False,
                },
            },
            "required": ["n_max", "headline_constant", "doubling"],
            "additionalProperties": False,
        },
        "findings": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "section": {"type": "string"},
                    "code": {"type": "string"},
                    "message": {"type": "string"},
                },
                "required": ["section", "code", "message"],
                "additionalProperties": False,
            },
        },
        "notes": {"type": "array", "items": {"type": "string"}},
        "meta": {
            "type": "object",
            "properties": {
                "generated_at": {"type": "string"},
                "timings": {"type": "object"},
            },
            "required": ["generated_at"],
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "tool", "command", "measure", "findings", "meta"],
    "additionalProperties": False,
}


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)
