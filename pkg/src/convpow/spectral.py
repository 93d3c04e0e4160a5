"""Transform-side diagnostics.

The transform of a measure is theta(t) = sum_k mu(k) exp(2 pi i k t) on
[-1/2, 1/2), with real part f and imaginary part g.  Everything this module
computes lives on that interval: sampled theta and its first two termwise
derivatives, the angular ratio |theta - 1| / (1 - |theta|), the Gaussian
decay rate (largest C with |theta| <= exp(-C t^2) on the grid), the
majorant function phi(t) = |f'(t) / t| together with its structural
properties, the modulus majorant |theta| <= 1 - k t^2 phi(t), and the
envelope integrals that certify n-uniform bounds downstream.

Grid values are computed by folding the weights modulo the grid length and
taking a single real FFT; the negative-t half is mirrored analytically from
the positive half, which reproduces the exact conjugate symmetry a termwise
summation would have.  Off-grid points use correctly rounded termwise sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticRefused, HypothesisFailure
from .measure import LatticeMeasure
from .quadrature import integrate

DEFAULT_GRID_SIZE = 2**16 + 1
DEFAULT_PUNCTURE = 1e-6
TWO_PI = 2.0 * math.pi

# modulus guard for the headline angular-ratio supremum
ANGULAR_MODULUS_GUARD = 1e-10
# validity floor for the near-zero refinement levels: 1 - |theta| below this
# is dominated by double-precision round-off and cannot be trusted
REFINEMENT_DENOMINATOR_FLOOR = 1e-13


def transform_at(mu: LatticeMeasure, t: float) -> complex:
    """theta(t) by termwise summation, correctly rounded.

    Canonical domain is [-1/2, 1/2); values are 1-periodic in t.
    """
    phase = TWO_PI * t * mu.indices()
    re = math.fsum(mu.weights * np.cos(phase))
    im = math.fsum(mu.weights * np.sin(phase))
    return complex(re, im)


def derivative_at(mu: LatticeMeasure, t: float, order: int = 1) -> complex:
    """Termwise derivative of theta at t, order 1 or 2.

    For a truncated proxy this is the derivative of the truncated
    transform; callers should flag it via ``mu.is_truncated_proxy``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    ks = mu.indices()
    phase = TWO_PI * t * ks
    c = np.cos(phase)
    s = np.sin(phase)
    if order == 1:
        factor = TWO_PI * ks * mu.weights
        # i * factor * e^{i phase}
        return complex(math.fsum(-factor * s), math.fsum(factor * c))
    factor = -(TWO_PI * ks) ** 2 * mu.weights
    return complex(math.fsum(factor * c), math.fsum(factor * s))


def transform_on_ladder(mu: LatticeMeasure, step: float, count: int) -> np.ndarray:
    """theta at m*step for m = 1..count by a power recurrence.

    One exponential pass over the support; subsequent rungs are pointwise
    multiplies, so wide supports stay cheap.
    """
    z = np.exp(2j * math.pi * step * mu.indices())
    running = mu.weights.astype(complex)
    out = np.empty(count, dtype=complex)
    for m in range(count):
        running *= z
        out[m] = running.sum()
    return out


class SpectralProfile:
    """Sampled transform data on a uniform grid over [-1/2, 1/2).

    Attributes
    ----------
    grid : ndarray
        Punctured t values (|t| above the puncture radius), ascending.
    theta, d1, d2 : complex ndarrays
        theta, theta', theta'' at the grid points.
    phi : ndarray
        |Re(d1) / t| at the grid points.
    f, g : ndarrays
        Real and imaginary parts of theta.
    """

    def __init__(self, measure: LatticeMeasure, grid_size: int = DEFAULT_GRID_SIZE,
                 puncture_radius: float = DEFAULT_PUNCTURE):
        grid_size = int(grid_size)
        if grid_size < 17:
            raise ValueError("grid_size must be at least 17")
        if not puncture_radius > 0:
            raise ValueError("puncture_radius must be positive")
        self.measure = measure
        self.grid_size = grid_size
        self.grid_step = 1.0 / grid_size
        self.puncture_radius = float(puncture_radius)

        N = grid_size
        ks = measure.indices()
        w = measure.weights
        sign = np.where(ks % 2 == 0, 1.0, -1.0)

        t_full = -0.5 + np.arange(N) / N
        theta_full = _grid_series(w * sign, ks, N)
        d1_full = 1j * _grid_series(TWO_PI * ks * w * sign, ks, N)
        d2_full = _grid_series(-((TWO_PI * ks) ** 2) * w * sign, ks, N)

        self._t_full = t_full
        self._theta_full = theta_full
        self._d1_full = d1_full
        self._d2_full = d2_full

        keep = np.abs(t_full) > self.puncture_radius
        self._keep = keep
        self.grid = t_full[keep]
        self.theta = theta_full[keep]
        self.d1 = d1_full[keep]
        self.d2 = d2_full[keep]
        self.phi = np.abs(self.d1.real / self.grid)
        for arr in (self.grid, self.theta, self.d1, self.d2, self.phi):
            arr.setflags(write=False)

    @property
    def f(self) -> np.ndarray:
        return self.theta.real

    @property
    def g(self) -> np.ndarray:
        return self.theta.imag

    def __repr__(self) -> str:
        return f"SpectralProfile(points={self.grid.size}, step={self.grid_step:g})"


def _grid_series(coeff: np.ndarray, ks: np.ndarray, N: int) -> np.ndarray:
    """sum_k coeff_k exp(2 pi i k j / N) for j = 0..N-1, coeff real.

    Folds coefficients modulo N (the exponential only depends on k mod N),
    evaluates the half spectrum with a real FFT, and mirrors the conjugate
    half analytically so the output is exactly Hermitian in j.
    """
    folded = np.zeros(N)
    np.add.at(folded, np.mod(ks, N), coeff)
    half = np.fft.rfft(folded)
    out = np.empty(N, dtype=complex)
    out[: N // 2 + 1] = np.conj(half)
    out[N // 2 + 1 :] = half[1 : (N + 1) // 2][::-1]
    return out


def build_profile(mu: LatticeMeasure, grid_size: int = DEFAULT_GRID_SIZE,
                  puncture_radius: float = DEFAULT_PUNCTURE) -> SpectralProfile:
    return SpectralProfile(mu, grid_size, puncture_radius)


# --------------------------------------------------------------------------
# angular ratio
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AngularRatioReport:
    value: float                 # sup over guarded grid points
    unbounded: bool              # geometric growth under near-zero refinement
    refinement_sups: tuple       # sup per refinement level
    valid_points: int


def angular_ratio_sup(profile: SpectralProfile) -> AngularRatioReport:
    """Supremum of |theta - 1| / (1 - |theta|) with an unboundedness probe.

    The headline value scans grid points whose modulus is below
    1 - 1e-10.  The probe evaluates the ratio on three windows next to the
    origin, each four times finer than the last; the flag is set when the
    windowed supremum at least doubles at every refinement.
    """
    modulus = np.abs(profile.theta)
    valid = modulus < 1.0 - ANGULAR_MODULUS_GUARD
    if not valid.any():
        raise DiagnosticRefused(
            "transform modulus is 1 to within 1e-10 at every grid point; "
            "the measure is not strictly aperiodic"
        )
    ratios = np.abs(profile.theta[valid] - 1.0) / (1.0 - modulus[valid])
    value = float(ratios.max())

    # real weights: theta(-t) = conj theta(t), so positive t suffices
    sups = []
    h = profile.grid_step
    for level in range(3):
        theta = transform_on_ladder(profile.measure, h / 4.0**level, 64)
        den = 1.0 - np.abs(theta)
        ok = den > REFINEMENT_DENOMINATOR_FLOOR
        sups.append(float((np.abs(theta[ok] - 1.0) / den[ok]).max()) if ok.any() else 0.0)
    unbounded = sups[0] > 0 and sups[1] >= 2.0 * sups[0] and sups[2] >= 2.0 * sups[1]
    return AngularRatioReport(value, unbounded, tuple(sups), int(valid.sum()))


# --------------------------------------------------------------------------
# Gaussian decay rate
# --------------------------------------------------------------------------

def gaussian_decay_rate(profile: SpectralProfile) -> float:
    """Largest C with |theta(t)| <= exp(-C t^2) at every grid point.

    Positive for strictly aperiodic measures; a nonpositive value
    contradicts strict aperiodicity and raises.
    """
    modulus = np.abs(profile.theta)
    t2 = profile.grid**2
    with np.errstate(divide="ignore"):
        rates = np.where(modulus > 0.0, -np.log(np.where(modulus > 0, modulus, 1.0)) / t2, np.inf)
    c = float(rates.min())
    if not c > 0.0:
        worst = profile.grid[int(np.argmin(rates))]
        raise HypothesisFailure(
            f"no positive Gaussian decay rate: modulus reaches 1 near t={worst:.6g}"
        )
    return c


# --------------------------------------------------------------------------
# phi properties
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiPropertyReport:
    window: float
    even_max_violation: float    # max |phi(t) - phi(-t)| over the grid
    c1: float                    # sup |f''| / phi on the window
    c2: float                    # sup |theta''| / phi
    c3: float                    # sup |theta'/t| / phi
    tphi_derivative_ratio: float # sup |t phi'(t)| / phi(t) on the window
    tphi_window_maxima: tuple    # max |t phi| over 4 nested half windows
    tphi_monotone: bool
    notes: tuple


def phi_property_report(profile: SpectralProfile, window: float = 0.125,
                        phi=None) -> PhiPropertyReport:
    """Structural checks for phi(t) = |f'(t)/t| near the origin.

    Evenness is scanned over the whole grid; the derivative-domination
    constants and the |t phi'| <= phi check are scanned on |t| <= window,
    where the majorant behavior is meaningful.  ``phi`` substitutes a
    constant (or full-grid array) majorant, the bounded-second-derivative
    route.  The decomposition of f'' into a monotone part plus a bounded
    remainder is not identifiable from samples, so only these computable
    consequences are verified.
    """
    N = profile.grid_size
    t_full = profile._t_full
    if phi is not None:
        phi_full = np.broadcast_to(np.asarray(phi, dtype=float), (N,)).copy()
    else:
        phi_full = np.full(N, np.nan)
        nz = t_full != 0.0
        phi_full[nz] = np.abs(profile._d1_full.real[nz] / t_full[nz])

    # evenness via the exact index pairing j <-> N - j
    j = np.arange(1, N)
    paired = np.abs(phi_full[j] - phi_full[N - j])
    paired = paired[np.isfinite(paired)]
    even_violation = float(paired.max()) if paired.size else 0.0

    phi_grid = phi_full[profile._keep]
    mask = np.abs(profile.grid) <= window
    if not mask.any():
        raise ValueError("window contains no grid points")
    t = profile.grid[mask]
    phi_w = phi_grid[mask]
    d1 = profile.d1[mask]
    d2 = profile.d2[mask]
    pos = phi_w > 0.0
    if not pos.any():
        raise DiagnosticRefused("phi vanishes on the whole window")
    c1 = float((np.abs(d2.real[pos]) / phi_w[pos]).max())
    c2 = float((np.abs(d2[pos]) / phi_w[pos]).max())
    c3 = float((np.abs(d1[pos] / t[pos]) / phi_w[pos]).max())

    # centered finite differences for phi' on the uniform full grid
    dphi = (phi_full[2:] - phi_full[:-2]) / (2.0 * profile.grid_step)
    tc = t_full[1:-1]
    phic = phi_full[1:-1]
    ok = np.isfinite(dphi) & np.isfinite(phic) & (np.abs(tc) <= window) & (phic > 0.0)
    ratio = float((np.abs(tc[ok] * dphi[ok]) / phic[ok]).max()) if ok.any() else 0.0

    maxima = []
    for i in range(4):
        wnd = window / 2.0**i
        sel = np.abs(profile.grid) <= wnd
        maxima.append(float(np.abs(profile.grid[sel] * phi_grid[sel]).max()) if sel.any() else 0.0)
    monotone = all(maxima[i + 1] <= maxima[i] * (1.0 + 1e-12) for i in range(3))

    notes = (
        "second-derivative split into monotone plus bounded parts is not "
        "recoverable from samples; evenness, domination constants and the "
        "t*phi' bound are the computable surrogates",
    )
    return PhiPropertyReport(
        window=window,
        even_max_violation=even_violation,
        c1=c1,
        c2=c2,
        c3=c3,
        tphi_derivative_ratio=ratio,
        tphi_window_maxima=tuple(maxima),
        tphi_monotone=monotone,
        notes=notes,
    )


# --------------------------------------------------------------------------
# component ratios
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ComponentRatioReport:
    sup_first: float     # sup |g'(t)| / |f'(t)|
    sup_second: float    # sup |g''(t)| / |f''(t)|
    denominator_floor: float


def component_ratio_report(profile: SpectralProfile, floor: float = 1e-12) -> ComponentRatioReport:
    """Empirical suprema of |g'/f'| and |g''/f''| where denominators exceed
    the floor.  Finite, stable values corroborate a bounded angular ratio."""
    f1 = profile.d1.real
    g1 = profile.d1.imag
    f2 = profile.d2.real
    g2 = profile.d2.imag
    m1 = np.abs(f1) > floor
    m2 = np.abs(f2) > floor
    sup1 = float((np.abs(g1[m1]) / np.abs(f1[m1])).max()) if m1.any() else 0.0
    sup2 = float((np.abs(g2[m2]) / np.abs(f2[m2])).max()) if m2.any() else 0.0
    return ComponentRatioReport(sup1, sup2, floor)


# --------------------------------------------------------------------------
# modulus majorant
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MajorantFit:
    k_star: float
    delta: float
    worst_t: float
    side_condition_ok: bool


def majorant_fit(profile: SpectralProfile, delta: float, phi=None) -> MajorantFit:
    """Largest k with |theta(t)| <= 1 - k t^2 phi(t) on the grid in [-delta, delta].

    ``phi`` overrides the profile's majorant (a scalar or an array aligned
    with the restricted grid); the bounded-second-derivative case uses a
    constant.  Raises HypothesisFailure when no positive k exists.
    """
    mask = np.abs(profile.grid) <= delta
    if not mask.any():
        raise ValueError("delta window contains no grid points")
    t = profile.grid[mask]
    if phi is None:
        phi_w = profile.phi[mask]
    else:
        phi_w = np.broadcast_to(np.asarray(phi, dtype=float), t.shape)
    if np.any(phi_w <= 0.0):
        raise DiagnosticRefused("phi must be positive on the fit window")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = (1.0 - np.abs(profile.theta[mask])) / (t**2 * phi_w)
    i = int(np.argmin(ratios))
    k_star = float(ratios[i])
    if not k_star > 0.0:
        raise HypothesisFailure(
            f"majorant coefficient is not positive (min {k_star:.3e} at t={t[i]:.6g})"
        )
    envelope = k_star * t**2 * phi_w
    side_ok = bool(np.all(envelope >= -1e-12) and np.all(envelope <= 1.0 + 1e-12))
    return MajorantFit(k_star=k_star, delta=float(delta), worst_t=float(t[i]),
                       side_condition_ok=side_ok)


def phi_interpolator(profile: SpectralProfile):
    """Linear interpolant of the sampled phi, clamped at the grid ends.

    Scalar calls take a direct searchsorted path; quadrature hits this many
    thousands of times per integral.
    """
    grid = profile.grid
    phi = profile.phi
    last = grid.size - 1

    def phi_fn(t):
        if np.ndim(t) != 0:
            return np.interp(t, grid, phi)
        x = float(t)
        i = int(np.searchsorted(grid, x))
        if i <= 0:
            return float(phi[0])
        if i > last:
            return float(phi[last])
        x0 = grid[i - 1]
        x1 = grid[i]
        w = (x - x0) / (x1 - x0)
        return float(phi[i - 1] * (1.0 - w) + phi[i] * w)

    return phi_fn


# --------------------------------------------------------------------------
# envelope integrals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeIntegrals:
    n_values: tuple
    j1: tuple
    j2: tuple          # entries are None for n < 2
    j1_max: float
    j2_max: float
    k: float
    delta: float


def envelope_integrals(phi_fn, k: float, delta: float, n_values) -> EnvelopeIntegrals:
    """The two envelope integrals certifying n-uniform kernel bounds.

    J1(n) = n * integral of (1 - k t^2 phi)^(n-1) |t| phi over (-delta, delta)
    J2(n) = n^2 * integral of (1 - k t^2 phi)^(n-2) |t|^3 phi^2

    Requires 0 <= 1 - k t^2 phi(t) <= 1 on the interval; the base is
    clamped to [0, 1] against round-off once that holds on a dense sample.
    """
    n_values = tuple(int(n) for n in n_values)
    if any(n < 1 for n in n_values):
        raise ValueError("powers must be positive")
    if list(n_values) != sorted(n_values):
        raise ValueError("powers must be ascending")
    ts = np.linspace(-delta, delta, 4097)
    envelope = k * ts**2 * np.asarray(phi_fn(ts), dtype=float)
    if np.any(envelope < -1e-12) or np.any(envelope > 1.0 + 1e-12):
        raise DiagnosticRefused(
            "side condition 0 <= 1 - k t^2 phi <= 1 fails on the interval"
        )

    def base(t):
        return min(1.0, max(0.0, 1.0 - k * t * t * float(phi_fn(t))))

    j1 = []
    j2 = []
    for n in n_values:
        def f1(t, n=n):
            return base(t) ** (n - 1) * abs(t) * float(phi_fn(t))

        val1 = n * (integrate(f1, -delta, 0.0) + integrate(f1, 0.0, delta))
        j1.append(float(val1))
        if n >= 2:
            def f2(t, n=n):
                return base(t) ** (n - 2) * abs(t) ** 3 * float(phi_fn(t)) ** 2

            val2 = n * n * (integrate(f2, -delta, 0.0) + integrate(f2, 0.0, delta))
            j2.append(float(val2))
        else:
            j2.append(None)
    j2_finite = [v for v in j2 if v is not None]
    return EnvelopeIntegrals(
        n_values=n_values,
        j1=tuple(j1),
        j2=tuple(j2),
        j1_max=max(j1),
        j2_max=max(j2_finite) if j2_finite else 0.0,
        k=float(k),
        delta=float(delta),
    )


# --------------------------------------------------------------------------
# transform-side aperiodicity check
# --------------------------------------------------------------------------

def transform_aperiodicity_check(mu: LatticeMeasure, t_min: float = 0.01,
                                 margin: float = 1e-6, grid_points: int = 32769,
                                 max_denominator: int = 128) -> bool:
    """Grid surrogate for the transform criterion of strict aperiodicity.

    True when max |theta(t)| over |t| in [t_min, 1/2] stays below
    1 - margin.  The scan combines a uniform grid (evaluated by the folded
    FFT, so wide supports cost nothing extra) with the rational points p/q
    for small q, where a periodic support pins the modulus at exactly 1.
    """
    N = int(grid_points)
    if N % 2 == 0:
        N += 1  # keep 0 off the grid
    ks = mu.indices()
    sign = np.where(ks % 2 == 0, 1.0, -1.0)
    theta = _grid_series(mu.weights * sign, ks, N)
    t_full = -0.5 + np.arange(N) / N
    modulus = float(np.abs(theta[np.abs(t_full) >= t_min]).max())

    # rational probes: theta(p/q) depends only on the weights folded mod q
    qmax = min(int(max_denominator), mu.width)
    for q in range(2, qmax + 1):
        folded = np.zeros(q)
        np.add.at(folded, np.mod(ks, q), mu.weights)
        ps = np.arange(math.ceil(q * t_min), q // 2 + 1)
        if ps.size == 0:
            continue
        probes = np.exp(2j * math.pi * np.outer(ps, np.arange(q)) / q) @ folded
        modulus = max(modulus, float(np.abs(probes).max()))
    return bool(modulus < 1.0 - margin)
