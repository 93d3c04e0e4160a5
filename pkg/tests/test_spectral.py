"""Transform diagnostics: values against termwise and closed-form oracles."""

import math

import numpy as np
import pytest

from convpow import (
    DiagnosticRefused,
    HypothesisFailure,
    SpectralProfile,
    angular_ratio_sup,
    atoms_measure,
    component_ratio_report,
    derivative_at,
    envelope_integrals,
    gaussian_decay_rate,
    lazy_walk,
    majorant_fit,
    mixture,
    phi_property_report,
    power_law,
    transform_aperiodicity_check,
    transform_at,
)
from convpow.spectral import phi_interpolator

GRID = 2**12 + 1  # fast grid for unit tests; default size is exercised too


@pytest.fixture(scope="module")
def lazy_profile():
    return SpectralProfile(lazy_walk(), GRID)


@pytest.fixture(scope="module")
def power3_profile():
    return SpectralProfile(power_law(3.0, 10**4), GRID)


# -- pointwise transform -----------------------------------------------------

def test_transform_at_zero_is_one():
    for mu in (lazy_walk(), power_law(2.5, 100), atoms_measure({0: 0.5, 1: 0.5})):
        assert transform_at(mu, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_transform_two_atoms_quarter():
    assert abs(transform_at(atoms_measure({-1: 0.5, 1: 0.5}), 0.25)) <= 1e-15


def test_transform_lazy_closed_form():
    # theta(t) = (1 + cos(2 pi t)) / 2 = cos^2(pi t)
    val = transform_at(lazy_walk(), 0.125)
    assert val.real == pytest.approx(math.cos(math.pi / 8.0) ** 2, abs=1e-15)
    assert abs(val.imag) <= 1e-16


def test_derivative_zero_mean():
    for mu in (lazy_walk(), power_law(3.0, 100)):
        assert abs(derivative_at(mu, 0.0, 1)) <= 1e-12


def test_second_derivative_two_atoms():
    val = derivative_at(atoms_measure({-1: 0.5, 1: 0.5}), 0.0, 2)
    assert val.real == pytest.approx(-4.0 * math.pi**2, rel=1e-14)


def test_derivative_point_mass():
    val = derivative_at(atoms_measure({1: 1.0}), 0.0, 1)
    assert val == pytest.approx(2j * math.pi, abs=1e-15)


def test_derivative_order_validated():
    with pytest.raises(ValueError):
        derivative_at(lazy_walk(), 0.1, 3)


# -- profile construction ----------------------------------------------------

def test_grid_series_matches_direct_dft():
    from convpow.spectral import _grid_series

    rng = np.random.default_rng(5)
    for N in (7, 8, 33, 101):
        ks = rng.choice(np.arange(-50, 51), size=12, replace=False)
        coeff = rng.uniform(-1, 1, 12)
        got = _grid_series(coeff, ks, N)
        oracle = np.array(
            [np.sum(coeff * np.exp(2j * np.pi * ks * j / N)) for j in range(N)]
        )
        assert np.abs(got - oracle).max() < 1e-12


def test_profile_matches_termwise_evaluation(power3_profile):
    prof = power3_profile
    mu = prof.measure
    idx = np.linspace(5, prof.grid.size - 5, 9).astype(int)
    for i in idx:
        t = prof.grid[i]
        assert abs(prof.theta[i] - transform_at(mu, t)) <= 1e-10
        assert abs(prof.d1[i] - derivative_at(mu, t, 1)) <= 1e-8
        assert abs(prof.d2[i] - derivative_at(mu, t, 2)) <= 1e-6


def test_profile_modulus_bounded(lazy_profile, power3_profile):
    for prof in (lazy_profile, power3_profile):
        assert np.abs(prof.theta).max() <= 1.0 + 1e-12


def test_profile_conjugate_symmetry(power3_profile):
    prof = power3_profile
    t = prof.grid
    # pair each positive t with its mirror
    pos = t > 0
    mirrored = {round(-x, 15): i for i, x in enumerate(t)}
    checked = 0
    for i in np.flatnonzero(pos)[:: max(1, pos.sum() // 200)]:
        j = mirrored.get(round(t[i], 15))
        if j is None:
            continue
        assert abs(prof.theta[j] - np.conj(prof.theta[i])) <= 1e-12
        checked += 1
    assert checked > 50


def test_profile_symmetric_measure_real(power3_profile):
    assert np.abs(power3_profile.g).max() <= 1e-12


def test_profile_grid_excludes_origin(lazy_profile):
    assert np.abs(lazy_profile.grid).min() > 0.0


def test_profile_validates_arguments():
    with pytest.raises(ValueError):
        SpectralProfile(lazy_walk(), 5)
    with pytest.raises(ValueError):
        SpectralProfile(lazy_walk(), GRID, puncture_radius=0.0)


# -- angular ratio -----------------------------------------------------------

def test_angular_ratio_lazy_is_one(lazy_profile):
    rep = angular_ratio_sup(lazy_profile)
    assert rep.value == pytest.approx(1.0, abs=1e-9)
    assert not rep.unbounded


def test_angular_ratio_uniform_three_atoms():
    prof = SpectralProfile(atoms_measure({-1: 1.0, 0: 1.0, 1: 1.0}), GRID)
    rep = angular_ratio_sup(prof)
    assert rep.value == pytest.approx(2.0, abs=1e-6)
    assert not rep.unbounded


def test_angular_ratio_unbounded_for_shifted_coin():
    prof = SpectralProfile(atoms_measure({0: 0.5, 1: 0.5}), GRID)
    rep = angular_ratio_sup(prof)
    assert rep.unbounded
    sups = rep.refinement_sups
    assert sups[1] >= 2.0 * sups[0] and sups[2] >= 2.0 * sups[1]


def test_angular_ratio_refused_for_point_mass():
    prof = SpectralProfile(atoms_measure({0: 1.0}), GRID)
    with pytest.raises(DiagnosticRefused):
        angular_ratio_sup(prof)


def test_angular_ratio_reflection_invariant():
    mu = atoms_measure({-1: 0.2, 0: 0.3, 2: 0.5})
    a = angular_ratio_sup(SpectralProfile(mu, GRID)).value
    b = angular_ratio_sup(SpectralProfile(mu.reflected(), GRID)).value
    assert abs(a - b) <= 1e-10 * max(1.0, a)


# -- Gaussian decay rate -----------------------------------------------------

def test_decay_rate_lazy_is_pi_squared(lazy_profile):
    assert gaussian_decay_rate(lazy_profile) == pytest.approx(math.pi**2, abs=1e-3)


def test_decay_rate_certifies_envelope(lazy_profile):
    c = gaussian_decay_rate(lazy_profile)
    t = lazy_profile.grid
    assert np.all(np.abs(lazy_profile.theta) <= np.exp(-c * t * t) + 1e-15)


def test_decay_rate_mixture_against_dense_oracle():
    mu = atoms_measure({0: 0.75, 1: 0.25})
    prof = SpectralProfile(mu, GRID)
    c = gaussian_decay_rate(prof)
    assert c > 0
    # dense-grid oracle from the closed form |theta|^2 = (10 + 6 cos)/16
    ts = np.linspace(-0.5, 0.4999999, 4 * GRID)
    ts = ts[np.abs(ts) > 1e-9]
    mod = np.sqrt((10.0 + 6.0 * np.cos(2.0 * np.pi * ts)) / 16.0)
    oracle = float(np.min(-np.log(mod) / ts**2))
    assert oracle <= c
    assert c == pytest.approx(oracle, rel=1e-3)


def test_decay_rate_nonincreasing_under_grid_refinement():
    mu = atoms_measure({0: 0.75, 1: 0.25})
    base = 2**11
    coarse = gaussian_decay_rate(SpectralProfile(mu, base))
    fine = gaussian_decay_rate(SpectralProfile(mu, 2 * base))  # superset grid
    assert fine <= coarse + 1e-15


def test_decay_rate_raises_for_periodic_support():
    prof = SpectralProfile(atoms_measure({-1: 0.5, 1: 0.5}), GRID)
    with pytest.raises(HypothesisFailure):
        gaussian_decay_rate(prof)


# -- phi properties ----------------------------------------------------------

def test_phi_properties_lazy(lazy_profile):
    rep = phi_property_report(lazy_profile)
    assert rep.even_max_violation <= 1e-10
    assert rep.tphi_derivative_ratio <= 1.0 + 1e-6
    assert rep.tphi_monotone
    assert rep.c3 == pytest.approx(1.0, abs=1e-9)  # symmetric: |theta'/t| == phi
    assert rep.c1 <= 2.0


def test_phi_properties_power3(power3_profile):
    rep = phi_property_report(power3_profile)
    assert rep.even_max_violation <= 1e-10
    # the domination constant must leave room inside (1, 2): sup < 2, and
    # phi itself grows, so the sup sits below but near 1 at this resolution
    assert 0.5 < rep.c1 < 2.0
    assert rep.c2 < 2.0 * rep.c1
    assert rep.tphi_derivative_ratio <= 1.0 + 1e-6
    assert rep.tphi_monotone


def test_phi_constant_override_derivative_vanishes(lazy_profile):
    # bounded-second-derivative route: a constant majorant has phi' = 0
    const = float(np.abs(lazy_profile.d2).max())
    rep = phi_property_report(lazy_profile, phi=const)
    assert rep.tphi_derivative_ratio == 0.0
    assert rep.even_max_violation == 0.0
    assert rep.c2 <= 1.0 + 1e-12  # constant chosen as sup |theta''|
    assert rep.tphi_monotone


# -- component ratios --------------------------------------------------------

def test_component_ratios_vanish_for_symmetric(power3_profile):
    rep = component_ratio_report(power3_profile)
    assert rep.sup_first <= 1e-8
    assert rep.sup_second <= 1e-8


def test_component_ratios_vanish_for_symmetric_mixture():
    mu = mixture(0.4, power_law(3.0, 500), lazy_walk())
    rep = component_ratio_report(SpectralProfile(mu, GRID))
    assert rep.sup_first <= 1e-8
    assert rep.sup_second <= 1e-8


def test_component_ratio_diverges_for_shifted_coin():
    mu = atoms_measure({0: 0.5, 1: 0.5})
    coarse = component_ratio_report(SpectralProfile(mu, 2**10 + 1)).sup_first
    fine = component_ratio_report(SpectralProfile(mu, 2**13 + 1)).sup_first
    assert fine >= 2.0 * coarse  # grows with resolution near 0


# -- majorant ----------------------------------------------------------------

def test_majorant_lazy_constant_phi(lazy_profile):
    const = 4.0 * math.pi**2
    fit = majorant_fit(lazy_profile, 0.5, phi=const)
    # oracle: min of sin^2(pi t) / (const t^2) over the same grid
    t = lazy_profile.grid
    oracle = float(np.min(np.sin(np.pi * t) ** 2 / (const * t * t)))
    assert fit.k_star == pytest.approx(oracle, rel=1e-12)
    assert fit.k_star >= 1.0 / (8.0 * math.pi**2)
    assert fit.side_condition_ok


def test_majorant_power3_positive(power3_profile):
    fit = majorant_fit(power3_profile, 0.25)
    assert fit.k_star > 0.0
    assert fit.side_condition_ok


def test_majorant_fails_for_periodic_support():
    # modulus pinned at 1 at |t| = 1/2; the window must reach it
    prof = SpectralProfile(atoms_measure({-2: 0.25, 0: 0.5, 2: 0.25}), GRID)
    with pytest.raises((HypothesisFailure, DiagnosticRefused)):
        majorant_fit(prof, 0.5)


# -- envelope integrals ------------------------------------------------------

def test_envelope_closed_form():
    ones = lambda t: np.ones_like(np.asarray(t, dtype=float))
    env = envelope_integrals(ones, 1.0, 0.5, [1, 4, 16, 256])
    assert env.j1[1] == pytest.approx(1.0 - 0.75**4, abs=1e-8)
    for v, n in zip(env.j1, env.n_values):
        assert v == pytest.approx(1.0 - 0.75**n, abs=1e-8)
        assert v <= 1.0 + 1e-12
    # J2(4) closed form: 16 * (int_0^{1/4} (1-u)^2 u du) = 67/192
    assert env.j2[1] == pytest.approx(67.0 / 192.0, abs=1e-8)


def test_envelope_n1_matches_trapezoid_oracle():
    phi = lambda t: 1.0 + np.cos(3.0 * np.asarray(t, dtype=float)) ** 2
    env = envelope_integrals(phi, 0.5, 0.4, [1])
    ts = np.linspace(-0.4, 0.4, 1_000_001)
    oracle = np.trapezoid(np.abs(ts) * phi(ts), ts)
    assert env.j1[0] == pytest.approx(float(oracle), rel=1e-6)
    assert env.j2[0] is None


def test_envelope_side_condition_refused():
    ones = lambda t: np.ones_like(np.asarray(t, dtype=float))
    with pytest.raises(DiagnosticRefused):
        envelope_integrals(ones, 100.0, 0.5, [4])


def test_envelope_bounded_for_power3(power3_profile):
    fit = majorant_fit(power3_profile, 0.25)
    env = envelope_integrals(phi_interpolator(power3_profile), fit.k_star, 0.25,
                             [10, 100, 1000, 10000])
    ref1 = env.j1[1]
    ref2 = env.j2[1]
    assert env.j1_max <= 2.0 * ref1
    assert env.j2_max <= 2.0 * ref2


def test_envelope_bounded_for_mixture():
    mu = mixture(0.5, power_law(3.0, 10**4), lazy_walk())
    prof = SpectralProfile(mu, GRID)
    fit = majorant_fit(prof, 0.25)
    env = envelope_integrals(phi_interpolator(prof), fit.k_star, 0.25,
                             [10, 100, 1000, 10000])
    assert env.j1_max <= 2.0 * env.j1[1]
    assert env.j2_max <= 2.0 * env.j2[1]


# -- transform-side aperiodicity check ----------------------------------------

def test_transform_check_agrees_with_gcd_on_zoo():
    cases = [
        lazy_walk(),
        power_law(3.0, 2000),
        power_law(2.5, 2000),
        atoms_measure({0: 0.5, 1: 0.5}),
        atoms_measure({-1: 0.5, 1: 0.5}),
        atoms_measure({-2: 0.25, 0: 0.5, 2: 0.25}),
        atoms_measure({0: 1.0}),
        atoms_measure({-3: 0.4, 3: 0.6}),
    ]
    from convpow import is_strictly_aperiodic

    for mu in cases:
        assert transform_aperiodicity_check(mu) == is_strictly_aperiodic(mu)
