"""Measure arithmetic against brute-force oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convpow import (
    LatticeMeasure,
    atoms_measure,
    convolution_power,
    convolve,
    expectation,
    is_strictly_aperiodic,
    lazy_walk,
    moment,
    power_law,
)
from convpow.measure import _finalize_power
from convpow.errors import PrecisionExhausted


# -- oracles -----------------------------------------------------------------

def dict_of(mu):
    return {int(k): float(v) for k, v in zip(mu.indices(), mu.weights) if v != 0.0}


def dict_convolve(a, b):
    out = {}
    for i, wa in a.items():
        for j, wb in b.items():
            out[i + j] = out.get(i + j, 0.0) + wa * wb
    return out


def dict_power(a, n):
    out = dict(a)
    for _ in range(n - 1):
        out = dict_convolve(out, a)
    return out


def assert_measure_close(mu, ref_dict, tol):
    keys = set(ref_dict) | set(dict_of(mu))
    for k in keys:
        assert abs(mu.weight_at(k) - ref_dict.get(k, 0.0)) <= tol, k


small_measures = st.builds(
    lambda offset, ws: LatticeMeasure(offset, np.array(ws) / math.fsum(ws)),
    st.integers(-5, 5),
    st.lists(st.floats(0.05, 1.0), min_size=1, max_size=9),
)


# -- construction ------------------------------------------------------------

def test_trimming_and_offset():
    mu = LatticeMeasure(-3, [0.0, 0.0, 0.5, 0.5, 0.0])
    assert mu.offset == -1
    assert mu.width == 2


def test_interior_zeros_kept():
    mu = LatticeMeasure(-1, [0.5, 0.0, 0.5])
    assert mu.width == 3
    assert list(mu.support()) == [-1, 1]


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError, match="negative"):
        LatticeMeasure(0, [0.5, -0.1, 0.6])
    with pytest.raises(ValueError, match="mass"):
        LatticeMeasure(0, [0.5, 0.4])
    with pytest.raises(ValueError, match="positive weight"):
        LatticeMeasure(0, [0.0], tail_mass=1.0)
    with pytest.raises(ValueError):
        LatticeMeasure(0, [0.9], tail_mass=-0.1)


def test_tail_mass_accepted():
    mu = LatticeMeasure(0, [0.9], tail_mass=0.1)
    assert mu.is_truncated_proxy
    assert mu.stored_mass() == pytest.approx(0.9, abs=0)


def test_convolve_tracks_missing_mass():
    mu = LatticeMeasure(0, [0.5, 0.4], tail_mass=0.1)
    out = convolve(mu, mu)
    assert out.stored_mass() == pytest.approx(0.81, abs=1e-15)
    assert out.tail_mass == pytest.approx(0.19, abs=1e-15)


def test_fast_power_tracks_missing_mass():
    mu = LatticeMeasure(0, [0.5, 0.4], tail_mass=0.1)
    out = convolution_power(mu, 4, "fast")
    assert out.stored_mass() == pytest.approx(0.9**4, rel=1e-12)
    assert out.tail_mass == pytest.approx(1.0 - 0.9**4, rel=1e-12)
    oracle = convolution_power(mu, 4, "direct")
    assert np.max(np.abs(out.weights - oracle.weights)) <= 1e-12


def test_immutability():
    mu = lazy_walk()
    with pytest.raises(AttributeError):
        mu.offset = 3
    with pytest.raises(ValueError):
        mu.weights[0] = 1.0


def test_json_round_trip():
    mu = LatticeMeasure(-2, [0.25, 0.5, 0.125], tail_mass=0.125)
    again = LatticeMeasure.from_json(mu.to_json())
    assert again.offset == mu.offset
    assert np.array_equal(again.weights, mu.weights)
    assert again.tail_mass == mu.tail_mass


# -- expectation and moments -------------------------------------------------

def test_expectation_point_mass_at_origin():
    assert expectation(atoms_measure({0: 1.0})) == 0.0


def test_expectation_symmetric_two_atoms():
    assert expectation(atoms_measure({-1: 0.5, 1: 0.5})) == 0.0


def test_expectation_half_shift():
    assert expectation(atoms_measure({0: 0.5, 1: 0.5})) == 0.5


def test_moment_two_atoms():
    assert moment(atoms_measure({-1: 0.5, 1: 0.5}), 2.0) == 1.0


def test_moment_point_mass():
    assert moment(atoms_measure({3: 1.0}), 1.0) == 3.0


def test_moment_rejects_nonpositive_order():
    with pytest.raises(ValueError):
        moment(lazy_walk(), 0.0)
    with pytest.raises(ValueError):
        moment(lazy_walk(), -1.5)


def test_fractional_moment_against_direct_summation():
    mu = power_law(3.0, 1000)
    # oracle: plain termwise sum of |k|^1.5 * s / |k|^3 = s |k|^-1.5
    s = mu.weight_at(1)
    oracle = math.fsum(
        s * abs(k) ** -1.5 for k in range(-1000, 1001) if k != 0
    )
    value = moment(mu, 1.5)
    assert abs(value - oracle) <= 1e-12 * oracle


# -- convolution -------------------------------------------------------------

def test_convolve_two_atom_square():
    mu = atoms_measure({-1: 0.5, 1: 0.5})
    out = convolve(mu, mu)
    assert_measure_close(out, {-2: 0.25, 0: 0.5, 2: 0.25}, 0.0)


def test_convolve_translates_atoms():
    out = convolve(atoms_measure({4: 1.0}), atoms_measure({-7: 1.0}))
    assert dict_of(out) == {-3: 1.0}


def test_lazy_square_at_origin():
    out = convolve(lazy_walk(), lazy_walk())
    assert out.weight_at(0) == pytest.approx(6.0 / 16.0, abs=1e-16)


@settings(max_examples=40, deadline=None)
@given(small_measures, small_measures)
def test_convolve_matches_dict_oracle(mu, nu):
    assert_measure_close(convolve(mu, nu), dict_convolve(dict_of(mu), dict_of(nu)), 1e-14)


@settings(max_examples=40, deadline=None)
@given(small_measures, small_measures)
def test_convolve_commutative(mu, nu):
    ab = convolve(mu, nu)
    ba = convolve(nu, mu)
    assert ab.offset == ba.offset
    assert np.max(np.abs(ab.weights - ba.weights)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(small_measures, small_measures, small_measures)
def test_convolve_associative(a, b, c):
    left = convolve(convolve(a, b), c)
    right = convolve(a, convolve(b, c))
    assert left.offset == right.offset
    assert np.max(np.abs(left.weights - right.weights)) <= 1e-12


# -- convolution powers ------------------------------------------------------

def test_power_of_point_mass_translates():
    out = convolution_power(atoms_measure({1: 1.0}), 5)
    assert dict_of(out) == {5: 1.0}


def test_lazy_powers_are_binomial():
    mu = lazy_walk()
    for n in range(1, 13):
        direct = convolution_power(mu, n, "direct")
        for x in range(-n, n + 1):
            exact = Fraction(math.comb(2 * n, n + x), 4**n)
            assert abs(direct.weight_at(x) - float(exact)) <= 1e-15


def test_binomial_power_value():
    out = convolution_power(atoms_measure({0: 0.5, 1: 0.5}), 3, "direct")
    assert out.weight_at(1) == pytest.approx(3.0 / 8.0, abs=0)


def test_fast_power_matches_direct_on_seeded_measures():
    rng = np.random.default_rng(20260809)
    for _ in range(15):
        width = int(rng.integers(2, 26))
        w = rng.uniform(0.1, 1.0, width)
        mu = LatticeMeasure(int(rng.integers(-12, 13)), w / math.fsum(w))
        n = int(rng.integers(2, 11))
        fast = convolution_power(mu, n, "fast")
        direct = convolution_power(mu, n, "direct")
        assert fast.offset == direct.offset
        assert np.max(np.abs(fast.weights - direct.weights)) <= 1e-10


def sup_distance(mu, nu):
    lo = min(mu.offset, nu.offset)
    hi = max(mu.last, nu.last)
    return max(abs(mu.weight_at(k) - nu.weight_at(k)) for k in range(lo, hi + 1))


def test_fast_power_matches_direct_on_narrow_zoo():
    cases = [
        lazy_walk(),
        atoms_measure({-1: 1.0, 0: 1.0, 1: 1.0}),
        atoms_measure({0: 0.5, 1: 0.5}),
        power_law(3.0, 20),      # width 41 <= 50
        power_law(2.5, 20),
    ]
    for mu in cases:
        for n in (2, 5, 10):
            fast = convolution_power(mu, n, "fast")
            direct = convolution_power(mu, n, "direct")
            # tail cells below round-off are clamped and trimmed on the
            # fast path, so compare as functions on the lattice
            assert sup_distance(fast, direct) <= 1e-10


def test_power_validates_arguments():
    with pytest.raises(ValueError):
        convolution_power(lazy_walk(), 0)
    with pytest.raises(ValueError):
        convolution_power(lazy_walk(), 2, method="magic")


def test_power_n1_returns_same_measure():
    mu = lazy_walk()
    assert convolution_power(mu, 1, "fast") is mu


def test_finalize_power_clamps_small_negatives():
    out = _finalize_power(np.array([0.5, -1e-12, 0.5]), 1.0)
    assert out[1] == 0.0
    assert math.fsum(out) == pytest.approx(1.0, abs=1e-15)


def test_finalize_power_rejects_large_deficit():
    with pytest.raises(PrecisionExhausted):
        _finalize_power(np.array([0.6, -1e-6, 0.4]), 1.0)


def test_expectation_additivity_to_n64():
    for mu in (lazy_walk(), atoms_measure({-1: 0.25, 0: 0.25, 2: 0.5})):
        e1 = expectation(mu)
        for n in (2, 8, 64):
            assert abs(expectation(convolution_power(mu, n, "fast")) - n * e1) <= 1e-8


def test_second_moment_additivity():
    for mu in (lazy_walk(), atoms_measure({0: 0.5, 1: 0.5}), atoms_measure({-2: 0.3, 1: 0.7})):
        m2 = moment(mu, 2.0)
        e = expectation(mu)
        for n in (2, 5, 16):
            expected = n * m2 + n * (n - 1) * e * e
            got = moment(convolution_power(mu, n, "fast"), 2.0)
            assert abs(got - expected) <= 1e-6 * max(1.0, abs(expected))


# -- strict aperiodicity -----------------------------------------------------

def test_aperiodicity_consecutive_atoms():
    assert is_strictly_aperiodic(atoms_measure({0: 0.5, 1: 0.5}))


def test_aperiodicity_even_support_is_periodic():
    # support {-1, 1} lies in the coset 1 + 2Z
    assert not is_strictly_aperiodic(atoms_measure({-1: 0.5, 1: 0.5}))
    assert not is_strictly_aperiodic(atoms_measure({-2: 0.25, 0: 0.5, 2: 0.25}))


def test_aperiodicity_single_atom_false_by_convention():
    assert not is_strictly_aperiodic(atoms_measure({7: 1.0}))


def test_aperiodicity_matches_pairwise_gcd_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        size = int(rng.integers(1, 7))
        pts = rng.choice(np.arange(-20, 21), size=size, replace=False)
        mu = atoms_measure({int(k): 1.0 for k in pts})
        support = sorted(int(k) for k in pts)
        gcds = [abs(a - b) for i, a in enumerate(support) for b in support[i + 1:]]
        oracle = bool(gcds) and math.gcd(*gcds) == 1 if len(gcds) > 1 else (
            len(gcds) == 1 and gcds[0] == 1
        )
        assert is_strictly_aperiodic(mu) == oracle
