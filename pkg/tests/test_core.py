"""Parameters, derived timescales, configs, and the unit system."""

import math

import pytest
from hypothesis import given, strategies as st

import sgcoarse as sg
from sgcoarse.core import UnitSystem


def test_silver_timescale_values(scales):
    assert scales.tau1 == pytest.approx(1.965176880741218e-05, rel=1e-12)
    assert scales.tau2 == pytest.approx(1.6973713607216568e-03, rel=1e-12)
    assert scales.tau3 == pytest.approx(2.2752358511326858e-07, rel=1e-12)


def test_timescales_match_defining_relations(silver, scales):
    m, f, s = silver.mass, abs(silver.force), silver.sigma
    assert scales.tau1 == pytest.approx(math.sqrt(2.0 * m * s / f), rel=1e-12)
    assert scales.tau2 == pytest.approx(m * s * s / silver.hbar, rel=1e-12)
    assert scales.tau3 == pytest.approx(scales.tau1**2 / scales.tau2, rel=1e-12)
    assert scales.a == pytest.approx(silver.accel, rel=1e-15)


def test_timescale_ordering(scales):
    assert scales.tau3 < scales.tau1 < scales.tau2


def test_zero_force_has_no_separation_scale():
    with pytest.raises(sg.NoSeparationError):
        sg.derive_scales(sg.PhysicalParams.silver(force=0.0))


def test_force_or_gradient_triple_required(silver):
    with pytest.raises(ValueError):
        sg.PhysicalParams(mass=silver.mass, sigma=silver.sigma)
    with pytest.raises(ValueError):
        sg.PhysicalParams(mass=silver.mass, sigma=silver.sigma,
                          force=silver.force, g=2.0)


def test_gradient_triple_fixes_force(silver):
    triple = dict(g=2.0, mu_B=9.2740100783e-24, B0=1.0e12)
    derived = -triple["g"] * triple["mu_B"] * (silver.hbar / 2.0) * triple["B0"]
    params = sg.PhysicalParams(mass=silver.mass, sigma=silver.sigma, **triple)
    assert params.force == pytest.approx(derived, rel=1e-15)
    with pytest.raises(ValueError):
        sg.PhysicalParams(mass=silver.mass, sigma=silver.sigma,
                          force=2.0 * derived, **triple)


def test_basic_parameter_validation(silver):
    with pytest.raises(ValueError):
        sg.PhysicalParams.silver(mass=-1.0)
    with pytest.raises(ValueError):
        sg.PhysicalParams.silver(sigma=0.0)
    with pytest.raises(ValueError):
        sg.PhysicalParams.silver(force=math.inf)


def test_spin_weights_must_be_normalized():
    with pytest.raises(ValueError):
        sg.PhysicalParams.silver(c_plus=1.0 + 0.0j, c_minus=1.0 + 0.0j)


def test_weight_lookup(silver):
    assert silver.weight("+") == silver.c_plus
    assert silver.weight("-") == silver.c_minus
    assert abs(silver.c_plus) ** 2 + abs(silver.c_minus) ** 2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        silver.weight("x")


def test_parse_config_text_basics():
    text = "\n".join([
        "# a comment line",
        "",
        "mass_kg = 1.79e-25",
        "force_N = 9.27e-22",
        "sigma_m = 1e-6",
    ])
    entries = sg.parse_config_text(text)
    assert entries == {"mass_kg": 1.79e-25, "force_N": 9.27e-22, "sigma_m": 1e-6}


@pytest.mark.parametrize("text", [
    "unknown_key = 1.0",
    "mass_kg 1.0",
    "mass_kg = spam",
    "mass_kg = 1.0\nmass_kg = 2.0",
])
def test_parse_config_text_rejects(text):
    with pytest.raises(ValueError):
        sg.parse_config_text(text)


def test_entries_round_trip(silver):
    entries = sg.params_to_entries(silver)
    assert sg.params_from_entries(entries) == silver


def test_entries_require_the_core_keys():
    with pytest.raises(ValueError):
        sg.params_from_entries({"mass_kg": 1.79e-25, "sigma_m": 1e-6})


def test_unit_scalars(silver, units):
    assert units.length == silver.sigma
    assert units.time == pytest.approx(silver.mass * silver.sigma**2 / silver.hbar)
    assert units.momentum == pytest.approx(silver.hbar / silver.sigma)
    assert units.amplitude == pytest.approx(silver.sigma**-0.5)
    assert units.unscale_wigner(1.0) == pytest.approx(1.0 / silver.hbar)
    # mass is the scaled unit, so force and acceleration scale identically
    assert units.scale_force(silver.force) == pytest.approx(
        units.scale_accel(silver.accel), rel=1e-15)


_magnitudes = st.floats(min_value=1e-12, max_value=1e12,
                        allow_nan=False, allow_infinity=False)


@given(value=_magnitudes)
def test_unit_round_trips(value):
    units = UnitSystem.for_params(sg.PhysicalParams.silver())
    for scale, unscale in [
        (units.scale_length, units.unscale_length),
        (units.scale_time, units.unscale_time),
        (units.scale_momentum, units.unscale_momentum),
    ]:
        assert unscale(scale(value)) == pytest.approx(value, rel=1e-12)
        assert scale(unscale(value)) == pytest.approx(value, rel=1e-12)


@given(
    mass=st.floats(min_value=1e-27, max_value=1e-24),
    sigma=st.floats(min_value=1e-8, max_value=1e-4),
    force=st.floats(min_value=1e-24, max_value=1e-20),
    phase=st.floats(min_value=-math.pi, max_value=math.pi),
    tilt=st.floats(min_value=0.05, max_value=0.95),
)
def test_config_round_trip_generalizes(mass, sigma, force, phase, tilt):
    c_plus = math.sqrt(tilt) * complex(math.cos(phase), math.sin(phase))
    c_minus = complex(math.sqrt(1.0 - tilt), 0.0)
    params = sg.PhysicalParams(mass=mass, force=force, sigma=sigma,
                               c_plus=c_plus, c_minus=c_minus)
    assert sg.params_from_entries(sg.params_to_entries(params)) == params


def test_beam_geometry_time_mapping(silver):
    assert sg.paraxial_time(0.0, 1e9, silver) == 0.0
    # k with k*hbar/m = 1 m/s turns distance into time one-to-one
    k_unit = silver.mass / silver.hbar
    assert sg.paraxial_time(1.0, k_unit, silver) == pytest.approx(1.0, rel=1e-14)
    assert sg.beam_energy(k_unit, silver) == pytest.approx(
        0.5 * silver.mass, rel=1e-14)
    with pytest.raises(sg.InvalidWavenumberError):
        sg.paraxial_time(1.0, 0.0, silver)
    with pytest.raises(sg.InvalidWavenumberError):
        sg.paraxial_distance(1.0, -2.0, silver)
    with pytest.raises(sg.InvalidWavenumberError):
        sg.beam_energy(0.0, silver)
    with pytest.raises(ValueError):
        sg.paraxial_time(-1.0, k_unit, silver)


@given(z=st.floats(min_value=1e-6, max_value=1e3),
       k=st.floats(min_value=1e6, max_value=1e12))
def test_beam_geometry_round_trip(z, k):
    silver = sg.PhysicalParams.silver()
    t = sg.paraxial_time(z, k, silver)
    assert sg.paraxial_distance(t, k, silver) == pytest.approx(z, rel=1e-14)
