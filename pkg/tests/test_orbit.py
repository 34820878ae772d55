import math

import numpy as np
import pytest

from cubesat_preflight import orbit as ob
from cubesat_preflight.constants import R_EARTH_KM


def test_period_matches_reference_vehicle():
    """400 km circular orbit: 92.6 min within 0.2%."""
    p = ob.orbital_period(400.0)
    assert abs(p - 92.6 * 60.0) / (92.6 * 60.0) < 0.002


def test_period_geostationary():
    """Kepler check against the sidereal day."""
    assert abs(ob.orbital_period(35786.0) - 86164.0) < 10.0


def test_period_degenerate_radius():
    with pytest.raises(ValueError):
        ob.orbital_period(-R_EARTH_KM)


def test_period_strictly_increasing():
    alts = [200.0, 400.0, 800.0, 2000.0, 20000.0, 36000.0]
    periods = [ob.orbital_period(a) for a in alts]
    assert all(p2 > p1 for p1, p2 in zip(periods, periods[1:]))


def test_view_factor_at_400km():
    assert abs(ob.earth_view_factor(400.0) - 0.885) < 0.001


def test_view_factor_limits():
    assert ob.earth_view_factor(0.0) == 1.0
    assert ob.earth_view_factor(1e9) < 1e-4


def test_view_factor_monotone():
    alts = np.linspace(0.0, 5000.0, 40)
    f = [ob.earth_view_factor(a) for a in alts]
    assert all(b < a for a, b in zip(f, f[1:]))
    assert all(0.0 < v <= 1.0 for v in f)


def test_beta_sun_in_plane():
    sun = ob.sun_direction_for_beta(51.6, 20.0, 0.0)
    assert abs(ob.beta_angle(ob.OrbitSpec(400.0, 51.6, 20.0, sun))) < 1e-9


def test_beta_sun_along_normal():
    spec = ob.OrbitSpec(400.0, 51.6, 20.0)
    sun = ob.orbit_normal(spec)
    assert ob.beta_angle(ob.OrbitSpec(400.0, 51.6, 20.0, sun)) == pytest.approx(90.0)


def test_beta_hand_computed_geometry():
    """Inclination 51.6, RAAN 90, sun along +X: the node line is +Y so the
    orbit normal is (sin i, 0, cos i) and beta = asin(sin i) = i."""
    spec = ob.OrbitSpec(400.0, 51.6, 90.0, sun_direction=(1.0, 0.0, 0.0))
    assert ob.beta_angle(spec) == pytest.approx(51.6, abs=1e-9)


def test_eclipse_antisolar_point():
    sun = (1.0, 0.0, 0.0)
    assert ob.eclipse_state((-1.0, 0.0, 0.0), sun, 400.0) is True
    assert ob.eclipse_state((1.0, 0.0, 0.0), sun, 400.0) is False


def test_eclipse_fraction_beta_zero():
    """Sampled eclipse fraction against the closed-form cylinder result."""
    sun = ob.sun_direction_for_beta(51.6, 0.0, 0.0)
    spec = ob.OrbitSpec(400.0, 51.6, 0.0, sun)
    period = ob.orbital_period(400.0)
    n = 20000
    flags = [ob.orbit_state(spec, period * k / n).in_eclipse for k in range(n)]
    expected = math.asin(R_EARTH_KM / (R_EARTH_KM + 400.0)) / math.pi
    assert abs(sum(flags) / n - expected) < 0.005


def test_no_eclipse_above_beta_threshold():
    sun = ob.sun_direction_for_beta(51.6, 0.0, 80.0)
    spec = ob.OrbitSpec(400.0, 51.6, 0.0, sun)
    period = ob.orbital_period(400.0)
    assert not any(ob.orbit_state(spec, period * k / 720).in_eclipse for k in range(720))


def test_eclipse_symmetric_about_antisolar():
    """At beta=0 the entry and exit are symmetric about the anti-solar phase."""
    azimuth = 30.0
    sun = ob.sun_direction_for_beta(51.6, 0.0, 0.0, azimuth_deg=azimuth)
    spec = ob.OrbitSpec(400.0, 51.6, 0.0, sun)
    period = ob.orbital_period(400.0)
    n = 14400
    flags = np.array([ob.orbit_state(spec, period * k / n).in_eclipse for k in range(n)])
    # rotate so the eclipse arc does not wrap, then locate its midpoint
    idx = np.nonzero(flags)[0]
    shift = n // 2 - int(idx.mean())
    rolled = np.roll(flags, shift)
    idx = np.nonzero(rolled)[0]
    mid_angle = (360.0 * (idx[0] + idx[-1]) / 2 / n - 360.0 * shift / n) % 360.0
    antisolar = (azimuth + 180.0) % 360.0
    assert abs(mid_angle - antisolar) < 0.2


def test_env_cases():
    hot = ob.env_case("hot")
    assert (hot.solar_flux_w_m2, hot.earth_ir_w_m2, hot.albedo) == (1414.0, 258.0, 0.35)
    assert hot.albedo_correction == 0.998
    cold = ob.env_case("cold")
    assert (cold.solar_flux_w_m2, cold.earth_ir_w_m2, cold.albedo) == (1318.0, 216.0, 0.25)
    assert ob.env_case("nominal").solar_flux_w_m2 == 1353.0


def test_env_case_unknown():
    with pytest.raises(KeyError, match="afternoon"):
        ob.env_case("afternoon")


def test_env_case_config_override():
    extra = {"bake": ob.EnvCase("bake", 1500.0, 300.0, 0.4)}
    assert ob.env_case("bake", extra).solar_flux_w_m2 == 1500.0


def test_position_stays_unit():
    spec = ob.OrbitSpec(400.0, 51.6, 12.0)
    for t in np.linspace(0.0, 6000.0, 50):
        p = ob.position_at(spec, float(t))
        assert abs(np.linalg.norm(p) - 1.0) < 1e-12
