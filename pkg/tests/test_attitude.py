import math

import numpy as np
import pytest

from cubesat_preflight import attitude as at
from cubesat_preflight import orbit as ob


def _orthonormal(R):
    return (np.allclose(R @ R.T, np.eye(3), atol=1e-9)
            and abs(np.linalg.det(R) - 1.0) < 1e-9)


def test_free_rotation_half_turn():
    """2 deg/s for 90 s is a 180-degree turn about the axis."""
    mode = at.FreeRotation(2.0, (0.0, 0.0, 1.0))
    state = ob.orbit_state(ob.OrbitSpec(400.0, 51.6), 0.0)
    R = at.attitude_at(mode, state, 90.0)
    assert np.allclose(R @ np.array([1.0, 0.0, 0.0]), [-1.0, 0.0, 0.0], atol=1e-12)


def test_rotations_orthonormal():
    orbit = ob.OrbitSpec(400.0, 51.6, 10.0)
    modes = [
        at.FreeRotation(2.0, (1.0, 1.0, 1.0)),
        at.FreeRotation(2.0, (1.0, 0.3, 0.2), 0.1, (0.0, 1.0, 0.0)),
        at.SunPointing("p"),
        at.NadirPointing("p"),
    ]
    times = np.linspace(0.0, 5000.0, 23)
    for mode in modes:
        stack = at.attitude_series(mode, orbit, times, pointing_normal=(0.0, 0.0, 1.0))
        for R in stack:
            assert _orthonormal(R)


def test_attitude_series_matches_pointwise():
    orbit = ob.OrbitSpec(400.0, 51.6, 10.0)
    mode = at.FreeRotation(2.0, (1.0, 1.0, 1.0), 0.05, (1.0, 0.0, 0.0))
    times = np.linspace(0.0, 3000.0, 11)
    stack = at.attitude_series(mode, orbit, times)
    for t, R in zip(times, stack):
        R1 = at.attitude_at(mode, ob.orbit_state(orbit, float(t)), float(t))
        assert np.allclose(R, R1, atol=1e-12)


def test_sun_pointing_keeps_full_incidence():
    orbit = ob.OrbitSpec(400.0, 51.6, 0.0, sun_direction=(0.3, -0.5, 0.81))
    mode = at.SunPointing("panel")
    normal = (0.0, 1.0, 0.0)
    for t in np.linspace(0.0, 5000.0, 17):
        state = ob.orbit_state(orbit, float(t))
        R = at.attitude_at(mode, state, float(t), pointing_normal=normal)
        assert at.incidence_cosine(normal, R, state.sun_direction) == pytest.approx(1.0)


def test_nadir_pointing_at_subsolar():
    """Nadir patch looks at Earth; at the subsolar point the sun is behind it."""
    sun = ob.sun_direction_for_beta(51.6, 0.0, 0.0)
    orbit = ob.OrbitSpec(400.0, 51.6, 0.0, sun)
    mode = at.NadirPointing("nadir")
    normal = (1.0, 0.0, 0.0)
    # subsolar pass: position parallel to sun; sun azimuth 0 puts it at t=0
    state = ob.orbit_state(orbit, 0.0)
    assert np.dot(state.position, sun) == pytest.approx(1.0, abs=1e-9)
    R = at.attitude_at(mode, state, 0.0, pointing_normal=normal)
    assert at.incidence_cosine(normal, R, sun) == 0.0


def test_incidence_cosine_basics():
    eye = np.eye(3)
    assert at.incidence_cosine((1, 0, 0), eye, (1, 0, 0)) == 1.0
    assert at.incidence_cosine((1, 0, 0), eye, (0, 1, 0)) == 0.0
    sun_60 = (0.5, math.sqrt(3) / 2, 0.0)
    assert at.incidence_cosine((1, 0, 0), eye, sun_60) == pytest.approx(0.5)


def test_back_lit_clamped_to_zero():
    assert at.incidence_cosine((1, 0, 0), np.eye(3), (-1, 0, 0)) == 0.0


def test_spin_average_factors():
    assert at.spin_average_factor(at.FreeRotation(2.0)) == 0.25
    assert at.spin_average_factor(at.SunPointing("p")) == 1.0
    nadir = at.spin_average_factor(at.NadirPointing("p"))
    assert 0.0 <= nadir < 0.5


def test_quarter_factor_is_sphere_average():
    """Quadrature oracle: mean of max(cos, 0) over the sphere is exactly 1/4."""
    theta = np.linspace(0.0, math.pi, 20001)
    integrand = np.maximum(np.cos(theta), 0.0) * np.sin(theta)
    avg = np.trapezoid(integrand, theta) / 2.0
    assert avg == pytest.approx(0.25, abs=1e-6)


def test_quarter_factor_monte_carlo():
    """Isotropically sampled normals converge to the 1/4 average."""
    rng = np.random.default_rng(20240613)
    v = rng.normal(size=(100000, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    mean = np.maximum(v[:, 0], 0.0).mean()
    assert abs(mean - 0.25) < 0.01


def test_cube_incidence_sum_bounded():
    """Projected area of a unit cube never exceeds sqrt(3) face areas."""
    rng = np.random.default_rng(7)
    normals = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0],
                        [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    for _ in range(200):
        s = rng.normal(size=3)
        s /= np.linalg.norm(s)
        total = np.maximum(normals @ s, 0.0).sum()
        assert total <= math.sqrt(3) + 1e-12


def test_pointing_requires_normal():
    state = ob.orbit_state(ob.OrbitSpec(400.0, 51.6), 0.0)
    with pytest.raises(ValueError, match="panel"):
        at.attitude_at(at.SunPointing("panel"), state, 0.0)
