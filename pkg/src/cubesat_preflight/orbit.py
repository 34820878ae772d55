"""Circular-orbit geometry: period, sun direction, beta angle, eclipse, Earth view factor.

All orbits are ideal circles around a spherical Earth. The sun direction is a
fixed unit vector in the inertial frame for the duration of a run; apparent
solar motion (~1 deg/day) is below the fidelity of the single-node thermal
model this feeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import MU_EARTH_KM3_S2, R_EARTH_KM


def _unit(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ValueError("zero vector cannot be normalized")
    a = a / n
    return (float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class OrbitSpec:
    """Circular orbit plus the (fixed) inertial sun direction."""

    altitude_km: float
    inclination_deg: float
    raan_deg: float = 0.0
    sun_direction: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.altitude_km <= 0:
            raise ValueError(f"altitude must be > 0 km, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination must be in [0, 180] deg, got {self.inclination_deg}")
        object.__setattr__(self, "sun_direction", _unit(self.sun_direction))


@dataclass(frozen=True)
class EnvCase:
    """One external thermal environment: solar flux, Earth IR, albedo."""

    name: str
    solar_flux_w_m2: float
    earth_ir_w_m2: float
    albedo: float
    albedo_correction: float = 0.998

    def __post_init__(self):
        if self.solar_flux_w_m2 <= 0:
            raise ValueError("solar flux must be > 0")
        if self.earth_ir_w_m2 < 0:
            raise ValueError("Earth IR flux must be >= 0")
        if not 0.0 <= self.albedo <= 1.0:
            raise ValueError(f"albedo must be in [0, 1], got {self.albedo}")
        if not 0.0 < self.albedo_correction <= 1.0:
            raise ValueError("albedo correction must be in (0, 1]")


#: Environment cases for bounding analyses. hot = continuous-sun worst case,
#: cold = maximum-eclipse worst case, nominal = average fluxes for power sizing.
BUILTIN_ENV_CASES = {
    "hot": EnvCase("hot", 1414.0, 258.0, 0.35, 0.998),
    "cold": EnvCase("cold", 1318.0, 216.0, 0.25, 0.998),
    "nominal": EnvCase("nominal", 1353.0, 237.0, 0.30, 0.998),
}


@dataclass(frozen=True)
class OrbitState:
    """Instantaneous geometry sample along an orbit."""

    time_s: float
    position: tuple[float, float, float]  # unit vector, Earth center -> satellite
    in_eclipse: bool
    sun_direction: tuple[float, float, float]
    altitude_km: float = 0.0


def orbital_period(altitude_km: float) -> float:
    """Orbital period in seconds for a circular orbit at the given altitude."""
    a = R_EARTH_KM + altitude_km
    if a <= 0:
        raise ValueError(f"orbit radius must be positive, got altitude {altitude_km} km")
    return 2.0 * math.pi * math.sqrt(a**3 / MU_EARTH_KM3_S2)


def orbit_normal(orbit: OrbitSpec) -> tuple[float, float, float]:
    """Unit normal of the orbit plane (angular-momentum direction)."""
    i = math.radians(orbit.inclination_deg)
    raan = math.radians(orbit.raan_deg)
    return (math.sin(i) * math.sin(raan), -math.sin(i) * math.cos(raan), math.cos(i))


def orbit_basis(orbit: OrbitSpec):
    """In-plane orthonormal basis (e1 toward the ascending node, e2 = n x e1)."""
    raan = math.radians(orbit.raan_deg)
    e1 = np.array([math.cos(raan), math.sin(raan), 0.0])
    n = np.asarray(orbit_normal(orbit))
    e2 = np.cross(n, e1)
    return e1, e2


def beta_angle(orbit: OrbitSpec) -> float:
    """Angle in degrees between the sun direction and the orbit plane.

    Positive when the sun lies on the orbit-normal side; range [-90, +90].
    """
    n = np.asarray(orbit_normal(orbit))
    s = np.asarray(orbit.sun_direction)
    dot = float(np.clip(np.dot(n, s), -1.0, 1.0))
    return math.degrees(math.asin(dot))


def sun_direction_for_beta(inclination_deg: float, raan_deg: float, beta_deg: float,
                           azimuth_deg: float = 0.0,
                           altitude_km: float = 400.0) -> tuple[float, float, float]:
    """Construct a sun direction giving the requested beta angle for this plane.

    `azimuth_deg` sets the in-plane component's direction, measured from the
    ascending node toward the direction of motion; it fixes where the subsolar
    point falls along the orbit.
    """
    probe = OrbitSpec(altitude_km, inclination_deg, raan_deg)
    e1, e2 = orbit_basis(probe)
    n = np.asarray(orbit_normal(probe))
    b = math.radians(beta_deg)
    az = math.radians(azimuth_deg)
    in_plane = math.cos(az) * e1 + math.sin(az) * e2
    return _unit(math.cos(b) * in_plane + math.sin(b) * n)


def position_at(orbit: OrbitSpec, t: float) -> tuple[float, float, float]:
    """Unit position vector at time t (t=0 at the ascending node)."""
    e1, e2 = orbit_basis(orbit)
    theta = 2.0 * math.pi * t / orbital_period(orbit.altitude_km)
    p = math.cos(theta) * e1 + math.sin(theta) * e2
    return (float(p[0]), float(p[1]), float(p[2]))


def eclipse_state(position, sun_direction, altitude_km: float) -> bool:
    """True iff the satellite is inside the cylindrical umbra.

    The satellite must be on the anti-sunward side of Earth and within one
    Earth radius of the shadow axis. No penumbra.
    """
    r = (R_EARTH_KM + altitude_km) * np.asarray(_unit(position))
    s = np.asarray(_unit(sun_direction))
    along = float(np.dot(r, s))
    if along >= 0.0:
        return False
    perp = r - along * s
    return float(np.linalg.norm(perp)) < R_EARTH_KM


def orbit_state(orbit: OrbitSpec, t: float) -> OrbitState:
    p = position_at(orbit, t)
    return OrbitState(
        time_s=t,
        position=p,
        in_eclipse=eclipse_state(p, orbit.sun_direction, orbit.altitude_km),
        sun_direction=orbit.sun_direction,
        altitude_km=orbit.altitude_km,
    )


def earth_view_factor(altitude_km: float) -> float:
    """Fraction of the radiative view occupied by Earth: (R/(R+h))^2."""
    if altitude_km < 0:
        raise ValueError("altitude must be >= 0")
    return (R_EARTH_KM / (R_EARTH_KM + altitude_km)) ** 2


def eclipse_angle_half_width(altitude_km: float) -> float:
    """Half-width in radians of the eclipse arc at beta = 0 (cylindrical shadow)."""
    return math.asin(R_EARTH_KM / (R_EARTH_KM + altitude_km))


def env_case(name: str, extra_cases: dict[str, EnvCase] | None = None) -> EnvCase:
    """Look up an environment case by name (built-in or config-supplied)."""
    if extra_cases and name in extra_cases:
        return extra_cases[name]
    try:
        return BUILTIN_ENV_CASES[name]
    except KeyError:
        known = sorted(set(BUILTIN_ENV_CASES) | set(extra_cases or {}))
        raise KeyError(f"unknown environment case {name!r}; known cases: {known}") from None
