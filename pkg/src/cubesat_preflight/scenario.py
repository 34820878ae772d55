"""Resolve named scenario pieces from a model into analysis-ready objects."""

from __future__ import annotations

from dataclasses import dataclass

from .attitude import AttitudeMode, FreeRotation, NadirPointing, SunPointing
from .config import AttitudeSetting, SatelliteModel, ScenarioCase
from .orbit import EnvCase, OrbitSpec, orbital_period, sun_direction_for_beta


@dataclass(frozen=True)
class ResolvedScenario:
    case: ScenarioCase
    orbit: OrbitSpec
    env: EnvCase
    mode: AttitudeMode
    mode_name: str


def orbit_for_case(model: SatelliteModel, case: ScenarioCase) -> OrbitSpec:
    o = model.scenarios.orbit
    sun = sun_direction_for_beta(o.inclination_deg, o.raan_deg,
                                 case.beta_deg, case.azimuth_deg, o.altitude_km)
    return OrbitSpec(o.altitude_km, o.inclination_deg, o.raan_deg, sun)


def attitude_mode(setting: AttitudeSetting, period_s: float) -> AttitudeMode:
    """Turn a config attitude entry into a mode; cycles-per-orbit rates are
    converted with the actual orbital period so the attitude repeats each orbit."""
    if setting.kind == "free_rotation":
        if setting.spin_cycles_per_orbit is not None:
            rate = setting.spin_cycles_per_orbit * 360.0 / period_s
        else:
            rate = setting.rate_deg_s
        if setting.precession_cycles_per_orbit is not None:
            prate = setting.precession_cycles_per_orbit * 360.0 / period_s
        else:
            prate = setting.precession_rate_deg_s or 0.0
        return FreeRotation(
            rate_deg_s=rate,
            axis=setting.spin_axis or (1.0, 1.0, 1.0),
            precession_rate_deg_s=prate,
            precession_axis=setting.precession_axis or (0.0, 0.0, 1.0),
        )
    if setting.kind == "sun_pointing":
        return SunPointing(setting.patch)
    if setting.kind == "nadir_pointing":
        return NadirPointing(setting.patch)
    raise ValueError(f"unknown attitude kind {setting.kind!r}")


def resolve(model: SatelliteModel, case_name: str, mode_name: str) -> ResolvedScenario:
    try:
        case = model.scenarios.cases[case_name]
    except KeyError:
        raise KeyError(f"unknown case {case_name!r}; model defines "
                       f"{sorted(model.scenarios.cases)}") from None
    try:
        setting = model.scenarios.attitudes[mode_name]
    except KeyError:
        raise KeyError(f"unknown attitude mode {mode_name!r}; model defines "
                       f"{sorted(model.scenarios.attitudes)}") from None
    orbit = orbit_for_case(model, case)
    mode = attitude_mode(setting, orbital_period(orbit.altitude_km))
    return ResolvedScenario(case=case, orbit=orbit, env=case.env, mode=mode,
                            mode_name=mode_name)
