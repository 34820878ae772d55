"""Single-node orbital thermal simulation.

Each node is one isothermal lumped mass whose patches exchange heat only with
the external environment:

    m c_p dT/dt = Q_solar + Q_ir + Q_albedo + Q_internal - Q_space

Nodes are thermally independent (no conduction between them, no mutual
radiation or shadowing). Per patch and time sample:

* solar:   alpha * A * cos(theta_sun) * S, minus electrical power extracted by
           cells on that patch, zero in eclipse;
* Earth IR: epsilon * A * F_E * q_IR * w, with w = clamped cosine between the
           patch normal and nadir, so a nadir-locked patch sees the full view
           factor and a space-facing patch sees none;
* albedo:  alpha * A * F_E * Ka * a * S * max(0, cos solar zenith) * w,
           zero on the night side and in eclipse;
* space:   sigma * T^4 * sum(epsilon_i A_i) over all patches of the node.

The integrator is classical fixed-step RK4. External fluxes are temperature
independent, so they are precomputed for one orbit (the attitude is assumed
orbit-periodic) and reused while the orbit is integrated repeatedly until the
temperature profile repeats within tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .attitude import AttitudeMode, NadirPointing, SunPointing, attitude_series
from .config import SatelliteModel, SurfacePatch, effective_optical_properties
from .constants import STEFAN_BOLTZMANN, ZERO_CELSIUS_K
from .orbit import (EnvCase, OrbitSpec, earth_view_factor, eclipse_angle_half_width,
                    orbit_basis, orbital_period)

MAX_STEP_DELTA_K = 50.0


class ConvergenceError(RuntimeError):
    """Periodic steady state not reached within the orbit cap."""


@dataclass(frozen=True)
class FluxBreakdown:
    q_solar_w: float
    q_ir_w: float
    q_albedo_w: float
    q_internal_w: float
    q_space_w: float
    p_electric_w: float

    @property
    def net_w(self) -> float:
        return (self.q_solar_w + self.q_ir_w + self.q_albedo_w
                + self.q_internal_w - self.q_space_w)


@dataclass
class ThermalNode:
    """Mutable integration state for one lumped mass."""

    name: str
    mass_kg: float
    specific_heat_j_kg_k: float
    temperature_k: float = 293.15

    @property
    def heat_capacity_j_k(self) -> float:
        return self.mass_kg * self.specific_heat_j_kg_k


@dataclass(frozen=True)
class TemperatureHistory:
    """One converged orbit of temperatures and flux components for a node."""

    node: str
    orbit_period_s: float
    times_s: np.ndarray
    temperatures_k: np.ndarray
    q_solar_w: np.ndarray
    q_ir_w: np.ndarray
    q_albedo_w: np.ndarray
    q_internal_w: np.ndarray
    q_space_w: np.ndarray
    p_electric_w: np.ndarray
    in_eclipse: np.ndarray
    orbits_run: int
    residual_k: float

    @property
    def samples(self):
        """(time, temperature, FluxBreakdown) tuples, matching the arrays."""
        for k in range(len(self.times_s)):
            yield (float(self.times_s[k]), float(self.temperatures_k[k]),
                   FluxBreakdown(float(self.q_solar_w[k]), float(self.q_ir_w[k]),
                                 float(self.q_albedo_w[k]), float(self.q_internal_w[k]),
                                 float(self.q_space_w[k]), float(self.p_electric_w[k])))

    @property
    def temperatures_c(self) -> np.ndarray:
        return self.temperatures_k - ZERO_CELSIUS_K


@dataclass(frozen=True)
class BandCheck:
    label: str
    low_c: float
    high_c: float
    passed: bool


@dataclass(frozen=True)
class ThermalSummary:
    node: str
    t_min_c: float
    t_max_c: float
    band_checks: tuple[BandCheck, ...]
    orbits_run: int
    residual_k: float

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.band_checks)

    def as_dict(self) -> dict:
        return {
            "node": self.node,
            "min_C": self.t_min_c,
            "max_C": self.t_max_c,
            "bands": [{"label": b.label, "low_C": b.low_c, "high_C": b.high_c,
                       "pass": b.passed} for b in self.band_checks],
            "orbits_run": self.orbits_run,
            "residual_K": self.residual_k,
        }


# ---------------------------------------------------------------------------
# flux terms

def q_solar(area_m2: float, alpha: float, cos_theta: float, solar_flux_w_m2: float,
            in_eclipse: bool, p_electric_w: float = 0.0) -> float:
    """Absorbed solar power net of electrical extraction; zero in eclipse."""
    if not 0.0 <= cos_theta <= 1.0:
        raise ValueError(f"cos_theta must be in [0, 1], got {cos_theta}")
    if in_eclipse:
        return 0.0
    absorbed = alpha * area_m2 * cos_theta * solar_flux_w_m2
    if p_electric_w > absorbed + 1e-12:
        raise ValueError(
            f"electrical extraction {p_electric_w} W exceeds absorbed {absorbed} W")
    return max(0.0, absorbed - p_electric_w)


def q_earth_ir(area_m2: float, epsilon: float, view_factor: float,
               earth_ir_w_m2: float, nadir_weight: float) -> float:
    """Absorbed Earth IR, weighted by the patch's Earth-facing cosine."""
    if not 0.0 < view_factor <= 1.0:
        raise ValueError(f"view factor must be in (0, 1], got {view_factor}")
    return epsilon * area_m2 * view_factor * earth_ir_w_m2 * nadir_weight


def q_albedo(area_m2: float, alpha: float, view_factor: float, albedo_correction: float,
             albedo: float, solar_flux_w_m2: float, sun_zenith_cos: float,
             nadir_weight: float) -> float:
    """Absorbed reflected sunlight; zero on the night side."""
    return (alpha * area_m2 * view_factor * albedo_correction * albedo
            * solar_flux_w_m2 * max(0.0, sun_zenith_cos) * nadir_weight)


def q_space(temperature_k: float, epsilon_areas) -> float:
    """Radiated loss magnitude: sigma T^4 sum(eps_i A_i)."""
    if temperature_k < 0:
        raise ValueError("temperature must be >= 0 K")
    total = sum(eps * area for eps, area in epsilon_areas)
    return STEFAN_BOLTZMANN * temperature_k**4 * total


# ---------------------------------------------------------------------------
# integration

def step_temperature(node: ThermalNode,
                     flux: float | Callable[[float, float], float],
                     dt: float, t0: float = 0.0) -> float:
    """One RK4 step of dT/dt = Q / (m c_p); returns the new temperature.

    `flux` is the net heat input in W: a constant, or a callable (t, T) -> W
    for temperature/time dependent balances. A step changing T by more than
    50 K is rejected as a step-size error.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if callable(flux):
        f = flux
    else:
        q = float(flux)
        f = lambda t, T: q  # noqa: E731 - trivially constant
    c = node.heat_capacity_j_k
    T = node.temperature_k
    k1 = f(t0, T) / c
    k2 = f(t0 + dt / 2.0, T + dt / 2.0 * k1) / c
    k3 = f(t0 + dt / 2.0, T + dt / 2.0 * k2) / c
    k4 = f(t0 + dt, T + dt * k3) / c
    new_t = T + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if abs(new_t - T) > MAX_STEP_DELTA_K:
        raise ValueError(
            f"temperature step {new_t - T:+.1f} K exceeds {MAX_STEP_DELTA_K} K; reduce dt")
    return new_t


@dataclass(frozen=True)
class _PatchTerms:
    """Precomputed per-patch quantities over the half-step time grid."""

    alpha: float
    epsilon: float
    area: float
    q_solar: np.ndarray
    q_ir: np.ndarray
    q_albedo: np.ndarray
    p_electric: np.ndarray


def _eclipse_flags(theta: np.ndarray, orbit: OrbitSpec, eclipse_mode: str) -> np.ndarray:
    """Eclipse booleans over orbit angle theta (measured from the ascending node)."""
    e1, e2 = orbit_basis(orbit)
    s = np.asarray(orbit.sun_direction)
    c1, c2 = float(e1 @ s), float(e2 @ s)
    in_plane = math.hypot(c1, c2)
    pos_dot_sun = c1 * np.cos(theta) + c2 * np.sin(theta)
    if eclipse_mode == "geom":
        sin_beta = math.sqrt(max(0.0, 1.0 - in_plane**2))
        half = eclipse_angle_half_width(orbit.altitude_km)
        if sin_beta >= math.sin(half):
            return np.zeros_like(theta, dtype=bool)
        # anti-sunward and within one Earth radius of the shadow axis; on the
        # unit sphere the radius test becomes perp < sin(half) = R_E/(R_E+h)
        perp = np.sqrt(np.maximum(0.0, 1.0 - pos_dot_sun**2))
        return (pos_dot_sun < 0.0) & (perp < math.sin(half))
    if eclipse_mode == "fixed60_30":
        half = eclipse_angle_half_width(orbit.altitude_km)
        sin_beta = math.sqrt(max(0.0, 1.0 - in_plane**2))
        if sin_beta >= math.sin(half):
            return np.zeros_like(theta, dtype=bool)
        if in_plane < 1e-12:
            return np.zeros_like(theta, dtype=bool)
        theta_sun = math.atan2(c2, c1)
        window = math.pi / 3.0  # 30 of 90 minutes -> one third of the orbit
        delta = np.angle(np.exp(1j * (theta - (theta_sun + math.pi))))
        return np.abs(delta) < window
    raise ValueError(f"unknown eclipse mode {eclipse_mode!r}")


def run_periodic(model: SatelliteModel, orbit: OrbitSpec, env: EnvCase,
                 mode: AttitudeMode, power_state: str = "min", *,
                 dt_s: float = 1.0, eclipse_mode: str = "geom",
                 tolerance_k: float = 0.1, max_orbits: int = 60,
                 initial_temperature_k: float = 293.15) -> dict[str, TemperatureHistory]:
    """Integrate each node to its periodic steady state over one orbit.

    Returns the final (converged) orbit per node. `power_state` is "min"
    (standby extraction split per string), "max" (all generated power
    extracted), or "none".
    """
    if power_state not in ("min", "max", "none"):
        raise ValueError(f"power_state must be min/max/none, got {power_state!r}")
    if dt_s <= 0:
        raise ValueError(f"dt must be > 0 s, got {dt_s}")
    period = orbital_period(orbit.altitude_km)
    n_steps = max(8, int(round(period / dt_s)))
    dt = period / n_steps
    # half-step grid: index 2k = whole step k
    t_half = np.arange(2 * n_steps + 1) * (dt / 2.0)
    theta = 2.0 * math.pi * t_half / period

    e1, e2 = orbit_basis(orbit)
    pos = np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2)  # unit vectors
    sun = np.asarray(orbit.sun_direction)
    eclipse = _eclipse_flags(theta, orbit, eclipse_mode)
    lit = ~eclipse
    sun_zenith = np.maximum(0.0, pos @ sun)
    f_e = earth_view_factor(orbit.altitude_km)

    sun_min, ecl_min = sun_eclipse_minutes(orbit, eclipse_mode)
    per_string_w = _standby_extraction_per_string(model, sun_min, ecl_min) \
        if power_state == "min" else 0.0

    pointing_normal = None
    if isinstance(mode, (SunPointing, NadirPointing)):
        try:
            pointing_normal = model.patches[mode.pointing_patch].normal
        except KeyError:
            raise KeyError(f"pointing patch {mode.pointing_patch!r} not in model") from None
    rot = attitude_series(mode, orbit, t_half, pointing_normal)

    histories: dict[str, TemperatureHistory] = {}
    for node_spec in model.nodes.values():
        terms = []
        for p_name in node_spec.patch_names:
            patch = model.patches[p_name]
            terms.append(_patch_terms(patch, model, rot, sun, pos, sun_zenith, lit,
                                      f_e, env, power_state, per_string_w))
        q_ext = sum(t.q_solar + t.q_ir + t.q_albedo for t in terms)
        q_int = np.where(lit, node_spec.q_internal_sunlit_w, node_spec.q_internal_eclipse_w)
        q_total_ext = q_ext + q_int
        eps_area = sum(t.epsilon * t.area for t in terms)

        temps, orbits_run, residual = _integrate_to_cycle(
            q_total_ext, eps_area, node_spec.mass_kg * node_spec.specific_heat_j_kg_k,
            dt, n_steps, initial_temperature_k, tolerance_k, max_orbits, node_spec.name)

        whole = slice(0, 2 * n_steps + 1, 2)
        q_space_arr = STEFAN_BOLTZMANN * eps_area * temps**4
        histories[node_spec.name] = TemperatureHistory(
            node=node_spec.name,
            orbit_period_s=period,
            times_s=t_half[whole].copy(),
            temperatures_k=temps,
            q_solar_w=sum(t.q_solar for t in terms)[whole].copy(),
            q_ir_w=sum(t.q_ir for t in terms)[whole].copy(),
            q_albedo_w=sum(t.q_albedo for t in terms)[whole].copy(),
            q_internal_w=q_int[whole].astype(float).copy(),
            q_space_w=q_space_arr,
            p_electric_w=sum(t.p_electric for t in terms)[whole].copy(),
            in_eclipse=eclipse[whole].copy(),
            orbits_run=orbits_run,
            residual_k=residual,
        )
    return histories


def sun_eclipse_minutes(orbit: OrbitSpec, eclipse_mode: str) -> tuple[float, float]:
    """Sunlit/eclipse durations in minutes for the budget arithmetic."""
    period_min = orbital_period(orbit.altitude_km) / 60.0
    if eclipse_mode == "fixed60_30":
        return period_min * (2.0 / 3.0), period_min / 3.0
    # closed-form eclipse arc from the cylindrical-shadow geometry at this beta
    s = np.asarray(orbit.sun_direction)
    e1, e2 = orbit_basis(orbit)
    in_plane = math.hypot(float(e1 @ s), float(e2 @ s))
    sin_half = math.sin(eclipse_angle_half_width(orbit.altitude_km))
    sin_beta = math.sqrt(max(0.0, 1.0 - in_plane**2))
    if sin_beta >= sin_half or in_plane < 1e-12:
        return period_min, 0.0
    sin_arc = math.sqrt(sin_half**2 - sin_beta**2) / in_plane
    half_arc = math.asin(min(1.0, sin_arc))
    frac = half_arc / math.pi
    return period_min * (1.0 - frac), period_min * frac


def _standby_extraction_per_string(model: SatelliteModel, sun_min: float,
                                   ecl_min: float) -> float:
    n = len(model.strings)
    if n == 0 or model.power.standby_consumption_w <= 0:
        return 0.0
    need = model.power.standby_consumption_w * (sun_min + ecl_min) / max(sun_min, 1e-9)
    return need / n


def _patch_terms(patch: SurfacePatch, model: SatelliteModel, rot: np.ndarray,
                 sun: np.ndarray, pos: np.ndarray, sun_zenith: np.ndarray,
                 lit: np.ndarray, f_e: float, env: EnvCase, power_state: str,
                 per_string_w: float) -> _PatchTerms:
    alpha, epsilon = effective_optical_properties(patch, model.finishes)
    n_inertial = np.einsum("tij,j->ti", rot, np.asarray(patch.normal))
    cos_sun = np.maximum(0.0, n_inertial @ sun)
    w_nadir = np.maximum(0.0, -np.einsum("ti,ti->t", n_inertial, pos))

    absorbed = alpha * patch.area_m2 * env.solar_flux_w_m2 * cos_sun
    p_elec = np.zeros_like(cos_sun)
    if power_state != "none" and patch.string_id is not None and patch.cell_fraction > 0:
        string = model.strings[patch.string_id]
        cell_area = patch.cell_fraction * patch.area_m2
        generated = string.efficiency * env.solar_flux_w_m2 * cell_area * cos_sun
        if power_state == "max":
            p_elec = np.minimum(generated, absorbed)
        else:
            share = _patch_share_of_string(patch, string, model)
            p_elec = np.minimum(per_string_w * share, np.minimum(generated, absorbed))
        p_elec = np.where(lit, p_elec, 0.0)

    q_sol = np.where(lit, np.maximum(0.0, absorbed - p_elec), 0.0)
    q_ir = epsilon * patch.area_m2 * f_e * env.earth_ir_w_m2 * w_nadir
    q_alb = (alpha * patch.area_m2 * f_e * env.albedo_correction * env.albedo
             * env.solar_flux_w_m2 * sun_zenith * w_nadir)
    q_alb = np.where(lit, q_alb, 0.0)
    return _PatchTerms(alpha=alpha, epsilon=epsilon, area=patch.area_m2,
                       q_solar=q_sol, q_ir=q_ir, q_albedo=q_alb, p_electric=p_elec)


def _patch_share_of_string(patch: SurfacePatch, string, model: SatelliteModel) -> float:
    total = 0.0
    for p_name in string.patch_names:
        p = model.patches[p_name]
        total += p.cell_fraction * p.area_m2
    if total <= 0:
        return 0.0
    return (patch.cell_fraction * patch.area_m2) / total


def _integrate_to_cycle(q_ext: np.ndarray, eps_area: float, heat_capacity: float,
                        dt: float, n_steps: int, t0_k: float, tolerance_k: float,
                        max_orbits: int, node_name: str):
    """March RK4 orbits until max |T(t) - T(t - period)| < tolerance."""
    sig_e = STEFAN_BOLTZMANN * eps_area
    inv_c = 1.0 / heat_capacity
    temps = np.empty(n_steps + 1)
    prev = None
    T = t0_k
    q = q_ext  # local alias; indices 2k, 2k+1, 2k+2 bracket step k
    for orbit_i in range(1, max_orbits + 1):
        temps[0] = T
        for k in range(n_steps):
            q0 = q[2 * k]
            qm = q[2 * k + 1]
            q1 = q[2 * k + 2]
            k1 = (q0 - sig_e * T**4) * inv_c
            t2 = T + 0.5 * dt * k1
            k2 = (qm - sig_e * t2**4) * inv_c
            t3 = T + 0.5 * dt * k2
            k3 = (qm - sig_e * t3**4) * inv_c
            t4 = T + dt * k3
            k4 = (q1 - sig_e * t4**4) * inv_c
            new_t = T + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if abs(new_t - T) > MAX_STEP_DELTA_K:
                raise ValueError(
                    f"node {node_name}: temperature step exceeds {MAX_STEP_DELTA_K} K "
                    f"at t = {k * dt:.1f} s; reduce dt")
            T = new_t
            temps[k + 1] = T
        if prev is not None:
            residual = float(np.max(np.abs(temps - prev)))
            if residual < tolerance_k:
                return temps.copy(), orbit_i, residual
        prev = temps.copy()
        T = temps[-1]
    raise ConvergenceError(
        f"node {node_name}: no periodic steady state after {max_orbits} orbits "
        f"(last orbit-to-orbit residual {float(np.max(np.abs(temps - prev))) if prev is not None else float('nan'):.3f} K, "
        f"tolerance {tolerance_k} K)")


def summarize(history: TemperatureHistory,
              bands: tuple[tuple[str, float, float], ...] = ()) -> ThermalSummary:
    """Min/max over the converged orbit plus pass/fail against Kelvin bands."""
    t_min = float(np.min(history.temperatures_k))
    t_max = float(np.max(history.temperatures_k))
    checks = []
    for label, lo_k, hi_k in bands:
        checks.append(BandCheck(
            label=label,
            low_c=lo_k - ZERO_CELSIUS_K,
            high_c=hi_k - ZERO_CELSIUS_K,
            passed=(t_min >= lo_k) and (t_max <= hi_k),
        ))
    return ThermalSummary(
        node=history.node,
        t_min_c=t_min - ZERO_CELSIUS_K,
        t_max_c=t_max - ZERO_CELSIUS_K,
        band_checks=tuple(checks),
        orbits_run=history.orbits_run,
        residual_k=history.residual_k,
    )
