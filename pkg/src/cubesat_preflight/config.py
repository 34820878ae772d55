"""Model configuration: loading, validation, and normalization.

The model file is TOML with an explicit ``schema_version``. Unknown keys are
hard errors so a typo in a finish or material name cannot silently change an
analysis. Quantities are either bare numbers (interpreted as SI base units) or
strings with an explicit unit suffix ("340.5 mm", "-40 C", "295 MPa"),
converted to SI at load time. Everything downstream works in K, m, kg, Pa, W.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .constants import ZERO_CELSIUS_K
from .orbit import EnvCase


class ConfigError(Exception):
    """Base for all model-file problems."""


class ConfigParseError(ConfigError):
    """File is not readable as the config format."""


class ConfigSchemaError(ConfigError):
    """File parsed but contains unknown/missing keys or malformed values."""


class ConfigReferenceError(ConfigError):
    """A name refers to a finish/material/patch/string that does not exist."""


# ---------------------------------------------------------------------------
# quantities

_UNIT_TABLES: dict[str, dict[str, float]] = {
    "length": {"m": 1.0, "mm": 1e-3, "cm": 1e-2, "km": 1e3},
    "area": {"m^2": 1.0, "cm^2": 1e-4, "mm^2": 1e-6},
    "mass": {"kg": 1.0, "g": 1e-3},
    "power": {"W": 1.0, "mW": 1e-3, "kW": 1e3},
    "pressure": {"Pa": 1.0, "kPa": 1e3, "MPa": 1e6, "GPa": 1e9},
    "angle": {"deg": 1.0, "rad": 180.0 / math.pi},
    "angular_rate": {"deg/s": 1.0},
    "specific_heat": {"J/(kg K)": 1.0, "J/(kg*K)": 1.0},
    "conductivity": {"W/(m K)": 1.0, "W/(m*K)": 1.0},
    "density": {"kg/m^3": 1.0, "g/cm^3": 1e3},
    "force": {"N": 1.0, "kN": 1e3},
    "time": {"s": 1.0, "min": 60.0, "h": 3600.0},
    "frequency": {"Hz": 1.0, "kHz": 1e3},
    "torsional_stiffness": {"N*m/rad": 1.0, "N m/rad": 1.0, "Nm/rad": 1.0},
    "flux": {"W/m^2": 1.0},
    "temperature_delta": {"K": 1.0, "C": 1.0},
}


def parse_quantity(value, kind: str, where: str) -> float:
    """Convert a config value to SI. Numbers are taken as SI base units."""
    if isinstance(value, bool):
        raise ConfigSchemaError(f"{where}: expected a quantity, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigSchemaError(f"{where}: expected a number or 'value unit' string, got {value!r}")
    parts = value.strip().split(None, 1)
    if len(parts) != 2:
        raise ConfigSchemaError(f"{where}: cannot parse quantity {value!r} (need 'value unit')")
    try:
        number = float(parts[0])
    except ValueError:
        raise ConfigSchemaError(f"{where}: cannot parse number in {value!r}") from None
    unit = parts[1].strip()
    if kind == "temperature":
        if unit == "K":
            return number
        if unit in ("C", "degC", "deg C"):
            return number + ZERO_CELSIUS_K
        raise ConfigSchemaError(f"{where}: unknown temperature unit {unit!r} (use K or C)")
    table = _UNIT_TABLES.get(kind)
    if table is None:
        raise ConfigSchemaError(f"{where}: no unit table for kind {kind!r}")
    if unit not in table:
        raise ConfigSchemaError(
            f"{where}: unknown {kind} unit {unit!r} (known: {sorted(table)})")
    return number * table[unit]


# ---------------------------------------------------------------------------
# domain types (numeric invariants are checked by validate_model, not here)

@dataclass(frozen=True)
class Material:
    name: str
    youngs_modulus_pa: float
    density_kg_m3: float
    tensile_strength_pa: float
    specific_heat_j_kg_k: float
    conductivity_w_m_k: float  # carried for documentation; single-node model has no conduction
    allowable_factor: float = 0.30


@dataclass(frozen=True)
class SurfaceFinish:
    name: str
    alpha: float
    epsilon: float
    note: str = ""


@dataclass(frozen=True)
class SurfacePatch:
    name: str
    area_m2: float
    normal: tuple[float, float, float]
    finish_fractions: tuple[tuple[str, float], ...]
    cell_fraction: float = 0.0
    string_id: str | None = None


@dataclass(frozen=True)
class ThermalNodeSpec:
    name: str
    mass_kg: float
    specific_heat_j_kg_k: float
    patch_names: tuple[str, ...]
    q_internal_sunlit_w: float = 0.0
    q_internal_eclipse_w: float = 0.0


@dataclass(frozen=True)
class PowerString:
    id: str
    cells_in_series: int
    cell_area_m2: float
    efficiency: float
    patch_names: tuple[str, ...]


@dataclass(frozen=True)
class PanelSpec:
    name: str
    length_m: float
    width_m: float
    thickness_m: float
    material: str
    total_mass_kg: float


@dataclass(frozen=True)
class HingeSpec:
    location: int
    stiffness_nm_rad: float | None  # None = rigid


@dataclass(frozen=True)
class ChainSpec:
    panel_names: tuple[str, ...]
    hinges: tuple[HingeSpec, ...]
    gap_m: float
    boundary: str
    elements_per_panel: int
    root_hinge_stiffness_nm_rad: float | None = None


@dataclass(frozen=True)
class Requirements:
    min_first_frequency_hz: float
    quasi_static_g: float
    allowable_stress_factor: float
    rail_load_n: float
    rail_section_m: tuple[float, float]
    envelope_limit_m: float
    temperature_bands_k: tuple[tuple[str, float, float], ...]


@dataclass(frozen=True)
class PowerSystem:
    cell_peak_w: float
    standby_consumption_w: float
    max_consumption_w: float
    sun_orientable_strings: tuple[str, ...]
    battery_note: str = ""


@dataclass(frozen=True)
class AttitudeSetting:
    name: str
    kind: str  # free_rotation | sun_pointing | nadir_pointing
    rate_deg_s: float | None = None
    spin_cycles_per_orbit: float | None = None
    spin_axis: tuple[float, float, float] | None = None
    precession_rate_deg_s: float | None = None
    precession_cycles_per_orbit: float | None = None
    precession_axis: tuple[float, float, float] | None = None
    patch: str | None = None


@dataclass(frozen=True)
class ScenarioCase:
    name: str
    env: EnvCase
    beta_deg: float
    azimuth_deg: float = 0.0


@dataclass(frozen=True)
class SimSettings:
    dt_s: float = 1.0
    convergence_tolerance_k: float = 0.1
    max_orbits: int = 60
    initial_temperature_k: float = 293.15
    eclipse_mode: str = "geom"  # geom | fixed60_30


@dataclass(frozen=True)
class OrbitSettings:
    altitude_km: float = 400.0
    inclination_deg: float = 51.6
    raan_deg: float = 0.0


@dataclass(frozen=True)
class ScenarioSet:
    orbit: OrbitSettings
    sim: SimSettings
    cases: dict[str, ScenarioCase]
    attitudes: dict[str, AttitudeSetting]


@dataclass(frozen=True)
class SatelliteModel:
    name: str
    schema_version: int
    materials: dict[str, Material]
    finishes: dict[str, SurfaceFinish]
    patches: dict[str, SurfacePatch]
    nodes: dict[str, ThermalNodeSpec]
    strings: dict[str, PowerString]
    panels: dict[str, PanelSpec]
    chain: ChainSpec | None
    requirements: Requirements
    power: PowerSystem
    scenarios: ScenarioSet
    surface_configs: dict[str, dict[str, tuple[tuple[str, float], ...]]]
    launch_mass_kg: float | None = None
    dimensions_m: tuple[float, float, float] | None = None


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------------
# strict table access

def _take(tbl: dict, key: str, where: str, required: bool = True, default=None):
    if key in tbl:
        return tbl.pop(key)
    if required:
        raise ConfigSchemaError(f"{where}: missing required key {key!r}")
    return default


def _done(tbl: dict, where: str) -> None:
    if tbl:
        raise ConfigSchemaError(f"{where}: unknown key(s) {sorted(tbl)}")


def _as_table(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigSchemaError(f"{where}: expected a table")
    return dict(value)


def _vec3(value, where: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigSchemaError(f"{where}: expected a 3-element vector")
    try:
        return (float(value[0]), float(value[1]), float(value[2]))
    except (TypeError, ValueError):
        raise ConfigSchemaError(f"{where}: vector entries must be numbers") from None


def _fractions(value, where: str) -> tuple[tuple[str, float], ...]:
    tbl = _as_table(value, where)
    out = []
    for k, v in tbl.items():
        try:
            out.append((str(k), float(v)))
        except (TypeError, ValueError):
            raise ConfigSchemaError(f"{where}.{k}: fraction must be a number") from None
    return tuple(out)


# ---------------------------------------------------------------------------
# section builders

def _build_material(name: str, tbl: dict, where: str) -> Material:
    m = Material(
        name=name,
        youngs_modulus_pa=parse_quantity(_take(tbl, "youngs_modulus", where), "pressure", where),
        density_kg_m3=parse_quantity(_take(tbl, "density", where), "density", where),
        tensile_strength_pa=parse_quantity(_take(tbl, "tensile_strength", where), "pressure", where),
        specific_heat_j_kg_k=parse_quantity(_take(tbl, "specific_heat", where), "specific_heat", where),
        conductivity_w_m_k=parse_quantity(_take(tbl, "conductivity", where), "conductivity", where),
        allowable_factor=float(_take(tbl, "allowable_stress_factor", where, required=False, default=0.30)),
    )
    _done(tbl, where)
    return m


def _build_finish(name: str, tbl: dict, where: str) -> SurfaceFinish:
    f = SurfaceFinish(
        name=name,
        alpha=float(_take(tbl, "alpha", where)),
        epsilon=float(_take(tbl, "epsilon", where)),
        note=str(_take(tbl, "note", where, required=False, default="")),
    )
    _done(tbl, where)
    return f


def _build_patch(name: str, tbl: dict, where: str) -> SurfacePatch:
    p = SurfacePatch(
        name=name,
        area_m2=parse_quantity(_take(tbl, "area", where), "area", where),
        normal=_vec3(_take(tbl, "normal", where), where),
        finish_fractions=_fractions(_take(tbl, "finish_fractions", where), f"{where}.finish_fractions"),
        cell_fraction=float(_take(tbl, "cell_fraction", where, required=False, default=0.0)),
        string_id=_take(tbl, "string", where, required=False),
    )
    _done(tbl, where)
    return p


def _build_node(name: str, tbl: dict, where: str) -> ThermalNodeSpec:
    patches = _take(tbl, "patches", where)
    if not isinstance(patches, list):
        raise ConfigSchemaError(f"{where}.patches: expected a list of patch names")
    n = ThermalNodeSpec(
        name=name,
        mass_kg=parse_quantity(_take(tbl, "mass", where), "mass", where),
        specific_heat_j_kg_k=parse_quantity(_take(tbl, "specific_heat", where), "specific_heat", where),
        patch_names=tuple(str(p) for p in patches),
        q_internal_sunlit_w=parse_quantity(
            _take(tbl, "internal_dissipation_sunlit", where, required=False, default=0.0), "power", where),
        q_internal_eclipse_w=parse_quantity(
            _take(tbl, "internal_dissipation_eclipse", where, required=False, default=0.0), "power", where),
    )
    _done(tbl, where)
    return n


def _build_string(name: str, tbl: dict, where: str) -> PowerString:
    patches = _take(tbl, "patches", where)
    if not isinstance(patches, list):
        raise ConfigSchemaError(f"{where}.patches: expected a list of patch names")
    s = PowerString(
        id=name,
        cells_in_series=int(_take(tbl, "cells_in_series", where)),
        cell_area_m2=parse_quantity(_take(tbl, "cell_area", where), "area", where),
        efficiency=float(_take(tbl, "efficiency", where)),
        patch_names=tuple(str(p) for p in patches),
    )
    _done(tbl, where)
    return s


def _build_panel(name: str, tbl: dict, where: str) -> PanelSpec:
    p = PanelSpec(
        name=name,
        length_m=parse_quantity(_take(tbl, "length", where), "length", where),
        width_m=parse_quantity(_take(tbl, "width", where), "length", where),
        thickness_m=parse_quantity(_take(tbl, "thickness", where), "length", where),
        material=str(_take(tbl, "material", where)),
        total_mass_kg=parse_quantity(_take(tbl, "total_mass", where), "mass", where),
    )
    _done(tbl, where)
    return p


def _parse_stiffness(value, where: str) -> float | None:
    if isinstance(value, str) and value.strip() == "rigid":
        return None
    return parse_quantity(value, "torsional_stiffness", where)


def _build_chain(tbl: dict, where: str) -> ChainSpec:
    panels = _take(tbl, "panels", where)
    if not isinstance(panels, list) or not panels:
        raise ConfigSchemaError(f"{where}.panels: expected a non-empty list of panel names")
    hinge_items = _take(tbl, "hinges", where, required=False, default=[])
    hinges = []
    for i, h in enumerate(hinge_items):
        hw = f"{where}.hinges[{i}]"
        ht = _as_table(h, hw)
        hinges.append(HingeSpec(
            location=int(_take(ht, "location", hw)),
            stiffness_nm_rad=_parse_stiffness(_take(ht, "stiffness", hw), hw),
        ))
        _done(ht, hw)
    root = _take(tbl, "root_hinge_stiffness", where, required=False)
    c = ChainSpec(
        panel_names=tuple(str(p) for p in panels),
        hinges=tuple(hinges),
        gap_m=parse_quantity(_take(tbl, "gap", where, required=False, default=0.0), "length", where),
        boundary=str(_take(tbl, "boundary", where, required=False, default="clamped-free")),
        elements_per_panel=int(_take(tbl, "elements_per_panel", where, required=False, default=32)),
        root_hinge_stiffness_nm_rad=_parse_stiffness(root, where) if root is not None else None,
    )
    _done(tbl, where)
    return c


def _build_requirements(tbl: dict, where: str) -> Requirements:
    section = _take(tbl, "rail_section", where, required=False, default=["8.5 mm", "8.5 mm"])
    if not isinstance(section, list) or len(section) != 2:
        raise ConfigSchemaError(f"{where}.rail_section: expected [width, height]")
    bands_tbl = _as_table(_take(tbl, "temperature_bands", where, required=False, default={}), where)
    bands = []
    for node_name, pair in bands_tbl.items():
        bw = f"{where}.temperature_bands.{node_name}"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigSchemaError(f"{bw}: expected [low, high]")
        bands.append((str(node_name),
                      parse_quantity(pair[0], "temperature", bw),
                      parse_quantity(pair[1], "temperature", bw)))
    r = Requirements(
        min_first_frequency_hz=parse_quantity(
            _take(tbl, "min_first_frequency", where, required=False, default=60.0), "frequency", where),
        quasi_static_g=float(_take(tbl, "quasi_static_g", where, required=False, default=9.0)),
        allowable_stress_factor=float(_take(tbl, "allowable_stress_factor", where, required=False, default=0.30)),
        rail_load_n=parse_quantity(_take(tbl, "rail_load", where, required=False, default=46.6), "force", where),
        rail_section_m=(parse_quantity(section[0], "length", where), parse_quantity(section[1], "length", where)),
        envelope_limit_m=parse_quantity(
            _take(tbl, "envelope_limit", where, required=False, default="6.5 mm"), "length", where),
        temperature_bands_k=tuple(bands),
    )
    _done(tbl, where)
    return r


def _build_power(tbl: dict, where: str) -> PowerSystem:
    strings = _take(tbl, "sun_orientable_strings", where, required=False, default=[])
    if not isinstance(strings, list):
        raise ConfigSchemaError(f"{where}.sun_orientable_strings: expected a list")
    p = PowerSystem(
        cell_peak_w=parse_quantity(_take(tbl, "cell_peak_w", where, required=False, default=0.0), "power", where),
        standby_consumption_w=parse_quantity(
            _take(tbl, "standby_consumption", where, required=False, default=0.0), "power", where),
        max_consumption_w=parse_quantity(
            _take(tbl, "max_consumption", where, required=False, default=0.0), "power", where),
        sun_orientable_strings=tuple(str(s) for s in strings),
        battery_note=str(_take(tbl, "battery_note", where, required=False, default="")),
    )
    _done(tbl, where)
    return p


def _build_attitude(name: str, tbl: dict, where: str) -> AttitudeSetting:
    kind = str(_take(tbl, "type", where))
    if kind not in ("free_rotation", "sun_pointing", "nadir_pointing"):
        raise ConfigSchemaError(f"{where}.type: unknown attitude type {kind!r}")
    rate = _take(tbl, "rate", where, required=False)
    spin_cpo = _take(tbl, "spin_cycles_per_orbit", where, required=False)
    prate = _take(tbl, "precession_rate", where, required=False)
    prec_cpo = _take(tbl, "precession_cycles_per_orbit", where, required=False)
    axis = _take(tbl, "spin_axis", where, required=False)
    paxis = _take(tbl, "precession_axis", where, required=False)
    patch = _take(tbl, "patch", where, required=False)
    a = AttitudeSetting(
        name=name,
        kind=kind,
        rate_deg_s=parse_quantity(rate, "angular_rate", where) if rate is not None else None,
        spin_cycles_per_orbit=float(spin_cpo) if spin_cpo is not None else None,
        spin_axis=_vec3(axis, where) if axis is not None else None,
        precession_rate_deg_s=parse_quantity(prate, "angular_rate", where) if prate is not None else None,
        precession_cycles_per_orbit=float(prec_cpo) if prec_cpo is not None else None,
        precession_axis=_vec3(paxis, where) if paxis is not None else None,
        patch=str(patch) if patch is not None else None,
    )
    if kind == "free_rotation" and a.rate_deg_s is None and a.spin_cycles_per_orbit is None:
        raise ConfigSchemaError(f"{where}: free_rotation needs 'rate' or 'spin_cycles_per_orbit'")
    if kind in ("sun_pointing", "nadir_pointing") and a.patch is None:
        raise ConfigSchemaError(f"{where}: {kind} needs 'patch'")
    _done(tbl, where)
    return a


def _build_case(name: str, tbl: dict, where: str) -> ScenarioCase:
    from .orbit import BUILTIN_ENV_CASES
    env_name = _take(tbl, "env", where, required=False)
    if env_name is not None:
        if env_name not in BUILTIN_ENV_CASES:
            raise ConfigReferenceError(f"{where}.env: unknown built-in case {env_name!r}")
        base = BUILTIN_ENV_CASES[env_name]
    else:
        base = None
    solar = _take(tbl, "solar_flux", where, required=False)
    ir = _take(tbl, "earth_ir", where, required=False)
    albedo = _take(tbl, "albedo", where, required=False)
    ka = _take(tbl, "albedo_correction", where, required=False)
    if base is None and (solar is None or ir is None or albedo is None):
        raise ConfigSchemaError(f"{where}: give 'env' or explicit solar_flux/earth_ir/albedo")
    env = EnvCase(
        name=name,
        solar_flux_w_m2=parse_quantity(solar, "flux", where) if solar is not None else base.solar_flux_w_m2,
        earth_ir_w_m2=parse_quantity(ir, "flux", where) if ir is not None else base.earth_ir_w_m2,
        albedo=float(albedo) if albedo is not None else base.albedo,
        albedo_correction=float(ka) if ka is not None else (base.albedo_correction if base else 0.998),
    )
    c = ScenarioCase(
        name=name,
        env=env,
        beta_deg=parse_quantity(_take(tbl, "beta", where, required=False, default=0.0), "angle", where),
        azimuth_deg=parse_quantity(_take(tbl, "azimuth", where, required=False, default=0.0),
                                   "angle", where),
    )
    _done(tbl, where)
    return c


def _build_scenarios(tbl: dict, where: str) -> ScenarioSet:
    orbit_tbl = _as_table(_take(tbl, "orbit", where, required=False, default={}), f"{where}.orbit")
    orbit = OrbitSettings(
        altitude_km=parse_quantity(
            _take(orbit_tbl, "altitude", f"{where}.orbit", required=False, default=400000.0),
            "length", f"{where}.orbit") / 1000.0,
        inclination_deg=parse_quantity(
            _take(orbit_tbl, "inclination", f"{where}.orbit", required=False, default=51.6),
            "angle", f"{where}.orbit"),
        raan_deg=parse_quantity(
            _take(orbit_tbl, "raan", f"{where}.orbit", required=False, default=0.0),
            "angle", f"{where}.orbit"),
    )
    _done(orbit_tbl, f"{where}.orbit")

    sim_tbl = _as_table(_take(tbl, "sim", where, required=False, default={}), f"{where}.sim")
    eclipse_mode = str(_take(sim_tbl, "eclipse", f"{where}.sim", required=False, default="geom"))
    if eclipse_mode not in ("geom", "fixed60_30"):
        raise ConfigSchemaError(f"{where}.sim.eclipse: must be 'geom' or 'fixed60_30'")
    sim = SimSettings(
        dt_s=parse_quantity(_take(sim_tbl, "dt", f"{where}.sim", required=False, default=1.0),
                            "time", f"{where}.sim"),
        convergence_tolerance_k=parse_quantity(
            _take(sim_tbl, "convergence_tolerance", f"{where}.sim", required=False, default=0.1),
            "temperature_delta", f"{where}.sim"),
        max_orbits=int(_take(sim_tbl, "max_orbits", f"{where}.sim", required=False, default=60)),
        initial_temperature_k=parse_quantity(
            _take(sim_tbl, "initial_temperature", f"{where}.sim", required=False, default=293.15),
            "temperature", f"{where}.sim"),
        eclipse_mode=eclipse_mode,
    )
    _done(sim_tbl, f"{where}.sim")

    cases = {}
    for name, sub in _as_table(_take(tbl, "cases", where, required=False, default={}), where).items():
        cases[name] = _build_case(name, _as_table(sub, f"{where}.cases.{name}"), f"{where}.cases.{name}")
    attitudes = {}
    for name, sub in _as_table(_take(tbl, "attitude", where, required=False, default={}), where).items():
        attitudes[name] = _build_attitude(name, _as_table(sub, f"{where}.attitude.{name}"),
                                          f"{where}.attitude.{name}")
    _done(tbl, where)
    return ScenarioSet(orbit=orbit, sim=sim, cases=cases, attitudes=attitudes)


# ---------------------------------------------------------------------------
# loading

SCHEMA_VERSION = 1


def reference_model_path() -> Path:
    """Path of the reference vehicle model shipped with the package."""
    return Path(__file__).parent / "data" / "hokushin1.toml"


def load_model(path: str | Path) -> SatelliteModel:
    """Load, bind, and normalize a satellite model file.

    Raises ConfigParseError for unreadable files, ConfigSchemaError for
    unknown/missing keys, and ConfigReferenceError for dangling names.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    if not doc:
        raise ConfigParseError(f"{path}: file is empty")
    return model_from_dict(doc, str(path))


def model_from_dict(doc: dict, where: str = "<config>") -> SatelliteModel:
    tbl = dict(doc)
    version = _take(tbl, "schema_version", where)
    if version != SCHEMA_VERSION:
        raise ConfigSchemaError(f"{where}: schema_version {version!r} not supported "
                                f"(expected {SCHEMA_VERSION})")

    sat_tbl = _as_table(_take(tbl, "satellite", where, required=False, default={}), f"{where}.satellite")
    name = str(_take(sat_tbl, "name", f"{where}.satellite", required=False, default="unnamed"))
    dims = _take(sat_tbl, "dimensions", f"{where}.satellite", required=False)
    dimensions = None
    if dims is not None:
        if not isinstance(dims, list) or len(dims) != 3:
            raise ConfigSchemaError(f"{where}.satellite.dimensions: expected 3 lengths")
        dimensions = tuple(parse_quantity(d, "length", f"{where}.satellite.dimensions") for d in dims)
    launch_mass = _take(sat_tbl, "launch_mass", f"{where}.satellite", required=False)
    launch_mass_kg = parse_quantity(launch_mass, "mass", f"{where}.satellite") if launch_mass is not None else None
    power_tbl = _as_table(_take(sat_tbl, "power", f"{where}.satellite", required=False, default={}),
                          f"{where}.satellite.power")
    power = _build_power(power_tbl, f"{where}.satellite.power")
    _done(sat_tbl, f"{where}.satellite")

    materials = {}
    for mat_name, sub in _as_table(_take(tbl, "materials", where, required=False, default={}),
                                   f"{where}.materials").items():
        w = f"{where}.materials.{mat_name}"
        materials[mat_name] = _build_material(mat_name, _as_table(sub, w), w)

    finishes = {}
    for fin_name, sub in _as_table(_take(tbl, "finishes", where, required=False, default={}),
                                   f"{where}.finishes").items():
        w = f"{where}.finishes.{fin_name}"
        finishes[fin_name] = _build_finish(fin_name, _as_table(sub, w), w)

    patches_tbl = _as_table(_take(tbl, "patches", where, required=False, default={}), f"{where}.patches")
    configs_tbl = _as_table(patches_tbl.pop("configs", {}), f"{where}.patches.configs")
    patches = {}
    for p_name, sub in patches_tbl.items():
        w = f"{where}.patches.{p_name}"
        patches[p_name] = _build_patch(p_name, _as_table(sub, w), w)

    surface_configs: dict[str, dict[str, tuple[tuple[str, float], ...]]] = {}
    for cfg_name, cfg_sub in configs_tbl.items():
        cw = f"{where}.patches.configs.{cfg_name}"
        overrides = {}
        for p_name, p_sub in _as_table(cfg_sub, cw).items():
            pw = f"{cw}.{p_name}"
            pt = _as_table(p_sub, pw)
            overrides[p_name] = _fractions(_take(pt, "finish_fractions", pw), f"{pw}.finish_fractions")
            _done(pt, pw)
        surface_configs[cfg_name] = overrides

    nodes = {}
    for n_name, sub in _as_table(_take(tbl, "nodes", where, required=False, default={}),
                                 f"{where}.nodes").items():
        w = f"{where}.nodes.{n_name}"
        nodes[n_name] = _build_node(n_name, _as_table(sub, w), w)

    strings = {}
    for s_name, sub in _as_table(_take(tbl, "strings", where, required=False, default={}),
                                 f"{where}.strings").items():
        w = f"{where}.strings.{s_name}"
        strings[s_name] = _build_string(s_name, _as_table(sub, w), w)

    panels_tbl = _as_table(_take(tbl, "panels", where, required=False, default={}), f"{where}.panels")
    chain_tbl = panels_tbl.pop("chain", None)
    panels = {}
    for p_name, sub in panels_tbl.items():
        w = f"{where}.panels.{p_name}"
        panels[p_name] = _build_panel(p_name, _as_table(sub, w), w)
    chain = _build_chain(_as_table(chain_tbl, f"{where}.panels.chain"),
                         f"{where}.panels.chain") if chain_tbl is not None else None

    requirements = _build_requirements(
        _as_table(_take(tbl, "requirements", where, required=False, default={}), f"{where}.requirements"),
        f"{where}.requirements")
    scenarios = _build_scenarios(
        _as_table(_take(tbl, "scenarios", where, required=False, default={}), f"{where}.scenarios"),
        f"{where}.scenarios")
    _done(tbl, where)

    model = SatelliteModel(
        name=name,
        schema_version=SCHEMA_VERSION,
        materials=materials,
        finishes=finishes,
        patches=patches,
        nodes=nodes,
        strings=strings,
        panels=panels,
        chain=chain,
        requirements=requirements,
        power=power,
        scenarios=scenarios,
        surface_configs=surface_configs,
        launch_mass_kg=launch_mass_kg,
        dimensions_m=dimensions,
    )
    _check_references(model, where)
    return model


def _check_references(model: SatelliteModel, where: str) -> None:
    for patch in model.patches.values():
        for fin_name, _ in patch.finish_fractions:
            if fin_name not in model.finishes:
                raise ConfigReferenceError(
                    f"{where}: patch {patch.name!r} references unknown finish {fin_name!r}")
        if patch.string_id is not None and patch.string_id not in model.strings:
            raise ConfigReferenceError(
                f"{where}: patch {patch.name!r} references unknown string {patch.string_id!r}")
    for node in model.nodes.values():
        for p_name in node.patch_names:
            if p_name not in model.patches:
                raise ConfigReferenceError(
                    f"{where}: node {node.name!r} references unknown patch {p_name!r}")
    for s in model.strings.values():
        for p_name in s.patch_names:
            if p_name not in model.patches:
                raise ConfigReferenceError(
                    f"{where}: string {s.id!r} references unknown patch {p_name!r}")
    for panel in model.panels.values():
        if panel.material not in model.materials:
            raise ConfigReferenceError(
                f"{where}: panel {panel.name!r} references unknown material {panel.material!r}")
    if model.chain is not None:
        for p_name in model.chain.panel_names:
            if p_name not in model.panels:
                raise ConfigReferenceError(
                    f"{where}: chain references unknown panel {p_name!r}")
    for cfg_name, overrides in model.surface_configs.items():
        for p_name, fracs in overrides.items():
            if p_name not in model.patches:
                raise ConfigReferenceError(
                    f"{where}: surface config {cfg_name!r} overrides unknown patch {p_name!r}")
            for fin_name, _ in fracs:
                if fin_name not in model.finishes:
                    raise ConfigReferenceError(
                        f"{where}: surface config {cfg_name!r} references unknown finish {fin_name!r}")
    for s_id in model.power.sun_orientable_strings:
        if s_id not in model.strings:
            raise ConfigReferenceError(
                f"{where}: sun_orientable_strings references unknown string {s_id!r}")
    for att in model.scenarios.attitudes.values():
        if att.patch is not None and att.patch not in model.patches:
            raise ConfigReferenceError(
                f"{where}: attitude {att.name!r} references unknown patch {att.patch!r}")
    for node_name, _, _ in model.requirements.temperature_bands_k:
        if node_name not in model.nodes:
            raise ConfigReferenceError(
                f"{where}: temperature band references unknown node {node_name!r}")


# ---------------------------------------------------------------------------
# validation (numeric invariants; loading already guarantees bound references)

_ALPHA_SUSPECT = 0.98


def validate_model(model: SatelliteModel) -> ValidationReport:
    report = ValidationReport()
    err = report.errors.append
    warn = report.warnings.append

    for m in model.materials.values():
        for f in fields(m):
            if f.name in ("name",):
                continue
            v = getattr(m, f.name)
            if isinstance(v, (int, float)) and v <= 0:
                err(f"material {m.name!r}: {f.name} must be > 0, got {v}")

    for fin in model.finishes.values():
        if not 0.0 <= fin.alpha <= 1.0:
            err(f"finish {fin.name!r}: alpha must be in [0, 1], got {fin.alpha}")
        elif fin.alpha > _ALPHA_SUSPECT:
            warn(f"finish {fin.name!r}: alpha = {fin.alpha} is suspiciously high")
        if not 0.0 <= fin.epsilon <= 1.0:
            err(f"finish {fin.name!r}: epsilon must be in [0, 1], got {fin.epsilon}")
        elif fin.epsilon > _ALPHA_SUSPECT:
            warn(f"finish {fin.name!r}: epsilon = {fin.epsilon} is suspiciously high")

    for p in model.patches.values():
        _check_patch(p, err, prefix=f"patch {p.name!r}")
    for cfg_name, overrides in model.surface_configs.items():
        for p_name, fracs in overrides.items():
            total = sum(frac for _, frac in fracs)
            if abs(total - 1.0) > 1e-9:
                err(f"surface config {cfg_name!r}, patch {p_name!r}: "
                    f"finish fractions sum to {total}, expected 1")

    total_mass = 0.0
    for n in model.nodes.values():
        if n.mass_kg <= 0:
            err(f"node {n.name!r}: mass must be > 0, got {n.mass_kg}")
        if n.specific_heat_j_kg_k <= 0:
            err(f"node {n.name!r}: specific heat must be > 0")
        total_mass += max(n.mass_kg, 0.0)
    if model.nodes and total_mass <= 0:
        err("total node mass must be > 0")

    for s in model.strings.values():
        if s.cells_in_series < 1:
            err(f"string {s.id!r}: cells_in_series must be >= 1")
        if not 0.0 < s.efficiency < 1.0:
            err(f"string {s.id!r}: efficiency must be in (0, 1), got {s.efficiency}")
        if s.cell_area_m2 <= 0:
            err(f"string {s.id!r}: cell_area must be > 0")

    for p in model.panels.values():
        for attr in ("length_m", "width_m", "thickness_m", "total_mass_kg"):
            if getattr(p, attr) <= 0:
                err(f"panel {p.name!r}: {attr} must be > 0")
    if model.chain is not None and model.chain.elements_per_panel < 8:
        err(f"chain: elements_per_panel must be >= 8, got {model.chain.elements_per_panel}")
    if model.chain is not None:
        for h in model.chain.hinges:
            if h.stiffness_nm_rad is not None and h.stiffness_nm_rad <= 0:
                err(f"chain hinge at joint {h.location}: stiffness must be > 0 or 'rigid'")

    for node_name, lo, hi in model.requirements.temperature_bands_k:
        if lo >= hi:
            err(f"temperature band for {node_name!r}: low {lo} K >= high {hi} K")
    return report


def _check_patch(p: SurfacePatch, err, prefix: str) -> None:
    if p.area_m2 <= 0:
        err(f"{prefix}: area must be > 0, got {p.area_m2}")
    norm = math.sqrt(sum(c * c for c in p.normal))
    if abs(norm - 1.0) > 1e-9:
        err(f"{prefix}: normal has length {norm:.12f}, expected 1")
    total = sum(frac for _, frac in p.finish_fractions)
    if abs(total - 1.0) > 1e-9:
        err(f"{prefix}: finish fractions sum to {total}, expected 1")
    if not 0.0 <= p.cell_fraction <= 1.0:
        err(f"{prefix}: cell_fraction must be in [0, 1], got {p.cell_fraction}")


# ---------------------------------------------------------------------------
# operations on loaded data

def effective_optical_properties(patch: SurfacePatch,
                                 finishes: dict[str, SurfaceFinish]) -> tuple[float, float]:
    """Area-weighted (alpha, epsilon) over the patch's finish fractions."""
    alpha = 0.0
    epsilon = 0.0
    for fin_name, frac in patch.finish_fractions:
        try:
            fin = finishes[fin_name]
        except KeyError:
            raise KeyError(f"patch {patch.name!r} references unknown finish {fin_name!r}") from None
        alpha += frac * fin.alpha
        epsilon += frac * fin.epsilon
    return alpha, epsilon


def allowable_stress(material: Material, factor: float | None = None) -> float:
    """Allowable stress in Pa: factor x tensile strength (default per material)."""
    if factor is None:
        factor = material.allowable_factor
    if not 0.0 < factor <= 1.0:
        raise ValueError(f"allowable-stress factor must be in (0, 1], got {factor}")
    return factor * material.tensile_strength_pa


def apply_surface_config(model: SatelliteModel, config_name: str) -> SatelliteModel:
    """Return a model with patch finish layouts replaced per the named config."""
    if config_name in ("base", ""):
        return model
    if config_name not in model.surface_configs:
        raise ConfigReferenceError(
            f"unknown surface config {config_name!r}; known: {sorted(model.surface_configs)}")
    overrides = model.surface_configs[config_name]
    new_patches = dict(model.patches)
    for p_name, fracs in overrides.items():
        old = new_patches[p_name]
        new_patches[p_name] = SurfacePatch(
            name=old.name, area_m2=old.area_m2, normal=old.normal,
            finish_fractions=fracs, cell_fraction=old.cell_fraction,
            string_id=old.string_id,
        )
    return SatelliteModel(
        name=model.name, schema_version=model.schema_version,
        materials=model.materials, finishes=model.finishes, patches=new_patches,
        nodes=model.nodes, strings=model.strings, panels=model.panels,
        chain=model.chain, requirements=model.requirements, power=model.power,
        scenarios=model.scenarios, surface_configs=model.surface_configs,
        launch_mass_kg=model.launch_mass_kg, dimensions_m=model.dimensions_m,
    )


# ---------------------------------------------------------------------------
# serialization (round-trips through load_model)

def dump_model(model: SatelliteModel) -> str:
    """Serialize a model to TOML. Quantities come out in SI base units."""
    w = _TomlWriter()
    w.scalar("schema_version", model.schema_version)
    w.section("satellite")
    w.scalar("name", model.name)
    if model.dimensions_m is not None:
        w.scalar("dimensions", list(model.dimensions_m))
    if model.launch_mass_kg is not None:
        w.scalar("launch_mass", model.launch_mass_kg)
    w.section("satellite.power")
    w.scalar("cell_peak_w", model.power.cell_peak_w)
    w.scalar("standby_consumption", model.power.standby_consumption_w)
    w.scalar("max_consumption", model.power.max_consumption_w)
    w.scalar("sun_orientable_strings", list(model.power.sun_orientable_strings))
    if model.power.battery_note:
        w.scalar("battery_note", model.power.battery_note)

    for m in model.materials.values():
        w.section(f"materials.{m.name}")
        w.scalar("youngs_modulus", m.youngs_modulus_pa)
        w.scalar("density", m.density_kg_m3)
        w.scalar("tensile_strength", m.tensile_strength_pa)
        w.scalar("specific_heat", m.specific_heat_j_kg_k)
        w.scalar("conductivity", m.conductivity_w_m_k)
        w.scalar("allowable_stress_factor", m.allowable_factor)
    for f in model.finishes.values():
        w.section(f"finishes.{f.name}")
        w.scalar("alpha", f.alpha)
        w.scalar("epsilon", f.epsilon)
        if f.note:
            w.scalar("note", f.note)
    for p in model.patches.values():
        w.section(f"patches.{p.name}")
        w.scalar("area", p.area_m2)
        w.scalar("normal", list(p.normal))
        w.scalar("finish_fractions", dict(p.finish_fractions))
        w.scalar("cell_fraction", p.cell_fraction)
        if p.string_id is not None:
            w.scalar("string", p.string_id)
    for cfg_name, overrides in model.surface_configs.items():
        if not overrides:
            w.section(f"patches.configs.{cfg_name}")
        for p_name, fracs in overrides.items():
            w.section(f"patches.configs.{cfg_name}.{p_name}")
            w.scalar("finish_fractions", dict(fracs))
    for n in model.nodes.values():
        w.section(f"nodes.{n.name}")
        w.scalar("mass", n.mass_kg)
        w.scalar("specific_heat", n.specific_heat_j_kg_k)
        w.scalar("internal_dissipation_sunlit", n.q_internal_sunlit_w)
        w.scalar("internal_dissipation_eclipse", n.q_internal_eclipse_w)
        w.scalar("patches", list(n.patch_names))
    for s in model.strings.values():
        w.section(f"strings.{s.id}")
        w.scalar("cells_in_series", s.cells_in_series)
        w.scalar("cell_area", s.cell_area_m2)
        w.scalar("efficiency", s.efficiency)
        w.scalar("patches", list(s.patch_names))
    for p in model.panels.values():
        w.section(f"panels.{p.name}")
        w.scalar("length", p.length_m)
        w.scalar("width", p.width_m)
        w.scalar("thickness", p.thickness_m)
        w.scalar("material", p.material)
        w.scalar("total_mass", p.total_mass_kg)
    if model.chain is not None:
        c = model.chain
        w.section("panels.chain")
        w.scalar("panels", list(c.panel_names))
        w.scalar("gap", c.gap_m)
        w.scalar("boundary", c.boundary)
        w.scalar("elements_per_panel", c.elements_per_panel)
        if c.root_hinge_stiffness_nm_rad is not None:
            w.scalar("root_hinge_stiffness", c.root_hinge_stiffness_nm_rad)
        w.scalar("hinges", [
            {"location": h.location,
             "stiffness": "rigid" if h.stiffness_nm_rad is None else h.stiffness_nm_rad}
            for h in c.hinges])

    r = model.requirements
    w.section("requirements")
    w.scalar("min_first_frequency", r.min_first_frequency_hz)
    w.scalar("quasi_static_g", r.quasi_static_g)
    w.scalar("allowable_stress_factor", r.allowable_stress_factor)
    w.scalar("rail_load", r.rail_load_n)
    w.scalar("rail_section", list(r.rail_section_m))
    w.scalar("envelope_limit", r.envelope_limit_m)
    if r.temperature_bands_k:
        w.section("requirements.temperature_bands")
        for node_name, lo, hi in r.temperature_bands_k:
            w.scalar(node_name, [lo, hi])

    sc = model.scenarios
    w.section("scenarios.orbit")
    w.scalar("altitude", sc.orbit.altitude_km * 1000.0)
    w.scalar("inclination", sc.orbit.inclination_deg)
    w.scalar("raan", sc.orbit.raan_deg)
    w.section("scenarios.sim")
    w.scalar("dt", sc.sim.dt_s)
    w.scalar("convergence_tolerance", sc.sim.convergence_tolerance_k)
    w.scalar("max_orbits", sc.sim.max_orbits)
    w.scalar("initial_temperature", sc.sim.initial_temperature_k)
    w.scalar("eclipse", sc.sim.eclipse_mode)
    for case in sc.cases.values():
        w.section(f"scenarios.cases.{case.name}")
        w.scalar("solar_flux", case.env.solar_flux_w_m2)
        w.scalar("earth_ir", case.env.earth_ir_w_m2)
        w.scalar("albedo", case.env.albedo)
        w.scalar("albedo_correction", case.env.albedo_correction)
        w.scalar("beta", case.beta_deg)
        w.scalar("azimuth", case.azimuth_deg)
    for att in sc.attitudes.values():
        w.section(f"scenarios.attitude.{att.name}")
        w.scalar("type", att.kind)
        if att.rate_deg_s is not None:
            w.scalar("rate", f"{att.rate_deg_s!r} deg/s")
        if att.spin_cycles_per_orbit is not None:
            w.scalar("spin_cycles_per_orbit", att.spin_cycles_per_orbit)
        if att.spin_axis is not None:
            w.scalar("spin_axis", list(att.spin_axis))
        if att.precession_rate_deg_s is not None:
            w.scalar("precession_rate", f"{att.precession_rate_deg_s!r} deg/s")
        if att.precession_cycles_per_orbit is not None:
            w.scalar("precession_cycles_per_orbit", att.precession_cycles_per_orbit)
        if att.precession_axis is not None:
            w.scalar("precession_axis", list(att.precession_axis))
        if att.patch is not None:
            w.scalar("patch", att.patch)
    return w.text()


class _TomlWriter:
    """Tiny TOML emitter covering the subset this schema uses."""

    def __init__(self):
        self._lines: list[str] = []

    def section(self, name: str) -> None:
        if self._lines:
            self._lines.append("")
        self._lines.append(f"[{name}]")

    def scalar(self, key: str, value) -> None:
        self._lines.append(f"{key} = {self._fmt(value)}")

    def _fmt(self, v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v)
        if isinstance(v, float):
            return repr(v)
        if isinstance(v, str):
            escaped = v.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        if isinstance(v, list):
            return "[" + ", ".join(self._fmt(x) for x in v) + "]"
        if isinstance(v, dict):
            inner = ", ".join(f"{k} = {self._fmt(x)}" for k, x in v.items())
            return "{" + inner + "}"
        raise TypeError(f"cannot serialize {type(v).__name__}")

    def text(self) -> str:
        return "\n".join(self._lines) + "\n"
