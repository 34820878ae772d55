"""Solar-string generation model and the generated-vs-required power budget.

Peak numbers use the nominal 1353 W/m^2 irradiance so the budget matches the
figures a designer would quote; the orbital thermal model couples to the
instantaneous scenario flux instead. Cell efficiency is constant (thermal
derating is out of scope). The report also carries a "rounded chain" in which
each intermediate value is rounded the way budget tables typically quote them
(one or two decimals) before the next step; exact and rounded values are both
reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import PowerString, SatelliteModel
from .constants import SOLAR_FLUX_NOMINAL


def round_half_up(x: float, ndigits: int) -> float:
    """Decimal-style rounding (0.5 always goes up); round() is half-even."""
    scale = 10.0 ** ndigits
    return math.floor(x * scale + 0.5) / scale


def cell_peak_power(efficiency: float, solar_flux_w_m2: float, cell_area_m2: float) -> float:
    """Peak electrical power of one cell at normal incidence."""
    if efficiency < 0 or solar_flux_w_m2 <= 0 or cell_area_m2 <= 0:
        raise ValueError("cell power inputs must be positive (efficiency may be 0)")
    return efficiency * solar_flux_w_m2 * cell_area_m2


def string_power(string: PowerString, factor: float,
                 solar_flux_w_m2: float = SOLAR_FLUX_NOMINAL) -> float:
    """Power of a series string at the given illumination factor (cos or average)."""
    if not 0.0 <= factor <= 1.0:
        raise ValueError(f"illumination factor must be in [0, 1], got {factor}")
    return string.cells_in_series * cell_peak_power(
        string.efficiency, solar_flux_w_m2, string.cell_area_m2) * factor


def required_generation(consumption_w: float, sun_min: float, eclipse_min: float) -> float:
    """Sunlit-phase generation needed to carry a constant load through eclipse."""
    if sun_min <= 0:
        raise ValueError(f"sunlit duration must be > 0 minutes, got {sun_min}")
    if eclipse_min < 0:
        raise ValueError("eclipse duration must be >= 0 minutes")
    return consumption_w * (sun_min + eclipse_min) / sun_min


@dataclass(frozen=True)
class BudgetReport:
    """Generated-vs-required summary plus per-string extraction for thermal runs."""

    cell_peak_w: float                # from efficiency x flux x area
    cell_peak_datasheet_w: float      # configured per-cell peak
    string_peak_w: float
    spin_average_string_w: float
    max_simultaneous_w: float         # sun-orientable strings at datasheet peak
    sun_min: float
    eclipse_min: float
    required_w: float
    per_string_required_w: float
    headroom_per_string_w: float      # string peak minus per-string requirement
    margin_w: float                   # max simultaneous minus required
    n_strings: int
    extraction_per_string_w: dict[str, float]
    rounded: dict[str, float]         # budget-table style rounded chain

    def as_dict(self) -> dict:
        return {
            "cell_peak_w": self.cell_peak_w,
            "cell_peak_datasheet_w": self.cell_peak_datasheet_w,
            "string_peak_w": self.string_peak_w,
            "spin_average_string_w": self.spin_average_string_w,
            "max_simultaneous_w": self.max_simultaneous_w,
            "sun_min": self.sun_min,
            "eclipse_min": self.eclipse_min,
            "required_w": self.required_w,
            "per_string_required_w": self.per_string_required_w,
            "headroom_per_string_w": self.headroom_per_string_w,
            "margin_w": self.margin_w,
            "n_strings": self.n_strings,
            "extraction_per_string_w": dict(self.extraction_per_string_w),
            "rounded": dict(self.rounded),
        }


def budget_report(model: SatelliteModel, sun_min: float = 60.0, eclipse_min: float = 30.0,
                  spin_factor: float = 0.25) -> BudgetReport:
    """Build the power budget for a model under a sun/eclipse split.

    Max simultaneous generation sums the configured sun-orientable strings at
    the datasheet per-cell peak; which strings can face the sun concurrently
    is configuration data, not geometric inference.
    """
    strings = model.strings
    n_strings = len(strings)
    if n_strings == 0:
        required = required_generation(model.power.standby_consumption_w, sun_min, eclipse_min) \
            if model.power.standby_consumption_w > 0 else 0.0
        return BudgetReport(
            cell_peak_w=0.0, cell_peak_datasheet_w=model.power.cell_peak_w,
            string_peak_w=0.0, spin_average_string_w=0.0, max_simultaneous_w=0.0,
            sun_min=sun_min, eclipse_min=eclipse_min, required_w=required,
            per_string_required_w=0.0, headroom_per_string_w=0.0,
            margin_w=-required, n_strings=0, extraction_per_string_w={}, rounded={})

    # the reference vehicle's strings are identical; report the first as typical
    ref = next(iter(strings.values()))
    cell_w = cell_peak_power(ref.efficiency, SOLAR_FLUX_NOMINAL, ref.cell_area_m2)
    string_w = string_power(ref, 1.0)
    spin_w = string_w * spin_factor

    ds_peak = model.power.cell_peak_w if model.power.cell_peak_w > 0 else cell_w
    max_w = sum(strings[s].cells_in_series * ds_peak
                for s in model.power.sun_orientable_strings)

    required = required_generation(model.power.standby_consumption_w, sun_min, eclipse_min)
    per_string = required / n_strings
    extraction = {s_id: per_string for s_id in strings}

    string_r = round_half_up(string_w, 1)
    required_r = round_half_up(required, 1)
    per_string_r = round_half_up(required_r / n_strings, 2)
    rounded = {
        "cell_peak_w": round_half_up(cell_w, 2),
        "string_peak_w": string_r,
        "spin_average_string_w": round_half_up(spin_w, 1),
        "required_w": required_r,
        "per_string_required_w": per_string_r,
        "headroom_per_string_w": round_half_up(string_r - per_string_r, 2),
    }
    return BudgetReport(
        cell_peak_w=cell_w,
        cell_peak_datasheet_w=ds_peak,
        string_peak_w=string_w,
        spin_average_string_w=spin_w,
        max_simultaneous_w=max_w,
        sun_min=sun_min,
        eclipse_min=eclipse_min,
        required_w=required,
        per_string_required_w=per_string,
        headroom_per_string_w=string_w - per_string,
        margin_w=max_w - required,
        n_strings=n_strings,
        extraction_per_string_w=extraction,
        rounded=rounded,
    )
