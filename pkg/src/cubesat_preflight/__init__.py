"""Pre-flight evaluation toolkit for small spacecraft.

Orbital single-node thermal simulation, solar power budgeting, random-vibration
data processing, and simplified deployable-panel structural checks.
"""

__version__ = "0.1.0"

from .config import (SatelliteModel, ValidationReport, allowable_stress,  # noqa: F401
                     effective_optical_properties, load_model, validate_model)
from .orbit import (EnvCase, OrbitSpec, beta_angle, earth_view_factor,  # noqa: F401
                    eclipse_state, env_case, orbital_period)
