"""Attitude modes and per-patch solar incidence.

Three modes are supported:

* free rotation -- a kinematic tumble: spin about a body axis at a fixed rate,
  optionally combined with a slower precession of that spin axis. A pure
  single-axis spin keeps the spin axis inertially fixed, so every face sees the
  sun at a constant mean aspect; adding the precession term lets the face
  aspects wander slowly the way an uncontrolled tumbling body's do, while the
  long-run average illumination of any face stays at the isotropic value 1/4.
* sun pointing -- a named patch normal is held on the sun direction.
* nadir pointing -- a named patch normal is held on the Earth-center direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orbit import OrbitSpec, OrbitState, orbit_state, orbital_period


@dataclass(frozen=True)
class FreeRotation:
    """Tumble at `rate_deg_s` about `axis`, with optional slow axis precession."""

    rate_deg_s: float
    axis: tuple[float, float, float] = (1.0, 1.0, 1.0)
    precession_rate_deg_s: float = 0.0
    precession_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.rate_deg_s < 0:
            raise ValueError("spin rate must be >= 0")
        if self.precession_rate_deg_s < 0:
            raise ValueError("precession rate must be >= 0")
        object.__setattr__(self, "axis", _unit(self.axis))
        object.__setattr__(self, "precession_axis", _unit(self.precession_axis))


@dataclass(frozen=True)
class SunPointing:
    pointing_patch: str


@dataclass(frozen=True)
class NadirPointing:
    pointing_patch: str


AttitudeMode = FreeRotation | SunPointing | NadirPointing


def _unit(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ValueError("zero vector cannot be normalized")
    return tuple((a / n).tolist())


def rotation_about(axis, angle_rad: float) -> np.ndarray:
    """Rodrigues rotation matrix for a rotation of angle_rad about a unit axis."""
    x, y, z = _unit(axis)
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def rotation_onto(v_from, v_to) -> np.ndarray:
    """Minimal rotation taking unit vector v_from onto unit vector v_to."""
    a = np.asarray(_unit(v_from))
    b = np.asarray(_unit(v_to))
    c = float(np.dot(a, b))
    if c > 1.0 - 1e-12:
        return np.eye(3)
    if c < -1.0 + 1e-12:
        # 180 deg turn: any axis perpendicular to a works
        helper = np.array([1.0, 0.0, 0.0])
        if abs(a[0]) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
        axis = np.cross(a, helper)
        return rotation_about(axis, math.pi)
    axis = np.cross(a, b)
    return rotation_about(axis, math.acos(max(-1.0, min(1.0, c))))


def attitude_at(mode: AttitudeMode, state: OrbitState, t: float,
                pointing_normal=None) -> np.ndarray:
    """Body-to-inertial rotation matrix at time t.

    For the pointing modes the caller resolves the named patch to its
    body-frame normal and passes it as `pointing_normal`.
    """
    if isinstance(mode, FreeRotation):
        spin = rotation_about(mode.axis, math.radians(mode.rate_deg_s) * t)
        if mode.precession_rate_deg_s == 0.0:
            return spin
        prec = rotation_about(mode.precession_axis,
                              math.radians(mode.precession_rate_deg_s) * t)
        return prec @ spin
    if pointing_normal is None:
        raise ValueError(f"{type(mode).__name__} needs the body-frame normal of "
                         f"patch {mode.pointing_patch!r}")
    if isinstance(mode, SunPointing):
        return rotation_onto(pointing_normal, state.sun_direction)
    if isinstance(mode, NadirPointing):
        nadir = -np.asarray(state.position)
        return rotation_onto(pointing_normal, nadir)
    raise TypeError(f"unknown attitude mode {mode!r}")


def attitude_series(mode: AttitudeMode, orbit: OrbitSpec, times: np.ndarray,
                    pointing_normal=None) -> np.ndarray:
    """Stack of body-to-inertial rotations, shape (len(times), 3, 3).

    Vectorized equivalent of calling attitude_at at each sample.
    """
    times = np.asarray(times, dtype=float)
    if isinstance(mode, FreeRotation):
        R = _rotation_series(mode.axis, math.radians(mode.rate_deg_s) * times)
        if mode.precession_rate_deg_s != 0.0:
            P = _rotation_series(mode.precession_axis,
                                 math.radians(mode.precession_rate_deg_s) * times)
            R = np.einsum("tij,tjk->tik", P, R)
        return R
    if isinstance(mode, SunPointing):
        R0 = attitude_at(mode, orbit_state(orbit, 0.0), 0.0, pointing_normal)
        return np.broadcast_to(R0, (len(times), 3, 3)).copy()
    if isinstance(mode, NadirPointing):
        out = np.empty((len(times), 3, 3))
        for k, t in enumerate(times):
            out[k] = attitude_at(mode, orbit_state(orbit, float(t)), float(t),
                                 pointing_normal)
        return out
    raise TypeError(f"unknown attitude mode {mode!r}")


def _rotation_series(axis, angles: np.ndarray) -> np.ndarray:
    x, y, z = _unit(axis)
    c = np.cos(angles)
    s = np.sin(angles)
    C = 1.0 - c
    R = np.empty((len(angles), 3, 3))
    R[:, 0, 0] = c + x * x * C
    R[:, 0, 1] = x * y * C - z * s
    R[:, 0, 2] = x * z * C + y * s
    R[:, 1, 0] = y * x * C + z * s
    R[:, 1, 1] = c + y * y * C
    R[:, 1, 2] = y * z * C - x * s
    R[:, 2, 0] = z * x * C - y * s
    R[:, 2, 1] = z * y * C + x * s
    R[:, 2, 2] = c + z * z * C
    return R


def incidence_cosine(patch_normal, attitude: np.ndarray, sun_direction) -> float:
    """Clamped cosine between the rotated patch normal and the sun direction."""
    n = attitude @ np.asarray(_unit(patch_normal))
    return max(0.0, float(np.dot(n, np.asarray(_unit(sun_direction)))))


def spin_average_factor(mode: AttitudeMode, orbit: OrbitSpec | None = None,
                        samples: int = 720) -> float:
    """Mean illumination factor of the relevant patch for power estimates.

    Free rotation is treated as isotropic tumbling, whose sphere average of the
    clamped cosine is exactly 1/4. Sun pointing holds the panel at factor 1.
    Nadir pointing is averaged numerically over one orbit of the given (or a
    default 400 km, beta = 0) orbit, counting eclipse samples as dark.
    """
    if isinstance(mode, FreeRotation):
        return 0.25
    if isinstance(mode, SunPointing):
        return 1.0
    if isinstance(mode, NadirPointing):
        if orbit is None:
            orbit = OrbitSpec(400.0, 51.6, 0.0, sun_direction=(1.0, 0.0, 0.0))
        period = orbital_period(orbit.altitude_km)
        total = 0.0
        for k in range(samples):
            st = orbit_state(orbit, period * k / samples)
            if st.in_eclipse:
                continue
            # the pointed patch looks at nadir; its sun cosine is -position . sun
            total += max(0.0, float(-np.dot(st.position, st.sun_direction)))
        return total / samples
    raise TypeError(f"unknown attitude mode {mode!r}")
