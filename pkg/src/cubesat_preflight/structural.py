"""Simplified structural evaluation of hinged deployable panels.

The panels are idealized as 1-D Euler-Bernoulli beams bending about the width
axis (I = w t^3 / 12); nonstructural mass is smeared uniformly along the
length. Panels are chained by torsional-spring hinges: translation is
continuous across a joint while the two panel-end rotations couple through the
spring (or are merged outright for a rigid hinge). The inter-panel gap keeps
the panels from touching in hardware; it carries no structure, so it enters
only the reported span and node coordinates.

Boundary conditions:

* ``clamped-free``   root translation and rotation fixed (deployed cantilever)
* ``pinned-free``    root translation fixed; root rotation grounded through a
                     root-hinge spring when one is given, free otherwise
* ``pinned-pinned``  translation fixed at both ends
* ``joint-pinned``   translation fixed at both joints of the edge panels
                     (stowed configuration held at its hinge lines)
* ``free-free``      unconstrained; rigid-body modes are reported explicitly
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh, solve

from .config import HingeSpec, Material, PanelSpec
from .constants import STANDARD_GRAVITY

BOUNDARIES = ("clamped-free", "pinned-free", "pinned-pinned", "joint-pinned", "free-free")


@dataclass(frozen=True)
class BeamPanel:
    """One panel resolved to the quantities the beam model needs."""

    length_m: float
    width_m: float
    thickness_m: float
    youngs_modulus_pa: float
    total_mass_kg: float

    @classmethod
    def from_spec(cls, spec: PanelSpec, material: Material) -> "BeamPanel":
        return cls(spec.length_m, spec.width_m, spec.thickness_m,
                   material.youngs_modulus_pa, spec.total_mass_kg)

    @property
    def second_moment_m4(self) -> float:
        return self.width_m * self.thickness_m**3 / 12.0

    @property
    def section_modulus_m3(self) -> float:
        return self.width_m * self.thickness_m**2 / 6.0

    @property
    def mass_per_length(self) -> float:
        return self.total_mass_kg / self.length_m

    @property
    def bending_stiffness(self) -> float:
        return self.youngs_modulus_pa * self.second_moment_m4


@dataclass
class BeamChainModel:
    """Assembled stiffness/mass system for a chain of hinged panels."""

    panels: tuple[BeamPanel, ...]
    hinges: tuple[HingeSpec, ...]
    gap_m: float
    boundary: str
    elements_per_panel: int
    stiffness: np.ndarray          # full (unconstrained) K
    mass: np.ndarray               # full M
    node_x_m: np.ndarray           # x of every mesh node (gaps included)
    node_w_dof: np.ndarray         # w DOF index per mesh node
    node_t_dof: np.ndarray         # theta DOF index per mesh node
    element_table: list            # (panel_index, node_index, length, EI, mu, Z)
    fixed_dofs: tuple[int, ...]

    @property
    def span_m(self) -> float:
        return sum(p.length_m for p in self.panels) + self.gap_m * (len(self.panels) - 1)

    @property
    def n_dofs(self) -> int:
        return self.stiffness.shape[0]

    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[list(self.fixed_dofs)] = False
        return np.nonzero(mask)[0]


@dataclass(frozen=True)
class ModalResult:
    frequencies_hz: tuple[float, ...]
    n_rigid_modes: int
    mode_shapes: np.ndarray        # (n_nodes, n_modes) transverse displacement
    node_x_m: np.ndarray


@dataclass(frozen=True)
class StaticResult:
    g_level: float
    max_deflection_m: float
    deflection_location_m: float
    max_stress_pa: float
    stress_location_m: float


_RIGID_EIG_TOL = 1e-4  # rad^2/s^2; eigenvalues below this count as rigid modes


def _element_k(ei: float, L: float) -> np.ndarray:
    return (ei / L**3) * np.array([
        [12.0, 6.0 * L, -12.0, 6.0 * L],
        [6.0 * L, 4.0 * L**2, -6.0 * L, 2.0 * L**2],
        [-12.0, -6.0 * L, 12.0, -6.0 * L],
        [6.0 * L, 2.0 * L**2, -6.0 * L, 4.0 * L**2],
    ])


def _element_m(mu: float, L: float) -> np.ndarray:
    return (mu * L / 420.0) * np.array([
        [156.0, 22.0 * L, 54.0, -13.0 * L],
        [22.0 * L, 4.0 * L**2, 13.0 * L, -3.0 * L**2],
        [54.0, 13.0 * L, 156.0, -22.0 * L],
        [-13.0 * L, -3.0 * L**2, -22.0 * L, 4.0 * L**2],
    ])


def build_chain(panels, hinges=(), boundary: str = "clamped-free",
                elements_per_panel: int = 32, gap_m: float = 0.0,
                root_hinge_stiffness: float | None = None) -> BeamChainModel:
    """Assemble the chain. `panels` is a sequence of BeamPanel.

    `hinges` hold HingeSpec entries; joint j sits between panel j-1 and panel
    j (joint 0 is the root). Interior joints without a hinge entry are rigid.
    A root hinge (location 0 or `root_hinge_stiffness`) grounds the root
    rotation through a spring and only acts under the pinned-free boundary.
    """
    panels = tuple(panels)
    if not panels:
        raise ValueError("need at least one panel")
    if elements_per_panel < 8:
        raise ValueError(f"elements_per_panel must be >= 8, got {elements_per_panel}")
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}; options: {BOUNDARIES}")
    hinge_map: dict[int, float | None] = {}
    for h in hinges:
        if not 0 <= h.location <= len(panels) - 1:
            raise ValueError(f"hinge location {h.location} outside joints 0..{len(panels) - 1}")
        hinge_map[h.location] = h.stiffness_nm_rad
    if root_hinge_stiffness is not None:
        hinge_map[0] = root_hinge_stiffness

    epp = elements_per_panel
    # every panel contributes epp+1 mesh nodes; at a junction the panel-start
    # node coincides with the previous panel's end node (shared translation)
    n_nodes = len(panels) * (epp + 1)
    node_x = np.empty(n_nodes)
    node_w = np.empty(n_nodes, dtype=int)
    node_t = np.empty(n_nodes, dtype=int)

    next_dof = 0
    x = 0.0
    node = -1
    panel_start_node: list[int] = []
    spring_pairs: list[tuple[int, int, float]] = []  # (theta_a, theta_b, k)
    for p_idx, panel in enumerate(panels):
        dx = panel.length_m / epp
        if p_idx == 0:
            node = 0
            node_x[0] = 0.0
            node_w[0] = next_dof
            node_t[0] = next_dof + 1
            next_dof += 2
        else:
            prev = node
            x += gap_m
            node += 1
            node_x[node] = x
            node_w[node] = node_w[prev]  # translation continuous across the joint
            stiff = hinge_map.get(p_idx)
            if p_idx in hinge_map and stiff is not None:
                node_t[node] = next_dof
                next_dof += 1
                spring_pairs.append((int(node_t[prev]), int(node_t[node]), stiff))
            else:
                node_t[node] = node_t[prev]  # rigid joint shares the rotation too
        panel_start_node.append(node)
        for _ in range(epp):
            x += dx
            node += 1
            node_x[node] = x
            node_w[node] = next_dof
            node_t[node] = next_dof + 1
            next_dof += 2

    K = np.zeros((next_dof, next_dof))
    M = np.zeros((next_dof, next_dof))
    element_table = []
    for p_idx, panel in enumerate(panels):
        dx = panel.length_m / epp
        ke = _element_k(panel.bending_stiffness, dx)
        me = _element_m(panel.mass_per_length, dx)
        start = panel_start_node[p_idx]
        for e in range(epp):
            a = start + e
            dofs = [node_w[a], node_t[a], node_w[a + 1], node_t[a + 1]]
            for i in range(4):
                for j in range(4):
                    K[dofs[i], dofs[j]] += ke[i, j]
                    M[dofs[i], dofs[j]] += me[i, j]
            element_table.append((p_idx, a, dx, panel.bending_stiffness,
                                  panel.mass_per_length, panel.section_modulus_m3))

    root_spring = hinge_map.get(0, None)
    for ta, tb, k in spring_pairs:
        K[ta, ta] += k
        K[tb, tb] += k
        K[ta, tb] -= k
        K[tb, ta] -= k

    fixed: list[int] = []
    first, last = 0, n_nodes - 1
    if boundary == "clamped-free":
        fixed = [node_w[first], node_t[first]]
    elif boundary == "pinned-free":
        fixed = [node_w[first]]
        if root_spring is not None:
            K[node_t[first], node_t[first]] += root_spring
    elif boundary == "pinned-pinned":
        fixed = [node_w[first], node_w[last]]
    elif boundary == "joint-pinned":
        joint_nodes = {first, last}
        joint_nodes.add(epp)                       # far joint of the first panel
        joint_nodes.add(last - epp)                # near joint of the last panel
        fixed = sorted({int(node_w[j]) for j in joint_nodes})
    # free-free: nothing fixed

    return BeamChainModel(
        panels=panels, hinges=tuple(hinges), gap_m=gap_m, boundary=boundary,
        elements_per_panel=epp, stiffness=K, mass=M, node_x_m=node_x,
        node_w_dof=node_w, node_t_dof=node_t, element_table=element_table,
        fixed_dofs=tuple(dict.fromkeys(fixed)),
    )


def modal_frequencies(model: BeamChainModel, n: int = 4) -> ModalResult:
    """First n natural frequencies and transverse mode shapes."""
    free = model.free_dofs()
    K = model.stiffness[np.ix_(free, free)]
    M = model.mass[np.ix_(free, free)]
    try:
        eigvals, eigvecs = eigh(K, M)
    except LinAlgError as exc:
        raise ValueError(f"eigen-solve failed: {exc}") from exc
    eigvals = np.maximum(eigvals, 0.0)
    n_rigid = int(np.count_nonzero(eigvals < _RIGID_EIG_TOL))
    freqs = np.sqrt(eigvals) / (2.0 * math.pi)
    n = min(n, len(freqs))

    shapes = np.zeros((len(model.node_x_m), n))
    for mode in range(n):
        full = np.zeros(model.n_dofs)
        full[free] = eigvecs[:, mode]
        shapes[:, mode] = full[model.node_w_dof]
    return ModalResult(
        frequencies_hz=tuple(float(f) for f in freqs[:n]),
        n_rigid_modes=n_rigid,
        mode_shapes=shapes,
        node_x_m=model.node_x_m.copy(),
    )


def static_load(model: BeamChainModel, g_level: float) -> StaticResult:
    """Deflection and bending stress under a uniform out-of-plane g load.

    Within each element the internal moment is recovered exactly for the
    uniform load (end moments from the nodal solution plus the local
    particular solution), so stresses converge with the analytic formulas.
    """
    if not model.fixed_dofs:
        raise ValueError("static solve needs a constrained model")
    accel = g_level * STANDARD_GRAVITY
    f = np.zeros(model.n_dofs)
    for p_idx, a, L, ei, mu, Z in model.element_table:
        q = mu * accel
        fe = np.array([q * L / 2.0, q * L**2 / 12.0, q * L / 2.0, -q * L**2 / 12.0])
        dofs = [model.node_w_dof[a], model.node_t_dof[a],
                model.node_w_dof[a + 1], model.node_t_dof[a + 1]]
        for i in range(4):
            f[dofs[i]] += fe[i]

    free = model.free_dofs()
    K = model.stiffness[np.ix_(free, free)]
    try:
        u_free = solve(K, f[free], assume_a="sym")
    except LinAlgError as exc:
        raise ValueError(f"static solve failed (singular system): {exc}") from exc
    u = np.zeros(model.n_dofs)
    u[free] = u_free

    max_w = 0.0
    w_loc = 0.0
    max_stress = 0.0
    s_loc = 0.0
    xi = np.linspace(0.0, 1.0, 9)
    for p_idx, a, L, ei, mu, Z in model.element_table:
        q = mu * accel
        w1, t1 = u[model.node_w_dof[a]], u[model.node_t_dof[a]]
        w2, t2 = u[model.node_w_dof[a + 1]], u[model.node_t_dof[a + 1]]
        x = xi * L
        # Hermite interpolation plus the quartic particular term of the
        # uniform load (zero value/slope at both ends)
        h1 = 1.0 - 3.0 * xi**2 + 2.0 * xi**3
        h2 = L * (xi - 2.0 * xi**2 + xi**3)
        h3 = 3.0 * xi**2 - 2.0 * xi**3
        h4 = L * (-xi**2 + xi**3)
        w = w1 * h1 + t1 * h2 + w2 * h3 + t2 * h4 + q * x**2 * (L - x) ** 2 / (24.0 * ei)
        # curvature of the same field -> exact quadratic moment
        d1 = (-6.0 + 12.0 * xi) / L**2
        d2 = (-4.0 + 6.0 * xi) / L
        d3 = (6.0 - 12.0 * xi) / L**2
        d4 = (-2.0 + 6.0 * xi) / L
        moment = ei * (w1 * d1 + t1 * d2 + w2 * d3 + t2 * d4) \
            + q * (6.0 * x**2 - 6.0 * L * x + L**2) / 12.0
        i_w = int(np.argmax(np.abs(w)))
        if abs(w[i_w]) > max_w:
            max_w = float(abs(w[i_w]))
            w_loc = float(model.node_x_m[a] + x[i_w])
        stress = np.abs(moment) / Z
        i_s = int(np.argmax(stress))
        if stress[i_s] > max_stress:
            max_stress = float(stress[i_s])
            s_loc = float(model.node_x_m[a] + x[i_s])
    return StaticResult(
        g_level=g_level,
        max_deflection_m=max_w,
        deflection_location_m=w_loc,
        max_stress_pa=max_stress,
        stress_location_m=s_loc,
    )


def allowable_acceleration(model: BeamChainModel, allowable_stress_pa: float) -> float:
    """G level at which the peak bending stress reaches the allowable."""
    if allowable_stress_pa < 0:
        raise ValueError("allowable stress must be >= 0")
    ref = static_load(model, 1.0)
    if ref.max_stress_pa <= 0:
        raise ValueError("no bending stress develops per G; direction is unloaded")
    return allowable_stress_pa / ref.max_stress_pa


@dataclass(frozen=True)
class RailLoadCheck:
    force_n: float
    stress_pa: float
    allowable_pa: float
    passed: bool


def rail_load_check(rail_force_n: float, rail_section_area_m2: float,
                    material: Material, factor: float = 0.30) -> RailLoadCheck:
    """Compressive rail-end load against the allowable stress."""
    if rail_section_area_m2 <= 0:
        raise ValueError("rail section area must be > 0")
    from .config import allowable_stress as _allow
    stress = rail_force_n / rail_section_area_m2
    allowable = _allow(material, factor)
    return RailLoadCheck(rail_force_n, stress, allowable, stress < allowable)


@dataclass(frozen=True)
class EnvelopeCheck:
    total_excursion_m: float
    limit_m: float
    passed: bool


def envelope_check(deflection_m: float, limit_m: float,
                   stack_offset_m: float = 0.0) -> EnvelopeCheck:
    """Deployables must stay strictly inside the allowed envelope."""
    if limit_m <= 0:
        raise ValueError("envelope limit must be > 0")
    total = deflection_m + stack_offset_m
    return EnvelopeCheck(total, limit_m, total < limit_m)


def calibrate_hinge_stiffness(panel: BeamPanel, target_hz: float, *,
                              elements_per_panel: int = 32,
                              k_low: float = 1e-4, k_high: float = 1e7,
                              tol_hz: float = 1e-4) -> tuple[float, float]:
    """Fit the root-hinge torsional stiffness so the first frequency hits target.

    Models a single panel pinned at the root with a grounded rotation spring;
    the first frequency rises monotonically from ~0 (free pivot) to the
    clamped-free value as the spring stiffens. Returns (stiffness, achieved
    frequency). The fitted value is diagnostic: it reconstructs an observed
    frequency, it is not a measured property.
    """
    def first_freq(k: float) -> float:
        m = build_chain([panel], boundary="pinned-free",
                        elements_per_panel=elements_per_panel,
                        root_hinge_stiffness=k)
        return modal_frequencies(m, 1).frequencies_hz[0]

    f_hi = first_freq(k_high)
    if target_hz >= f_hi:
        raise ValueError(
            f"target {target_hz} Hz is at or above the clamped-free limit {f_hi:.2f} Hz")
    if target_hz <= first_freq(k_low):
        raise ValueError(f"target {target_hz} Hz is below the soft-spring limit")
    lo, hi = k_low, k_high
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        f_mid = first_freq(mid)
        if abs(f_mid - target_hz) < tol_hz:
            return mid, f_mid
        if f_mid < target_hz:
            lo = mid
        else:
            hi = mid
    return mid, f_mid
