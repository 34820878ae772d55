#!/usr/bin/env python3
"""Calibrate the finish catalog against the reference temperature targets.

The optical properties of the shipped catalog are model parameters fitted so
the four reference scenarios land on the design-evaluation min/max ranges for
this vehicle (panel config a, body config d, tumbling, minimum power):

    hot  DSAP  [ 34,  68] C   +- 5 C on both bounds
    cold DSAP  [-43,  55] C   +- 5 C
    hot  BODY  [ 46,  49] C   +- 3 C
    cold BODY  [  0,  15] C   +- 3 C

plus a flatness requirement on the hot-case body (peak-to-peak < 3 K).

This script reruns that fit: coordinate descent over the finish alpha/epsilon
values, starting from the catalog in the model file, minimizing a quadratic
pull toward the window centers with a hinge penalty outside the windows.
Scenario geometry (tumble axes, sun azimuth, hot-case beta) is part of the
shipped scenario definitions and is held fixed here; refitting it as well is
possible by editing PARAMS below.

Usage:
    python scripts/calibrate_catalog.py [model.toml] [budget_seconds]

Prints the fitted catalog as a TOML fragment. It does not modify the model
file.
"""

import dataclasses
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cubesat_preflight import thermal
from cubesat_preflight.config import apply_surface_config, load_model
from cubesat_preflight.scenario import resolve

TARGETS = {
    ("hot", "a", "DSAP"): ((29.0, 39.0), (63.0, 73.0)),
    ("cold", "a", "DSAP"): ((-48.0, -38.0), (50.0, 60.0)),
    ("hot", "d", "BODY"): ((43.0, 49.0), (46.0, 52.0)),
    ("cold", "d", "BODY"): ((-3.0, 3.0), (12.0, 18.0)),
}
CENTERS = {k: ((lo[0] + lo[1]) / 2, (hi[0] + hi[1]) / 2) for k, (lo, hi) in TARGETS.items()}

# (finish, property): (min, max, step)
PARAMS = {
    ("aluminum_alodine", "alpha"): (0.25, 0.55, 0.01),
    ("aluminum_alodine", "epsilon"): (0.04, 0.16, 0.01),
    ("aluminum_alodine_rear", "alpha"): (0.35, 0.70, 0.02),
    ("aluminum_alodine_rear", "epsilon"): (0.10, 0.35, 0.005),
    ("polyimide_tape", "alpha"): (0.25, 0.55, 0.025),
    ("polyimide_tape", "epsilon"): (0.55, 0.85, 0.025),
    ("solar_cell", "alpha"): (0.86, 0.94, 0.005),
    ("solar_cell", "epsilon"): (0.76, 0.88, 0.01),
}


def with_catalog(model, values):
    finishes = dict(model.finishes)
    for (name, prop), v in values.items():
        old = finishes[name]
        finishes[name] = dataclasses.replace(old, **{prop: v})
    return dataclasses.replace(model, finishes=finishes)


def run_targets(model, dt=2.0):
    out = {}
    sim = model.scenarios.sim
    for (case, surface, node) in TARGETS:
        r = resolve(model, case, "spin")
        m = apply_surface_config(model, surface)
        h = thermal.run_periodic(m, r.orbit, r.env, r.mode, "min", dt_s=dt,
                                 eclipse_mode=sim.eclipse_mode,
                                 tolerance_k=sim.convergence_tolerance_k,
                                 max_orbits=sim.max_orbits,
                                 initial_temperature_k=sim.initial_temperature_k)
        t = h[node].temperatures_c
        out[(case, surface, node)] = (float(t.min()), float(t.max()),
                                      float(t.max() - t.min()))
    return out


def loss_of(results):
    loss = 0.0
    for key, (lo_w, hi_w) in TARGETS.items():
        lo, hi, pp = results[key]
        c_lo, c_hi = CENTERS[key]
        half = (lo_w[1] - lo_w[0]) / 2
        loss += ((lo - c_lo) / half) ** 2 + ((hi - c_hi) / half) ** 2
        loss += 50.0 * (max(0.0, lo_w[0] - lo) + max(0.0, lo - lo_w[1])
                        + max(0.0, hi_w[0] - hi) + max(0.0, hi - hi_w[1]))
    _, _, pp_hot_body = results[("hot", "d", "BODY")]
    loss += 10.0 * max(0.0, pp_hot_body - 2.5)
    return loss


def main():
    model_path = sys.argv[1] if len(sys.argv) > 1 else str(
        Path(__file__).resolve().parent.parent
        / "src" / "cubesat_preflight" / "data" / "hokushin1.toml")
    budget = float(sys.argv[2]) if len(sys.argv) > 2 else 600.0

    base = load_model(model_path)
    values = {key: getattr(base.finishes[key[0]], key[1]) for key in PARAMS}
    t0 = time.time()

    results = run_targets(with_catalog(base, values))
    best = loss_of(results)
    print(f"start loss {best:.3f}")
    for key, r in results.items():
        print(f"  {key}: [{r[0]:7.1f}, {r[1]:7.1f}] C")

    improved = True
    while improved and time.time() - t0 < budget:
        improved = False
        for key, (vmin, vmax, step) in PARAMS.items():
            for direction in (-1.0, 1.0):
                trial = dict(values)
                v = trial[key] + direction * step
                if not vmin <= v <= vmax:
                    continue
                trial[key] = round(v, 6)
                try:
                    r = run_targets(with_catalog(base, trial))
                except thermal.ConvergenceError:
                    continue
                l2 = loss_of(r)
                if l2 < best - 1e-9:
                    values, best, results = trial, l2, r
                    improved = True
                    print(f"  {key[0]}.{key[1]} = {trial[key]:.3f}  loss {best:.3f}")
            if time.time() - t0 > budget:
                break

    print(f"\nfinal loss {best:.3f} after {time.time() - t0:.0f} s")
    for key, r in results.items():
        win = TARGETS[key]
        ok = win[0][0] <= r[0] <= win[0][1] and win[1][0] <= r[1] <= win[1][1]
        print(f"  {key}: [{r[0]:7.1f}, {r[1]:7.1f}] C  {'within window' if ok else 'OUTSIDE'}")
    print("\nfitted catalog (TOML fragment):")
    by_finish = {}
    for (name, prop), v in values.items():
        by_finish.setdefault(name, {})[prop] = v
    for name in sorted(by_finish):
        print(f"[finishes.{name}]")
        for prop in ("alpha", "epsilon"):
            if prop in by_finish[name]:
                print(f"{prop} = {by_finish[name][prop]}")
        print('note = "calibrated"')
        print()


if __name__ == "__main__":
    main()
