"""Command-line interface.

Subcommands: thermal, power, vib (grms|psd|mag|resonance), struct
(modal|static|check|calibrate), sweep.

Exit codes: 0 success, 1 input/validation/I-O error, 2 requirement-check
failure, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, report, scenario, structural, thermal, vibration
from .config import (ConfigError, apply_surface_config, load_model, validate_model)
from .power import budget_report
from .structural import BeamPanel

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REQUIREMENT = 2
EXIT_NO_CONVERGENCE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubesat-preflight",
        description="Pre-flight thermal, power, vibration, and structural checks "
                    "for small spacecraft.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_th = sub.add_parser("thermal", help="orbital single-node thermal simulation")
    p_th.add_argument("--model", required=True)
    p_th.add_argument("--case", default="hot")
    p_th.add_argument("--surface", default="a")
    p_th.add_argument("--mode", default="spin")
    p_th.add_argument("--power", choices=["min", "max", "none"], default="min")
    p_th.add_argument("--dt", type=float, default=None, help="time step in seconds")
    p_th.add_argument("--eclipse", choices=["geom", "fixed60_30"], default=None)
    p_th.add_argument("--out", default="out")

    p_pw = sub.add_parser("power", help="generation-vs-consumption budget")
    p_pw.add_argument("--model", required=True)
    p_pw.add_argument("--case", default="cold")
    p_pw.add_argument("--eclipse", choices=["geom", "fixed60_30"], default="fixed60_30")
    p_pw.add_argument("--sun-min", type=float, default=None)
    p_pw.add_argument("--eclipse-min", type=float, default=None)
    p_pw.add_argument("--out", default=None)

    p_vib = sub.add_parser("vib", help="random-vibration data processing")
    vib_sub = p_vib.add_subparsers(dest="vib_command", required=True)

    v_grms = vib_sub.add_parser("grms", help="Grms of a breakpoint profile")
    v_grms.add_argument("--profile", required=True)
    v_grms.add_argument("--from", dest="f_lo", type=float, required=True)
    v_grms.add_argument("--to", dest="f_hi", type=float, required=True)
    v_grms.add_argument("--out", default=None)

    v_psd = vib_sub.add_parser("psd", help="Welch PSD of measured channels")
    v_psd.add_argument("--data", required=True)
    v_psd.add_argument("--segment", type=int, default=None)
    v_psd.add_argument("--overlap", type=float, default=0.5)
    v_psd.add_argument("--window", default="hann")
    v_psd.add_argument("--out", default="out")

    v_mag = vib_sub.add_parser("mag", help="response magnification vs a reference channel")
    v_mag.add_argument("--data", required=True)
    v_mag.add_argument("--reference", required=True)
    v_mag.add_argument("--segment", type=int, default=None)
    v_mag.add_argument("--out", default="out")

    v_res = vib_sub.add_parser("resonance", help="first-resonance identification and 60 Hz gate")
    v_res.add_argument("--data", required=True)
    v_res.add_argument("--reference", required=True)
    v_res.add_argument("--model", default=None,
                       help="model file; its minimum-frequency requirement overrides --limit")
    v_res.add_argument("--f-min", type=float, default=20.0)
    v_res.add_argument("--limit", type=float, default=60.0)
    v_res.add_argument("--prominence", type=float, default=1.5)
    v_res.add_argument("--segment", type=int, default=None)
    v_res.add_argument("--out", default="out")

    p_st = sub.add_parser("struct", help="beam-chain structural evaluation")
    st_sub = p_st.add_subparsers(dest="struct_command", required=True)

    s_modal = st_sub.add_parser("modal", help="natural frequencies and mode shapes")
    s_modal.add_argument("--model", required=True)
    s_modal.add_argument("-n", "--modes", type=int, default=4)
    s_modal.add_argument("--out", default="out")

    s_static = st_sub.add_parser("static", help="static g-load deflection and stress")
    s_static.add_argument("--model", required=True)
    s_static.add_argument("--g", type=float, default=1.0)
    s_static.add_argument("--out", default="out")

    s_check = st_sub.add_parser("check", help="requirement gates (frequency, rail, envelope)")
    s_check.add_argument("--model", default=None)
    s_check.add_argument("--first-freq", type=float, default=None,
                         help="measured/analyzed first natural frequency in Hz")
    s_check.add_argument("--limit", type=float, default=60.0)
    s_check.add_argument("--g", type=float, default=1.0,
                         help="g level for the envelope deflection check")
    s_check.add_argument("--out", default=None)

    s_cal = st_sub.add_parser("calibrate",
                              help="fit a root-hinge stiffness to a target first frequency")
    s_cal.add_argument("--model", required=True)
    s_cal.add_argument("--panel", default=None, help="panel name (default: first defined)")
    s_cal.add_argument("--target", type=float, required=True)
    s_cal.add_argument("--out", default=None)

    p_sw = sub.add_parser("sweep", help="cartesian scenario sweep")
    p_sw.add_argument("--model", required=True)
    p_sw.add_argument("--cases", default="hot,cold")
    p_sw.add_argument("--surfaces", default="a,d")
    p_sw.add_argument("--modes", default="spin")
    p_sw.add_argument("--power", choices=["min", "max", "none"], default="min")
    p_sw.add_argument("--dt", type=float, default=None)
    p_sw.add_argument("--eclipse", choices=["geom", "fixed60_30"], default=None)
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.add_argument("--out", default="out")
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    handlers = {
        "thermal": _cmd_thermal,
        "power": _cmd_power,
        "vib": _cmd_vib,
        "struct": _cmd_struct,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except thermal.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        target = getattr(exc, "filename", None) or ""
        print(f"error: I/O failure {target}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


# ---------------------------------------------------------------------------

def _load_validated(path: str):
    model = load_model(path)
    rep = validate_model(model)
    if not rep.ok:
        raise ConfigError("model validation failed:\n  " + "\n  ".join(rep.errors))
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return model


def _bands_for_node(model, node_name):
    return tuple((label, lo, hi) for label, lo, hi in model.requirements.temperature_bands_k
                 if label == node_name)


def _run_thermal_scenario(model, case: str, surface: str, mode: str, power: str,
                          dt: float | None, eclipse: str | None):
    resolved = scenario.resolve(model, case, mode)
    sim = model.scenarios.sim
    m = apply_surface_config(model, surface)
    histories = thermal.run_periodic(
        m, resolved.orbit, resolved.env, resolved.mode, power,
        dt_s=dt if dt is not None else sim.dt_s,
        eclipse_mode=eclipse if eclipse is not None else sim.eclipse_mode,
        tolerance_k=sim.convergence_tolerance_k,
        max_orbits=sim.max_orbits,
        initial_temperature_k=sim.initial_temperature_k)
    summaries = {name: thermal.summarize(h, _bands_for_node(model, name))
                 for name, h in histories.items()}
    return resolved, histories, summaries


def _cmd_thermal(args) -> int:
    model = _load_validated(args.model)
    resolved, histories, summaries = _run_thermal_scenario(
        model, args.case, args.surface, args.mode, args.power, args.dt, args.eclipse)
    sim = model.scenarios.sim
    meta = {
        "case": args.case, "surface": args.surface, "mode": args.mode,
        "power": args.power,
        "eclipse": args.eclipse if args.eclipse is not None else sim.eclipse_mode,
        "dt_s": args.dt if args.dt is not None else sim.dt_s,
        "beta_deg": resolved.case.beta_deg,
        "solar_flux_w_m2": resolved.env.solar_flux_w_m2,
    }
    out = Path(args.out)
    report.write_csv(out / "history.csv", report.HISTORY_HEADER, report.history_rows(histories))
    report.write_csv(out / "ranges.csv", report.RANGE_BAR_HEADER,
                     report.range_bar_rows(args.case, args.surface, args.mode, summaries))
    summary = report.thermal_summary_dict(summaries, meta)
    report.validate_against(summary, report.load_summary_schema())
    report.write_json(out / "summary.json", summary)
    manifest = report.RunManifest.create("thermal", args.model, meta)
    report.write_json(out / "manifest.json", manifest.as_dict())

    for name in sorted(summaries):
        s = summaries[name]
        status = "PASS" if s.passed else "FAIL"
        print(f"{name}: [{s.t_min_c:.1f}, {s.t_max_c:.1f}] C over one orbit "
              f"({s.orbits_run} orbits to converge)  {status}")
    return EXIT_OK if summary["passed"] else EXIT_REQUIREMENT


def _cmd_power(args) -> int:
    model = _load_validated(args.model)
    resolved = scenario.resolve(model, args.case, _first_attitude(model))
    sun_min, ecl_min = thermal.sun_eclipse_minutes(resolved.orbit, args.eclipse)
    if args.sun_min is not None:
        sun_min = args.sun_min
    if args.eclipse_min is not None:
        ecl_min = args.eclipse_min
    rep = budget_report(model, sun_min, ecl_min)
    d = rep.as_dict()
    print(f"cell peak           {rep.cell_peak_w:7.2f} W  (datasheet {rep.cell_peak_datasheet_w:.2f} W)")
    print(f"string peak         {rep.string_peak_w:7.2f} W")
    print(f"string tumbling avg {rep.spin_average_string_w:7.2f} W")
    print(f"max simultaneous    {rep.max_simultaneous_w:7.2f} W")
    print(f"required in sun     {rep.required_w:7.2f} W  (sun {sun_min:.1f} min, eclipse {ecl_min:.1f} min)")
    print(f"per-string required {rep.per_string_required_w:7.2f} W")
    print(f"per-string headroom {rep.headroom_per_string_w:7.2f} W  (rounded chain: {rep.rounded['headroom_per_string_w']:.2f} W)")
    print(f"margin              {rep.margin_w:7.2f} W")
    if args.out:
        out = Path(args.out)
        report.write_json(out / "budget.json", d)
        manifest = report.RunManifest.create("power", args.model, {
            "case": args.case, "eclipse": args.eclipse,
            "sun_min": sun_min, "eclipse_min": ecl_min})
        report.write_json(out / "manifest.json", manifest.as_dict())
    return EXIT_OK


def _first_attitude(model) -> str:
    if not model.scenarios.attitudes:
        raise ConfigError("model defines no attitude settings")
    return next(iter(model.scenarios.attitudes))


def _cmd_vib(args) -> int:
    return {
        "grms": _vib_grms, "psd": _vib_psd, "mag": _vib_mag, "resonance": _vib_resonance,
    }[args.vib_command](args)


def _vib_grms(args) -> int:
    profile = vibration.read_profile_csv(args.profile)
    value = vibration.grms(profile, args.f_lo, args.f_hi)
    print(f"{value:.3f} Grms over {args.f_lo:g}-{args.f_hi:g} Hz")
    if args.out:
        out = Path(args.out)
        report.write_json(out / "grms.json", {
            "profile": str(args.profile), "from_hz": args.f_lo, "to_hz": args.f_hi,
            "grms": value})
        manifest = report.RunManifest.create("vib grms", None, {
            "profile": str(args.profile), "from_hz": args.f_lo, "to_hz": args.f_hi})
        report.write_json(out / "manifest.json", manifest.as_dict())
    return EXIT_OK


def _estimate_all(args):
    channels = vibration.read_timeseries_csv(args.data)
    return [vibration.estimate_psd(ts, segment_length=args.segment) for ts in channels]


def _vib_psd(args) -> int:
    estimates = _estimate_all(args)
    out = Path(args.out)
    header = ["freq_hz"] + [e.channel for e in estimates]
    rows = []
    for i in range(len(estimates[0].frequencies_hz)):
        rows.append([f"{estimates[0].frequencies_hz[i]:.6f}"]
                    + [f"{e.psd_g2_hz[i]:.8e}" for e in estimates])
    report.write_csv(out / "psd.csv", header, rows)
    manifest = report.RunManifest.create("vib psd", None, {
        "data": str(args.data), "segment": args.segment})
    report.write_json(out / "manifest.json", manifest.as_dict())
    print(f"wrote PSD for {len(estimates)} channel(s) to {out / 'psd.csv'}")
    return EXIT_OK


def _mag_spectra(args):
    estimates = _estimate_all(args)
    by_name = {e.channel: e for e in estimates}
    if args.reference not in by_name:
        raise ValueError(f"reference channel {args.reference!r} not in data "
                         f"(channels: {sorted(by_name)})")
    ref = by_name[args.reference]
    mags = [vibration.response_mag(e, ref) for e in estimates if e.channel != ref.channel]
    if not mags:
        raise ValueError("data contains no channels besides the reference")
    return mags


def _vib_mag(args) -> int:
    mags = _mag_spectra(args)
    out = Path(args.out)
    header = ["freq_hz"] + [m.channel for m in mags]
    rows = []
    for i in range(len(mags[0].frequencies_hz)):
        row = [f"{mags[0].frequencies_hz[i]:.6f}"]
        for m in mags:
            row.append(f"{m.magnification[i]:.6f}" if m.valid[i] else "")
        rows.append(row)
    report.write_csv(out / "mag.csv", header, rows)
    manifest = report.RunManifest.create("vib mag", None, {
        "data": str(args.data), "reference": args.reference, "segment": args.segment})
    report.write_json(out / "manifest.json", manifest.as_dict())
    print(f"wrote magnification spectra for {len(mags)} channel(s) to {out / 'mag.csv'}")
    return EXIT_OK


def _vib_resonance(args) -> int:
    limit = args.limit
    if args.model is not None:
        limit = _load_validated(args.model).requirements.min_first_frequency_hz
    mags = _mag_spectra(args)
    resonances = []
    missing = []
    for m in mags:
        try:
            f = vibration.first_resonance(m, f_min=args.f_min, prominence=args.prominence)
            resonances.append((m.channel, f))
        except vibration.NoPeakError:
            missing.append(m.channel)
    checks = vibration.min_frequency_check(resonances, limit)
    payload = {
        "limit_hz": limit,
        "channels": [{"channel": c.channel, "first_resonance_hz": c.first_resonance_hz,
                      "pass": c.passed} for c in checks],
        "no_peak": missing,
        "passed": all(c.passed for c in checks),
    }
    out = Path(args.out)
    report.write_json(out / "resonance.json", payload)
    manifest = report.RunManifest.create("vib resonance", None, {
        "data": str(args.data), "reference": args.reference,
        "f_min": args.f_min, "limit": limit})
    report.write_json(out / "manifest.json", manifest.as_dict())
    for c in checks:
        print(f"{c.channel}: first resonance {c.first_resonance_hz:.1f} Hz "
              f"{'PASS' if c.passed else 'FAIL'} (limit {limit:g} Hz)")
    for ch in missing:
        print(f"{ch}: no qualifying peak")
    return EXIT_OK if payload["passed"] else EXIT_REQUIREMENT


def _build_model_chain(model):
    if model.chain is None:
        raise ConfigError("model has no panels.chain section")
    panels = []
    for name in model.chain.panel_names:
        spec = model.panels[name]
        panels.append(BeamPanel.from_spec(spec, model.materials[spec.material]))
    return structural.build_chain(
        panels, model.chain.hinges, boundary=model.chain.boundary,
        elements_per_panel=model.chain.elements_per_panel, gap_m=model.chain.gap_m,
        root_hinge_stiffness=model.chain.root_hinge_stiffness_nm_rad)


def _cmd_struct(args) -> int:
    return {
        "modal": _struct_modal, "static": _struct_static,
        "check": _struct_check, "calibrate": _struct_calibrate,
    }[args.struct_command](args)


def _struct_modal(args) -> int:
    model = _load_validated(args.model)
    chain = _build_model_chain(model)
    result = structural.modal_frequencies(chain, args.modes)
    out = Path(args.out)
    report.write_json(out / "modal.json", {
        "frequencies_hz": list(result.frequencies_hz),
        "n_rigid_modes": result.n_rigid_modes,
        "boundary": chain.boundary,
        "span_m": chain.span_m,
    })
    header = ["x_m"] + [f"mode_{i+1}" for i in range(result.mode_shapes.shape[1])]
    rows = [[f"{result.node_x_m[i]:.6f}"]
            + [f"{result.mode_shapes[i, j]:.6e}" for j in range(result.mode_shapes.shape[1])]
            for i in range(len(result.node_x_m))]
    report.write_csv(out / "modes.csv", header, rows)
    manifest = report.RunManifest.create("struct modal", args.model, {"modes": args.modes})
    report.write_json(out / "manifest.json", manifest.as_dict())
    freqs = ", ".join(f"{f:.2f}" for f in result.frequencies_hz)
    print(f"frequencies [Hz]: {freqs}  (rigid modes: {result.n_rigid_modes})")
    return EXIT_OK


def _struct_static(args) -> int:
    model = _load_validated(args.model)
    chain = _build_model_chain(model)
    result = structural.static_load(chain, args.g)
    out = Path(args.out)
    report.write_json(out / "static.json", {
        "g_level": result.g_level,
        "max_deflection_m": result.max_deflection_m,
        "deflection_location_m": result.deflection_location_m,
        "max_stress_pa": result.max_stress_pa,
        "stress_location_m": result.stress_location_m,
    })
    manifest = report.RunManifest.create("struct static", args.model, {"g": args.g})
    report.write_json(out / "manifest.json", manifest.as_dict())
    print(f"max deflection {result.max_deflection_m * 1000:.3f} mm at "
          f"{result.deflection_location_m:.3f} m; max stress "
          f"{result.max_stress_pa / 1e6:.3f} MPa")
    return EXIT_OK


def _struct_check(args) -> int:
    checks = []
    model = None
    if args.model is not None:
        model = _load_validated(args.model)
        limit = model.requirements.min_first_frequency_hz
    else:
        limit = args.limit

    if args.first_freq is not None:
        first = args.first_freq
    elif model is not None and model.chain is not None:
        chain = _build_model_chain(model)
        first = structural.modal_frequencies(chain, 1).frequencies_hz[0]
    else:
        print("error: give --first-freq or a --model with a panels.chain section",
              file=sys.stderr)
        return EXIT_INPUT
    checks.append({"check": "first_frequency",
                   "value_hz": first, "limit_hz": limit, "pass": first > limit})

    if model is not None:
        from .config import allowable_stress
        req = model.requirements
        mat = model.materials[model.panels[model.chain.panel_names[0]].material] \
            if model.chain else next(iter(model.materials.values()))
        rail_area = req.rail_section_m[0] * req.rail_section_m[1]
        rail = structural.rail_load_check(req.rail_load_n, rail_area, mat,
                                          req.allowable_stress_factor)
        checks.append({"check": "rail_load", "stress_pa": rail.stress_pa,
                       "allowable_pa": rail.allowable_pa, "pass": rail.passed})
        if model.chain is not None:
            chain = _build_model_chain(model)
            static = structural.static_load(chain, args.g)
            env = structural.envelope_check(static.max_deflection_m, req.envelope_limit_m)
            checks.append({"check": "envelope", "g_level": args.g,
                           "deflection_m": static.max_deflection_m,
                           "limit_m": req.envelope_limit_m, "pass": env.passed})
            allow = allowable_stress(mat, req.allowable_stress_factor)
            checks.append({"check": "allowable_acceleration",
                           "allowable_g": structural.allowable_acceleration(chain, allow),
                           "informational": True, "pass": True})

    passed = all(c["pass"] for c in checks)
    if args.out:
        report.write_json(Path(args.out) / "check.json",
                          {"checks": checks, "passed": passed})
        manifest = report.RunManifest.create("struct check", args.model, {
            "first_freq": args.first_freq, "limit": limit, "g": args.g})
        report.write_json(Path(args.out) / "manifest.json", manifest.as_dict())
    for c in checks:
        label = c["check"]
        print(f"{label}: {'PASS' if c['pass'] else 'FAIL'}")
    return EXIT_OK if passed else EXIT_REQUIREMENT


def _struct_calibrate(args) -> int:
    model = _load_validated(args.model)
    panel_name = args.panel or next(iter(model.panels))
    spec = model.panels[panel_name]
    panel = BeamPanel.from_spec(spec, model.materials[spec.material])
    stiffness, achieved = structural.calibrate_hinge_stiffness(panel, args.target)
    print(f"panel {panel_name}: root-hinge stiffness {stiffness:.4f} N*m/rad "
          f"gives first frequency {achieved:.3f} Hz (target {args.target:g} Hz)")
    if args.out:
        report.write_json(Path(args.out) / "calibrate.json", {
            "panel": panel_name, "target_hz": args.target,
            "stiffness_nm_rad": stiffness, "achieved_hz": achieved})
    return EXIT_OK


def _sweep_one(params):
    """Worker: run one scenario and return summary rows (pickle-friendly)."""
    (model_path, case, surface, mode, power, dt, eclipse) = params
    model = load_model(model_path)
    _, _, summaries = _run_thermal_scenario(model, case, surface, mode, power, dt, eclipse)
    rows = []
    for name in sorted(summaries):
        s = summaries[name]
        rows.append((name, s.t_min_c, s.t_max_c, s.passed, s.orbits_run))
    return case, surface, mode, rows


def _cmd_sweep(args) -> int:
    model = _load_validated(args.model)
    cases = [c.strip() for c in args.cases.split(",") if c.strip()]
    surfaces = [s.strip() for s in args.surfaces.split(",") if s.strip()]
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for c in cases:
        if c not in model.scenarios.cases:
            raise ConfigError(f"unknown case {c!r}")
    for s in surfaces:
        if s not in model.surface_configs and s != "base":
            raise ConfigError(f"unknown surface config {s!r}")
    for m in modes:
        if m not in model.scenarios.attitudes:
            raise ConfigError(f"unknown attitude mode {m!r}")

    jobs = []
    for case in cases:
        for surface in surfaces:
            for mode in modes:
                jobs.append((args.model, case, surface, mode, args.power,
                             args.dt, args.eclipse))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]

    node_names = sorted(model.nodes)
    header = ["case", "surface", "mode", "power"]
    for n in node_names:
        header += [f"{n}_min_C", f"{n}_max_C", f"{n}_pass"]
    rows = []
    all_passed = True
    for case, surface, mode, node_rows in results:
        row = [case, surface, mode, args.power]
        by_name = {r[0]: r for r in node_rows}
        for n in node_names:
            name, t_min, t_max, passed, orbits = by_name[n]
            row += [f"{t_min:.3f}", f"{t_max:.3f}", int(passed)]
            all_passed = all_passed and passed
        rows.append(row)
    out = Path(args.out)
    report.write_csv(out / "sweep.csv", header, rows)
    manifest = report.RunManifest.create("sweep", args.model, {
        "cases": cases, "surfaces": surfaces, "modes": modes,
        "power": args.power, "jobs": args.jobs})
    report.write_json(out / "manifest.json", manifest.as_dict())
    print(f"wrote {len(rows)} scenario row(s) to {out / 'sweep.csv'}")
    return EXIT_OK if all_passed else EXIT_REQUIREMENT


if __name__ == "__main__":
    main()
