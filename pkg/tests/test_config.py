import sys

import pytest

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from cubesat_preflight.config import (ConfigParseError, ConfigReferenceError,
                                      ConfigSchemaError, Material, SurfaceFinish,
                                      SurfacePatch, allowable_stress,
                                      apply_surface_config, dump_model,
                                      effective_optical_properties, load_model,
                                      model_from_dict, parse_quantity, validate_model)

A6061 = Material("A6061", 68.9e9, 2700.0, 295e6, 897.0, 167.0)


# --- loading ---------------------------------------------------------------

def test_reference_model_masses(ref_model):
    assert ref_model.nodes["BODY"].mass_kg == pytest.approx(3.518)
    assert ref_model.nodes["DSAP"].mass_kg == pytest.approx(0.117)
    assert ref_model.name == "HOKUSHIN-1"
    assert len(ref_model.strings) == 7


def test_references_fully_bound(ref_model):
    for patch in ref_model.patches.values():
        for fin, _ in patch.finish_fractions:
            assert fin in ref_model.finishes


def test_empty_file_is_parse_error(tmp_path):
    p = tmp_path / "empty.toml"
    p.write_text("")
    with pytest.raises(ConfigParseError):
        load_model(p)


def test_malformed_file_is_parse_error(tmp_path):
    p = tmp_path / "broken.toml"
    p.write_text("schema_version = [unclosed")
    with pytest.raises(ConfigParseError):
        load_model(p)


def test_dangling_finish_named_in_error(ref_model_path, tmp_path):
    text = ref_model_path.read_text().replace(
        "{ aluminum_alodine_rear = 1.0 }", "{ gold = 1.0 }")
    p = tmp_path / "gold.toml"
    p.write_text(text)
    with pytest.raises(ConfigReferenceError, match="gold"):
        load_model(p)


def test_unknown_key_rejected(ref_model_path, tmp_path):
    text = ref_model_path.read_text() + "\n[satellite.typo_section]\nx = 1\n"
    p = tmp_path / "unknown.toml"
    p.write_text(text)
    with pytest.raises(ConfigSchemaError, match="typo_section"):
        load_model(p)


def test_wrong_schema_version(tmp_path):
    p = tmp_path / "v99.toml"
    p.write_text("schema_version = 99\n")
    with pytest.raises(ConfigSchemaError, match="99"):
        load_model(p)


def test_round_trip(ref_model):
    text = dump_model(ref_model)
    again = model_from_dict(tomllib.loads(text), "<dump>")
    assert again == ref_model


# --- units -----------------------------------------------------------------

def test_quantity_millimeters():
    assert parse_quantity("340.5 mm", "length", "t") == pytest.approx(0.3405)


def test_quantity_celsius():
    assert parse_quantity("-40 C", "temperature", "t") == pytest.approx(233.15)
    assert parse_quantity("293.15 K", "temperature", "t") == pytest.approx(293.15)


def test_quantity_bare_number_is_si():
    assert parse_quantity(295e6, "pressure", "t") == 295e6


def test_quantity_unknown_unit():
    with pytest.raises(ConfigSchemaError, match="furlong"):
        parse_quantity("3 furlong", "length", "t")


# --- validation ------------------------------------------------------------

def test_reference_model_validates(ref_model):
    report = validate_model(ref_model)
    assert report.errors == []
    assert report.ok


def test_bad_fraction_sum_is_error(ref_model):
    import dataclasses
    patches = dict(ref_model.patches)
    patches["dsap_back"] = dataclasses.replace(
        patches["dsap_back"], finish_fractions=(("aluminum_alodine_rear", 0.9),))
    bad = dataclasses.replace(ref_model, patches=patches)
    report = validate_model(bad)
    assert len([e for e in report.errors if "dsap_back" in e]) == 1


def test_high_alpha_warns_not_errors(ref_model):
    import dataclasses
    finishes = dict(ref_model.finishes)
    finishes["solar_cell"] = dataclasses.replace(finishes["solar_cell"], alpha=0.99)
    model = dataclasses.replace(ref_model, finishes=finishes)
    report = validate_model(model)
    assert report.errors == []
    assert any("0.99" in w for w in report.warnings)


def test_non_unit_normal_is_error(ref_model):
    import dataclasses
    patches = dict(ref_model.patches)
    patches["body_zp"] = dataclasses.replace(patches["body_zp"], normal=(0.0, 0.0, 1.1))
    report = validate_model(dataclasses.replace(ref_model, patches=patches))
    assert any("normal" in e for e in report.errors)


# --- optical averaging -----------------------------------------------------

def _cat(**finishes):
    return {k: SurfaceFinish(k, a, e) for k, (a, e) in finishes.items()}


def test_effective_single_finish_identity():
    cat = _cat(x=(0.5, 0.5))
    patch = SurfacePatch("p", 1.0, (1, 0, 0), (("x", 1.0),))
    assert effective_optical_properties(patch, cat) == (0.5, 0.5)


def test_effective_symmetric_mix():
    cat = _cat(lo=(0.2, 0.1), hi=(0.8, 0.9))
    patch = SurfacePatch("p", 1.0, (1, 0, 0), (("lo", 0.5), ("hi", 0.5)))
    alpha, eps = effective_optical_properties(patch, cat)
    assert alpha == pytest.approx(0.5)
    assert eps == pytest.approx(0.5)


def test_effective_70_30_mix_from_shipped_catalog(ref_model):
    """Hand arithmetic on the shipped catalog for the 70/30 mixed surface."""
    al = ref_model.finishes["aluminum_alodine"]
    poly = ref_model.finishes["polyimide_tape"]
    patch = SurfacePatch("p", 1.0, (1, 0, 0),
                         (("aluminum_alodine", 0.7), ("polyimide_tape", 0.3)))
    alpha, eps = effective_optical_properties(patch, ref_model.finishes)
    assert alpha == pytest.approx(0.7 * al.alpha + 0.3 * poly.alpha)
    assert eps == pytest.approx(0.7 * al.epsilon + 0.3 * poly.epsilon)


def test_effective_bounded_by_constituents(ref_model):
    rng_fracs = [0.15, 0.25, 0.6]
    names = ["aluminum_alodine", "polyimide_tape", "solar_cell"]
    patch = SurfacePatch("p", 1.0, (1, 0, 0), tuple(zip(names, rng_fracs)))
    alpha, eps = effective_optical_properties(patch, ref_model.finishes)
    alphas = [ref_model.finishes[n].alpha for n in names]
    epss = [ref_model.finishes[n].epsilon for n in names]
    assert min(alphas) <= alpha <= max(alphas)
    assert min(epss) <= eps <= max(epss)


def test_effective_unknown_finish():
    patch = SurfacePatch("p", 1.0, (1, 0, 0), (("mystery", 1.0),))
    with pytest.raises(KeyError, match="mystery"):
        effective_optical_properties(patch, {})


# --- allowable stress ------------------------------------------------------

def test_allowable_stress_reference_aluminum():
    assert allowable_stress(A6061, 0.30) == pytest.approx(88.5e6)


def test_allowable_stress_identity_factor():
    assert allowable_stress(A6061, 1.0) == pytest.approx(295e6)


def test_allowable_stress_fr4_config_value():
    fr4 = Material("FR4", 24.1e9, 1850.0, 310e6, 950.0, 0.44)
    assert allowable_stress(fr4, 0.30) == pytest.approx(93.0e6)


def test_allowable_stress_factor_range():
    with pytest.raises(ValueError):
        allowable_stress(A6061, 0.0)
    with pytest.raises(ValueError):
        allowable_stress(A6061, 1.5)


def test_allowable_stress_monotone():
    weaker = Material("weak", 68.9e9, 2700.0, 200e6, 897.0, 167.0)
    assert allowable_stress(weaker, 0.30) < allowable_stress(A6061, 0.30)
    assert allowable_stress(A6061, 0.2) < allowable_stress(A6061, 0.3)


def test_allowable_stress_default_per_material():
    assert allowable_stress(A6061) == pytest.approx(88.5e6)


# --- surface configs --------------------------------------------------------

def test_apply_surface_config(ref_model):
    m = apply_surface_config(ref_model, "d")
    fracs = dict(m.patches["body_xm"].finish_fractions)
    assert fracs == {"aluminum_alodine": 0.7, "polyimide_tape": 0.3}
    # untouched patches keep their base layout
    assert m.patches["dsap_back"] == ref_model.patches["dsap_back"]


def test_apply_surface_config_unknown(ref_model):
    with pytest.raises(ConfigReferenceError, match="z"):
        apply_surface_config(ref_model, "z")
