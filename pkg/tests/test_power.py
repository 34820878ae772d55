import pytest

from cubesat_preflight.config import PowerString
from cubesat_preflight.power import (budget_report, cell_peak_power,
                                     required_generation, round_half_up, string_power)

STRING = PowerString("s", 6, 27e-4, 0.307, ("p",))


def test_cell_peak_reference_values():
    assert cell_peak_power(0.307, 1353.0, 27e-4) == pytest.approx(1.12, abs=0.005)
    assert cell_peak_power(0.307, 1414.0, 27e-4) == pytest.approx(1.17, abs=0.005)
    assert cell_peak_power(0.0, 1353.0, 27e-4) == 0.0


def test_cell_peak_bad_inputs():
    with pytest.raises(ValueError):
        cell_peak_power(0.3, -1.0, 27e-4)
    with pytest.raises(ValueError):
        cell_peak_power(0.3, 1353.0, 0.0)


def test_string_power_levels():
    assert string_power(STRING, 1.0) == pytest.approx(6.73, abs=0.005)
    assert string_power(STRING, 0.25) == pytest.approx(1.68, abs=0.005)
    assert string_power(STRING, 0.0) == 0.0


def test_string_power_factor_range():
    with pytest.raises(ValueError):
        string_power(STRING, 1.2)


def test_string_power_linear():
    base = string_power(STRING, 0.5, 1000.0)
    assert string_power(STRING, 0.25, 1000.0) == pytest.approx(base / 2)
    assert string_power(STRING, 0.5, 2000.0) == pytest.approx(base * 2)


def test_required_generation_reference_split():
    assert required_generation(2.1, 60.0, 30.0) == pytest.approx(3.15)
    assert required_generation(2.1, 90.0, 0.0) == pytest.approx(2.1)
    assert required_generation(2.1, 60.0, 30.0) / 7 == pytest.approx(0.45)


def test_required_generation_errors():
    with pytest.raises(ValueError):
        required_generation(2.1, 0.0, 30.0)
    with pytest.raises(ValueError):
        required_generation(2.1, 60.0, -1.0)


def test_required_at_least_consumption():
    for ecl in (0.0, 10.0, 30.0):
        req = required_generation(2.1, 60.0, ecl)
        assert req >= 2.1
        if ecl == 0.0:
            assert req == pytest.approx(2.1)
        else:
            assert req > 2.1


def test_round_half_up():
    assert round_half_up(3.15, 1) == 3.2
    assert round_half_up(0.457, 2) == 0.46
    assert round_half_up(6.7288, 1) == 6.7


def test_budget_reference_model(ref_model):
    rep = budget_report(ref_model, 60.0, 30.0)
    assert rep.max_simultaneous_w == pytest.approx(34.2, abs=0.05)
    assert rep.cell_peak_w == pytest.approx(1.12, abs=0.005)
    assert rep.string_peak_w == pytest.approx(6.73, abs=0.005)
    assert rep.spin_average_string_w == pytest.approx(1.68, abs=0.01)
    assert rep.required_w == pytest.approx(3.15)
    assert rep.per_string_required_w == pytest.approx(0.45)
    assert rep.headroom_per_string_w == pytest.approx(6.279, abs=0.005)
    # budget-table chain with intermediate rounding reproduces 6.7 - 0.46 = 6.24
    assert rep.rounded["string_peak_w"] == 6.7
    assert rep.rounded["per_string_required_w"] == 0.46
    assert rep.rounded["headroom_per_string_w"] == 6.24
    assert rep.n_strings == 7


def test_budget_max_is_sum_of_orientable_strings(ref_model):
    rep = budget_report(ref_model)
    expected = sum(ref_model.strings[s].cells_in_series * ref_model.power.cell_peak_w
                   for s in ref_model.power.sun_orientable_strings)
    assert rep.max_simultaneous_w == pytest.approx(expected)


def test_orientable_strings_do_not_share_patches(ref_model):
    seen = set()
    for sid in ref_model.power.sun_orientable_strings:
        for p in ref_model.strings[sid].patch_names:
            assert p not in seen
            seen.add(p)


def test_budget_zero_strings():
    from conftest import toy_model
    model = toy_model({}, {}, {}, strings=None, standby_w=2.1)
    rep = budget_report(model)
    assert rep.max_simultaneous_w == 0.0
    assert rep.margin_w < 0.0


def test_extraction_table_matches_requirement(ref_model):
    rep = budget_report(ref_model, 60.0, 30.0)
    assert set(rep.extraction_per_string_w) == set(ref_model.strings)
    for value in rep.extraction_per_string_w.values():
        assert value == pytest.approx(0.45)
