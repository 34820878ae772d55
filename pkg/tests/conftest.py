import pytest

from cubesat_preflight.config import (OrbitSettings, PowerSystem, Requirements,
                                      SatelliteModel, ScenarioSet, SimSettings,
                                      SurfaceFinish, SurfacePatch, ThermalNodeSpec,
                                      load_model, reference_model_path)


@pytest.fixture(scope="session")
def ref_model_path():
    return reference_model_path()


@pytest.fixture(scope="session")
def ref_model(ref_model_path):
    return load_model(ref_model_path)


def toy_model(patches, nodes, finishes, strings=None, standby_w=0.0):
    """Bare-bones model for thermal unit tests built from parts."""
    return SatelliteModel(
        name="toy", schema_version=1, materials={}, finishes=finishes,
        patches=patches, nodes=nodes, strings=strings or {}, panels={}, chain=None,
        requirements=Requirements(60.0, 9.0, 0.30, 46.6, (0.0085, 0.0085), 0.0065, ()),
        power=PowerSystem(0.0, standby_w, 0.0, ()),
        scenarios=ScenarioSet(OrbitSettings(), SimSettings(), {}, {}),
        surface_configs={},
    )


def gray_patch(name, area, normal, finish="gray", cell=0.0, string=None):
    return SurfacePatch(name, area, normal, ((finish, 1.0),), cell, string)


GRAY = {"gray": SurfaceFinish("gray", 0.7, 0.7)}


def single_node(name, mass, cp, patch_names, q_sun=0.0, q_ecl=0.0):
    return ThermalNodeSpec(name, mass, cp, tuple(patch_names), q_sun, q_ecl)
