from pathlib import Path

import pytest

from features.association import CostModel
from features.density import DensityGrid, truncated_gaussian_density
from features.scenario import Scenario, reference_scenario

EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "assets" / "examples"


@pytest.fixture()
def scenario() -> Scenario:
    return reference_scenario(sigma=200.0)


@pytest.fixture()
def hotspot_grid(scenario: Scenario) -> DensityGrid:
    return truncated_gaussian_density(scenario.area, (1300.0, 1300.0), 200.0, 60, 60)


@pytest.fixture()
def hotspot_model(scenario: Scenario, hotspot_grid: DensityGrid) -> CostModel:
    return CostModel(scenario, hotspot_grid)


@pytest.fixture()
def examples_dir() -> Path:
    return EXAMPLES_DIR
