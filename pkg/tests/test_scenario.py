import math
from pathlib import Path
from typing import Any, Dict, List, Tuple

import pytest
from pydantic import ValidationError

from features.config_parser import load_scenario, write_scenario
from features.scenario import SPEED_OF_LIGHT, Area, ChannelParams, DensitySpec, NodeKind, NodeSpec, Scenario, grid_deployment

AREA = Area(x_min=0.0, x_max=4000.0, y_min=0.0, y_max=4000.0)


def _node(**overrides: Any) -> NodeSpec:
    values: Dict[str, Any] = {"id": 0, "kind": "aerial", "x": 100.0, "y": 100.0, "height": 200.0, "tx_power": 1.0, "bandwidth": 1e6}
    values.update(overrides)
    return NodeSpec(**values)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("bounds", "expected_error"),
    [
        pytest.param((0.0, 0.0, 0.0, 10.0), "x_max > x_min"),
        pytest.param((10.0, 0.0, 0.0, 10.0), "x_max > x_min"),
        pytest.param((0.0, 10.0, 5.0, 5.0), "y_max > y_min"),
    ],
)
def test_area_bounds(bounds: Tuple[float, float, float, float], expected_error: str) -> None:
    x_min, x_max, y_min, y_max = bounds
    with pytest.raises(ValidationError, match=expected_error):
        Area(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)


@pytest.mark.unit()
def test_area_geometry() -> None:
    assert AREA.width == 4000.0
    assert AREA.height == 4000.0
    assert AREA.center == (2000.0, 2000.0)
    assert AREA.contains(4000.0, 0.0)
    assert not AREA.contains(4001.0, 0.0)


@pytest.mark.unit()
@pytest.mark.parametrize(
    "overrides",
    [
        pytest.param({"height": 0.0}),
        pytest.param({"tx_power": -1.0}),
        pytest.param({"bandwidth": 0.0}),
        pytest.param({"kind": "satellite"}),
    ],
)
def test_node_spec_invariants(overrides: Dict[str, Any]) -> None:
    with pytest.raises(ValidationError):
        _node(**overrides)


@pytest.mark.unit()
def test_channel_params() -> None:
    params = ChannelParams()
    assert params.k_o == pytest.approx((4 * math.pi * 2e9 / SPEED_OF_LIGHT) ** 2)
    assert params.mu_los == pytest.approx(10**0.3)
    assert params.mu_nlos == pytest.approx(10**2.3)

    with pytest.raises(ValidationError, match="mu_nlos >= mu_los"):
        ChannelParams(mu_los=10.0, mu_nlos=2.0)
    with pytest.raises(ValidationError):
        ChannelParams(noise_psd=0.0)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("values", "is_valid"),
    [
        pytest.param({}, True),
        pytest.param({"kind": "truncated_gaussian", "center": (1.0, 2.0), "sigma": 100.0}, True),
        pytest.param({"kind": "truncated_gaussian", "center": (1.0, 2.0)}, False),
        pytest.param({"kind": "truncated_gaussian", "center": (1.0, 2.0), "sigma": 0.0}, False),
        pytest.param({"kind": "file", "path": "grid.txt"}, True),
        pytest.param({"kind": "file"}, False),
        pytest.param({"kind": "lognormal"}, False),
    ],
)
def test_density_spec(values: Dict[str, Any], is_valid: bool) -> None:
    if is_valid:
        assert DensitySpec(**values).kind == values.get("kind", "uniform")
    else:
        with pytest.raises(ValidationError):
            DensitySpec(**values)


@pytest.mark.unit()
def test_scenario_sorts_nodes_by_id() -> None:
    nodes = (_node(id=7), _node(id=2, kind="terrestrial", height=20.0), _node(id=4))
    scenario = Scenario(area=AREA, nodes=nodes, total_users=300, payload_bits=1e6)

    assert scenario.node_ids == (2, 4, 7)
    assert scenario.node(2).kind is NodeKind.terrestrial
    with pytest.raises(ValueError, match="unknown node id"):
        scenario.node(3)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("nodes", "total_users", "payload_bits", "expected_error"),
    [
        pytest.param((), 300, 1e6, "at least one node"),
        pytest.param((_node(id=1), _node(id=1)), 300, 1e6, "unique"),
        pytest.param((_node(x=4001.0),), 300, 1e6, "outside the area"),
        pytest.param((_node(),), 0, 1e6, "total_users"),
        pytest.param((_node(),), 300, 0.0, "payload_bits"),
    ],
)
def test_scenario_invariants(nodes: Tuple[NodeSpec, ...], total_users: int, payload_bits: float, expected_error: str) -> None:
    with pytest.raises(ValidationError, match=expected_error):
        Scenario(area=AREA, nodes=nodes, total_users=total_users, payload_bits=payload_bits)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("num_uav", "num_bs", "expected_positions"),
    [
        pytest.param(4, 0, [(1000.0, 1000.0), (3000.0, 1000.0), (1000.0, 3000.0), (3000.0, 3000.0)]),
        pytest.param(0, 2, [(1000.0, 2000.0), (3000.0, 2000.0)]),
        pytest.param(0, 1, [(2000.0, 2000.0)]),
        pytest.param(
            4,
            2,
            [(1000.0, 1000.0), (3000.0, 1000.0), (1000.0, 3000.0), (3000.0, 3000.0), (1000.0, 2000.0), (3000.0, 2000.0)],
        ),
    ],
)
def test_grid_deployment(num_uav: int, num_bs: int, expected_positions: List[Tuple[float, float]]) -> None:
    nodes = grid_deployment(AREA, num_uav, num_bs)

    assert [(node.x, node.y) for node in nodes] == expected_positions
    assert [node.id for node in nodes] == list(range(num_uav + num_bs))
    assert all(node.height == (200.0 if node.is_aerial else 20.0) for node in nodes)
    assert all(node.tx_power == (1.0 if node.is_aerial else 40.0) for node in nodes)
    assert all(AREA.contains(node.x, node.y) for node in nodes)
    assert grid_deployment(AREA, num_uav, num_bs) == nodes


@pytest.mark.unit()
@pytest.mark.parametrize("count", [1, 2, 3, 5, 7, 10, 17])
def test_grid_deployment_inside_area(count: int) -> None:
    area = Area(x_min=-500.0, x_max=1500.0, y_min=100.0, y_max=900.0)
    nodes = grid_deployment(area, count, count)

    assert len(nodes) == 2 * count
    assert all(area.contains(node.x, node.y) for node in nodes)


@pytest.mark.unit()
def test_grid_deployment_rejects_empty() -> None:
    with pytest.raises(ValueError, match="at least one node"):
        grid_deployment(AREA, 0, 0)
    with pytest.raises(ValueError, match="non-negative"):
        grid_deployment(AREA, -1, 2)


@pytest.mark.unit()
@pytest.mark.parametrize("filename", ["scenario.toml", "scenario.yaml"])
def test_write_then_load_scenario(scenario: Scenario, tmp_path: Path, filename: str) -> None:
    path = write_scenario(scenario, tmp_path / filename)
    assert load_scenario(path) == scenario
