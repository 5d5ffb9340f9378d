#! /usr/bin/env python
import math
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Final, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SPEED_OF_LIGHT: Final[float] = 299_792_458.0


class NodeKind(str, Enum):
    terrestrial = "terrestrial"
    aerial = "aerial"


class Area(BaseModel):
    """Rectangular deployment region in meters."""

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @model_validator(mode="after")
    def check_bounds(self: "Area") -> "Area":
        if not self.x_max > self.x_min:
            raise ValueError("area requires x_max > x_min")
        if not self.y_max > self.y_min:
            raise ValueError("area requires y_max > y_min")
        return self

    @property
    def width(self: "Area") -> float:
        return self.x_max - self.x_min

    @property
    def height(self: "Area") -> float:
        return self.y_max - self.y_min

    @property
    def center(self: "Area") -> Tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains(self: "Area", x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


class NodeSpec(BaseModel):
    """One terrestrial BS or one UAV."""

    model_config = ConfigDict(frozen=True)

    id: int
    kind: NodeKind
    x: float
    y: float
    height: float = Field(gt=0)
    tx_power: float = Field(gt=0)
    bandwidth: float = Field(gt=0)

    @property
    def is_aerial(self: "NodeSpec") -> bool:
        return self.kind is NodeKind.aerial


class ChannelParams(BaseModel):
    """Propagation constants, all linear SI."""

    model_config = ConfigDict(frozen=True)

    carrier_freq: float = Field(default=2e9, gt=0)
    ref_distance: float = Field(default=1.0, gt=0)
    mu_los: float = Field(default=10**0.3, gt=0)
    mu_nlos: float = Field(default=10**2.3, gt=0)
    alpha: float = Field(default=0.36, gt=0)
    gamma: float = Field(default=0.21, gt=0)
    pathloss_exp: float = Field(default=3.0, gt=0)
    noise_psd: float = Field(default=1e-20, gt=0)

    @model_validator(mode="after")
    def check_attenuation_order(self: "ChannelParams") -> "ChannelParams":
        if self.mu_nlos < self.mu_los:
            raise ValueError("channel requires mu_nlos >= mu_los")
        return self

    @cached_property
    def k_o(self: "ChannelParams") -> float:
        return (4 * math.pi * self.carrier_freq * self.ref_distance / SPEED_OF_LIGHT) ** 2


class DensitySpec(BaseModel):
    """User density referenced from a scenario file."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform", "truncated_gaussian", "file"] = "uniform"
    center: Optional[Tuple[float, float]] = None
    sigma: Optional[float] = Field(default=None, gt=0)
    path: Optional[str] = None

    @model_validator(mode="after")
    def check_kind_fields(self: "DensitySpec") -> "DensitySpec":
        if self.kind == "truncated_gaussian" and (self.center is None or self.sigma is None):
            raise ValueError("truncated_gaussian density requires center and sigma")
        if self.kind == "file" and not self.path:
            raise ValueError("file density requires path")
        return self


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    area: Area
    nodes: Tuple[NodeSpec, ...]
    channel: ChannelParams = ChannelParams()
    total_users: int = Field(ge=1)
    payload_bits: float = Field(gt=0)
    density: DensitySpec = DensitySpec()

    @field_validator("nodes")
    @classmethod
    def check_nodes(cls: "type[Scenario]", nodes: Tuple[NodeSpec, ...]) -> Tuple[NodeSpec, ...]:
        if len(nodes) < 1:
            raise ValueError("scenario requires at least one node")
        ids = [node.id for node in nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        # ascending id order is what makes argmin/argmax tie-break on the lowest id
        return tuple(sorted(nodes, key=lambda node: node.id))

    @model_validator(mode="after")
    def check_nodes_inside_area(self: "Scenario") -> "Scenario":
        for node in self.nodes:
            if not self.area.contains(node.x, node.y):
                raise ValueError(f"node {node.id} at ({node.x}, {node.y}) lies outside the area")
        return self

    @property
    def node_ids(self: "Scenario") -> Tuple[int, ...]:
        return tuple(node.id for node in self.nodes)

    def node(self: "Scenario", node_id: int) -> NodeSpec:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise ValueError(f"unknown node id {node_id}")

    def to_document(self: "Scenario") -> Dict[str, Any]:
        """Plain-dict form accepted back by the scenario parser."""

        document: Dict[str, Any] = {
            "area": self.area.model_dump(),
            "channel": self.channel.model_dump(),
            "users": {"N": self.total_users, "b": self.payload_bits},
            "nodes": [node.model_dump(mode="json") for node in self.nodes],
        }
        density = self.density.model_dump(exclude_none=True)
        if "center" in density:
            density["center"] = list(density["center"])
        document["density"] = density
        return document


def _grid_shape(count: int) -> Tuple[int, int]:
    """Columns and rows of the most nearly square grid holding `count` cells."""

    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    return cols, rows


def _grid_centers(area: Area, count: int) -> List[Tuple[float, float]]:
    if count <= 0:
        return []

    cols, rows = _grid_shape(count)
    dx = area.width / cols
    dy = area.height / rows
    centers = [(area.x_min + (col + 0.5) * dx, area.y_min + (row + 0.5) * dy) for row in range(rows) for col in range(cols)]
    return centers[:count]


def grid_deployment(
    area: Area,
    num_uav: int,
    num_bs: int,
    uav_height: float = 200.0,
    bs_height: float = 20.0,
    uav_power: float = 1.0,
    bs_power: float = 40.0,
    bandwidth: float = 1e6,
) -> List[NodeSpec]:
    """Place UAVs and BSs at the centers of two independent near-square grid tilings.

    UAVs get ids 0..num_uav-1, BSs follow. Two BSs tile the area as left/right halves.
    """

    if num_uav < 0 or num_bs < 0:
        raise ValueError("node counts must be non-negative")
    if num_uav == 0 and num_bs == 0:
        raise ValueError("grid deployment requires at least one node")

    nodes: List[NodeSpec] = []
    for x, y in _grid_centers(area, num_uav):
        nodes.append(
            NodeSpec(id=len(nodes), kind=NodeKind.aerial, x=x, y=y, height=uav_height, tx_power=uav_power, bandwidth=bandwidth)
        )
    for x, y in _grid_centers(area, num_bs):
        nodes.append(
            NodeSpec(id=len(nodes), kind=NodeKind.terrestrial, x=x, y=y, height=bs_height, tx_power=bs_power, bandwidth=bandwidth)
        )
    return nodes


def reference_scenario(sigma: Optional[float] = 200.0, center: Tuple[float, float] = (1300.0, 1300.0)) -> Scenario:
    """4 km x 4 km hotspot layout: 4 UAVs at 200 m / 1 W, 2 BSs at 20 m / 40 W."""

    area = Area(x_min=0.0, x_max=4000.0, y_min=0.0, y_max=4000.0)
    density = DensitySpec() if sigma is None else DensitySpec(kind="truncated_gaussian", center=center, sigma=sigma)
    return Scenario(
        area=area,
        nodes=tuple(grid_deployment(area, num_uav=4, num_bs=2)),
        channel=ChannelParams(),
        total_users=300,
        payload_bits=1e6,
        density=density,
    )
