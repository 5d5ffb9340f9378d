#! /usr/bin/env python
from pathlib import Path
from typing import Optional, Protocol, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, PrivateAttr

from features.scenario import Area, DensitySpec

FloatArray = npt.NDArray[np.float64]


class DensityGrid(BaseModel):
    """User density discretised on cell centers.

    Points are stored row-major: index j * nx + i is cell column i of row j, rows run from y_min upwards.
    A weighted point list is a grid with ny == 1.
    """

    __area: Area = PrivateAttr()
    __shape: Tuple[int, int] = PrivateAttr()
    __xs: FloatArray = PrivateAttr()
    __ys: FloatArray = PrivateAttr()
    __mass: FloatArray = PrivateAttr()

    def __init__(self: "DensityGrid", area: Area, shape: Tuple[int, int], xs: FloatArray, ys: FloatArray, weights: FloatArray) -> None:
        super().__init__()

        ny, nx = shape
        if nx < 1 or ny < 1:
            raise ValueError("density grid requires nx >= 1 and ny >= 1")

        weights = np.asarray(weights, dtype=np.float64).ravel()
        if weights.size != nx * ny or np.asarray(xs).size != weights.size or np.asarray(ys).size != weights.size:
            raise ValueError("density grid coordinates and weights must have nx * ny entries")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("density weights must be finite and non-negative")

        total = weights.sum()
        if not total > 0:
            raise ValueError("density weights must not all be zero")

        mass = weights / total
        mass.flags.writeable = False
        xs = np.array(xs, dtype=np.float64).ravel()
        ys = np.array(ys, dtype=np.float64).ravel()
        xs.flags.writeable = False
        ys.flags.writeable = False

        self.__area = area
        self.__shape = (ny, nx)
        self.__xs = xs
        self.__ys = ys
        self.__mass = mass

    @classmethod
    def from_weights(cls: "type[DensityGrid]", area: Area, weights: npt.ArrayLike) -> "DensityGrid":
        """Grid over `area` from a (ny, nx) array of non-negative weights."""

        weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
        ny, nx = weights.shape
        xs, ys = cell_centers(area, nx, ny)
        return cls(area, (ny, nx), xs, ys, weights)

    @classmethod
    def from_points(cls: "type[DensityGrid]", area: Area, points: Sequence[Tuple[float, float]], weights: npt.ArrayLike) -> "DensityGrid":
        coords = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return cls(area, (1, coords.shape[0]), coords[:, 0], coords[:, 1], np.asarray(weights, dtype=np.float64))

    @property
    def area(self: "DensityGrid") -> Area:
        return self.__area

    @property
    def shape(self: "DensityGrid") -> Tuple[int, int]:
        return self.__shape

    @property
    def nx(self: "DensityGrid") -> int:
        return self.__shape[1]

    @property
    def ny(self: "DensityGrid") -> int:
        return self.__shape[0]

    @property
    def size(self: "DensityGrid") -> int:
        return self.__mass.size

    @property
    def xs(self: "DensityGrid") -> FloatArray:
        return self.__xs

    @property
    def ys(self: "DensityGrid") -> FloatArray:
        return self.__ys

    @property
    def mass(self: "DensityGrid") -> FloatArray:
        return self.__mass

    @property
    def mass_grid(self: "DensityGrid") -> FloatArray:
        return self.__mass.reshape(self.__shape)


def cell_centers(area: Area, nx: int, ny: int) -> Tuple[FloatArray, FloatArray]:
    """Flattened midpoint coordinates of an nx x ny tiling of `area`."""

    if nx < 1 or ny < 1:
        raise ValueError("density grid requires nx >= 1 and ny >= 1")

    x = area.x_min + (np.arange(nx) + 0.5) * (area.width / nx)
    y = area.y_min + (np.arange(ny) + 0.5) * (area.height / ny)
    grid_x, grid_y = np.meshgrid(x, y)
    return grid_x.ravel(), grid_y.ravel()


def uniform_density(area: Area, nx: int, ny: int) -> DensityGrid:
    return DensityGrid.from_weights(area, np.ones((ny, nx)))


def truncated_gaussian_density(area: Area, center: Tuple[float, float], sigma_o: float, nx: int, ny: int) -> DensityGrid:
    """Isotropic Gaussian hotspot truncated to `area`, midpoint rule on cell centers."""

    if not sigma_o > 0:
        raise ValueError("sigma_o must be positive")

    xs, ys = cell_centers(area, nx, ny)
    exponent = -((xs - center[0]) ** 2 + (ys - center[1]) ** 2) / (2.0 * sigma_o**2)
    # shift by the max so that narrow hotspots far from every cell center do not underflow to all zeros
    weights = np.exp(exponent - exponent.max())
    return DensityGrid(area, (ny, nx), xs, ys, weights)


def load_density_grid(path: Union[str, Path]) -> DensityGrid:
    """Read a plain-text density grid.

    The first non-comment line is `nx ny x_min x_max y_min y_max`; the next ny lines hold nx
    non-negative weights each, first line = lowest y. Commas count as separators. Weights are renormalised.
    """

    lines = [line.split("#", 1)[0].replace(",", " ") for line in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [line for line in lines if line.strip()]
    if not lines:
        raise ValueError(f"empty density grid file '{path}'")

    header_error = "density grid header must be: nx ny x_min x_max y_min y_max"
    try:
        header = np.loadtxt(lines[:1], ndmin=1)
    except ValueError as e:
        raise ValueError(header_error) from e
    if header.size != 6 or not np.all(header[:2] == np.round(header[:2])) or np.any(header[:2] < 1):
        raise ValueError(header_error)

    nx, ny = int(header[0]), int(header[1])
    x_min, x_max, y_min, y_max = (float(value) for value in header[2:])
    area = Area(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)
    try:
        weights = np.loadtxt(lines[1:], ndmin=2) if len(lines) > 1 else np.empty((0, nx))
    except ValueError as e:
        raise ValueError(f"density grid body must be {ny} rows of {nx} weights") from e
    if weights.shape != (ny, nx):
        raise ValueError(f"density grid body must be {ny} rows of {nx} weights")

    return DensityGrid.from_weights(area, weights)


def build_density(
    area: Area, spec: DensitySpec, nx: int, ny: int, sigma: Optional[float] = None, base_dir: Optional[Path] = None
) -> DensityGrid:
    """Density described by a scenario's `density` section; `sigma` overrides the hotspot width."""

    if spec.kind == "file":
        path = Path(str(spec.path))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        grid = load_density_grid(path)
        if grid.area != area:
            raise ValueError(f"density grid '{path.name}' does not cover the scenario area")
        return grid

    if spec.kind == "truncated_gaussian" or sigma is not None:
        center = spec.center if spec.center is not None else area.center
        width = sigma if sigma is not None else (spec.sigma or 0.0)
        return truncated_gaussian_density(area, center, width, nx, ny)

    return uniform_density(area, nx, ny)


class LabelledPartition(Protocol):
    @property
    def labels(self: "LabelledPartition") -> npt.NDArray[np.int64]: ...

    @property
    def node_ids(self: "LabelledPartition") -> Tuple[int, ...]: ...


def partition_mass(grid: DensityGrid, partition: LabelledPartition, node_id: int) -> float:
    """Probability mass a_k of the cells labelled `node_id`."""

    if node_id not in partition.node_ids:
        raise ValueError(f"unknown node id {node_id}")
    if partition.labels.size != grid.size:
        raise ValueError("partition and density grid have different sizes")

    return float(grid.mass[partition.labels == node_id].sum())
