#! /usr/bin/env python
import logging
from pathlib import Path
from typing import Dict, Final, List, Mapping, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from features.channel import delay_from_snr, snr_matrix
from features.density import DensityGrid
from features.scenario import Scenario

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.int64]

MOVE_RTOL: Final[float] = 1e-12


class Partition(BaseModel):
    """Disjoint cover of a density grid: one node id per cell plus the per-node masses a_k."""

    __shape: Tuple[int, int] = PrivateAttr()
    __node_ids: Tuple[int, ...] = PrivateAttr()
    __labels: IndexArray = PrivateAttr()
    __masses: FloatArray = PrivateAttr()

    def __init__(self: "Partition", grid: DensityGrid, labels: npt.ArrayLike, node_ids: Tuple[int, ...]) -> None:
        super().__init__()

        ids = np.asarray(node_ids, dtype=np.int64)
        if ids.size < 1 or np.any(np.diff(ids) <= 0):
            raise ValueError("partition node ids must be non-empty, unique and ascending")

        labels = np.array(labels, dtype=np.int64).ravel()
        if labels.size != grid.size:
            raise ValueError(f"partition has {labels.size} labels for a grid of {grid.size} cells")

        index = np.searchsorted(ids, labels)
        if np.any(index >= ids.size) or np.any(ids[np.minimum(index, ids.size - 1)] != labels):
            raise ValueError("partition labels must be drawn from the scenario node ids")

        labels.flags.writeable = False
        masses = np.bincount(index, weights=grid.mass, minlength=ids.size)
        masses.flags.writeable = False

        self.__shape = grid.shape
        self.__node_ids = tuple(int(node_id) for node_id in ids)
        self.__labels = labels
        self.__masses = masses

    @classmethod
    def from_indices(cls: "type[Partition]", grid: DensityGrid, indices: IndexArray, node_ids: Tuple[int, ...]) -> "Partition":
        """Partition from positions into `node_ids` rather than the ids themselves."""

        return cls(grid, np.asarray(node_ids, dtype=np.int64)[indices], node_ids)

    @property
    def shape(self: "Partition") -> Tuple[int, int]:
        return self.__shape

    @property
    def node_ids(self: "Partition") -> Tuple[int, ...]:
        return self.__node_ids

    @property
    def labels(self: "Partition") -> IndexArray:
        return self.__labels

    @property
    def label_grid(self: "Partition") -> IndexArray:
        return self.__labels.reshape(self.__shape)

    @property
    def indices(self: "Partition") -> IndexArray:
        return np.searchsorted(np.asarray(self.__node_ids, dtype=np.int64), self.__labels)

    @property
    def masses(self: "Partition") -> FloatArray:
        """a_k aligned with `node_ids`."""
        return self.__masses

    def mass_of(self: "Partition", node_id: int) -> float:
        if node_id not in self.__node_ids:
            raise ValueError(f"unknown node id {node_id}")
        return float(self.__masses[self.__node_ids.index(node_id)])

    def mass_dict(self: "Partition") -> Dict[int, float]:
        return {node_id: float(mass) for node_id, mass in zip(self.__node_ids, self.__masses)}

    def differing_cells(self: "Partition", other: "Partition") -> int:
        return int(np.count_nonzero(self.__labels != other.labels))


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=1e-6, gt=0)
    max_iter: int = Field(default=5000, ge=1)
    damping: float = Field(default=0.5, gt=0, le=1)
    mass_floor: float = Field(default=1e-12, ge=0, lt=1e-3)
    backoff: float = Field(default=0.5, gt=0, le=1)
    min_damping: float = Field(default=1e-3, gt=0, le=1)
    restarts: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_damping_range(self: "SolverConfig") -> "SolverConfig":
        if self.min_damping > self.damping:
            raise ValueError("solver requires min_damping <= damping")
        return self


class SolveTrace(BaseModel):
    objective: List[float] = []
    max_mass_change: List[float] = []
    damping: List[float] = []
    converged: bool = False
    iterations: int = 0
    exchange_steps: int = 0
    violation: float = float("inf")

    def record(self: "SolveTrace", objective: float, change: float, damping: float) -> None:
        self.objective.append(objective)
        self.max_mass_change.append(change)
        self.damping.append(damping)
        self.iterations += 1


class CostModel(BaseModel):
    """Delay kernel F(v, s_k) and SNR of every node at every grid cell, evaluated once."""

    __node_ids: Tuple[int, ...] = PrivateAttr()
    __snr: FloatArray = PrivateAttr()
    __kernel: FloatArray = PrivateAttr()
    __bandwidths: FloatArray = PrivateAttr()
    __scale: FloatArray = PrivateAttr()
    __mass: FloatArray = PrivateAttr()
    __own_delay: FloatArray = PrivateAttr()

    def __init__(self: "CostModel", scenario: Scenario, grid: DensityGrid) -> None:
        super().__init__()

        self.__node_ids = scenario.node_ids
        self.__snr = snr_matrix(scenario, grid.xs, grid.ys)
        self.__kernel = delay_from_snr(scenario.payload_bits, self.__snr)
        self.__bandwidths = np.array([node.bandwidth for node in scenario.nodes], dtype=np.float64)
        self.__scale = scenario.total_users / self.__bandwidths
        self.__mass = grid.mass
        self.__own_delay = self.__kernel * self.__mass

    @property
    def node_ids(self: "CostModel") -> Tuple[int, ...]:
        return self.__node_ids

    @property
    def snr(self: "CostModel") -> FloatArray:
        return self.__snr

    @property
    def kernel(self: "CostModel") -> FloatArray:
        return self.__kernel

    @property
    def bandwidths(self: "CostModel") -> FloatArray:
        return self.__bandwidths

    @property
    def mass(self: "CostModel") -> FloatArray:
        return self.__mass

    def masses_of(self: "CostModel", indices: IndexArray) -> FloatArray:
        return np.bincount(indices, weights=self.__mass, minlength=len(self.__node_ids))

    def integrals_of(self: "CostModel", indices: IndexArray) -> FloatArray:
        """I_k, the sum over D_k of F(v, s_k) times cell mass."""
        return np.bincount(indices, weights=self.cell_delays(indices), minlength=len(self.__node_ids))

    def weighted_cost(self: "CostModel", masses: FloatArray, mass_floor: float) -> FloatArray:
        """(a_l / W_l) F(v, s_l) for every node and cell."""

        weights = np.maximum(masses, mass_floor) / self.__bandwidths
        return weights[:, np.newaxis] * self.__kernel

    def marginal_cost(self: "CostModel", masses: FloatArray, integrals: FloatArray, mass_floor: float) -> FloatArray:
        """(N / W_l) (I_l + a_l F(v, s_l)): delay added per unit of user mass joining cell l at v."""

        weights = np.maximum(masses, mass_floor)
        return self.__scale[:, np.newaxis] * (integrals[:, np.newaxis] + weights[:, np.newaxis] * self.__kernel)

    def move_costs(self: "CostModel", indices: IndexArray) -> FloatArray:
        """h_l(v) with: moving cell v from its node k to l changes the objective by exactly m_v (h_l(v) - h_k(v)).

        Joining l != k costs (N / W_l) (I_l + a_l F_l + m_v F_l), staying in k is (N / W_k) (I_k + a_k F_k - m_v F_k).
        """

        columns = np.arange(indices.size)
        costs = self.integrals_of(indices)[:, np.newaxis] + self.masses_of(indices)[:, np.newaxis] * self.__kernel + self.__own_delay
        costs[indices, columns] -= 2.0 * self.__own_delay[indices, columns]
        return self.__scale[:, np.newaxis] * costs

    def relabel(self: "CostModel", masses: FloatArray, mass_floor: float) -> IndexArray:
        # argmin returns the first minimum, i.e. the lowest node id
        return np.argmin(self.weighted_cost(masses, mass_floor), axis=0)

    def strongest(self: "CostModel") -> IndexArray:
        return np.argmax(self.__snr, axis=0)

    def cell_delays(self: "CostModel", indices: IndexArray) -> FloatArray:
        """F of the serving node times cell mass."""

        return self.__own_delay[indices, np.arange(indices.size)]

    def node_delays(self: "CostModel", indices: IndexArray) -> FloatArray:
        """Per-node terms (N a_k / W_k) * I_k."""

        return self.__scale * self.masses_of(indices) * self.integrals_of(indices)

    def objective(self: "CostModel", indices: IndexArray) -> float:
        return float(self.node_delays(indices).sum())

    def violation(self: "CostModel", indices: IndexArray) -> float:
        """Largest relative saving any single cell could still make by switching node; 0 when exchange-stable."""

        costs = self.move_costs(indices)
        assigned = costs[indices, np.arange(indices.size)]
        best = costs.min(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            relative = np.where(best > 0, (assigned - best) / best, np.where(assigned > best, np.inf, 0.0))
        return float(relative.max())


def snr_association(scenario: Scenario, grid: DensityGrid, model: Optional[CostModel] = None) -> Partition:
    """Max-SNR baseline, ties to the lowest node id."""

    model = model or CostModel(scenario, grid)
    return Partition.from_indices(grid, model.strongest(), scenario.node_ids)


def assignment_rule(
    scenario: Scenario,
    masses: Mapping[int, float],
    x: float,
    y: float,
    mass_floor: float = SolverConfig().mass_floor,
    integrals: Optional[Mapping[int, float]] = None,
) -> int:
    """Serving node of point (x, y), ties to the lowest id.

    Without `integrals` this is argmin over l of (a_l / W_l) F(v, s_l). Given the per-node delay
    integrals I_l it is argmin of (I_l + a_l F(v, s_l)) / W_l, the delay a vanishing share of users
    at (x, y) adds to each cell.
    """

    unknown = (set(masses) | set(integrals or {})) - set(scenario.node_ids)
    if unknown:
        raise ValueError(f"unknown node ids {sorted(unknown)}")

    model = CostModel(scenario, DensityGrid.from_points(scenario.area, [(x, y)], [1.0]))
    weights = np.array([masses.get(node_id, 0.0) for node_id in scenario.node_ids])
    if integrals is None:
        index = model.relabel(weights, mass_floor)[0]
    else:
        offsets = np.array([integrals.get(node_id, 0.0) for node_id in scenario.node_ids])
        index = np.argmin(model.marginal_cost(weights, offsets, mass_floor), axis=0)[0]
    return scenario.node_ids[int(index)]


def _damped_fixed_point(model: CostModel, indices: IndexArray, cfg: SolverConfig, budget: int, trace: SolveTrace) -> IndexArray:
    """Relabel every cell by its marginal delay under damped (a, I); returns the lowest-objective labelling seen."""

    masses = model.masses_of(indices)
    integrals = model.integrals_of(indices)
    eta = cfg.damping

    best_indices, best_objective = indices, model.objective(indices)
    previous_step: Optional[FloatArray] = None

    for iteration in range(1, budget + 1):
        new_indices = np.argmin(model.marginal_cost(masses, integrals, cfg.mass_floor), axis=0)
        new_masses = model.masses_of(new_indices)
        objective = model.objective(new_indices)
        step = new_masses - masses
        change = float(np.abs(step).max())

        trace.record(objective, change, eta)
        logger.debug(f"[OT] iteration {iteration}: objective={objective:.6g} max_mass_change={change:.3g}")

        if objective < best_objective:
            best_indices, best_objective = new_indices, objective
        if change < cfg.tol:
            break

        if previous_step is not None and float(np.dot(step, previous_step)) < 0:
            if eta <= cfg.min_damping:
                logger.info(f"[OT] Mass updates still reverse at damping {eta:.4g}, switching to cell exchanges")
                break
            eta = max(eta * cfg.backoff, cfg.min_damping)
            logger.debug(f"[OT] Mass update reversed at iteration {iteration}, damping lowered to {eta:.4g}")

        masses = masses + eta * step
        integrals = integrals + eta * (model.integrals_of(new_indices) - integrals)
        previous_step = step

    return best_indices


def _exchange_descent(model: CostModel, indices: IndexArray, budget: int, trace: Optional[SolveTrace] = None) -> Tuple[IndexArray, bool]:
    """Move cells to their cheapest node until no single move lowers the objective.

    Improving moves go best first. A batch that fails to lower the objective is halved; a single
    move always lowers it. Returns the labels and whether they are exchange-stable.
    """

    indices = np.array(indices, dtype=np.int64)
    columns = np.arange(indices.size)
    mass = model.mass
    objective = model.objective(indices)
    steps = 0

    while True:
        costs = model.move_costs(indices)
        current = costs[indices, columns]
        targets = np.argmin(costs, axis=0)
        gain = current - costs[targets, columns]
        movable = np.flatnonzero(gain > MOVE_RTOL * current)
        if movable.size == 0:
            return indices, True
        if steps >= budget:
            return indices, False

        before = model.masses_of(indices)
        # massless cells follow their cheapest node, the objective does not change
        idle = movable[mass[movable] == 0]
        indices[idle] = targets[idle]

        active = movable[mass[movable] > 0]
        share = 1.0
        if active.size > 0:
            order = active[np.argsort(-(gain[active] * mass[active]), kind="stable")]
            count = order.size
            while True:
                candidate = indices.copy()
                candidate[order[:count]] = targets[order[:count]]
                value = model.objective(candidate)
                if value < objective or count == 1:
                    break
                count //= 2
            indices, objective = candidate, value
            share = count / active.size

        steps += 1
        if trace is not None:
            trace.record(objective, float(np.abs(model.masses_of(indices) - before).max()), share)
            trace.exchange_steps += 1


def ot_association(
    scenario: Scenario,
    grid: DensityGrid,
    cfg: Optional[SolverConfig] = None,
    init: Optional[Partition] = None,
    model: Optional[CostModel] = None,
) -> Tuple[Partition, SolveTrace]:
    """Delay-minimising association.

    A damped fixed point of the marginal-delay rule first moves load off congested cells. Its
    lowest-objective labelling is then refined by exact cell exchanges, which stop once no single
    cell can lower the network delay by switching node; reaching that state is convergence.
    `max_iter` bounds both phases together, the fixed point takes at most half. With `restarts`,
    seeded random labellings are refined the same way and the lowest objective wins. The result
    is never worse than `init`.
    """

    cfg = cfg or SolverConfig()
    model = model or CostModel(scenario, grid)
    init = init or snr_association(scenario, grid, model)
    if init.shape != grid.shape or init.node_ids != scenario.node_ids:
        raise ValueError("initial partition does not match the scenario and grid")

    trace = SolveTrace()
    init_objective = model.objective(init.indices)

    start = _damped_fixed_point(model, init.indices, cfg, max(1, cfg.max_iter // 2), trace)
    result, stable = _exchange_descent(model, start, cfg.max_iter - trace.iterations, trace)
    objective = model.objective(result)

    rng = np.random.default_rng(cfg.seed)
    for restart in range(cfg.restarts):
        candidate, candidate_stable = _exchange_descent(model, rng.integers(0, len(scenario.nodes), size=grid.size), cfg.max_iter)
        value = model.objective(candidate)
        if value < objective:
            logger.debug(f"[OT] restart {restart} lowered the objective to {value:.6g}")
            result, stable, objective = candidate, candidate_stable, value

    if objective > init_objective:
        logger.warning("[OT] Refined labelling is worse than the initial partition, keeping the initial one")
        result, stable = init.indices, False

    if not stable:
        logger.warning(f"[OT] No exchange-stable labelling within {cfg.max_iter} iterations, returning the best one found")

    trace.converged = stable
    trace.violation = model.violation(result)
    return Partition.from_indices(grid, result, scenario.node_ids), trace


def fixed_point_violation(scenario: Scenario, grid: DensityGrid, partition: Partition) -> float:
    """Largest relative saving a single cell of `partition` could make by switching node; 0 at a converged solution."""

    return CostModel(scenario, grid).violation(partition.indices)


def write_partition(partition: Partition, out_dir: Union[str, Path], total_users: int, prefix: str = "") -> Tuple[Path, Path]:
    """Write the label grid (one row per y, lowest y first) and the per-node masses as CSV."""

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    labels_path = out_dir / f"{prefix}labels.csv"
    masses_path = out_dir / f"{prefix}masses.csv"

    pd.DataFrame(partition.label_grid).to_csv(labels_path, header=False, index=False)
    pd.DataFrame(
        {
            "node_id": partition.node_ids,
            "mass": partition.masses,
            "load": total_users * partition.masses,
        }
    ).to_csv(masses_path, index=False, float_format="%.12g")

    return labels_path, masses_path
