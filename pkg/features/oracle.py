#! /usr/bin/env python
"""Exhaustive search over all labelings of a small weighted point set."""

import logging
from typing import Final, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from features.association import CostModel, Partition, SolverConfig, ot_association
from features.density import DensityGrid
from features.metrics import average_delay
from features.scenario import Area, NodeKind, NodeSpec, Scenario

logger = logging.getLogger(__name__)

MAX_ASSIGNMENTS: Final[int] = 20_000_000
MAX_POINTS: Final[int] = 12
MAX_NODES: Final[int] = 4
CHUNK_SIZE: Final[int] = 1 << 16
ORACLE_RESTARTS: Final[int] = 64


def enumerate_optimal(scenario: Scenario, points: DensityGrid) -> Tuple[Partition, float]:
    """Global minimiser of the network delay over every assignment of points to nodes.

    Assignments are visited in lexicographic order of their node-id tuples (first point most
    significant) and only a strictly lower objective replaces the incumbent.
    """

    num_nodes = len(scenario.nodes)
    num_points = points.size
    if num_points > MAX_POINTS or num_nodes > MAX_NODES:
        raise ValueError(f"oracle handles at most {MAX_POINTS} points and {MAX_NODES} nodes, got {num_points} and {num_nodes}")

    total = num_nodes**num_points
    if total > MAX_ASSIGNMENTS:
        raise ValueError(f"oracle instance too large: {total} assignments")

    model = CostModel(scenario, points)
    kernel = model.kernel * points.mass
    scale = scenario.total_users / model.bandwidths
    place_values = num_nodes ** np.arange(num_points - 1, -1, -1, dtype=np.int64)
    node_range = np.arange(num_nodes)

    best_index, best_value = 0, np.inf
    for start in range(0, total, CHUNK_SIZE):
        codes = np.arange(start, min(start + CHUNK_SIZE, total), dtype=np.int64)
        labels = (codes[:, np.newaxis] // place_values) % num_nodes
        # one-hot (assignments, nodes, points)
        members = labels[:, np.newaxis, :] == node_range[np.newaxis, :, np.newaxis]
        masses = (members * points.mass).sum(axis=2)
        integrals = (members * kernel).sum(axis=2)
        values = (scale * masses * integrals).sum(axis=1)

        position = int(np.argmin(values))
        if values[position] < best_value:
            best_index, best_value = int(codes[position]), float(values[position])

    best_labels: npt.NDArray[np.int64] = (best_index // place_values) % num_nodes
    partition = Partition.from_indices(points, best_labels, scenario.node_ids)
    return partition, model.objective(partition.indices)


def random_toy_instance(
    rng: np.random.Generator,
    num_nodes: int = 3,
    min_points: int = 8,
    max_points: int = 12,
    side: float = 1000.0,
) -> Tuple[Scenario, DensityGrid]:
    """Random mixed UAV/BS layout over a square and a point cloud with weights within a factor 3 of each other."""

    area = Area(x_min=0.0, x_max=side, y_min=0.0, y_max=side)
    nodes = []
    for node_id in range(num_nodes):
        aerial = bool(rng.random() < 0.5)
        x, y = rng.uniform(0.0, side, size=2)
        nodes.append(
            NodeSpec(
                id=node_id,
                kind=NodeKind.aerial if aerial else NodeKind.terrestrial,
                x=float(x),
                y=float(y),
                height=float(rng.uniform(100.0, 300.0) if aerial else rng.uniform(10.0, 40.0)),
                tx_power=float(rng.uniform(0.5, 2.0) if aerial else rng.uniform(10.0, 40.0)),
                bandwidth=1e6,
            )
        )

    num_points = int(rng.integers(min_points, max_points + 1))
    coords = rng.uniform(0.0, side, size=(num_points, 2))
    weights = rng.uniform(0.5, 1.5, size=num_points)

    scenario = Scenario(area=area, nodes=tuple(nodes), total_users=300, payload_bits=1e6)
    return scenario, DensityGrid.from_points(area, [tuple(point) for point in coords], weights)


class OracleReport(BaseModel):
    seed: int
    trials: int
    matches: int = 0
    converged: int = 0
    max_gap: float = 0.0
    max_converged_violation: float = 0.0
    worse_trials: List[int] = []
    match_tol: float = 1e-6
    pass_ratio: float = 0.95

    @property
    def passed(self: "OracleReport") -> bool:
        return self.matches >= self.pass_ratio * self.trials and self.max_converged_violation <= 1e-9


def oracle_check(seed: int, trials: int, cfg: Optional[SolverConfig] = None) -> OracleReport:
    """Compare the solver with exhaustive search on `trials` seeded toy instances.

    Without `cfg` the solver also refines ORACLE_RESTARTS random labellings seeded by `seed`.
    """

    if trials < 1:
        raise ValueError("trials must be at least 1")

    cfg = cfg or SolverConfig(restarts=ORACLE_RESTARTS, seed=seed)
    rng = np.random.default_rng(seed)
    report = OracleReport(seed=seed, trials=trials)

    for trial in range(trials):
        scenario, points = random_toy_instance(rng)
        _, optimum = enumerate_optimal(scenario, points)
        partition, trace = ot_association(scenario, points, cfg)
        value = average_delay(scenario, points, partition)

        gap = (value - optimum) / optimum
        report.max_gap = max(report.max_gap, gap)
        if gap <= report.match_tol:
            report.matches += 1
        else:
            report.worse_trials.append(trial)
            logger.warning(f"[oracle] trial {trial}: fixed point {value:.6g} above global optimum {optimum:.6g} ({100 * gap:.3g}%)")

        if trace.converged:
            report.converged += 1
            report.max_converged_violation = max(report.max_converged_violation, trace.violation)

    return report
