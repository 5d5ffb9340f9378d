#! /usr/bin/env python
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Final, Optional, Sequence

import numpy as np
import pandas as pd

from features.association import CostModel, Partition, SolverConfig, ot_association, snr_association
from features.density import DensityGrid, truncated_gaussian_density
from features.scenario import Scenario

logger = logging.getLogger(__name__)

THREADS_ENV: Final[str] = "OTCELL_THREADS"
SWEEP_COLUMNS: Final[Sequence[str]] = ("sigma_o", "delay_snr_s", "delay_ot_s", "reduction_pct", "converged")
DEFAULT_SIGMAS: Final[Sequence[float]] = (200.0, 400.0, 600.0, 800.0, 1000.0, 1200.0)


def average_delay(scenario: Scenario, grid: DensityGrid, partition: Partition, model: Optional[CostModel] = None) -> float:
    """Network delay: sum over nodes of (N a_k / W_k) * integral over D_k of F(v, s_k) f."""

    model = model or CostModel(scenario, grid)
    return model.objective(partition.indices)


def per_cell_stats(scenario: Scenario, grid: DensityGrid, partition: Partition, model: Optional[CostModel] = None) -> pd.DataFrame:
    """Load, delay contribution and mass-weighted mean SNR of every node's cell."""

    model = model or CostModel(scenario, grid)
    indices = partition.indices
    columns = np.arange(indices.size)

    served_snr = model.snr[indices, columns] * grid.mass
    snr_sums = np.bincount(indices, weights=served_snr, minlength=len(partition.node_ids))
    masses = partition.masses
    with np.errstate(divide="ignore", invalid="ignore"):
        mean_snr = np.where(masses > 0, snr_sums / masses, np.nan)

    return pd.DataFrame(
        {
            "node_id": partition.node_ids,
            "kind": [scenario.node(node_id).kind.value for node_id in partition.node_ids],
            "mass": masses,
            "load": scenario.total_users * masses,
            "delay_s": model.node_delays(indices),
            "mean_snr": mean_snr,
        }
    )


def reduction_pct(delay_baseline: float, delay_candidate: float) -> float:
    return 100.0 * (1.0 - delay_candidate / delay_baseline)


def _sweep_row(scenario: Scenario, sigma: float, nx: int, ny: int, cfg: SolverConfig) -> Dict[str, object]:
    center = scenario.density.center if scenario.density.center is not None else scenario.area.center
    grid = truncated_gaussian_density(scenario.area, center, sigma, nx, ny)
    model = CostModel(scenario, grid)

    baseline = snr_association(scenario, grid, model)
    partition, trace = ot_association(scenario, grid, cfg, baseline, model)
    delay_snr = model.objective(baseline.indices)
    delay_ot = model.objective(partition.indices)

    logger.info(f"[sweep] sigma_o={sigma:g} delay_snr={delay_snr:.6g} delay_ot={delay_ot:.6g} converged={trace.converged}")
    return {
        "sigma_o": float(sigma),
        "delay_snr_s": delay_snr,
        "delay_ot_s": delay_ot,
        "reduction_pct": reduction_pct(delay_snr, delay_ot),
        "converged": trace.converged,
    }


def thread_limit() -> int:
    """Upper bound on sweep workers: $OTCELL_THREADS when set, the CPU count otherwise."""

    fallback = os.cpu_count() or 1
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return fallback

    try:
        return max(1, int(value))
    except ValueError:
        logger.warning(f"[sweep] Ignoring non-integer {THREADS_ENV}={value!r}")
        return fallback


def sweep_sigma(
    scenario: Scenario,
    sigmas: Sequence[float],
    nx: int,
    ny: int,
    cfg: Optional[SolverConfig] = None,
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """Delay of max-SNR and delay-minimising association for each hotspot width, rows in input order.

    `threads` defaults to one worker per row; either way the pool never exceeds `thread_limit()`.
    """

    if len(sigmas) < 1:
        raise ValueError("sigma list must not be empty")
    if any(not sigma > 0 for sigma in sigmas):
        raise ValueError("sigma values must be positive")

    cfg = cfg or SolverConfig()
    workers = min(threads or len(sigmas), thread_limit(), len(sigmas))

    if workers == 1:
        rows = [_sweep_row(scenario, sigma, nx, ny, cfg) for sigma in sigmas]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda sigma: _sweep_row(scenario, sigma, nx, ny, cfg), sigmas))

    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
