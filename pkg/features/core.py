#! /usr/bin/env python
import logging
from io import BytesIO
from pathlib import Path
from typing import Any, Dict, Final, List, Optional, Union

import pandas as pd
from pydantic import BaseModel, PrivateAttr

from features.association import CostModel, Partition, SolverConfig, SolveTrace, ot_association, snr_association, write_partition
from features.config_parser import ScenarioParser
from features.density import DensityGrid, build_density
from features.metrics import per_cell_stats
from features.report_render import ReportRender
from features.scenario import Scenario

logger = logging.getLogger(__name__)

METHODS: Final[List[str]] = ["snr", "ot"]


class AppCore(BaseModel):
    __scenario: Optional[Scenario] = PrivateAttr(default=None)
    __scenario_name: Optional[str] = PrivateAttr(default=None)
    __grid: Optional[DensityGrid] = PrivateAttr(default=None)
    __method: Optional[str] = PrivateAttr(default=None)
    __partition: Optional[Partition] = PrivateAttr(default=None)
    __trace: Optional[SolveTrace] = PrivateAttr(default=None)
    __stats: Optional[pd.DataFrame] = PrivateAttr(default=None)
    __average_delay: Optional[float] = PrivateAttr(default=None)
    __scenario_error_message: Optional[str] = PrivateAttr(default=None)
    __run_error_message: Optional[str] = PrivateAttr(default=None)

    __scenario_error_header = PrivateAttr()
    __run_error_header = PrivateAttr()

    def __init__(self: "AppCore", scenario_error_header: Optional[str] = None, run_error_header: Optional[str] = None) -> None:
        super().__init__()

        self.__scenario_error_header = scenario_error_header
        self.__run_error_header = run_error_header

    def load_scenario_file(self: "AppCore", scenario_file: Optional[BytesIO]) -> "AppCore":
        """Load and validate a scenario file."""

        # 呼び出しされるたびに、前回の結果をリセットする
        self.__scenario = None
        self.__scenario_error_message = None

        if not (isinstance(scenario_file, BytesIO) and hasattr(scenario_file, "name")):
            return self

        scenario_filename = scenario_file.name
        scenario_file.seek(0)
        parser = ScenarioParser(scenario_file)
        parser.parse()

        if parser.scenario is not None:
            self.__scenario = parser.scenario
            self.__scenario_name = scenario_filename
            return self

        error_header = self.__scenario_error_header
        self.__scenario_error_message = f"{error_header}: {parser.error_message} in '{scenario_filename}'"
        return self

    def run(
        self: "AppCore",
        method: str,
        nx: int,
        ny: int,
        cfg: Union[SolverConfig, Dict[str, Any], None] = None,
        sigma: Optional[float] = None,
        base_dir: Optional[Path] = None,
    ) -> "AppCore":
        """Associate users of the loaded scenario with `method` on an nx x ny grid.

        `cfg` may be raw solver options, invalid ones are reported under the run error header.
        """

        self.__partition = None
        self.__trace = None
        self.__stats = None
        self.__average_delay = None
        self.__run_error_message = None

        scenario = self.__scenario
        if scenario is None:
            return self

        try:
            if method not in METHODS:
                raise ValueError(f"unknown method '{method}'")
            if isinstance(cfg, dict):
                cfg = SolverConfig.model_validate(cfg)

            grid = build_density(scenario.area, scenario.density, nx, ny, sigma=sigma, base_dir=base_dir)
            model = CostModel(scenario, grid)
            partition = snr_association(scenario, grid, model)
            if method == "ot":
                partition, self.__trace = ot_association(scenario, grid, cfg, partition, model)

        except (OSError, ValueError) as e:
            error_header = self.__run_error_header
            self.__run_error_message = f"{error_header}: {e} in '{self.__scenario_name}'"
            return self

        self.__grid = grid
        self.__method = method
        self.__partition = partition
        self.__stats = per_cell_stats(scenario, grid, partition, model)
        self.__average_delay = model.objective(partition.indices)
        return self

    def render_summary(self: "AppCore") -> Optional[str]:
        if self.__partition is None or self.__scenario is None or self.__stats is None:
            return None

        render = ReportRender("run_summary.j2")
        context: Dict[str, Any] = {
            "scenario_name": self.__scenario_name,
            "method": self.__method,
            "nx": self.__partition.shape[1],
            "ny": self.__partition.shape[0],
            "total_users": self.__scenario.total_users,
            "payload_bits": self.__scenario.payload_bits,
            "average_delay": self.__average_delay,
            "trace": self.__trace.model_dump() if self.__trace is not None else None,
            "stats": self.__stats.to_dict("records"),
        }
        if not render.apply_context(context):
            logger.warning(f"[core] Summary rendering failed: {render.error_message}")
            return None
        return render.render_content

    def write_outputs(self: "AppCore", out_dir: Union[str, Path]) -> List[Path]:
        """Label grid, masses, per-node stats, solver trace and summary under `out_dir`."""

        if self.__partition is None or self.__scenario is None or self.__stats is None:
            return []

        out_dir = Path(out_dir)
        written = list(write_partition(self.__partition, out_dir, self.__scenario.total_users))

        stats_path = out_dir / "stats.csv"
        self.__stats.to_csv(stats_path, index=False, float_format="%.12g")
        written.append(stats_path)

        if self.__trace is not None:
            trace_path = out_dir / "trace.csv"
            pd.DataFrame(
                {
                    "iteration": range(1, self.__trace.iterations + 1),
                    "objective_s": self.__trace.objective,
                    "max_mass_change": self.__trace.max_mass_change,
                    "damping": self.__trace.damping,
                }
            ).to_csv(trace_path, index=False, float_format="%.12g")
            written.append(trace_path)

        summary = self.render_summary()
        if summary is not None:
            summary_path = out_dir / "summary.txt"
            summary_path.write_text(summary, encoding="utf-8")
            written.append(summary_path)

        return written

    def get_download_content(self: "AppCore") -> Optional[bytes]:
        """Label grid as CSV bytes."""

        if self.__partition is None:
            return None

        return pd.DataFrame(self.__partition.label_grid).to_csv(header=False, index=False).encode("utf-8")

    @property
    def scenario(self: "AppCore") -> Optional[Scenario]:
        return self.__scenario

    @scenario.setter
    def scenario(self: "AppCore", scenario: Optional[Scenario]) -> None:
        """Use an in-memory scenario instead of a loaded file."""
        self.__scenario = scenario
        if self.__scenario_name is None:
            self.__scenario_name = "<memory>"

    @property
    def grid(self: "AppCore") -> Optional[DensityGrid]:
        return self.__grid

    @property
    def partition(self: "AppCore") -> Optional[Partition]:
        return self.__partition

    @property
    def trace(self: "AppCore") -> Optional[SolveTrace]:
        return self.__trace

    @property
    def stats(self: "AppCore") -> Optional[pd.DataFrame]:
        return self.__stats

    @property
    def average_delay(self: "AppCore") -> Optional[float]:
        return self.__average_delay

    @property
    def scenario_error_message(self: "AppCore") -> Optional[str]:
        return self.__scenario_error_message

    @property
    def run_error_message(self: "AppCore") -> Optional[str]:
        return self.__run_error_message

    @property
    def is_converged(self: "AppCore") -> bool:
        """False only for a fixed-point run that did not converge."""
        if self.__trace is None:
            return True
        return self.__trace.converged

    @property
    def is_ready(self: "AppCore") -> bool:
        if self.__partition is None:
            return False
        return True
