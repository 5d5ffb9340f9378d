#! /usr/bin/env python
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Final, List, Optional

import pandas as pd
import streamlit as st
from box import Box
from pydantic import BaseModel, PrivateAttr

from features.association import SolverConfig
from features.config_parser import SCENARIO_EXTENSIONS, decode_text
from features.core import METHODS, AppCore
from features.metrics import DEFAULT_SIGMAS, sweep_sigma
from features.oracle import ORACLE_RESTARTS, OracleReport, oracle_check
from features.report_render import ReportRender
from i18n import LANGUAGES

SAMPLES_DIR: Final[Path] = Path(__file__).resolve().parent / "assets" / "examples"


class ExecuteMode(Enum):
    nothing = 0
    run = 1
    sweep = 2
    oracle = 3


class TabViewModel(BaseModel):
    __texts_dict: Box = PrivateAttr()
    __execute_mode: ExecuteMode = PrivateAttr(default=ExecuteMode.nothing)

    def __init__(self: "TabViewModel", texts: Box) -> None:
        super().__init__()
        self.__texts_dict = texts

    @property
    def __texts(self: "TabViewModel") -> Box:
        return self.__texts_dict

    def set_execute_mode(self: "TabViewModel", is_run: bool, is_sweep: bool, is_oracle: bool) -> "TabViewModel":
        """Set execute mode."""

        mode_mapping = {
            is_run: ExecuteMode.run,
            is_sweep: ExecuteMode.sweep,
            is_oracle: ExecuteMode.oracle,
        }

        for condition, mode in mode_mapping.items():
            if condition:
                self.__execute_mode = mode
                return self

        self.__execute_mode = ExecuteMode.nothing
        return self

    @property
    def execute_mode(self: "TabViewModel") -> ExecuteMode:
        return self.__execute_mode

    def show_tab1(self: "TabViewModel", model: AppCore) -> None:
        """Show tab1 response content."""

        if model.scenario_error_message or model.run_error_message:
            for message in (model.scenario_error_message, model.run_error_message):
                if message:
                    st.error(message)
            return

        if self.__execute_mode != ExecuteMode.run:
            return

        if model.scenario is None or model.partition is None or model.stats is None:
            st.warning(self.__texts.tab1.error_no_scenario)
            return

        if model.is_converged:
            st.success(self.__texts.tab1.success_run)
        else:
            st.warning(self.__texts.tab1.warning_not_converged)

        metrics = st.columns(3)
        metrics[0].metric(self.__texts.tab1.average_delay, f"{model.average_delay:.6g}")
        if model.trace is not None:
            metrics[1].metric(self.__texts.tab1.iterations, model.trace.iterations)
            metrics[2].metric(self.__texts.tab1.violation, f"{model.trace.violation:.3g}")

        st.dataframe(model.stats, hide_index=True, use_container_width=True)

        grid = model.grid
        if grid is not None:
            label_map = pd.DataFrame({"x": grid.xs, "y": grid.ys, "node": [str(label) for label in model.partition.labels]})
            st.container(border=True).scatter_chart(label_map, x="x", y="y", color="node")

        summary = model.render_summary()
        if summary is not None:
            st.text_area(self.__texts.tab1.summary_text, summary, key="tab1_summary_textarea", height=300)

    def show_tab2(self: "TabViewModel", table: Optional[pd.DataFrame], error_message: Optional[str]) -> None:
        """Show tab2 response content."""

        if error_message:
            st.error(error_message)
            return

        if self.__execute_mode != ExecuteMode.sweep:
            return

        if table is None:
            st.warning(self.__texts.tab2.error_no_scenario)
            return

        st.success(self.__texts.tab2.success_sweep)
        st.dataframe(table, hide_index=True, use_container_width=True)
        st.container(border=True).line_chart(table, x="sigma_o", y=["delay_snr_s", "delay_ot_s"])

    def show_tab3(
        self: "TabViewModel", report: Optional[OracleReport], report_text: Optional[str], error_message: Optional[str] = None
    ) -> None:
        """Show tab3 response content."""

        if error_message:
            st.error(error_message)
            return

        if self.__execute_mode != ExecuteMode.oracle or report is None:
            return

        if report.passed:
            st.success(self.__texts.tab3.success_oracle)
        else:
            st.error(self.__texts.tab3.error_oracle)

        st.text_area(self.__texts.tab3.report_text, report_text or "", key="tab3_result_textarea", height=250)

    def show_tab4(self: "TabViewModel") -> None:
        for path in sorted(SAMPLES_DIR.iterdir()):
            if path.suffix.lstrip(".") not in SCENARIO_EXTENSIONS + ["txt"]:
                continue

            try:
                content = decode_text(path.read_bytes())
            except UnicodeError:
                continue
            st.text_area(label=path.name, value=content, height=250)


def solver_options_from_state() -> Dict[str, Any]:
    """Raw sidebar solver options, validated by whoever builds the SolverConfig."""

    defaults = SolverConfig()
    return {
        "tol": st.session_state.get("solver_tol", defaults.tol),
        "max_iter": st.session_state.get("solver_max_iter", defaults.max_iter),
        "damping": st.session_state.get("solver_damping", defaults.damping),
    }


def parse_sigma_list(text: str) -> List[float]:
    return [float(item) for item in text.replace(" ", "").split(",") if item]


def main() -> None:
    """Generate Streamlit web screens."""

    app_title: Final[str] = "UAV cell association"
    app_icon: Final[str] = ":satellite_antenna:"
    default_language: Final[str] = "English"
    default_grid: Final[int] = 60
    default_trials: Final[int] = 20

    texts: Final[Box] = Box(LANGUAGES[st.session_state.get("language", default_language)])

    st.session_state.update(
        {
            "tab2_result_content": st.session_state.get("tab2_result_content"),
            "tab3_result_content": st.session_state.get("tab3_result_content"),
        }
    )

    st.set_page_config(page_title=app_title, page_icon=app_icon, layout="wide", initial_sidebar_state="expanded")
    st.title(f"{app_title} {app_icon}")

    with st.sidebar:
        st.selectbox(texts.sidebar.language, list(LANGUAGES), key="language")
        st.write(texts.sidebar.welcome)
        st.expander(texts.sidebar.syntax_of_each_file, expanded=False).markdown(
            f"""
            - [toml syntax docs]({texts.sidebar.toml_syntax_doc})
            - [yaml syntax docs]({texts.sidebar.yaml_syntax_doc})
            """
        )

        st.subheader(texts.sidebar.subheader_grid)
        st.number_input(texts.sidebar.grid_nx, min_value=2, max_value=400, value=default_grid, key="grid_nx")
        st.number_input(texts.sidebar.grid_ny, min_value=2, max_value=400, value=default_grid, key="grid_ny")

        st.subheader(texts.sidebar.subheader_solver)
        st.selectbox(texts.sidebar.tol, [1e-4, 1e-6, 1e-8, 1e-10], index=1, format_func=lambda x: f"{x:g}", key="solver_tol")
        st.number_input(texts.sidebar.max_iter, min_value=1, max_value=5000, value=SolverConfig().max_iter, key="solver_max_iter")
        st.slider(texts.sidebar.damping, min_value=0.05, max_value=1.0, value=SolverConfig().damping, step=0.05, key="solver_damping")

    nx = int(st.session_state.get("grid_nx", default_grid))
    ny = int(st.session_state.get("grid_ny", default_grid))

    tabs = st.tabs(
        [
            ":satellite_antenna: " + texts.tab1.menu_title,
            ":chart_with_downwards_trend: " + texts.tab2.menu_title,
            ":mag: " + texts.tab3.menu_title,
            ":briefcase: " + texts.tab4.menu_title,
        ]
    )

    view_mode = (
        st.session_state.get("tab1_execute_run", False),
        st.session_state.get("tab2_execute_sweep", False),
        st.session_state.get("tab3_execute_oracle", False),
    )

    with tabs[0]:
        st.subheader(":satellite_antenna: " + texts.tab1.subheader, divider="rainbow")
        tab1_row1 = st.columns(2)
        tab1_row2 = st.columns(2)

        tab1_row1[0].container(border=True).file_uploader(texts.tab1.upload_scenario, type=SCENARIO_EXTENSIONS, key="tab1_scenario_file")
        with tab1_row1[1].container(border=True):
            st.radio(
                texts.tab1.method,
                METHODS,
                index=METHODS.index("ot"),
                format_func=lambda x: texts.tab1.method_items[x],
                horizontal=True,
                key="tab1_method",
            )
            st.toggle(texts.tab1.sigma_override, value=False, key="tab1_sigma_override")
            st.number_input(texts.tab1.sigma, min_value=1.0, value=float(DEFAULT_SIGMAS[0]), step=100.0, key="tab1_sigma")

        tab1_row2[0].button(texts.tab1.run_button, use_container_width=True, key="tab1_execute_run")

        tab1_model = AppCore(texts.tab1.error_scenario_parse, texts.tab1.error_run)
        tab1_model.load_scenario_file(st.session_state.get("tab1_scenario_file"))

        if st.session_state.get("tab1_execute_run", False):
            sigma = float(st.session_state["tab1_sigma"]) if st.session_state.get("tab1_sigma_override", False) else None
            tab1_method = st.session_state.get("tab1_method", "ot")
            tab1_model.run(tab1_method, nx, ny, solver_options_from_state(), sigma=sigma, base_dir=SAMPLES_DIR)

        tab1_row2[1].download_button(
            label=texts.tab1.download_button,
            data=tab1_model.get_download_content() or "No data available",
            file_name="labels.csv",
            disabled=False if tab1_model.is_ready else True,
            use_container_width=True,
        )

        tab1_view_model = TabViewModel(texts)
        tab1_view_model.set_execute_mode(*view_mode).show_tab1(tab1_model)

    with tabs[1]:
        st.subheader(":chart_with_downwards_trend: " + texts.tab2.subheader, divider="rainbow")
        tab2_row1 = st.columns(2)
        tab2_row2 = st.columns(2)

        tab2_row1[0].container(border=True).file_uploader(texts.tab2.upload_scenario, type=SCENARIO_EXTENSIONS, key="tab2_scenario_file")
        tab2_row1[1].container(border=True).text_input(
            texts.tab2.sigma_list, ", ".join(f"{sigma:g}" for sigma in DEFAULT_SIGMAS), key="tab2_sigma_list"
        )
        tab2_row2[0].button(texts.tab2.sweep_button, use_container_width=True, key="tab2_execute_sweep")

        tab2_model = AppCore(texts.tab2.error_scenario_parse)
        tab2_model.load_scenario_file(st.session_state.get("tab2_scenario_file"))
        tab2_error = tab2_model.scenario_error_message
        tab2_table: Optional[pd.DataFrame] = None

        if st.session_state.get("tab2_execute_sweep", False) and tab2_model.scenario is not None:
            try:
                sigmas = parse_sigma_list(st.session_state.get("tab2_sigma_list", ""))
                tab2_cfg = SolverConfig.model_validate(solver_options_from_state())
                tab2_table = sweep_sigma(tab2_model.scenario, sigmas, nx, ny, tab2_cfg)
            except ValueError as e:
                tab2_error = f"{texts.tab2.error_sweep}: {e}"

        st.session_state.update({"tab2_result_content": tab2_table})

        tab2_row2[1].download_button(
            label=texts.tab2.download_button,
            data=tab2_table.to_csv(index=False, float_format="%.12g") if tab2_table is not None else "No data available",
            file_name="sweep.csv",
            disabled=tab2_table is None,
            use_container_width=True,
        )

        tab2_view_model = TabViewModel(texts)
        tab2_view_model.set_execute_mode(*view_mode).show_tab2(tab2_table, tab2_error)

    with tabs[2]:
        st.subheader(":mag: " + texts.tab3.subheader, divider="rainbow")
        tab3_row1 = st.columns(3)

        tab3_row1[0].container(border=True).number_input(texts.tab3.seed, min_value=0, value=0, step=1, key="tab3_seed")
        tab3_row1[1].container(border=True).number_input(texts.tab3.trials, min_value=1, value=default_trials, step=1, key="tab3_trials")
        tab3_row1[2].button(texts.tab3.oracle_button, use_container_width=True, key="tab3_execute_oracle")

        tab3_report: Optional[OracleReport] = None
        tab3_text: Optional[str] = None
        tab3_error: Optional[str] = None
        if st.session_state.get("tab3_execute_oracle", False):
            try:
                tab3_seed = int(st.session_state.get("tab3_seed", 0))
                # restarts stay at the oracle count, the sidebar only sets the iteration options
                tab3_options = {**solver_options_from_state(), "restarts": ORACLE_RESTARTS, "seed": tab3_seed}
                tab3_report = oracle_check(
                    tab3_seed,
                    int(st.session_state.get("tab3_trials", default_trials)),
                    SolverConfig.model_validate(tab3_options),
                )
            except ValueError as e:
                tab3_error = f"{texts.tab3.error_oracle_run}: {e}"

        if tab3_report is not None:
            render = ReportRender("oracle_report.j2")
            if render.apply_context({"report": tab3_report.model_dump(), "passed": tab3_report.passed}):
                tab3_text = render.render_content

        st.session_state.update({"tab3_result_content": tab3_text})

        tab3_view_model = TabViewModel(texts)
        tab3_view_model.set_execute_mode(*view_mode).show_tab3(tab3_report, tab3_text, tab3_error)

    with tabs[3]:
        st.subheader(":briefcase: " + texts.tab4.subheader, divider="rainbow")
        tab4_view_model = TabViewModel(texts)
        tab4_view_model.show_tab4()


if __name__ == "__main__":
    main()
