from pathlib import Path
from typing import Any, Dict, Optional

import pytest

from features.oracle import OracleReport
from features.report_render import TEMPLATE_DIR, ReportRender


@pytest.mark.unit()
@pytest.mark.parametrize(
    (
        "template_content",
        "format_type",
        "context",
        "expected_validate_template",
        "expected_apply_succeeded",
        "expected_content",
        "expected_error",
    ),
    [
        # Test case on success
        pytest.param("Hello {{ name }}!", 3, {"name": "World"}, True, True, "Hello World!", None),
        pytest.param(
            "Hello {{ name }}!\n\n\n  \nGood bye {{ name }}!", 4, {"name": "World"}, True, True, "Hello World!\nGood bye World!", None
        ),
        pytest.param(
            "Hello {{ name }}!\n\n\n  \nGood bye {{ name }}!", 3, {"name": "World"}, True, True, "Hello World!\n\nGood bye World!", None
        ),
        pytest.param(
            "Hello {{ name }}!\n\n\n  \nGood bye {{ name }}!", 2, {"name": "World"}, True, True, "Hello World!\n\n  \nGood bye World!", None
        ),
        pytest.param(
            "Hello {{ name }}!\n\n\n  \nGood bye {{ name }}!", 1, {"name": "World"}, True, True, "Hello World!\n\nGood bye World!", None
        ),
        pytest.param(
            "Hello {{ name }}!\n\n\n  \nGood bye {{ name }}!",
            0,
            {"name": "World"},
            True,
            True,
            "Hello World!\n\n\n  \nGood bye World!",
            None,
        ),
        pytest.param(
            "{% for v in values %}\n{{ '%.2f'|format(v) }}\n{% endfor %}", 3, {"values": [1, 2.5]}, True, True, "1.00\n2.50\n", None
        ),
        # Test case on failure
        pytest.param("Hello {{ name }}!", 9, {"name": "World"}, True, False, None, "Unsupported format type"),
        pytest.param("Hello {{ name }}!", 3, {}, True, False, None, "'name' is undefined"),
        pytest.param("Hello {{ name !", 3, {"name": "World"}, False, False, None, "unexpected"),
    ],
)
def test_render(
    tmp_path: Path,
    template_content: str,
    format_type: int,
    context: Dict[str, Any],
    expected_validate_template: bool,
    expected_apply_succeeded: bool,
    expected_content: Optional[str],
    expected_error: Optional[str],
) -> None:
    template_path = tmp_path / "template.j2"
    template_path.write_text(template_content, encoding="utf-8")

    render = ReportRender(template_path)
    assert render.is_valid_template == expected_validate_template
    assert render.apply_context(context, format_type) == expected_apply_succeeded
    assert render.render_content == expected_content

    if expected_error is None:
        assert render.error_message is None
    else:
        assert expected_error in str(render.error_message)


@pytest.mark.unit()
def test_missing_template() -> None:
    render = ReportRender("no_such_template.j2")

    assert not render.is_valid_template
    assert not render.apply_context({})
    assert render.error_message is not None


@pytest.mark.unit()
def test_bundled_templates_exist() -> None:
    assert (TEMPLATE_DIR / "run_summary.j2").is_file()
    assert (TEMPLATE_DIR / "oracle_report.j2").is_file()


@pytest.mark.unit()
def test_run_summary_template() -> None:
    context = {
        "scenario_name": "hotspot_reference.toml",
        "method": "ot",
        "nx": 20,
        "ny": 10,
        "total_users": 300,
        "payload_bits": 1e6,
        "average_delay": 0.1234,
        "trace": {"converged": True, "iterations": 12, "exchange_steps": 3, "violation": 0.0, "damping": [0.5, 0.25]},
        "stats": [
            {"node_id": 0, "kind": "aerial", "mass": 0.6, "load": 180.0, "delay_s": 0.1},
            {"node_id": 4, "kind": "terrestrial", "mass": 0.4, "load": 120.0, "delay_s": 0.0234},
        ],
    }
    render = ReportRender("run_summary.j2")

    assert render.apply_context(context)
    content = str(render.render_content)
    assert "method: ot" in content
    assert "grid: 20 x 10" in content
    assert "converged: true" in content
    assert "exchange_steps: 3" in content
    assert "final_damping: 0.25" in content
    assert "0     aerial       0.600000" in content


@pytest.mark.unit()
def test_run_summary_template_without_trace() -> None:
    context = {
        "scenario_name": "s.toml",
        "method": "snr",
        "nx": 4,
        "ny": 4,
        "total_users": 10,
        "payload_bits": 1000.0,
        "average_delay": 1.0,
        "trace": None,
        "stats": [],
    }
    render = ReportRender("run_summary.j2")

    assert render.apply_context(context)
    assert "solver:" not in str(render.render_content)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("matches", "worse_trials", "expected_verdict"),
    [
        pytest.param(10, [], "PASS"),
        pytest.param(8, [3, 7], "FAIL"),
    ],
)
def test_oracle_report_template(matches: int, worse_trials: list, expected_verdict: str) -> None:
    report = OracleReport(seed=1, trials=10, matches=matches, converged=10, worse_trials=worse_trials)
    render = ReportRender("oracle_report.j2")

    assert render.apply_context({"report": report.model_dump(), "passed": report.passed})
    content = str(render.render_content)
    assert content.rstrip().endswith(expected_verdict)
    assert f"{matches}/10" in content
    assert ("3, 7" in content) is bool(worse_trials)
