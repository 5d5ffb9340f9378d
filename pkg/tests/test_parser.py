from io import BytesIO
from pathlib import Path
from typing import Optional

import pytest

from features.config_parser import (
    ScenarioParser,
    db_to_linear,
    dbm_to_watts,
    decode_text,
    load_scenario,
    open_scenario_file,
    write_scenario,
)
from features.scenario import reference_scenario

BASE_TOML = """
[area]
x_min = 0.0
x_max = 1000.0
y_min = 0.0
y_max = 1000.0

[channel]
mu_los_db = 3.0
mu_nlos_db = 23.0
noise_psd_dbm = -170.0

[users]
N = 100
b = 1.0e6
"""

YAML_HEAD = b"area: {x_min: 0, x_max: 1000, y_min: 0, y_max: 1000}\nchannel: {}\nusers: {N: 10, b: 1000}\n"

NODE_TOML = """
[[nodes]]
id = {node_id}
kind = "{kind}"
x = {x}
y = 500.0
height = 20.0
tx_power_dbm = 30.0
bandwidth = {bandwidth}
"""


def _toml(*nodes: str, extra: str = "") -> bytes:
    return (BASE_TOML + extra + "".join(nodes)).encode("utf-8")


def _node(node_id: int = 0, kind: str = "terrestrial", x: float = 500.0, bandwidth: float = 1e6) -> str:
    return NODE_TOML.format(node_id=node_id, kind=kind, x=x, bandwidth=bandwidth)


def _file(content: bytes, filename: str) -> BytesIO:
    config_file = BytesIO(content)
    config_file.name = filename
    return config_file


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("content", "filename", "is_successful", "expected_nodes", "expected_error"),
    [
        # Test case on success
        pytest.param(_toml(_node()), "scenario.toml", True, 1, None),
        pytest.param(_toml(_node(0), _node(1, "aerial", 200.0)), "scenario.toml", True, 2, None),
        pytest.param(_toml(extra="[deployment]\nnum_uav = 4\nnum_bs = 2\n"), "scenario.toml", True, 6, None),
        pytest.param(
            YAML_HEAD + b"deployment: {num_uav: 1, num_bs: 1}\n",
            "scenario.yaml",
            True,
            2,
            None,
        ),
        pytest.param(
            YAML_HEAD + b"deployment: {num_uav: 2, num_bs: 0}\n",
            "scenario.yml",
            True,
            2,
            None,
        ),
        # Test case on validation failure
        pytest.param(_toml(_node(bandwidth=0.0)), "scenario.toml", False, None, "bandwidth"),
        pytest.param(_toml(_node(x=1001.0)), "scenario.toml", False, None, "outside the area"),
        pytest.param(_toml(_node(0), _node(0)), "scenario.toml", False, None, "unique"),
        pytest.param(_toml(), "scenario.toml", False, None, "at least one node"),
        pytest.param(_toml(_node(), extra="[deployment]\nnum_uav = 1\nnum_bs = 0\n"), "scenario.toml", False, None, "not both"),
        pytest.param(_toml(_node(), extra="[density]\nkind = \"truncated_gaussian\"\n"), "scenario.toml", False, None, "center and sigma"),
        pytest.param(_toml(_node()).replace(b"[users]\nN = 100", b"[users]\nM = 100"), "scenario.toml", False, None, "missing key"),
        pytest.param(_toml(_node()).replace(b"[users]", b"[people]"), "scenario.toml", False, None, "missing sections: users"),
        pytest.param(_toml(_node()).replace(b"mu_los_db", b"mu_loss_db"), "scenario.toml", False, None, "unknown keys"),
        pytest.param(_toml(_node()).replace(b"mu_los_db = 3.0", b"mu_los_db = 3.0\nmu_los = 2.0"), "scenario.toml", False, None, "one of"),
        pytest.param(_toml(_node()).replace(b"mu_nlos_db = 23.0", b"mu_nlos_db = 1.0"), "scenario.toml", False, None, "mu_nlos >= mu_los"),
        # Test case on read or syntax failure
        pytest.param(b"[area\nx_min = 0", "scenario.toml", False, None, "Expected"),
        pytest.param(b"- just\n- a list\n", "scenario.yaml", False, None, "Invalid YAML"),
        pytest.param(b"key: [unclosed", "scenario.yaml", False, None, "expected"),
        pytest.param(b"\x00\x01\x02\x03\x04", "scenario.toml", False, None, "binary"),
        pytest.param(_toml(_node()), "scenario.txt", False, None, "Unsupported file type"),
    ],
)
def test_parse(content: bytes, filename: str, is_successful: bool, expected_nodes: Optional[int], expected_error: Optional[str]) -> None:
    parser = ScenarioParser(_file(content, filename))

    assert parser.parse() == is_successful

    if is_successful:
        assert parser.scenario is not None
        assert len(parser.scenario.nodes) == expected_nodes
        assert parser.error_message is None
        assert isinstance(parser.parsed_dict, dict)
    else:
        assert parser.scenario is None
        assert expected_error in str(parser.error_message)


@pytest.mark.unit()
def test_parse_converts_units() -> None:
    parser = ScenarioParser(_file(_toml(_node()), "scenario.toml"))
    assert parser.parse()
    scenario = parser.scenario
    assert scenario is not None

    assert scenario.channel.mu_los == pytest.approx(10**0.3)
    assert scenario.channel.mu_nlos == pytest.approx(10**2.3)
    assert scenario.channel.noise_psd == pytest.approx(1e-20)
    assert scenario.nodes[0].tx_power == pytest.approx(1.0)
    assert "'area'" in parser.parsed_str


@pytest.mark.unit()
def test_parse_shift_jis() -> None:
    content = "# 基地局シナリオ\n".encode("shift_jis") + _toml(_node())
    parser = ScenarioParser(_file(content, "scenario.toml"))

    assert parser.parse()
    assert parser.scenario is not None


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("value", "expected"),
    [
        pytest.param(0.0, 1.0),
        pytest.param(10.0, 10.0),
        pytest.param(-30.0, 1e-3),
    ],
)
def test_db_to_linear(value: float, expected: float) -> None:
    assert db_to_linear(value) == pytest.approx(expected)


@pytest.mark.unit()
def test_dbm_to_watts() -> None:
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(46.0) == pytest.approx(39.81, rel=1e-3)
    assert dbm_to_watts(-170.0) == pytest.approx(1e-20)


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("text", "encoding"),
    [
        pytest.param("ABCDEF", "ASCII"),
        pytest.param("área", "utf-8"),
        pytest.param("漢字による試験", "utf-8"),
        pytest.param("漢字による試験", "Shift_JIS"),
        pytest.param("漢字による試験", "EUC-JP"),
    ],
)
def test_decode_text(text: str, encoding: str) -> None:
    assert decode_text(text.encode(encoding)) == text


@pytest.mark.unit()
def test_decode_text_rejects_binary() -> None:
    with pytest.raises(UnicodeError, match="binary"):
        decode_text(b"\x89PNG\r\n\x1a\n\x00\x00\x00\rIHDR")


@pytest.mark.unit()
@pytest.mark.parametrize(
    ("filename", "expected_nodes", "expected_density"),
    [
        pytest.param("hotspot_reference.toml", 6, "truncated_gaussian"),
        pytest.param("hotspot_deployment.yaml", 6, "truncated_gaussian"),
        pytest.param("measured_density.toml", 6, "file"),
    ],
)
def test_load_sample_scenarios(examples_dir: Path, filename: str, expected_nodes: int, expected_density: str) -> None:
    scenario = load_scenario(examples_dir / filename)

    assert len(scenario.nodes) == expected_nodes
    assert scenario.total_users == 300
    assert scenario.payload_bits == 1e6
    assert scenario.density.kind == expected_density


@pytest.mark.unit()
def test_sample_matches_reference_layout(examples_dir: Path) -> None:
    from_file = load_scenario(examples_dir / "hotspot_reference.toml")
    deployed = load_scenario(examples_dir / "hotspot_deployment.yaml")

    assert [(node.x, node.y, node.height, node.kind) for node in from_file.nodes] == [
        (node.x, node.y, node.height, node.kind) for node in deployed.nodes
    ]
    assert [node.tx_power for node in from_file.nodes] == pytest.approx([node.tx_power for node in deployed.nodes])


@pytest.mark.unit()
def test_load_scenario_error_names_file(tmp_path: Path) -> None:
    path = tmp_path / "broken.toml"
    path.write_bytes(_toml(_node(bandwidth=0.0)))

    with pytest.raises(ValueError, match="in 'broken.toml'"):
        load_scenario(path)

    with pytest.raises(OSError):
        open_scenario_file(tmp_path / "missing.toml")


@pytest.mark.unit()
@pytest.mark.parametrize("filename", ["scenario.toml", "scenario.yaml"])
def test_write_scenario_reloads(tmp_path: Path, filename: str) -> None:
    scenario = reference_scenario(sigma=400.0)

    path = write_scenario(scenario, tmp_path / filename)

    assert load_scenario(path) == scenario


@pytest.mark.unit()
def test_write_scenario_rejects_unknown_suffix(tmp_path: Path) -> None:
    with pytest.raises(ValueError, match="Unsupported file type"):
        write_scenario(reference_scenario(), tmp_path / "scenario.json")
