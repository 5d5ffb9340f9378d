#! /usr/bin/env python
import pprint
import tomllib
from io import BytesIO
from pathlib import Path
from typing import Any, Dict, Final, List, Optional, Union

import chardet
import toml
import yaml
from pydantic import BaseModel, PrivateAttr, ValidationError

from features.scenario import Area, ChannelParams, DensitySpec, NodeSpec, Scenario, grid_deployment

SCENARIO_EXTENSIONS: Final[List[str]] = ["toml", "yaml", "yml"]
KNOWN_ENCODINGS: Final[List[str]] = ["ASCII", "utf-8", "Shift_JIS", "EUC-JP", "ISO-2022-JP"]


def db_to_linear(value_db: float) -> float:
    return float(10 ** (value_db / 10))


def dbm_to_watts(value_dbm: float) -> float:
    return db_to_linear(value_dbm - 30)


def decode_text(raw_data: bytes) -> str:
    """UTF-8 first, then the detected encoding, Japanese encodings preferred."""

    if b"\0" in raw_data[:1024]:
        raise UnicodeError("binary content is not a scenario file")

    try:
        return raw_data.decode("utf-8")
    except UnicodeDecodeError:
        pass

    detected = chardet.detect(raw_data)["encoding"]
    candidates = ([detected] if detected else []) + KNOWN_ENCODINGS
    for encoding in candidates:
        try:
            return raw_data.decode(encoding)
        except (UnicodeDecodeError, LookupError):
            continue

    raise UnicodeError("unable to detect the text encoding")


def _linear_value(section: Dict[str, Any], key: str, section_name: str) -> Optional[float]:
    """Read `key` given linear, `key_db` (dB) or `key_dbm` (dBm) and return it in linear SI."""

    given = [name for name in (key, f"{key}_db", f"{key}_dbm") if name in section]
    if len(given) > 1:
        raise ValueError(f"{section_name}: give only one of {', '.join(given)}")
    if not given:
        return None

    name = given[0]
    value = float(section[name])
    if name.endswith("_dbm"):
        return dbm_to_watts(value)
    if name.endswith("_db"):
        return db_to_linear(value)
    return value


def _channel_params(section: Dict[str, Any]) -> ChannelParams:
    plain_keys = ("carrier_freq", "ref_distance", "alpha", "gamma", "pathloss_exp")
    values: Dict[str, Any] = {key: section[key] for key in plain_keys if key in section}
    for key in ("mu_los", "mu_nlos", "noise_psd"):
        value = _linear_value(section, key, "channel")
        if value is not None:
            values[key] = value

    unknown = set(section) - set(values) - {f"{key}{suffix}" for key in ("mu_los", "mu_nlos", "noise_psd") for suffix in ("_db", "_dbm")}
    if unknown:
        raise ValueError(f"channel: unknown keys {sorted(unknown)}")

    return ChannelParams(**values)


def _node_specs(document: Dict[str, Any], area: Area) -> List[NodeSpec]:
    if "nodes" in document and "deployment" in document:
        raise ValueError("give either nodes or deployment, not both")

    if "deployment" in document:
        deployment = dict(document["deployment"])
        return grid_deployment(area, **deployment)

    nodes = []
    for raw_node in document.get("nodes") or []:
        node = dict(raw_node)
        tx_power = _linear_value(node, "tx_power", f"node {node.get('id')}")
        node = {key: value for key, value in node.items() if not key.startswith("tx_power")}
        nodes.append(NodeSpec(tx_power=tx_power, **node))
    return nodes


def _validation_message(error: ValidationError) -> str:
    messages = []
    for detail in error.errors():
        location = ".".join(str(loc) for loc in detail["loc"])
        messages.append(f"{location}: {detail['msg']}" if location else detail["msg"])
    return "; ".join(messages)


def build_scenario(document: Dict[str, Any]) -> Scenario:
    """Validated scenario from a parsed scenario document."""

    missing = [key for key in ("area", "channel", "users") if key not in document]
    if missing:
        raise ValueError(f"missing sections: {', '.join(missing)}")

    users = document["users"]
    area = Area(**document["area"])
    density = DensitySpec(**document["density"]) if "density" in document else DensitySpec()

    return Scenario(
        area=area,
        nodes=tuple(_node_specs(document, area)),
        channel=_channel_params(dict(document["channel"])),
        total_users=users["N"],
        payload_bits=users["b"],
        density=density,
    )


class ScenarioParser(BaseModel):
    __file_extension: str = PrivateAttr()
    __config_data: Optional[str] = PrivateAttr(default=None)
    __parsed_dict: Optional[Dict[str, Any]] = PrivateAttr(default=None)
    __scenario: Optional[Scenario] = PrivateAttr(default=None)
    __error_message: Optional[str] = PrivateAttr(default=None)

    def __init__(self: "ScenarioParser", config_file: BytesIO) -> None:
        super().__init__()

        self.__file_extension = getattr(config_file, "name", "").split(".")[-1].lower()
        if self.__file_extension not in SCENARIO_EXTENSIONS:
            self.__error_message = "Unsupported file type"
            return

        try:
            self.__config_data = decode_text(config_file.read())
        except UnicodeError as e:
            self.__error_message = str(e)

    def parse(self: "ScenarioParser") -> bool:
        if self.__config_data is None:
            return False

        try:
            match self.__file_extension:
                case "toml":
                    self.__parsed_dict = tomllib.loads(self.__config_data)
                case "yaml" | "yml":
                    self.__parsed_dict = yaml.safe_load(self.__config_data)

                    if not isinstance(self.__parsed_dict, dict):
                        raise SyntaxError("Invalid YAML file loaded.")

            self.__scenario = build_scenario(self.__parsed_dict or {})

        except ValidationError as e:
            self.__error_message = _validation_message(e)
            self.__scenario = None
            return False

        except (
            tomllib.TOMLDecodeError,
            yaml.MarkedYAMLError,
            yaml.reader.ReaderError,
            KeyError,
            SyntaxError,
            TypeError,
            ValueError,
        ) as e:
            self.__error_message = f"missing key {e}" if isinstance(e, KeyError) else str(e)
            self.__scenario = None
            return False

        return True

    @property
    def parsed_dict(self: "ScenarioParser") -> Optional[Dict[str, Any]]:
        return self.__parsed_dict

    @property
    def parsed_str(self: "ScenarioParser") -> str:
        return pprint.pformat(self.__parsed_dict)

    @property
    def scenario(self: "ScenarioParser") -> Optional[Scenario]:
        """Validated scenario, or None when reading, parsing or validation failed."""
        return self.__scenario

    @property
    def error_message(self: "ScenarioParser") -> Optional[str]:
        return self.__error_message


def open_scenario_file(path: Union[str, Path]) -> BytesIO:
    path = Path(path)
    config_file = BytesIO(path.read_bytes())
    config_file.name = path.name
    return config_file


def load_scenario(path: Union[str, Path]) -> Scenario:
    parser = ScenarioParser(open_scenario_file(path))
    if not parser.parse() or parser.scenario is None:
        raise ValueError(f"{parser.error_message} in '{Path(path).name}'")
    return parser.scenario


def write_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    """Write `scenario` as TOML or YAML according to the file extension."""

    path = Path(path)
    document = scenario.to_document()

    match path.suffix.lower():
        case ".toml":
            text = toml.dumps(document)
        case ".yaml" | ".yml":
            text = yaml.safe_dump(document, sort_keys=False)
        case _:
            raise ValueError(f"Unsupported file type '{path.suffix}'")

    path.write_text(text, encoding="utf-8")
    return path
