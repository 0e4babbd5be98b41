"""Storage utilities: scenario files, CSV results and JSON manifests."""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from .models import (
    Detection,
    FsoChannelParams,
    ResultRow,
    RfFadingParams,
    Scenario,
    ScenarioFile,
    SweepSpec,
)
from .safety import ScenarioParseError, ValidationError

RF_KEYS = ("alpha", "eta", "mu", "omega_db")
FSO_DIRECT_KEYS = ("fso.g_d", "fso.omega_cap_d")
FSO_CONSTITUENT_KEYS = ("fso.omega", "fso.b0", "fso.rho", "fso.phase_diff")
SWEEP_KEYS = ("sweep.key", "sweep.from_db", "sweep.to_db", "sweep.points")
SWEEPABLE = ("rf_main.omega_db", "rf_eve.omega_db", "fso.u_r_db")

SCENARIO_KEYS = (
    *(f"rf_main.{k}" for k in RF_KEYS),
    *(f"rf_eve.{k}" for k in RF_KEYS),
    "fso.alpha_d",
    "fso.beta_d",
    *FSO_DIRECT_KEYS,
    *FSO_CONSTITUENT_KEYS,
    "fso.epsilon",
    "fso.detection",
    "fso.u_r_db",
    "rs_bits",
    "mc.seed",
    "mc.n_samples",
    *SWEEP_KEYS,
)

RESULT_COLUMNS = list(ResultRow.model_fields)

def parse_scenario_text(text: str) -> dict[str, str]:
    """Split key=value lines into a dict; '#' starts a comment line."""
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioParseError(f"expected key=value, got '{line}'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ScenarioParseError(f"unknown key '{key}'", line=number, key=key)
        if key in values:
            raise ScenarioParseError(f"duplicate key '{key}'", line=number, key=key)
        if not value:
            raise ScenarioParseError(f"empty value for '{key}'", line=number, key=key)
        values[key] = value
    return values

def _number(values: dict[str, str], key: str, default: Optional[float] = None) -> float:
    if key not in values:
        if default is None:
            raise ScenarioParseError(f"missing required key '{key}'", key=key)
        return default
    try:
        number = float(values[key])
    except ValueError:
        raise ScenarioParseError(f"'{key}' must be a number, got '{values[key]}'", key=key)
    if not math.isfinite(number):
        raise ScenarioParseError(f"'{key}' must be finite, got '{values[key]}'", key=key)
    return number

def _integer(values: dict[str, str], key: str) -> int:
    number = _number(values, key)
    if number != int(number):
        raise ScenarioParseError(f"'{key}' must be an integer, got '{values[key]}'", key=key)
    return int(number)

def _rf(values: dict[str, str], prefix: str) -> RfFadingParams:
    return RfFadingParams.from_db(
        alpha=_number(values, f"{prefix}.alpha"),
        eta=_number(values, f"{prefix}.eta"),
        mu=_number(values, f"{prefix}.mu"),
        omega_db=_number(values, f"{prefix}.omega_db"),
    )

def _fso(values: dict[str, str]) -> FsoChannelParams:
    direct = [k for k in FSO_DIRECT_KEYS if k in values]
    constituents = [k for k in FSO_CONSTITUENT_KEYS if k in values]
    if direct and constituents:
        raise ScenarioParseError(
            "give either fso.g_d/fso.omega_cap_d or the constituents "
            "fso.omega/fso.b0/fso.rho/fso.phase_diff, not both",
            key=constituents[0],
        )
    detection = values.get("fso.detection", "hd").lower()
    if detection not in (d.value for d in Detection):
        raise ScenarioParseError(f"fso.detection must be hd or imdd, got '{detection}'", key="fso.detection")
    common = dict(
        alpha_d=_number(values, "fso.alpha_d"),
        beta_d=_integer(values, "fso.beta_d"),
        epsilon=_number(values, "fso.epsilon"),
        detection=Detection(detection),
        u_r=10.0 ** (_number(values, "fso.u_r_db") / 10.0),
    )
    if constituents:
        return FsoChannelParams.from_constituents(
            omega=_number(values, "fso.omega"),
            b0=_number(values, "fso.b0"),
            rho=_number(values, "fso.rho"),
            phase_diff=_number(values, "fso.phase_diff", 0.0),
            **common,
        )
    return FsoChannelParams(
        g_d=_number(values, "fso.g_d"),
        omega_cap_d=_number(values, "fso.omega_cap_d"),
        **common,
    )

def _sweep(values: dict[str, str]) -> Optional[SweepSpec]:
    present = [k for k in SWEEP_KEYS if k in values]
    if not present:
        return None
    if len(present) != len(SWEEP_KEYS):
        missing = next(k for k in SWEEP_KEYS if k not in values)
        raise ScenarioParseError(f"incomplete sweep: missing '{missing}'", key=missing)
    key = values["sweep.key"]
    if key not in SWEEPABLE:
        raise ScenarioParseError(
            f"sweep.key must be one of {', '.join(SWEEPABLE)}, got '{key}'", key="sweep.key"
        )
    return SweepSpec(
        key=key,
        from_db=_number(values, "sweep.from_db"),
        to_db=_number(values, "sweep.to_db"),
        points=_integer(values, "sweep.points"),
    )

def build_scenario_file(values: dict[str, str]) -> ScenarioFile:
    """Validate parsed key=value pairs into a ScenarioFile."""
    try:
        scenario = Scenario(
            main_rf=_rf(values, "rf_main"),
            eve_rf=_rf(values, "rf_eve"),
            fso=_fso(values),
            rate_rs=_number(values, "rs_bits", 0.0),
        )
        return ScenarioFile(
            scenario=scenario,
            sweep=_sweep(values),
            mc_seed=_integer(values, "mc.seed") if "mc.seed" in values else None,
            mc_samples=_integer(values, "mc.n_samples") if "mc.n_samples" in values else None,
        )
    except ScenarioParseError:
        raise
    except (ValidationError, PydanticValidationError) as e:
        raise ScenarioParseError(f"invalid scenario: {e}")

def load_scenario(file_path: Path) -> ScenarioFile:
    """Read and validate a scenario file."""
    return build_scenario_file(parse_scenario_text(read_text(file_path)))

def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)

def format_scenario(values: dict[str, Any], header: Iterable[str] = ()) -> str:
    """Render key=value lines in canonical key order."""
    unknown = [k for k in values if k not in SCENARIO_KEYS]
    if unknown:
        raise ValidationError(f"unknown scenario keys: {', '.join(unknown)}")
    lines = [f"# {line}" for line in header]
    lines.extend(f"{key} = {_format_value(values[key])}" for key in SCENARIO_KEYS if key in values)
    return "\n".join(lines) + "\n"

def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)

def write_csv(rows: Iterable[ResultRow], stream: TextIO) -> None:
    """Write ResultRows with a header, '.' decimals and LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_csv_cell(getattr(row, column)) for column in RESULT_COLUMNS])

def format_csv(rows: Iterable[ResultRow]) -> str:
    """CSV text for ResultRows."""
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()

def write_json(data: Any, file_path: Path, indent: int = 2) -> None:
    """Write data to a JSON file."""
    file_path.parent.mkdir(parents=True, exist_ok=True)

    if isinstance(data, BaseModel):
        json_data = data.model_dump(mode='json')
    else:
        json_data = data

    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(json_data, f, indent=indent, ensure_ascii=False)

def read_json(file_path: Path) -> dict:
    """Read JSON data from a file."""
    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)

def write_text(text: str, file_path: Path) -> None:
    """Write text to a file with LF line endings."""
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)

def read_text(file_path: Path) -> str:
    """Read text from a file."""
    with open(file_path, 'r', encoding='utf-8') as f:
        return f.read()
