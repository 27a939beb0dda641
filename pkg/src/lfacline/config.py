"""Study configuration: strict JSON schema in datasheet units.

Unknown fields are rejected so typos surface immediately; every error message
names the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .line_model import DistributedLineParams, PerUnitBase
from .power_flow import OperatingLimits

__all__ = ["StudyConfig", "load_config", "parse_config"]


@dataclass(frozen=True)
class StudyConfig:
    line: DistributedLineParams
    base: PerUnitBase
    limits: OperatingLimits
    origin_only_thermal: bool = False
    notes: str | None = None


_SCHEMA: dict[str, dict[str, bool]] = {
    # section -> {key: required}
    "line": {
        "r_ohm_per_km": True,
        "l_mh_per_km": True,
        "c_nf_per_km": True,
        "g_s_per_km": True,
        "length_km": True,
    },
    "base": {"mva": True, "kv": True},
    "limits": {
        "s_max_pu": True,
        "v_min_pu": True,
        "v_max_pu": True,
        "theta_max_deg": True,
        "k_dc": False,
    },
    "flags": {"origin_only_thermal": False},
}


def _section(doc: dict[str, Any], name: str, required: bool) -> dict[str, Any]:
    if name not in doc:
        if required:
            raise ConfigError(f"missing section '{name}'")
        return {}
    sec = doc[name]
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be an object")
    known = _SCHEMA[name]
    for key in sec:
        if key not in known:
            raise ConfigError(f"unknown field '{name}.{key}'")
    for key, req in known.items():
        if req and key not in sec:
            raise ConfigError(f"missing field '{name}.{key}'")
    return sec


def _number(sec: dict[str, Any], section: str, key: str, default: float | None = None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing field '{section}.{key}'")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"field '{section}.{key}' must be a number")
    return float(v)


def parse_config(doc: Any) -> StudyConfig:
    """Build a StudyConfig from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    for key in doc:
        if key not in (*_SCHEMA, "notes"):
            raise ConfigError(f"unknown field '{key}'")
    notes = doc.get("notes")
    if notes is not None and not isinstance(notes, str):
        raise ConfigError("field 'notes' must be a string")

    line_sec = _section(doc, "line", required=True)
    base_sec = _section(doc, "base", required=True)
    lim_sec = _section(doc, "limits", required=True)
    flags_sec = _section(doc, "flags", required=False)

    try:
        line = DistributedLineParams.from_datasheet(
            r_ohm_per_km=_number(line_sec, "line", "r_ohm_per_km"),
            l_mh_per_km=_number(line_sec, "line", "l_mh_per_km"),
            c_nf_per_km=_number(line_sec, "line", "c_nf_per_km"),
            g_s_per_km=_number(line_sec, "line", "g_s_per_km"),
            length_km=_number(line_sec, "line", "length_km"),
        )
    except ValueError as exc:
        raise ConfigError(f"section 'line': {exc}") from exc
    try:
        base = PerUnitBase.from_kv_mva(
            kv=_number(base_sec, "base", "kv"), mva=_number(base_sec, "base", "mva")
        )
    except ValueError as exc:
        raise ConfigError(f"section 'base': {exc}") from exc
    try:
        limits = OperatingLimits(
            s_max=_number(lim_sec, "limits", "s_max_pu"),
            v_min=_number(lim_sec, "limits", "v_min_pu"),
            v_max=_number(lim_sec, "limits", "v_max_pu"),
            theta_max=math.radians(_number(lim_sec, "limits", "theta_max_deg")),
            k_dc=_number(lim_sec, "limits", "k_dc", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"section 'limits': {exc}") from exc

    origin_only = flags_sec.get("origin_only_thermal", False)
    if not isinstance(origin_only, bool):
        raise ConfigError("field 'flags.origin_only_thermal' must be a boolean")

    return StudyConfig(
        line=line,
        base=base,
        limits=limits,
        origin_only_thermal=origin_only,
        notes=notes,
    )


def load_config(path: str | Path) -> StudyConfig:
    """Read and validate a study configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc)
