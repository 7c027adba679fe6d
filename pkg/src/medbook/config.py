"""Server configuration resolved from flags > environment > file > defaults.

Environment variables use the MEDBOOK_ prefix; the optional config file is a
JSON object keyed like the flag names (see SETTINGS). Resolution is a pure
function of its inputs.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

from .catalog import AboutContent
from .errors import ConfigInvalid, FieldError

DEFAULT_ABOUT_OBJECTIVES = (
    "MedBook lets patients find hospitals and doctors, reserve appointment "
    "slots online, and stay informed when the clinic cancels a booking."
)
DEFAULT_ABOUT_DEVELOPERS = ("The MedBook maintainers",)

# Bootstrap credentials for the first admin account; override in any deployment.
DEFAULT_ADMIN_USERNAME = "admin"
DEFAULT_ADMIN_PASSWORD = "admin-change-me"


@dataclass(frozen=True)
class Config:
    host: str = "127.0.0.1"
    port: int = 8080
    db: str | None = None  # store directory; None keeps everything in memory
    slot_minutes: int = 30
    horizon_days: int = 90
    session_ttl_hours: float = 24.0
    cors_origins: tuple[str, ...] = ("*",)
    about_objectives: str = DEFAULT_ABOUT_OBJECTIVES
    about_developers: tuple[str, ...] = DEFAULT_ABOUT_DEVELOPERS
    admin_username: str = DEFAULT_ADMIN_USERNAME
    admin_password: str = DEFAULT_ADMIN_PASSWORD
    hash_iterations: int = 100_000
    daily_cap: int | None = None

    def about(self) -> AboutContent:
        return AboutContent(objectives=self.about_objectives, developers=self.about_developers)


def _parse_str_list(value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    if isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value):
        return tuple(value)
    raise ValueError("expected a comma-separated string or list of strings")


def _parse_int(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        return int(value)
    raise ValueError("expected an integer")


def _parse_float(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(value)
    raise ValueError("expected a number")


def _parse_optional_int(value: Any) -> int | None:
    if value is None or value == "":
        return None
    return _parse_int(value)


def _parse_optional_str(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, str):
        return value
    raise ValueError("expected a string")


@dataclass(frozen=True)
class Setting:
    key: str  # Config field and config-file/flag key
    env: str
    parse: Callable[[Any], Any]
    check: Callable[[Any], str | None] = lambda v: None


def _positive(name: str) -> Callable[[Any], str | None]:
    return lambda v: None if v is None or v > 0 else f"{name} must be positive"


SETTINGS = (
    Setting("host", "MEDBOOK_HOST", str, lambda v: None if v.strip() else "must not be empty"),
    Setting(
        "port",
        "MEDBOOK_PORT",
        _parse_int,
        lambda v: None if 0 <= v <= 65535 else "must be in [0, 65535]",
    ),
    Setting("db", "MEDBOOK_DB", _parse_optional_str),
    Setting("slot_minutes", "MEDBOOK_SLOT_MINUTES", _parse_int, _positive("slot_minutes")),
    Setting(
        "horizon_days",
        "MEDBOOK_HORIZON_DAYS",
        _parse_int,
        lambda v: None if v >= 0 else "must be >= 0",
    ),
    Setting(
        "session_ttl_hours", "MEDBOOK_SESSION_TTL_HOURS", _parse_float, _positive("session_ttl_hours")
    ),
    Setting("cors_origins", "MEDBOOK_CORS_ORIGINS", _parse_str_list),
    Setting("about_objectives", "MEDBOOK_ABOUT_OBJECTIVES", str),
    Setting("about_developers", "MEDBOOK_ABOUT_DEVELOPERS", _parse_str_list),
    Setting(
        "admin_username",
        "MEDBOOK_ADMIN_USERNAME",
        str,
        lambda v: None if v.strip() else "must not be empty",
    ),
    Setting(
        "admin_password",
        "MEDBOOK_ADMIN_PASSWORD",
        str,
        lambda v: None if len(v) >= 8 else "must be at least 8 characters",
    ),
    Setting("hash_iterations", "MEDBOOK_HASH_ITERATIONS", _parse_int, _positive("hash_iterations")),
    Setting("daily_cap", "MEDBOOK_DAILY_CAP", _parse_optional_int, _positive("daily_cap")),
)

_BY_KEY = {s.key: s for s in SETTINGS}


def load_config(
    flags: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    file_path: str | Path | None = None,
) -> Config:
    """Resolve configuration; raises ConfigInvalid with field-level messages."""
    errors: list[FieldError] = []
    resolved: dict[str, Any] = {}

    def take(key: str, raw: Any, source: str) -> None:
        setting = _BY_KEY[key]
        try:
            value = setting.parse(raw)
        except (ValueError, TypeError) as exc:
            errors.append(FieldError(key, "parse_error", f"{source}: {exc}"))
            return
        problem = setting.check(value)
        if problem:
            errors.append(FieldError(key, "invalid_value", f"{source}: {problem}"))
            return
        resolved[key] = value

    if file_path is not None:
        try:
            data = json.loads(Path(file_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigInvalid([FieldError("config", "unreadable", str(exc))]) from exc
        if not isinstance(data, dict):
            raise ConfigInvalid([FieldError("config", "invalid", "config file must be a JSON object")])
        for key, raw in data.items():
            if key not in _BY_KEY:
                errors.append(FieldError(key, "unknown_key", "unknown config key"))
                continue
            take(key, raw, f"config file {file_path}")

    env = env if env is not None else {}
    for setting in SETTINGS:
        if setting.env in env:
            take(setting.key, env[setting.env], f"env {setting.env}")

    for key, raw in (flags or {}).items():
        if raw is None:
            continue
        if key not in _BY_KEY:
            errors.append(FieldError(key, "unknown_key", "unknown flag"))
            continue
        take(key, raw, f"flag --{key.replace('_', '-')}")

    if errors:
        raise ConfigInvalid(errors)
    return Config(**resolved)


def config_from_environ() -> Config:
    """Convenience for library callers: environment + defaults only."""
    return load_config(env=os.environ)
