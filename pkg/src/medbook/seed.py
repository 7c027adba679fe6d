"""Seed fixture loading: parse, validate with record-level paths, insert.

The fixture is a single JSON document:

    {
      "format": "medbook-seed/1",
      "admin": {"username": "admin", "password": "..."},
      "hospitals": [{"name", "address", "phone", "latitude", "longitude",
                     "description", "timezone"}],
      "doctors":   [{"hospital": "<hospital name>", "name", "specialty",
                     "phone", "email", "working_hours"}],
      "health_schedules": [{"group", "entries": [{"title", "guidance"}]}]
    }

Doctors reference hospitals by name, so hospital names must be unique within
a fixture. An empty document is valid and seeds nothing.
"""
from __future__ import annotations

import json
import uuid
import zoneinfo
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .domain import (
    Clock,
    Doctor,
    HealthSchedule,
    Hospital,
    PASSWORD_MIN_LENGTH,
    ScheduleEntry,
    parse_working_hours,
    utc_now,
    validate_email,
)
from .errors import InvalidWorkingHours
from .storage import ENTITY_SETS, Store

FIXTURE_FORMAT = "medbook-seed/1"

_TOP_LEVEL_KEYS = {"format", "admin", "hospitals", "doctors", "health_schedules"}


class FixtureInvalid(Exception):
    """Fixture failed validation; `path` points at the offending record."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class AlreadySeeded(Exception):
    """The store already holds seeded content and --force was not given."""


@dataclass(frozen=True)
class SeedFixture:
    hospitals: tuple[dict, ...] = ()
    doctors: tuple[dict, ...] = ()
    health_schedules: tuple[dict, ...] = ()
    admin: dict | None = None


def _require_str(record: Mapping, key: str, path: str, *, allow_empty: bool = False) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise FixtureInvalid(f"{path}.{key}", "expected a string")
    if not allow_empty and not value.strip():
        raise FixtureInvalid(f"{path}.{key}", "must not be empty")
    return value


def _parse_hospital(record: Any, path: str) -> dict:
    if not isinstance(record, dict):
        raise FixtureInvalid(path, "expected an object")
    name = _require_str(record, "name", path)
    address = _require_str(record, "address", path, allow_empty=True)
    phone = _require_str(record, "phone", path)
    description = record.get("description", "")
    if not isinstance(description, str):
        raise FixtureInvalid(f"{path}.description", "expected a string")
    tz_name = record.get("timezone", "UTC")
    if not isinstance(tz_name, str):
        raise FixtureInvalid(f"{path}.timezone", "expected a string")
    try:
        zoneinfo.ZoneInfo(tz_name)
    except (zoneinfo.ZoneInfoNotFoundError, ValueError):
        raise FixtureInvalid(f"{path}.timezone", f"unknown time zone {tz_name!r}") from None
    for coord, lo, hi in (("latitude", -90, 90), ("longitude", -180, 180)):
        value = record.get(coord)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise FixtureInvalid(f"{path}.{coord}", "expected a number")
        if not lo <= value <= hi:
            raise FixtureInvalid(f"{path}.{coord}", f"must be in [{lo}, {hi}]")
    return {
        "name": name,
        "address": address,
        "phone": phone,
        "latitude": float(record["latitude"]),
        "longitude": float(record["longitude"]),
        "description": description,
        "timezone": tz_name,
    }


def _parse_doctor(record: Any, path: str, hospital_names: set[str]) -> dict:
    if not isinstance(record, dict):
        raise FixtureInvalid(path, "expected an object")
    hospital = _require_str(record, "hospital", path)
    if hospital not in hospital_names:
        raise FixtureInvalid(f"{path}.hospital", f"unknown hospital {hospital!r}")
    name = _require_str(record, "name", path)
    specialty = _require_str(record, "specialty", path, allow_empty=True)
    phone = _require_str(record, "phone", path, allow_empty=True)
    email = _require_str(record, "email", path)
    if not validate_email(email):
        raise FixtureInvalid(f"{path}.email", f"invalid email {email!r}")
    hours_wire = record.get("working_hours")
    if not isinstance(hours_wire, dict):
        raise FixtureInvalid(f"{path}.working_hours", "expected an object of weekday intervals")
    try:
        parse_working_hours(hours_wire)
    except InvalidWorkingHours as exc:
        raise FixtureInvalid(f"{path}.working_hours", exc.message) from None
    return {
        "hospital": hospital,
        "name": name,
        "specialty": specialty,
        "phone": phone,
        "email": email,
        "working_hours": hours_wire,
    }


def _parse_schedule(record: Any, path: str) -> dict:
    if not isinstance(record, dict):
        raise FixtureInvalid(path, "expected an object")
    group = _require_str(record, "group", path)
    entries = record.get("entries")
    if not isinstance(entries, list) or not entries:
        raise FixtureInvalid(f"{path}.entries", "expected a non-empty list")
    parsed = []
    for i, entry in enumerate(entries):
        entry_path = f"{path}.entries[{i}]"
        if not isinstance(entry, dict):
            raise FixtureInvalid(entry_path, "expected an object")
        parsed.append(
            {
                "title": _require_str(entry, "title", entry_path),
                "guidance": _require_str(entry, "guidance", entry_path),
            }
        )
    return {"group": group, "entries": parsed}


def parse_fixture(data: Any) -> SeedFixture:
    if not isinstance(data, dict):
        raise FixtureInvalid("$", "fixture must be a JSON object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise FixtureInvalid("$", f"unknown keys: {', '.join(sorted(unknown))}")
    fmt = data.get("format")
    if fmt is not None and fmt != FIXTURE_FORMAT:
        raise FixtureInvalid("$.format", f"expected {FIXTURE_FORMAT!r}")

    hospitals = data.get("hospitals", [])
    if not isinstance(hospitals, list):
        raise FixtureInvalid("$.hospitals", "expected a list")
    parsed_hospitals = [_parse_hospital(rec, f"hospitals[{i}]") for i, rec in enumerate(hospitals)]
    names = [h["name"] for h in parsed_hospitals]
    if len(set(names)) != len(names):
        dupe = next(n for n in names if names.count(n) > 1)
        raise FixtureInvalid("$.hospitals", f"duplicate hospital name {dupe!r}")

    doctors = data.get("doctors", [])
    if not isinstance(doctors, list):
        raise FixtureInvalid("$.doctors", "expected a list")
    parsed_doctors = [
        _parse_doctor(rec, f"doctors[{i}]", set(names)) for i, rec in enumerate(doctors)
    ]

    schedules = data.get("health_schedules", [])
    if not isinstance(schedules, list):
        raise FixtureInvalid("$.health_schedules", "expected a list")
    parsed_schedules = [_parse_schedule(rec, f"health_schedules[{i}]") for i, rec in enumerate(schedules)]
    groups = [s["group"] for s in parsed_schedules]
    if len(set(groups)) != len(groups):
        raise FixtureInvalid("$.health_schedules", "duplicate group name")

    admin = data.get("admin")
    if admin is not None:
        if not isinstance(admin, dict):
            raise FixtureInvalid("$.admin", "expected an object")
        _require_str(admin, "username", "admin")
        password = _require_str(admin, "password", "admin")
        if len(password) < PASSWORD_MIN_LENGTH:
            raise FixtureInvalid("admin.password", f"must be at least {PASSWORD_MIN_LENGTH} characters")
        admin = {"username": admin["username"], "password": password}

    return SeedFixture(
        hospitals=tuple(parsed_hospitals),
        doctors=tuple(parsed_doctors),
        health_schedules=tuple(parsed_schedules),
        admin=admin,
    )


def load_fixture(path: str | Path) -> SeedFixture:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureInvalid("$", f"cannot read fixture: {exc}") from exc
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise FixtureInvalid("$", f"not valid JSON: {exc}") from exc
    return parse_fixture(data)


def seed_store(
    store: Store,
    fixture: SeedFixture,
    *,
    hash_password,
    clock: Clock = utc_now,
    force: bool = False,
) -> dict[str, int]:
    """Insert fixture entities; returns per-entity counts.

    Raises AlreadySeeded when the store already has seeded content, unless
    force is set, in which case the entire store is wiped first.
    """
    from .auth import new_admin_account  # local import to avoid a module cycle

    with store.transaction() as txn:
        occupied = any(
            txn.values(name) for name in ("hospitals", "doctors", "health_schedules", "admins")
        )
        if occupied and not force:
            raise AlreadySeeded("store is already seeded")
        if force:
            for name in ENTITY_SETS:
                txn.clear(name)

        hospital_ids: dict[str, str] = {}
        for rec in fixture.hospitals:
            hospital = Hospital(id=uuid.uuid4().hex, **rec)
            hospital_ids[hospital.name] = hospital.id
            txn.put("hospitals", hospital)

        for rec in fixture.doctors:
            doctor = Doctor(
                id=uuid.uuid4().hex,
                hospital_id=hospital_ids[rec["hospital"]],
                name=rec["name"],
                specialty=rec["specialty"],
                phone=rec["phone"],
                email=rec["email"],
                working_hours=parse_working_hours(rec["working_hours"]),
            )
            txn.put("doctors", doctor)

        for rec in fixture.health_schedules:
            txn.put(
                "health_schedules",
                HealthSchedule(
                    group=rec["group"],
                    entries=tuple(ScheduleEntry(e["title"], e["guidance"]) for e in rec["entries"]),
                ),
            )

        admins = 0
        if fixture.admin is not None:
            txn.put(
                "admins",
                new_admin_account(fixture.admin["username"], hash_password(fixture.admin["password"])),
            )
            admins = 1

    return {
        "hospitals": len(fixture.hospitals),
        "doctors": len(fixture.doctors),
        "schedules": len(fixture.health_schedules),
        "admins": admins,
    }
