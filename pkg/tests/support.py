"""Shared test helpers: a controllable clock and quick entity builders."""
from __future__ import annotations

import datetime as dt

from medbook.domain import Principal, Role, WEEKDAY_KEYS

# A Monday, 08:00 UTC (13:00 in Asia/Karachi).
BASE_NOW = dt.datetime(2026, 3, 2, 8, 0, tzinfo=dt.timezone.utc)

# Tuesday following BASE_NOW; inside every doctor's default hours.
NEXT_DAY = dt.date(2026, 3, 3)

ALL_DAY_HOURS = {key: [["09:00", "17:00"]] for key in WEEKDAY_KEYS}


class FakeClock:
    """Injectable clock; each call returns the current instant and ticks forward."""

    def __init__(self, start: dt.datetime = BASE_NOW, auto_tick: dt.timedelta = dt.timedelta(seconds=1)):
        self.now = start
        self.auto_tick = auto_tick

    def __call__(self) -> dt.datetime:
        current = self.now
        self.now += self.auto_tick
        return current

    def advance(self, **kwargs) -> None:
        self.now += dt.timedelta(**kwargs)


def register_patient(services, username: str = "ali", password: str = "secret123"):
    patient = services.auth.register_patient(
        username, f"{username}@mail.example", password, password
    )
    return Principal(patient.id, Role.PATIENT), patient


def make_hospital(services, name: str = "City Care", timezone: str = "UTC", **overrides):
    fields = dict(
        name=name,
        address="12 Mall Road",
        phone="+92511234567",
        latitude=33.6,
        longitude=73.0,
        description="General hospital",
        timezone=timezone,
    )
    fields.update(overrides)
    return services.catalog.add_hospital(services.admin, **fields)


def make_doctor(services, hospital_id: str, name: str = "Dr. Ayesha Khan", hours=None, **overrides):
    fields = dict(
        hospital_id=hospital_id,
        name=name,
        specialty="Cardiology",
        phone="+923001112233",
        email=f"{name.lower().replace(' ', '.').replace('..', '.')}@clinic.example",
        working_hours=hours or ALL_DAY_HOURS,
    )
    fields.update(overrides)
    return services.catalog.add_doctor(services.admin, **fields)
