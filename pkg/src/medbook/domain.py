"""Core domain types, field validation, and slot-calendar arithmetic.

Working hours and slot times are hospital-local times of day ("HH:MM");
audit timestamps (created_at, cancelled_at, session expiry) are UTC.
Every type here is an immutable value object, safe to share across threads.
"""
from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping, Sequence

from .errors import (
    FieldError,
    InvalidWorkingHours,
    MSG_EMAIL_INVALID,
    MSG_PASSWORDS_DONT_MATCH,
    MSG_USERNAME_REQUIRED,
    MSG_WEAK_PASSWORD,
)

PASSWORD_MIN_LENGTH = 8

WEEKDAY_KEYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

# local-part "@" dotted domain, tld of 2+ chars, no whitespace anywhere
_EMAIL_RE = re.compile(r"[^\s@]+@(?:[^\s@.]+\.)+[^\s@.]{2,}")

_HHMM_RE = re.compile(r"([01]\d|2[0-3]):([0-5]\d)")

Clock = Callable[[], "dt.datetime"]


def utc_now() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


def validate_email(candidate: str) -> bool:
    """True iff candidate looks like local@domain.tld (structural check, not RFC)."""
    return _EMAIL_RE.fullmatch(candidate) is not None


def validate_registration(username: str, email: str, password: str, confirm: str) -> list[FieldError]:
    """Check signup input; returns every violated rule (empty list means ok)."""
    errors: list[FieldError] = []
    if not username.strip():
        errors.append(FieldError("username", "empty_username", MSG_USERNAME_REQUIRED))
    if not validate_email(email):
        errors.append(FieldError("email", "invalid_email", MSG_EMAIL_INVALID))
    if len(password) < PASSWORD_MIN_LENGTH:
        errors.append(FieldError("password", "weak_password", MSG_WEAK_PASSWORD))
    if password != confirm:
        errors.append(FieldError("confirm", "password_mismatch", MSG_PASSWORDS_DONT_MATCH))
    return errors


def parse_hhmm(value: str) -> dt.time:
    m = _HHMM_RE.fullmatch(value)
    if m is None:
        raise ValueError(f"expected HH:MM 24-hour time, got {value!r}")
    return dt.time(int(m.group(1)), int(m.group(2)))


def format_hhmm(t: dt.time) -> str:
    return f"{t.hour:02d}:{t.minute:02d}"


def minute_of_day(t: dt.time) -> int:
    return t.hour * 60 + t.minute


# weekday index (0=Monday) -> non-overlapping (start, end) intervals
WorkingHours = dict[int, tuple[tuple[dt.time, dt.time], ...]]


def parse_working_hours(wire: Mapping[str, Sequence[Sequence[str]]]) -> WorkingHours:
    """Parse {"mon": [["09:00", "13:00"], ...], ...} and enforce interval rules.

    Raises InvalidWorkingHours naming the offending day/interval.
    """
    hours: WorkingHours = {}
    for day_key, intervals in wire.items():
        if day_key not in WEEKDAY_KEYS:
            raise InvalidWorkingHours(f"working_hours: unknown weekday key {day_key!r}")
        weekday = WEEKDAY_KEYS.index(day_key)
        parsed: list[tuple[dt.time, dt.time]] = []
        for i, interval in enumerate(intervals):
            where = f"working_hours.{day_key}[{i}]"
            if len(interval) != 2:
                raise InvalidWorkingHours(f"{where}: expected [start, end]")
            try:
                start, end = parse_hhmm(interval[0]), parse_hhmm(interval[1])
            except ValueError as exc:
                raise InvalidWorkingHours(f"{where}: {exc}") from None
            if start >= end:
                raise InvalidWorkingHours(f"{where}: start must be before end")
            parsed.append((start, end))
        parsed.sort()
        for (_, prev_end), (next_start, _) in zip(parsed, parsed[1:]):
            if next_start < prev_end:
                raise InvalidWorkingHours(f"working_hours.{day_key}: intervals overlap")
        if parsed:
            hours[weekday] = tuple(parsed)
    return hours


def working_hours_to_wire(hours: WorkingHours) -> dict[str, list[list[str]]]:
    return {
        WEEKDAY_KEYS[weekday]: [[format_hhmm(s), format_hhmm(e)] for s, e in intervals]
        for weekday, intervals in sorted(hours.items())
    }


class Role(str, Enum):
    PATIENT = "patient"
    ADMIN = "admin"


class AppointmentState(str, Enum):
    RESERVED = "reserved"
    CANCELLED_BY_PATIENT = "cancelled_by_patient"
    CANCELLED_BY_STAFF = "cancelled_by_staff"


class NotificationKind(str, Enum):
    BOOKING_CONFIRMED = "booking_confirmed"
    APPOINTMENT_CANCELLED = "appointment_cancelled"


@dataclass(frozen=True)
class Principal:
    """An authenticated identity resolved from a session token."""

    id: str
    role: Role


@dataclass(frozen=True)
class Patient:
    id: str
    username: str
    email: str
    password_digest: str
    created_at: dt.datetime

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "username": self.username,
            "email": self.email,
            "password_digest": self.password_digest,
            "created_at": self.created_at.isoformat(),
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Patient":
        return cls(
            id=rec["id"],
            username=rec["username"],
            email=rec["email"],
            password_digest=rec["password_digest"],
            created_at=dt.datetime.fromisoformat(rec["created_at"]),
        )


@dataclass(frozen=True)
class AdminAccount:
    id: str
    username: str
    password_digest: str

    def to_record(self) -> dict:
        return {"id": self.id, "username": self.username, "password_digest": self.password_digest}

    @classmethod
    def from_record(cls, rec: Mapping) -> "AdminAccount":
        return cls(id=rec["id"], username=rec["username"], password_digest=rec["password_digest"])


@dataclass(frozen=True)
class Hospital:
    id: str
    name: str
    address: str
    phone: str
    latitude: float
    longitude: float
    description: str
    timezone: str

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "address": self.address,
            "phone": self.phone,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "description": self.description,
            "timezone": self.timezone,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Hospital":
        return cls(
            id=rec["id"],
            name=rec["name"],
            address=rec["address"],
            phone=rec["phone"],
            latitude=float(rec["latitude"]),
            longitude=float(rec["longitude"]),
            description=rec["description"],
            timezone=rec["timezone"],
        )


@dataclass(frozen=True)
class Doctor:
    id: str
    hospital_id: str
    name: str
    specialty: str
    phone: str
    email: str
    working_hours: WorkingHours
    active: bool = True

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "hospital_id": self.hospital_id,
            "name": self.name,
            "specialty": self.specialty,
            "phone": self.phone,
            "email": self.email,
            "working_hours": working_hours_to_wire(self.working_hours),
            "active": self.active,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Doctor":
        return cls(
            id=rec["id"],
            hospital_id=rec["hospital_id"],
            name=rec["name"],
            specialty=rec["specialty"],
            phone=rec["phone"],
            email=rec["email"],
            working_hours=parse_working_hours(rec["working_hours"]),
            active=bool(rec["active"]),
        )


@dataclass(frozen=True)
class TimeSlot:
    doctor_id: str
    date: dt.date
    start: dt.time
    duration_minutes: int

    def slot_key(self) -> tuple[str, str, str]:
        return (self.doctor_id, self.date.isoformat(), format_hhmm(self.start))

    def to_record(self) -> dict:
        return {
            "doctor_id": self.doctor_id,
            "date": self.date.isoformat(),
            "start": format_hhmm(self.start),
            "duration_minutes": self.duration_minutes,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "TimeSlot":
        return cls(
            doctor_id=rec["doctor_id"],
            date=dt.date.fromisoformat(rec["date"]),
            start=parse_hhmm(rec["start"]),
            duration_minutes=int(rec["duration_minutes"]),
        )


@dataclass(frozen=True)
class Appointment:
    id: str
    patient_id: str
    slot: TimeSlot
    state: AppointmentState
    created_at: dt.datetime
    cancelled_at: dt.datetime | None = None

    def cancelled(self, state: AppointmentState, at: dt.datetime) -> "Appointment":
        return replace(self, state=state, cancelled_at=at)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "patient_id": self.patient_id,
            "slot": self.slot.to_record(),
            "state": self.state.value,
            "created_at": self.created_at.isoformat(),
            "cancelled_at": self.cancelled_at.isoformat() if self.cancelled_at else None,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Appointment":
        cancelled_at = rec.get("cancelled_at")
        return cls(
            id=rec["id"],
            patient_id=rec["patient_id"],
            slot=TimeSlot.from_record(rec["slot"]),
            state=AppointmentState(rec["state"]),
            created_at=dt.datetime.fromisoformat(rec["created_at"]),
            cancelled_at=dt.datetime.fromisoformat(cancelled_at) if cancelled_at else None,
        )


@dataclass(frozen=True)
class Notification:
    id: str
    patient_id: str
    kind: NotificationKind
    appointment_id: str
    message: str
    created_at: dt.datetime
    read: bool = False

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "patient_id": self.patient_id,
            "kind": self.kind.value,
            "appointment_id": self.appointment_id,
            "message": self.message,
            "created_at": self.created_at.isoformat(),
            "read": self.read,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Notification":
        return cls(
            id=rec["id"],
            patient_id=rec["patient_id"],
            kind=NotificationKind(rec["kind"]),
            appointment_id=rec["appointment_id"],
            message=rec["message"],
            created_at=dt.datetime.fromisoformat(rec["created_at"]),
            read=bool(rec["read"]),
        )


@dataclass(frozen=True)
class ScheduleEntry:
    title: str
    guidance: str


@dataclass(frozen=True)
class HealthSchedule:
    group: str
    entries: tuple[ScheduleEntry, ...]

    def to_record(self) -> dict:
        return {
            "group": self.group,
            "entries": [{"title": e.title, "guidance": e.guidance} for e in self.entries],
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "HealthSchedule":
        return cls(
            group=rec["group"],
            entries=tuple(ScheduleEntry(e["title"], e["guidance"]) for e in rec["entries"]),
        )


@dataclass(frozen=True)
class Session:
    token_digest: str
    principal_id: str
    role: Role
    issued_at: dt.datetime
    expires_at: dt.datetime

    def to_record(self) -> dict:
        return {
            "token_digest": self.token_digest,
            "principal_id": self.principal_id,
            "role": self.role.value,
            "issued_at": self.issued_at.isoformat(),
            "expires_at": self.expires_at.isoformat(),
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "Session":
        return cls(
            token_digest=rec["token_digest"],
            principal_id=rec["principal_id"],
            role=Role(rec["role"]),
            issued_at=dt.datetime.fromisoformat(rec["issued_at"]),
            expires_at=dt.datetime.fromisoformat(rec["expires_at"]),
        )


def generate_slots(doctor: Doctor, day: dt.date, slot_minutes: int) -> list[TimeSlot]:
    """All slots of slot_minutes tiled from each working interval's start.

    A trailing remainder shorter than one slot is dropped. Sorted by start;
    empty when the doctor has no working hours that weekday.
    """
    if slot_minutes <= 0:
        raise ValueError("slot_minutes must be positive")
    slots: list[TimeSlot] = []
    for start, end in doctor.working_hours.get(day.weekday(), ()):
        minute = minute_of_day(start)
        stop = minute_of_day(end)
        while minute + slot_minutes <= stop:
            slots.append(TimeSlot(doctor.id, day, dt.time(minute // 60, minute % 60), slot_minutes))
            minute += slot_minutes
    slots.sort(key=lambda s: s.start)
    return slots


def slot_overlaps(a: TimeSlot, b: TimeSlot) -> bool:
    """True iff same doctor, same date, and the time intervals share positive measure."""
    if a.doctor_id != b.doctor_id or a.date != b.date:
        return False
    a_start, b_start = minute_of_day(a.start), minute_of_day(b.start)
    return a_start < b_start + b.duration_minutes and b_start < a_start + a.duration_minutes
