"""Hospital and doctor catalog (admin-managed, patient-readable) plus static content.

Contact actions are surfaced as tel:/mailto: URIs and a map URL; the server
never places calls or sends mail.
"""
from __future__ import annotations

import uuid
import zoneinfo
from dataclasses import dataclass

from .domain import (
    Doctor,
    HealthSchedule,
    Hospital,
    Patient,
    Principal,
    Role,
    parse_working_hours,
    validate_email,
)
from .errors import (
    FieldError,
    Forbidden,
    InvalidCoordinates,
    MSG_EMAIL_INVALID,
    NotFound,
    Unauthenticated,
    ValidationFailed,
)
from .storage import Store


@dataclass(frozen=True)
class AboutContent:
    objectives: str
    developers: tuple[str, ...]


def tel_uri(phone: str) -> str:
    return f"tel:{phone}"


def mailto_uri(email: str) -> str:
    return f"mailto:{email}"


def map_url(latitude: float, longitude: float) -> str:
    return f"https://www.google.com/maps?q={latitude},{longitude}"


def require_authenticated(principal: Principal | None) -> Principal:
    if principal is None:
        raise Unauthenticated()
    return principal


def require_admin(principal: Principal | None) -> Principal:
    principal = require_authenticated(principal)
    if principal.role is not Role.ADMIN:
        raise Forbidden("admin access required")
    return principal


class CatalogService:
    def __init__(self, store: Store, *, about: AboutContent):
        self._store = store
        self._about = about

    def add_hospital(
        self,
        principal: Principal | None,
        *,
        name: str,
        address: str,
        phone: str,
        latitude: float,
        longitude: float,
        description: str = "",
        timezone: str = "UTC",
    ) -> Hospital:
        require_admin(principal)
        errors = []
        if not name.strip():
            errors.append(FieldError("name", "empty_name", "name is required"))
        if not phone.strip():
            errors.append(FieldError("phone", "empty_phone", "phone is required"))
        try:
            zoneinfo.ZoneInfo(timezone)
        except (zoneinfo.ZoneInfoNotFoundError, ValueError):
            errors.append(FieldError("timezone", "invalid_timezone", f"unknown time zone {timezone!r}"))
        if errors:
            raise ValidationFailed(errors)
        if not (-90 <= latitude <= 90) or not (-180 <= longitude <= 180):
            raise InvalidCoordinates()
        hospital = Hospital(
            id=uuid.uuid4().hex,
            name=name.strip(),
            address=address,
            phone=phone,
            latitude=float(latitude),
            longitude=float(longitude),
            description=description,
            timezone=timezone,
        )
        with self._store.transaction() as txn:
            txn.put("hospitals", hospital)
        return hospital

    def list_hospitals(self, principal: Principal | None) -> list[Hospital]:
        require_authenticated(principal)
        return sorted(self._store.values("hospitals"), key=lambda h: (h.name, h.id))

    def get_hospital(self, principal: Principal | None, hospital_id: str) -> Hospital:
        require_authenticated(principal)
        hospital = self._store.get("hospitals", hospital_id)
        if hospital is None:
            raise NotFound("hospital not found")
        return hospital

    def add_doctor(
        self,
        principal: Principal | None,
        *,
        hospital_id: str,
        name: str,
        specialty: str,
        phone: str,
        email: str,
        working_hours: dict,
    ) -> Doctor:
        """Admins register doctors; doctors cannot register themselves."""
        require_admin(principal)
        hours = parse_working_hours(working_hours)
        errors = []
        if not name.strip():
            errors.append(FieldError("name", "empty_name", "name is required"))
        if not validate_email(email):
            errors.append(FieldError("email", "invalid_email", MSG_EMAIL_INVALID))
        if errors:
            raise ValidationFailed(errors)
        with self._store.transaction() as txn:
            if txn.get("hospitals", hospital_id) is None:
                raise NotFound("hospital not found")
            doctor = Doctor(
                id=uuid.uuid4().hex,
                hospital_id=hospital_id,
                name=name.strip(),
                specialty=specialty,
                phone=phone,
                email=email,
                working_hours=hours,
            )
            txn.put("doctors", doctor)
        return doctor

    def list_doctors(self, principal: Principal | None, hospital_id: str) -> list[Doctor]:
        """Active doctors of one hospital, name-sorted (ties by id)."""
        require_authenticated(principal)
        view = self._store.view()
        if hospital_id not in view["hospitals"]:
            raise NotFound("hospital not found")
        doctors = [
            d for d in view["doctors"].values() if d.hospital_id == hospital_id and d.active
        ]
        return sorted(doctors, key=lambda d: (d.name, d.id))

    def get_doctor(self, principal: Principal | None, doctor_id: str) -> Doctor:
        require_authenticated(principal)
        doctor = self._store.get("doctors", doctor_id)
        if doctor is None:
            raise NotFound("doctor not found")
        return doctor

    def list_all_doctors(self, principal: Principal | None) -> list[Doctor]:
        require_admin(principal)
        return sorted(self._store.values("doctors"), key=lambda d: (d.name, d.id))

    def list_patients(self, principal: Principal | None) -> list[Patient]:
        require_admin(principal)
        return sorted(self._store.values("patients"), key=lambda p: (p.username, p.id))

    def list_schedule_groups(self, principal: Principal | None) -> list[str]:
        require_authenticated(principal)
        return [s.group for s in self._store.values("health_schedules")]

    def get_schedule(self, principal: Principal | None, group: str) -> HealthSchedule:
        """Exact-match group lookup (keys are case-sensitive)."""
        require_authenticated(principal)
        schedule = self._store.get("health_schedules", group)
        if schedule is None:
            raise NotFound("health schedule not found")
        return schedule

    def about(self) -> AboutContent:
        return self._about
