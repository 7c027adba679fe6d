"""Availability, atomic slot reservation, cancellation, and notification feeds.

Reservation is first-committer-wins: the booking transaction checks the slot
inside the store lock and the commit-time uniqueness constraint on reserved
(doctor, date, start) keys backs it up, so under any interleaving exactly one
booking of a slot succeeds. Working hours are hospital-local; "past" and the
booking horizon are judged by the hospital's clock.
"""
from __future__ import annotations

import datetime as dt
import uuid
from dataclasses import dataclass, replace
from zoneinfo import ZoneInfo

from .catalog import require_admin, require_authenticated
from .domain import (
    Appointment,
    AppointmentState,
    Clock,
    Doctor,
    Hospital,
    Notification,
    NotificationKind,
    Patient,
    Principal,
    Role,
    TimeSlot,
    format_hhmm,
    generate_slots,
    utc_now,
)
from .errors import (
    AlreadyCancelled,
    DailyCapReached,
    DateOutOfRange,
    Forbidden,
    InvalidSlot,
    NotFound,
    PastSlot,
    SlotTaken,
)
from .storage import ConstraintViolation, Store

DEFAULT_SLOT_MINUTES = 30
DEFAULT_HORIZON_DAYS = 90


@dataclass(frozen=True)
class AvailabilitySlot:
    slot: TimeSlot
    taken: bool


@dataclass(frozen=True)
class AppointmentView:
    """An appointment joined with the names a client needs to display it."""

    appointment: Appointment
    doctor: Doctor
    hospital: Hospital
    patient: Patient


def require_patient(principal: Principal | None) -> Principal:
    principal = require_authenticated(principal)
    if principal.role is not Role.PATIENT:
        raise Forbidden("patient access required")
    return principal


class BookingService:
    def __init__(
        self,
        store: Store,
        *,
        clock: Clock = utc_now,
        slot_minutes: int = DEFAULT_SLOT_MINUTES,
        horizon_days: int = DEFAULT_HORIZON_DAYS,
        daily_cap: int | None = None,
    ):
        self._store = store
        self._clock = clock
        self._slot_minutes = slot_minutes
        self._horizon_days = horizon_days
        self._daily_cap = daily_cap

    def _local_now(self, hospital: Hospital) -> dt.datetime:
        return self._clock().astimezone(ZoneInfo(hospital.timezone))

    def _check_horizon(self, day: dt.date, today: dt.date) -> None:
        if day < today or day > today + dt.timedelta(days=self._horizon_days):
            raise DateOutOfRange()

    def get_availability(
        self, principal: Principal | None, doctor_id: str, day: dt.date
    ) -> list[AvailabilitySlot]:
        """Every slot for the date, marked taken iff a reservation holds it.

        Slots whose start has already passed (hospital-local) are excluded.
        """
        require_authenticated(principal)
        view = self._store.view()
        doctor = view["doctors"].get(doctor_id)
        if doctor is None:
            raise NotFound("doctor not found")
        hospital = view["hospitals"][doctor.hospital_id]
        now = self._local_now(hospital)
        self._check_horizon(day, now.date())
        reserved = {
            a.slot.slot_key()
            for a in view["appointments"].values()
            if a.state is AppointmentState.RESERVED
        }
        slots = []
        for slot in generate_slots(doctor, day, self._slot_minutes):
            if dt.datetime.combine(day, slot.start, tzinfo=now.tzinfo) <= now:
                continue
            slots.append(AvailabilitySlot(slot=slot, taken=slot.slot_key() in reserved))
        return slots

    def book(
        self, principal: Principal | None, doctor_id: str, day: dt.date, start: dt.time
    ) -> AppointmentView:
        """Reserve a free future slot; emits a booking-confirmed notification."""
        principal = require_patient(principal)
        try:
            with self._store.transaction() as txn:
                doctor = txn.get("doctors", doctor_id)
                if doctor is None:
                    raise NotFound("doctor not found")
                hospital = txn.get("hospitals", doctor.hospital_id)
                patient = txn.get("patients", principal.id)
                if patient is None:
                    raise NotFound("patient account not found")
                valid_starts = {s.start for s in generate_slots(doctor, day, self._slot_minutes)}
                if start not in valid_starts:
                    raise InvalidSlot()
                now = self._local_now(hospital)
                if dt.datetime.combine(day, start, tzinfo=now.tzinfo) <= now:
                    raise PastSlot()
                self._check_horizon(day, now.date())
                slot = TimeSlot(doctor_id, day, start, self._slot_minutes)
                for existing in txn.values("appointments"):
                    if (
                        existing.state is AppointmentState.RESERVED
                        and existing.slot.slot_key() == slot.slot_key()
                    ):
                        raise SlotTaken()
                if self._daily_cap is not None:
                    held = sum(
                        1
                        for a in txn.values("appointments")
                        if a.patient_id == principal.id
                        and a.state is AppointmentState.RESERVED
                        and a.slot.date == day
                    )
                    if held >= self._daily_cap:
                        raise DailyCapReached()
                appointment = Appointment(
                    id=uuid.uuid4().hex,
                    patient_id=principal.id,
                    slot=slot,
                    state=AppointmentState.RESERVED,
                    created_at=self._clock(),
                )
                txn.put("appointments", appointment)
                txn.put(
                    "notifications",
                    Notification(
                        id=uuid.uuid4().hex,
                        patient_id=principal.id,
                        kind=NotificationKind.BOOKING_CONFIRMED,
                        appointment_id=appointment.id,
                        message=(
                            f"Appointment with {doctor.name} on {day.isoformat()} "
                            f"at {format_hhmm(start)} successfully added"
                        ),
                        created_at=self._clock(),
                    ),
                )
        except ConstraintViolation as exc:
            # commit-time backstop for the reserved-slot key
            raise SlotTaken() from exc
        return AppointmentView(appointment=appointment, doctor=doctor, hospital=hospital, patient=patient)

    def cancel(self, principal: Principal | None, appointment_id: str) -> AppointmentView:
        """Cancel a reservation; staff cancellations notify the owning patient."""
        principal = require_authenticated(principal)
        with self._store.transaction() as txn:
            appointment = txn.get("appointments", appointment_id)
            if appointment is None:
                raise NotFound("appointment not found")
            by_staff = principal.role is Role.ADMIN
            if not by_staff and appointment.patient_id != principal.id:
                raise Forbidden("appointment belongs to another patient")
            if appointment.state is not AppointmentState.RESERVED:
                raise AlreadyCancelled()
            new_state = (
                AppointmentState.CANCELLED_BY_STAFF if by_staff else AppointmentState.CANCELLED_BY_PATIENT
            )
            appointment = appointment.cancelled(new_state, self._clock())
            txn.put("appointments", appointment)
            doctor = txn.get("doctors", appointment.slot.doctor_id)
            hospital = txn.get("hospitals", doctor.hospital_id)
            patient = txn.get("patients", appointment.patient_id)
            if by_staff:
                txn.put(
                    "notifications",
                    Notification(
                        id=uuid.uuid4().hex,
                        patient_id=appointment.patient_id,
                        kind=NotificationKind.APPOINTMENT_CANCELLED,
                        appointment_id=appointment.id,
                        message=(
                            f"Your appointment with {doctor.name} on "
                            f"{appointment.slot.date.isoformat()} at "
                            f"{format_hhmm(appointment.slot.start)} was cancelled by the clinic"
                        ),
                        created_at=self._clock(),
                    ),
                )
        return AppointmentView(appointment=appointment, doctor=doctor, hospital=hospital, patient=patient)

    def _join(self, view: dict, appointment: Appointment) -> AppointmentView:
        doctor = view["doctors"][appointment.slot.doctor_id]
        return AppointmentView(
            appointment=appointment,
            doctor=doctor,
            hospital=view["hospitals"][doctor.hospital_id],
            patient=view["patients"][appointment.patient_id],
        )

    def list_for_patient(self, principal: Principal | None) -> list[AppointmentView]:
        """The caller's appointments, newest first, cancelled ones included."""
        principal = require_patient(principal)
        view = self._store.view()
        mine = [a for a in view["appointments"].values() if a.patient_id == principal.id]
        mine.sort(key=lambda a: (a.created_at, a.id), reverse=True)
        return [self._join(view, a) for a in mine]

    def list_all(
        self,
        principal: Principal | None,
        *,
        doctor_id: str | None = None,
        date_from: dt.date | None = None,
        date_to: dt.date | None = None,
    ) -> list[AppointmentView]:
        """Admin-wide listing, chronological by slot, optionally filtered."""
        require_admin(principal)
        view = self._store.view()
        rows = list(view["appointments"].values())
        if doctor_id is not None:
            rows = [a for a in rows if a.slot.doctor_id == doctor_id]
        if date_from is not None:
            rows = [a for a in rows if a.slot.date >= date_from]
        if date_to is not None:
            rows = [a for a in rows if a.slot.date <= date_to]
        rows.sort(key=lambda a: (a.slot.date, a.slot.start, a.created_at, a.id))
        return [self._join(view, a) for a in rows]

    def list_notifications(
        self, principal: Principal | None, *, unread_only: bool = False
    ) -> list[Notification]:
        principal = require_patient(principal)
        rows = [
            n
            for n in self._store.values("notifications")
            if n.patient_id == principal.id and (not unread_only or not n.read)
        ]
        rows.sort(key=lambda n: (n.created_at, n.id), reverse=True)
        return rows

    def mark_notification_read(self, principal: Principal | None, notification_id: str) -> Notification:
        principal = require_patient(principal)
        with self._store.transaction() as txn:
            notification = txn.get("notifications", notification_id)
            if notification is None:
                raise NotFound("notification not found")
            if notification.patient_id != principal.id:
                raise Forbidden("notification belongs to another patient")
            if not notification.read:
                notification = replace(notification, read=True)
                txn.put("notifications", notification)
        return notification
