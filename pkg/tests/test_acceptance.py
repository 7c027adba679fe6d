"""Acceptance suite: one test per release criterion, printed as a pass line.

HTTP criteria run against a real uvicorn server bound to an ephemeral port,
backed by the committed demo fixture and a controllable clock.
"""
import datetime as dt
import random
import re
import subprocess
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import httpx
import pytest
import uvicorn
from fastapi.routing import APIRoute

from medbook.api import API_PREFIX, PUBLIC_PATHS, create_app
from medbook.auth import AuthService, hash_password
from medbook.booking import BookingService
from medbook.catalog import AboutContent, CatalogService
from medbook.config import Config
from medbook.domain import (
    AppointmentState,
    Doctor,
    NotificationKind,
    Principal,
    Role,
    generate_slots,
    minute_of_day,
    parse_working_hours,
    slot_overlaps,
)
from medbook.errors import SlotTaken
from medbook.seed import load_fixture, seed_store
from medbook.storage import FileStore, MemoryStore

from conftest import TEST_HASH_ITERATIONS
from support import BASE_NOW, FakeClock, make_doctor, make_hospital, register_patient

REPO_ROOT = Path(__file__).resolve().parents[1]
DEMO_FIXTURE = REPO_ROOT / "fixtures" / "demo.json"
NEXT_DAY_ISO = "2026-03-03"  # Tuesday relative to the fake clock's Monday


def report(criterion: str) -> None:
    print(f"\nACCEPTANCE PASS: {criterion}")


def build_demo_app():
    store = MemoryStore()
    seed_store(
        store,
        load_fixture(DEMO_FIXTURE),
        hash_password=lambda pw: hash_password(pw, iterations=TEST_HASH_ITERATIONS),
    )
    clock = FakeClock(BASE_NOW)
    app = create_app(Config(hash_iterations=TEST_HASH_ITERATIONS), store=store, clock=clock)
    return app, store, clock


class LiveServer:
    """uvicorn on an ephemeral port, run in a daemon thread."""

    def __init__(self, app):
        self._server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning", access_log=False)
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> str:
        self._thread.start()
        deadline = time.monotonic() + 15
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server failed to start")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}{API_PREFIX}"

    def __exit__(self, exc_type, exc, tb) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10)


def signup_and_login(client: httpx.Client, username: str) -> str:
    response = client.post(
        "/auth/signup",
        json={
            "username": username,
            "email": f"{username}@mail.example",
            "password": "secret123",
            "confirm": "secret123",
        },
    )
    assert response.status_code == 201, response.text
    login = client.post("/auth/login", json={"username": username, "password": "secret123"})
    assert login.status_code == 200, login.text
    return login.json()["token"]


def bearer(token: str) -> dict:
    return {"Authorization": f"Bearer {token}"}


def doctor_named(store, name: str) -> Doctor:
    return next(d for d in store.values("doctors") if d.name == name)


def test_exact_message_golden():
    """The five user-facing strings come back byte-exactly from their API paths."""
    app, store, _ = build_demo_app()
    with LiveServer(app) as base:
        with httpx.Client(base_url=base, timeout=10) as client:
            ok = client.post(
                "/auth/signup",
                json={
                    "username": "ali",
                    "email": "ali@mail.com",
                    "password": "secret123",
                    "confirm": "secret123",
                },
            )
            assert ok.status_code == 201
            assert ok.json()["message"] == "successfully registered"
            assert b"successfully registered" in ok.content

            mismatch = client.post(
                "/auth/signup",
                json={
                    "username": "omar",
                    "email": "omar@mail.com",
                    "password": "secret123",
                    "confirm": "secret124",
                },
            )
            assert mismatch.status_code == 422
            assert mismatch.json()["message"] == "passwords didn't match"
            assert "passwords didn't match".encode() in mismatch.content

            bad_email = client.post(
                "/auth/signup",
                json={
                    "username": "omar",
                    "email": "omar@mail",
                    "password": "secret123",
                    "confirm": "secret123",
                },
            )
            assert bad_email.status_code == 422
            assert bad_email.json()["message"] == "email is not valid"
            assert b"email is not valid" in bad_email.content

            failed_login = client.post("/auth/login", json={"username": "ali", "password": "wrong"})
            assert failed_login.status_code == 401
            assert (
                failed_login.json()["message"]
                == "Signin failed check your connection or contact support"
            )
            assert b"Signin failed check your connection or contact support" in failed_login.content

            token = client.post(
                "/auth/login", json={"username": "ali", "password": "secret123"}
            ).json()["token"]
            doctor = doctor_named(store, "Dr. Ayesha Khan")
            booked = client.post(
                "/appointments",
                json={"doctor_id": doctor.id, "date": NEXT_DAY_ISO, "start": "09:00"},
                headers=bearer(token),
            )
            assert booked.status_code == 201
            assert booked.json()["message"] == "successfully added"
            assert b"successfully added" in booked.content
    report("exact-message golden tests (5 strings byte-exact)")


def test_no_double_booking_under_contention():
    """100 concurrent requests for one slot: exactly one 201, 99 409s, <10s."""
    app, store, _ = build_demo_app()
    doctor = doctor_named(store, "Dr. Ayesha Khan")
    body = {"doctor_id": doctor.id, "date": NEXT_DAY_ISO, "start": "10:00"}

    with LiveServer(app) as base:
        limits = httpx.Limits(max_connections=100, max_keepalive_connections=100)
        with httpx.Client(base_url=base, timeout=30, limits=limits) as client:
            tokens = [signup_and_login(client, f"racer{i}") for i in range(100)]

            def attempt(token: str) -> int:
                return client.post("/appointments", json=body, headers=bearer(token)).status_code

            started = time.monotonic()
            with ThreadPoolExecutor(max_workers=100) as pool:
                statuses = list(pool.map(attempt, tokens))
            elapsed = time.monotonic() - started

    assert len(statuses) == 100
    assert statuses.count(201) == 1, statuses
    assert statuses.count(409) == 99, statuses
    reserved = [
        a
        for a in store.values("appointments")
        if a.state is AppointmentState.RESERVED
        and a.slot.slot_key() == (doctor.id, NEXT_DAY_ISO, "10:00")
    ]
    assert len(reserved) == 1
    assert elapsed < 10, f"contention run took {elapsed:.1f}s"
    report(f"no-double-booking under contention (1x201 + 99x409 in {elapsed:.2f}s)")


def test_paper_flow_replay():
    """Signup through booking confirmation, end to end, in under 5 seconds."""
    app, store, _ = build_demo_app()
    with LiveServer(app) as base:
        started = time.monotonic()
        with httpx.Client(base_url=base, timeout=10) as client:
            token = signup_and_login(client, "flowuser")
            headers = bearer(token)

            hospitals = client.get("/hospitals", headers=headers)
            assert hospitals.status_code == 200 and len(hospitals.json()) == 3

            city_care = next(h for h in hospitals.json() if h["name"] == "City Care General Hospital")
            detail = client.get(f"/hospitals/{city_care['id']}", headers=headers)
            assert detail.status_code == 200
            assert detail.json()["contact_uri"].startswith("tel:")
            assert detail.json()["map_url"].startswith("https://www.google.com/maps?q=")

            doctors = client.get(f"/hospitals/{city_care['id']}/doctors", headers=headers)
            assert doctors.status_code == 200 and doctors.json()

            chosen = next(d for d in doctors.json() if d["name"] == "Dr. Ayesha Khan")
            profile = client.get(f"/doctors/{chosen['id']}", headers=headers)
            assert profile.status_code == 200
            assert profile.json()["email_uri"].startswith("mailto:")

            availability = client.get(
                f"/doctors/{chosen['id']}/availability",
                params={"date": NEXT_DAY_ISO},
                headers=headers,
            )
            assert availability.status_code == 200
            free = [s for s in availability.json()["slots"] if s["status"] == "free"]
            assert free

            booked = client.post(
                "/appointments",
                json={"doctor_id": chosen["id"], "date": NEXT_DAY_ISO, "start": free[0]["start"]},
                headers=headers,
            )
            assert booked.status_code == 201
            assert booked.json()["message"] == "successfully added"

            confirmation = client.get("/notifications", headers=headers)
            assert confirmation.status_code == 200
            assert [n["kind"] for n in confirmation.json()] == ["booking_confirmed"]
        elapsed = time.monotonic() - started
    assert elapsed < 5, f"flow replay took {elapsed:.1f}s"
    report(f"paper-flow replay signup->booking confirmation ({elapsed:.2f}s)")


def test_role_gate_suite():
    """Every admin route 403s for a patient token; no mutation slips through."""
    app, store, _ = build_demo_app()
    admin_routes = [
        (method, route.path)
        for route in app.routes
        if isinstance(route, APIRoute)
        and route.path.startswith(f"{API_PREFIX}/admin/")
        and route.path not in PUBLIC_PATHS
        for method in sorted(route.methods - {"HEAD", "OPTIONS"})
    ]
    assert len(admin_routes) >= 5

    with LiveServer(app) as base:
        with httpx.Client(base_url=base, timeout=10) as client:
            token = signup_and_login(client, "patient1")
            for method, path in admin_routes:
                url = re.sub(r"\{[^}]+\}", "x", path)[len(API_PREFIX) :]
                response = client.request(method, url, headers=bearer(token))
                assert response.status_code == 403, (method, path, response.status_code)

            doctors_before = {d.id for d in store.values("doctors")}
            hospital = store.values("hospitals")[0]
            attempt = client.post(
                "/admin/doctors",
                json={
                    "hospital_id": hospital.id,
                    "name": "Dr. Self Registered",
                    "specialty": "None",
                    "phone": "1",
                    "email": "self@clinic.example",
                    "working_hours": {"mon": [["09:00", "17:00"]]},
                },
                headers=bearer(token),
            )
            assert attempt.status_code == 403
            assert {d.id for d in store.values("doctors")} == doctors_before
    report(f"role-gate suite ({len(admin_routes)} admin routes deny patient tokens, store untouched)")


def test_cancellation_notification_property():
    """Randomized 500-action workload: notifications match events one-to-one."""
    store = MemoryStore()
    clock = FakeClock(BASE_NOW)
    auth = AuthService(store, clock=clock, hash_iterations=TEST_HASH_ITERATIONS)
    auth.ensure_admin("root", "super-secret-admin")
    admin = Principal(store.values("admins")[0].id, Role.ADMIN)
    services = type(
        "Bundle",
        (),
        {
            "store": store,
            "clock": clock,
            "auth": auth,
            "catalog": CatalogService(store, about=AboutContent("x", ())),
            "booking": BookingService(store, clock=clock),
            "admin": admin,
        },
    )()

    hospital = make_hospital(services)
    doctors = [
        make_doctor(services, hospital.id, name=f"Dr. {c}", email=f"{c.lower()}@clinic.example")
        for c in "ABCDE"
    ]
    patients = [register_patient(services, f"patient{i}")[0] for i in range(8)]

    rng = random.Random(99)
    bookings = 0
    staff_cancels: dict[str, int] = {p.id: 0 for p in patients}
    patient_cancels = 0
    live: list[tuple[Principal, str]] = []

    for _ in range(500):
        roll = rng.random()
        if roll < 0.55:
            patient = rng.choice(patients)
            day = dt.date(2026, 3, 3) + dt.timedelta(days=rng.randint(0, 30))
            start = dt.time(rng.randint(9, 16), rng.choice([0, 30]))
            try:
                view = services.booking.book(patient, rng.choice(doctors).id, day, start)
            except SlotTaken:
                continue
            bookings += 1
            live.append((patient, view.appointment.id))
        elif live:
            patient, appointment_id = live.pop(rng.randrange(len(live)))
            if roll < 0.85:
                services.booking.cancel(admin, appointment_id)
                staff_cancels[patient.id] += 1
            else:
                services.booking.cancel(patient, appointment_id)
                patient_cancels += 1

    total_confirmed = 0
    total_cancel_notes = 0
    for patient in patients:
        notes = services.booking.list_notifications(patient)
        cancel_notes = [n for n in notes if n.kind is NotificationKind.APPOINTMENT_CANCELLED]
        assert len(cancel_notes) == staff_cancels[patient.id]
        assert len({n.appointment_id for n in cancel_notes}) == len(cancel_notes)
        total_cancel_notes += len(cancel_notes)
        total_confirmed += sum(1 for n in notes if n.kind is NotificationKind.BOOKING_CONFIRMED)
    assert total_confirmed == bookings
    assert total_cancel_notes == sum(staff_cancels.values())

    reserved_keys = [
        a.slot.slot_key()
        for a in store.values("appointments")
        if a.state is AppointmentState.RESERVED
    ]
    assert len(reserved_keys) == len(set(reserved_keys))
    assert bookings > 100 and sum(staff_cancels.values()) > 30 and patient_cancels > 0
    report(
        f"cancellation-notification property (bookings={bookings}, "
        f"staff cancellations={sum(staff_cancels.values())}, all matched 1:1)"
    )


def test_slot_calendar_property_suite():
    """1,000 random working-hour configurations keep every slot invariant."""
    rng = random.Random(4242)
    weekday_keys = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")
    checked = 0
    for _ in range(1000):
        day_key = rng.choice(weekday_keys)
        marks = sorted(rng.sample(range(0, 24 * 60), rng.randint(0, 4) * 2))
        intervals = list(zip(marks[::2], marks[1::2]))
        wire = {
            day_key: [
                [f"{a // 60:02d}:{a % 60:02d}", f"{b // 60:02d}:{b % 60:02d}"]
                for a, b in intervals
            ]
        }
        doctor = Doctor(
            id="d1",
            hospital_id="h1",
            name="Dr. Prop",
            specialty="x",
            phone="1",
            email="p@clinic.example",
            working_hours=parse_working_hours(wire),
        )
        slot_minutes = rng.choice([5, 10, 15, 20, 30, 45, 60, 90, 120])
        day = dt.date(2026, 3, 2) + dt.timedelta(days=weekday_keys.index(day_key))
        slots = generate_slots(doctor, day, slot_minutes)

        starts = [minute_of_day(s.start) for s in slots]
        assert starts == sorted(starts)
        assert all(s.duration_minutes == slot_minutes for s in slots)
        for i, a in enumerate(slots):
            for b in slots[i + 1 :]:
                assert not slot_overlaps(a, b)
        for s in slots:
            begin = minute_of_day(s.start)
            assert any(lo <= begin and begin + slot_minutes <= hi for lo, hi in intervals)
        checked += len(slots)
    assert checked > 1000  # the generator produced real work, not empty calendars
    report(f"slot-calendar property suite (1000 configurations, {checked} slots checked)")


def test_storage_equivalence_and_crash_recovery(tmp_path):
    """Same workload gives identical results on both stores; kill keeps commits."""
    import json as jsonlib

    def run_workload(store):
        clock = FakeClock(BASE_NOW)
        auth = AuthService(store, clock=clock, hash_iterations=TEST_HASH_ITERATIONS)
        auth.ensure_admin("root", "super-secret-admin")
        admin = Principal(store.values("admins")[0].id, Role.ADMIN)
        services = type(
            "Bundle",
            (),
            {
                "store": store,
                "clock": clock,
                "auth": auth,
                "catalog": CatalogService(store, about=AboutContent("x", ())),
                "booking": BookingService(store, clock=clock),
                "admin": admin,
            },
        )()
        hospital = make_hospital(services)
        doctor = make_doctor(services, hospital.id)
        patient, _ = register_patient(services, "eq-user")
        first = services.booking.book(patient, doctor.id, dt.date(2026, 3, 3), dt.time(9, 0))
        services.booking.book(patient, doctor.id, dt.date(2026, 3, 3), dt.time(10, 0))
        services.booking.cancel(admin, first.appointment.id)
        rows = services.booking.list_for_patient(patient)
        notes = services.booking.list_notifications(patient)
        return {
            "appointments": [(r.appointment.state.value, r.appointment.slot.to_record()["start"]) for r in rows],
            "notifications": [n.kind.value for n in notes],
            "hospitals": [h.name for h in services.catalog.list_hospitals(admin)],
        }

    memory_outcome = run_workload(MemoryStore())
    file_store = FileStore(tmp_path / "eq" / "store.json")
    file_outcome = run_workload(file_store)
    assert memory_outcome == file_outcome
    reopened = FileStore(tmp_path / "eq" / "store.json")
    assert reopened.view() == file_store.view()

    # kill -9 a child mid-write loop; every acknowledged commit must survive
    db_path = tmp_path / "crash" / "store.json"
    script = f"""
import datetime as dt, sys
from medbook.domain import Appointment, AppointmentState, TimeSlot
from medbook.storage import FileStore

store = FileStore({str(db_path)!r})
for i in range(1000):
    slot = TimeSlot("doc", dt.date(2026, 3, 3), dt.time(9 + i // 60, i % 60), 1)
    appt = Appointment(
        id=f"appt-{{i}}",
        patient_id="p1",
        slot=slot,
        state=AppointmentState.RESERVED,
        created_at=dt.datetime(2026, 3, 2, tzinfo=dt.timezone.utc),
    )
    with store.transaction() as txn:
        txn.put("appointments", appt)
    print(appt.id, flush=True)
"""
    child = subprocess.Popen(
        [sys.executable, "-c", script], stdout=subprocess.PIPE, text=True
    )
    acknowledged = []
    for line in child.stdout:
        acknowledged.append(line.strip())
        if len(acknowledged) >= 25:
            child.kill()
            break
    child.wait(timeout=10)
    assert len(acknowledged) >= 25

    recovered = FileStore(db_path)
    surviving = {a.id for a in recovered.values("appointments")}
    missing = [a for a in acknowledged if a not in surviving]
    assert not missing, f"committed appointments lost after kill: {missing}"
    report(
        f"storage equivalence + crash recovery ({len(acknowledged)} acknowledged commits survived kill)"
    )
