"""JSON-over-HTTP boundary: routes, bearer-token auth, and the error envelope.

Every error body is the same envelope: {"status", "code", "message"} plus an
optional "errors" list of field violations. Status mapping: validation 422,
missing/bad auth 401, role 403, not-found 404, reservation/state conflict 409.
"""
from __future__ import annotations

import datetime as dt
import logging
import time
import uuid

from fastapi import Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .auth import AuthService
from .booking import AppointmentView, BookingService
from .catalog import CatalogService, mailto_uri, map_url, tel_uri
from .config import Config
from .domain import (
    Doctor,
    Hospital,
    Notification,
    Principal,
    Role,
    format_hhmm,
    parse_hhmm,
    utc_now,
    working_hours_to_wire,
)
from .errors import (
    FieldError,
    Forbidden,
    MSG_BOOKED,
    MSG_REGISTERED,
    MedbookError,
    Unauthenticated,
    ValidationFailed,
)
from .storage import FileStore, MemoryStore, Store

logger = logging.getLogger("medbook.api")

API_PREFIX = "/api/v1"

# routes reachable without a session token
PUBLIC_PATHS = {
    f"{API_PREFIX}/health",
    f"{API_PREFIX}/about",
    f"{API_PREFIX}/openapi",
    f"{API_PREFIX}/auth/signup",
    f"{API_PREFIX}/auth/login",
    f"{API_PREFIX}/auth/logout",
    f"{API_PREFIX}/admin/login",
}


class SignupRequest(BaseModel):
    username: str
    email: str
    password: str
    confirm: str


class LoginRequest(BaseModel):
    username: str
    password: str


class BookRequest(BaseModel):
    doctor_id: str
    date: str
    start: str


class HospitalCreate(BaseModel):
    name: str
    address: str = ""
    phone: str
    latitude: float
    longitude: float
    description: str = ""
    timezone: str = "UTC"


class DoctorCreate(BaseModel):
    hospital_id: str
    name: str
    specialty: str = ""
    phone: str = ""
    email: str
    working_hours: dict[str, list[list[str]]]


def _err(description: str) -> dict:
    return {"description": description}


def _error_body(status: int, code: str, message: str, field_errors=()) -> dict:
    body = {"status": status, "code": code, "message": message}
    if field_errors:
        body["errors"] = [
            {"field": e.field, "code": e.code, "message": e.message} for e in field_errors
        ]
    return body


def _parse_date(value: str, field: str = "date") -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ValidationFailed([FieldError(field, "invalid_date", f"{field} must be YYYY-MM-DD")]) from None


def _parse_time(value: str, field: str = "start") -> dt.time:
    try:
        return parse_hhmm(value)
    except ValueError:
        raise ValidationFailed(
            [FieldError(field, "invalid_time", f"{field} must be HH:MM 24-hour time")]
        ) from None


def _iso(ts: dt.datetime | None) -> str | None:
    return ts.isoformat() if ts else None


def _hospital_json(hospital: Hospital) -> dict:
    return {
        "id": hospital.id,
        "name": hospital.name,
        "address": hospital.address,
        "phone": hospital.phone,
        "latitude": hospital.latitude,
        "longitude": hospital.longitude,
        "description": hospital.description,
        "timezone": hospital.timezone,
        "contact_uri": tel_uri(hospital.phone),
        "map_url": map_url(hospital.latitude, hospital.longitude),
    }


def _doctor_json(doctor: Doctor, hospital: Hospital) -> dict:
    return {
        "id": doctor.id,
        "hospital_id": doctor.hospital_id,
        "hospital_name": hospital.name,
        "name": doctor.name,
        "specialty": doctor.specialty,
        "phone": doctor.phone,
        "email": doctor.email,
        "working_hours": working_hours_to_wire(doctor.working_hours),
        "active": doctor.active,
        "contact_uri": tel_uri(doctor.phone),
        "email_uri": mailto_uri(doctor.email),
    }


def _appointment_json(view: AppointmentView, *, include_patient: bool = False) -> dict:
    appointment = view.appointment
    body = {
        "id": appointment.id,
        "doctor_id": view.doctor.id,
        "doctor_name": view.doctor.name,
        "hospital_id": view.hospital.id,
        "hospital_name": view.hospital.name,
        "date": appointment.slot.date.isoformat(),
        "start": format_hhmm(appointment.slot.start),
        "duration_minutes": appointment.slot.duration_minutes,
        "state": appointment.state.value,
        "created_at": _iso(appointment.created_at),
        "cancelled_at": _iso(appointment.cancelled_at),
    }
    if include_patient:
        body["patient_id"] = view.patient.id
        body["patient_username"] = view.patient.username
    return body


def _notification_json(notification: Notification) -> dict:
    return {
        "id": notification.id,
        "kind": notification.kind.value,
        "appointment_id": notification.appointment_id,
        "message": notification.message,
        "created_at": _iso(notification.created_at),
        "read": notification.read,
    }


def create_app(config: Config | None = None, store: Store | None = None, clock=utc_now) -> FastAPI:
    """Build the service: storage, domain services, routes, and middleware.

    Bootstraps the configured admin account iff no admin exists yet.
    """
    config = config or Config()
    if store is None:
        store = FileStore(f"{config.db}/store.json") if config.db else MemoryStore()

    auth_service = AuthService(
        store,
        clock=clock,
        session_ttl=dt.timedelta(hours=config.session_ttl_hours),
        hash_iterations=config.hash_iterations,
    )
    auth_service.ensure_admin(config.admin_username, config.admin_password)
    catalog_service = CatalogService(store, about=config.about())
    booking_service = BookingService(
        store,
        clock=clock,
        slot_minutes=config.slot_minutes,
        horizon_days=config.horizon_days,
        daily_cap=config.daily_cap,
    )

    app = FastAPI(
        title="MedBook API",
        version=__version__,
        openapi_url=f"{API_PREFIX}/openapi",
        docs_url=None,
        redoc_url=None,
    )
    app.state.config = config
    app.state.store = store
    app.state.auth = auth_service
    app.state.catalog = catalog_service
    app.state.booking = booking_service

    def bearer_token(request: Request) -> str | None:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            return None
        return header[7:].strip() or None

    def current_principal(request: Request) -> Principal:
        token = bearer_token(request)
        if token is None:
            raise Unauthenticated()
        return auth_service.authenticate(token)

    def current_admin(request: Request) -> Principal:
        principal = current_principal(request)
        if principal.role is not Role.ADMIN:
            raise Forbidden("admin access required")
        return principal

    # -- auth ---------------------------------------------------------------

    @app.post(f"{API_PREFIX}/auth/signup", status_code=201, responses={422: _err("Validation failed")})
    def signup(body: SignupRequest):
        patient = auth_service.register_patient(body.username, body.email, body.password, body.confirm)
        return {
            "message": MSG_REGISTERED,
            "patient": {"id": patient.id, "username": patient.username, "email": patient.email},
        }

    @app.post(f"{API_PREFIX}/auth/login", responses={401: _err("Bad credentials")})
    def login(body: LoginRequest):
        issued = auth_service.login_patient(body.username, body.password)
        return {"token": issued.token, "role": issued.role.value, "expires_at": _iso(issued.expires_at)}

    @app.post(f"{API_PREFIX}/auth/logout")
    def logout(request: Request):
        token = bearer_token(request)
        if token is not None:
            auth_service.logout(token)
        return {"ok": True}

    @app.post(f"{API_PREFIX}/admin/login", responses={401: _err("Bad credentials")})
    def admin_login(body: LoginRequest):
        issued = auth_service.login_admin(body.username, body.password)
        return {"token": issued.token, "role": issued.role.value, "expires_at": _iso(issued.expires_at)}

    # -- catalog ------------------------------------------------------------

    @app.get(f"{API_PREFIX}/hospitals", responses={401: _err("Not authenticated")})
    def list_hospitals(principal: Principal = Depends(current_principal)):
        return [{"id": h.id, "name": h.name} for h in catalog_service.list_hospitals(principal)]

    @app.get(
        f"{API_PREFIX}/hospitals/{{hospital_id}}",
        responses={401: _err("Not authenticated"), 404: _err("Unknown hospital")},
    )
    def get_hospital(hospital_id: str, principal: Principal = Depends(current_principal)):
        return _hospital_json(catalog_service.get_hospital(principal, hospital_id))

    @app.get(
        f"{API_PREFIX}/hospitals/{{hospital_id}}/doctors",
        responses={401: _err("Not authenticated"), 404: _err("Unknown hospital")},
    )
    def list_hospital_doctors(hospital_id: str, principal: Principal = Depends(current_principal)):
        doctors = catalog_service.list_doctors(principal, hospital_id)
        return [{"id": d.id, "name": d.name, "specialty": d.specialty} for d in doctors]

    @app.get(
        f"{API_PREFIX}/doctors/{{doctor_id}}",
        responses={401: _err("Not authenticated"), 404: _err("Unknown doctor")},
    )
    def get_doctor(doctor_id: str, principal: Principal = Depends(current_principal)):
        doctor = catalog_service.get_doctor(principal, doctor_id)
        hospital = catalog_service.get_hospital(principal, doctor.hospital_id)
        return _doctor_json(doctor, hospital)

    @app.get(
        f"{API_PREFIX}/doctors/{{doctor_id}}/availability",
        responses={
            401: _err("Not authenticated"),
            404: _err("Unknown doctor"),
            422: _err("Bad or out-of-horizon date"),
        },
    )
    def availability(
        doctor_id: str,
        date: str = Query(..., description="YYYY-MM-DD"),
        principal: Principal = Depends(current_principal),
    ):
        day = _parse_date(date)
        slots = booking_service.get_availability(principal, doctor_id, day)
        return {
            "doctor_id": doctor_id,
            "date": day.isoformat(),
            "slots": [
                {
                    "start": format_hhmm(s.slot.start),
                    "duration_minutes": s.slot.duration_minutes,
                    "status": "taken" if s.taken else "free",
                }
                for s in slots
            ],
        }

    @app.get(f"{API_PREFIX}/health-schedules", responses={401: _err("Not authenticated")})
    def list_schedules(principal: Principal = Depends(current_principal)):
        return catalog_service.list_schedule_groups(principal)

    @app.get(
        f"{API_PREFIX}/health-schedules/{{group}}",
        responses={401: _err("Not authenticated"), 404: _err("Unknown group")},
    )
    def get_schedule(group: str, principal: Principal = Depends(current_principal)):
        schedule = catalog_service.get_schedule(principal, group)
        return {
            "group": schedule.group,
            "entries": [{"title": e.title, "guidance": e.guidance} for e in schedule.entries],
        }

    @app.get(f"{API_PREFIX}/about")
    def about():
        content = catalog_service.about()
        return {"objectives": content.objectives, "developers": list(content.developers)}

    # -- booking ------------------------------------------------------------

    @app.post(
        f"{API_PREFIX}/appointments",
        status_code=201,
        responses={
            401: _err("Not authenticated"),
            403: _err("Patients only"),
            404: _err("Unknown doctor"),
            409: _err("Slot already reserved"),
            422: _err("Invalid or past slot"),
        },
    )
    def book_appointment(body: BookRequest, principal: Principal = Depends(current_principal)):
        day = _parse_date(body.date)
        start = _parse_time(body.start)
        view = booking_service.book(principal, body.doctor_id, day, start)
        return {"message": MSG_BOOKED, "appointment": _appointment_json(view)}

    @app.get(
        f"{API_PREFIX}/appointments",
        responses={401: _err("Not authenticated"), 403: _err("Patients only")},
    )
    def list_my_appointments(principal: Principal = Depends(current_principal)):
        views = booking_service.list_for_patient(principal)
        return [_appointment_json(v) for v in views]

    @app.delete(
        f"{API_PREFIX}/appointments/{{appointment_id}}",
        responses={
            401: _err("Not authenticated"),
            403: _err("Not the owner"),
            404: _err("Unknown appointment"),
            409: _err("Already cancelled"),
        },
    )
    def cancel_appointment(appointment_id: str, principal: Principal = Depends(current_principal)):
        view = booking_service.cancel(principal, appointment_id)
        return {"ok": True, "appointment": _appointment_json(view)}

    @app.get(
        f"{API_PREFIX}/notifications",
        responses={401: _err("Not authenticated"), 403: _err("Patients only")},
    )
    def list_notifications(
        unread_only: bool = False, principal: Principal = Depends(current_principal)
    ):
        rows = booking_service.list_notifications(principal, unread_only=unread_only)
        return [_notification_json(n) for n in rows]

    @app.post(
        f"{API_PREFIX}/notifications/{{notification_id}}/read",
        responses={
            401: _err("Not authenticated"),
            403: _err("Not the owner"),
            404: _err("Unknown notification"),
        },
    )
    def mark_notification_read(
        notification_id: str, principal: Principal = Depends(current_principal)
    ):
        booking_service.mark_notification_read(principal, notification_id)
        return {"ok": True}

    # -- admin --------------------------------------------------------------

    @app.post(
        f"{API_PREFIX}/admin/hospitals",
        status_code=201,
        responses={401: _err("Not authenticated"), 403: _err("Admins only"), 422: _err("Validation failed")},
    )
    def admin_add_hospital(body: HospitalCreate, principal: Principal = Depends(current_admin)):
        hospital = catalog_service.add_hospital(
            principal,
            name=body.name,
            address=body.address,
            phone=body.phone,
            latitude=body.latitude,
            longitude=body.longitude,
            description=body.description,
            timezone=body.timezone,
        )
        return _hospital_json(hospital)

    @app.post(
        f"{API_PREFIX}/admin/doctors",
        status_code=201,
        responses={
            401: _err("Not authenticated"),
            403: _err("Admins only"),
            404: _err("Unknown hospital"),
            422: _err("Validation failed"),
        },
    )
    def admin_add_doctor(body: DoctorCreate, principal: Principal = Depends(current_admin)):
        doctor = catalog_service.add_doctor(
            principal,
            hospital_id=body.hospital_id,
            name=body.name,
            specialty=body.specialty,
            phone=body.phone,
            email=body.email,
            working_hours=body.working_hours,
        )
        hospital = catalog_service.get_hospital(principal, doctor.hospital_id)
        return _doctor_json(doctor, hospital)

    @app.get(
        f"{API_PREFIX}/admin/patients",
        responses={401: _err("Not authenticated"), 403: _err("Admins only")},
    )
    def admin_list_patients(principal: Principal = Depends(current_admin)):
        return [
            {"id": p.id, "username": p.username, "email": p.email, "created_at": _iso(p.created_at)}
            for p in catalog_service.list_patients(principal)
        ]

    @app.get(
        f"{API_PREFIX}/admin/doctors",
        responses={401: _err("Not authenticated"), 403: _err("Admins only")},
    )
    def admin_list_doctors(principal: Principal = Depends(current_admin)):
        doctors = catalog_service.list_all_doctors(principal)
        hospitals = {h.id: h for h in app.state.store.values("hospitals")}
        return [_doctor_json(d, hospitals[d.hospital_id]) for d in doctors]

    @app.get(
        f"{API_PREFIX}/admin/appointments",
        responses={
            401: _err("Not authenticated"),
            403: _err("Admins only"),
            422: _err("Bad filter"),
        },
    )
    def admin_list_appointments(
        doctor_id: str | None = None,
        date_from: str | None = Query(None, alias="from", description="YYYY-MM-DD"),
        date_to: str | None = Query(None, alias="to", description="YYYY-MM-DD"),
        principal: Principal = Depends(current_admin),
    ):
        views = booking_service.list_all(
            principal,
            doctor_id=doctor_id,
            date_from=_parse_date(date_from, "from") if date_from else None,
            date_to=_parse_date(date_to, "to") if date_to else None,
        )
        return [_appointment_json(v, include_patient=True) for v in views]

    # -- infrastructure ------------------------------------------------------

    @app.get(f"{API_PREFIX}/health")
    def health():
        return {"status": "ok"}

    @app.exception_handler(MedbookError)
    async def medbook_error_handler(request: Request, exc: MedbookError):
        body = _error_body(exc.http_status, exc.code, exc.message, getattr(exc, "field_errors", ()))
        return JSONResponse(status_code=exc.http_status, content=body)

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(request: Request, exc: RequestValidationError):
        field_errors = [
            FieldError(
                ".".join(str(part) for part in e["loc"] if part != "body"),
                str(e["type"]),
                str(e["msg"]),
            )
            for e in exc.errors()
        ]
        message = (
            f"{field_errors[0].field}: {field_errors[0].message}" if field_errors else "invalid request"
        )
        return JSONResponse(
            status_code=422, content=_error_body(422, "validation_failed", message, field_errors)
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        code = {
            401: "unauthenticated",
            403: "forbidden",
            404: "not_found",
            405: "method_not_allowed",
        }.get(exc.status_code, "http_error")
        return JSONResponse(
            status_code=exc.status_code,
            content=_error_body(exc.status_code, code, str(exc.detail)),
        )

    @app.exception_handler(Exception)
    async def unhandled_exception_handler(request: Request, exc: Exception):
        logger.exception("event=unhandled_error path=%s", request.url.path)
        return JSONResponse(
            status_code=500, content=_error_body(500, "internal_error", "internal server error")
        )

    @app.middleware("http")
    async def request_logging(request: Request, call_next):
        request_id = uuid.uuid4().hex[:12]
        started = time.perf_counter()
        response = await call_next(request)
        response.headers["x-request-id"] = request_id
        logger.info(
            "event=http_request request_id=%s method=%s path=%s status=%s duration_ms=%.1f",
            request_id,
            request.method,
            request.url.path,
            response.status_code,
            (time.perf_counter() - started) * 1000,
        )
        return response

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    return app
