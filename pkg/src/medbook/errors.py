"""Failure taxonomy shared by every layer, plus the user-facing message strings.

Each error carries a stable machine code and the HTTP status it maps to at
the API boundary: validation 422, auth 401, role 403, not-found 404,
reservation/state conflicts 409.
"""
from __future__ import annotations

from dataclasses import dataclass

# Clients display these verbatim; do not reword them.
MSG_REGISTERED = "successfully registered"
MSG_PASSWORDS_DONT_MATCH = "passwords didn't match"
MSG_EMAIL_INVALID = "email is not valid"
MSG_SIGNIN_FAILED = "Signin failed check your connection or contact support"
MSG_BOOKED = "successfully added"

MSG_USERNAME_REQUIRED = "username is required"
MSG_WEAK_PASSWORD = "password must be at least 8 characters"
MSG_USERNAME_TAKEN = "username is already taken"
MSG_EMAIL_TAKEN = "email is already registered"


@dataclass(frozen=True)
class FieldError:
    """A single violated input rule."""

    field: str
    code: str
    message: str


class MedbookError(Exception):
    """Base for failures that map onto the API error envelope."""

    code: str = "internal_error"
    http_status: int = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationFailed(MedbookError):
    """One or more input rules violated; carries every violation."""

    code = "validation_failed"
    http_status = 422

    def __init__(self, errors: list[FieldError] | tuple[FieldError, ...]):
        self.field_errors = tuple(errors)
        message = self.field_errors[0].message if self.field_errors else "validation failed"
        super().__init__(message)


class DuplicateUsername(MedbookError):
    code = "duplicate_username"
    http_status = 422

    def __init__(self, message: str = MSG_USERNAME_TAKEN):
        super().__init__(message)


class DuplicateEmail(MedbookError):
    code = "duplicate_email"
    http_status = 422

    def __init__(self, message: str = MSG_EMAIL_TAKEN):
        super().__init__(message)


class Unauthenticated(MedbookError):
    code = "unauthenticated"
    http_status = 401

    def __init__(self, message: str = "authentication required"):
        super().__init__(message)


class UnknownToken(MedbookError):
    code = "unknown_token"
    http_status = 401

    def __init__(self, message: str = "invalid session token"):
        super().__init__(message)


class ExpiredToken(MedbookError):
    code = "expired_token"
    http_status = 401

    def __init__(self, message: str = "session expired"):
        super().__init__(message)


class InvalidCredentials(MedbookError):
    code = "invalid_credentials"
    http_status = 401

    def __init__(self, message: str = MSG_SIGNIN_FAILED):
        super().__init__(message)


class Forbidden(MedbookError):
    code = "forbidden"
    http_status = 403

    def __init__(self, message: str = "not allowed"):
        super().__init__(message)


class NotFound(MedbookError):
    code = "not_found"
    http_status = 404

    def __init__(self, message: str = "not found"):
        super().__init__(message)


class InvalidCoordinates(MedbookError):
    code = "invalid_coordinates"
    http_status = 422

    def __init__(self, message: str = "latitude must be in [-90, 90] and longitude in [-180, 180]"):
        super().__init__(message)


class InvalidWorkingHours(MedbookError):
    code = "invalid_working_hours"
    http_status = 422


class SlotTaken(MedbookError):
    code = "slot_taken"
    http_status = 409

    def __init__(self, message: str = "slot is already taken"):
        super().__init__(message)


class InvalidSlot(MedbookError):
    code = "invalid_slot"
    http_status = 422

    def __init__(self, message: str = "start is not a bookable slot for this doctor and date"):
        super().__init__(message)


class PastSlot(MedbookError):
    code = "past_slot"
    http_status = 422

    def __init__(self, message: str = "slot is in the past"):
        super().__init__(message)


class DateOutOfRange(MedbookError):
    code = "date_out_of_range"
    http_status = 422

    def __init__(self, message: str = "date is outside the booking horizon"):
        super().__init__(message)


class DailyCapReached(MedbookError):
    code = "daily_cap_reached"
    http_status = 422

    def __init__(self, message: str = "daily booking limit reached"):
        super().__init__(message)


class AlreadyCancelled(MedbookError):
    code = "already_cancelled"
    http_status = 409

    def __init__(self, message: str = "appointment is already cancelled"):
        super().__init__(message)


class ConfigInvalid(MedbookError):
    code = "config_invalid"
    http_status = 500

    def __init__(self, errors: list[FieldError] | tuple[FieldError, ...]):
        self.field_errors = tuple(errors)
        summary = "; ".join(f"{e.field}: {e.message}" for e in self.field_errors)
        super().__init__(summary or "invalid configuration")
