"""Patient registration, login, session issuance, and principal resolution.

Passwords are stored as salted PBKDF2-SHA256 digests with a configurable
iteration count; plaintext never reaches the store. Session tokens are
256-bit random strings handed to the client once; the store keeps only
their SHA-256 digest, so lookups compare digests rather than raw tokens.
"""
from __future__ import annotations

import datetime as dt
import hashlib
import hmac
import secrets
import uuid
from dataclasses import dataclass

from .domain import (
    AdminAccount,
    Clock,
    Patient,
    Principal,
    Role,
    Session,
    utc_now,
    validate_registration,
)
from .errors import (
    DuplicateEmail,
    DuplicateUsername,
    ExpiredToken,
    InvalidCredentials,
    UnknownToken,
    ValidationFailed,
)
from .storage import Store

DEFAULT_HASH_ITERATIONS = 100_000
DEFAULT_SESSION_TTL = dt.timedelta(hours=24)

_SCHEME = "pbkdf2_sha256"


def hash_password(password: str, *, iterations: int = DEFAULT_HASH_ITERATIONS) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
    return f"{_SCHEME}${iterations}${salt.hex()}${digest.hex()}"


def verify_password(password: str, encoded: str) -> bool:
    try:
        scheme, iterations, salt_hex, digest_hex = encoded.split("$")
        if scheme != _SCHEME:
            return False
        expected = bytes.fromhex(digest_hex)
        actual = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations)
        )
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(actual, expected)


def token_digest(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


def new_admin_account(username: str, password_digest: str) -> AdminAccount:
    return AdminAccount(id=uuid.uuid4().hex, username=username, password_digest=password_digest)


@dataclass(frozen=True)
class IssuedSession:
    """What a successful login hands back: the raw token plus its metadata."""

    token: str
    principal_id: str
    role: Role
    expires_at: dt.datetime


class AuthService:
    def __init__(
        self,
        store: Store,
        *,
        clock: Clock = utc_now,
        session_ttl: dt.timedelta = DEFAULT_SESSION_TTL,
        hash_iterations: int = DEFAULT_HASH_ITERATIONS,
    ):
        self._store = store
        self._clock = clock
        self._session_ttl = session_ttl
        self._hash_iterations = hash_iterations
        # verified against when the username is unknown, so both failure
        # paths cost one KDF run and stay timing-indistinguishable
        self._decoy_digest = hash_password("decoy", iterations=hash_iterations)

    def hash_password(self, password: str) -> str:
        return hash_password(password, iterations=self._hash_iterations)

    def register_patient(self, username: str, email: str, password: str, confirm: str) -> Patient:
        """Create a patient account; nothing is persisted on any failure."""
        errors = validate_registration(username, email, password, confirm)
        if errors:
            raise ValidationFailed(errors)
        username = username.strip()
        with self._store.transaction() as txn:
            for existing in txn.values("patients"):
                if existing.username == username:
                    raise DuplicateUsername()
                if existing.email == email:
                    raise DuplicateEmail()
            patient = Patient(
                id=uuid.uuid4().hex,
                username=username,
                email=email,
                password_digest=self.hash_password(password),
                created_at=self._clock(),
            )
            txn.put("patients", patient)
        return patient

    def login_patient(self, username: str, password: str) -> IssuedSession:
        return self._login("patients", username, password, Role.PATIENT)

    def login_admin(self, username: str, password: str) -> IssuedSession:
        return self._login("admins", username, password, Role.ADMIN)

    def _login(self, set_name: str, username: str, password: str, role: Role) -> IssuedSession:
        account = next(
            (a for a in self._store.values(set_name) if a.username == username), None
        )
        if account is None:
            verify_password(password, self._decoy_digest)
            raise InvalidCredentials()
        if not verify_password(password, account.password_digest):
            raise InvalidCredentials()
        return self._issue_session(account.id, role)

    def _issue_session(self, principal_id: str, role: Role) -> IssuedSession:
        token = secrets.token_urlsafe(32)
        now = self._clock()
        session = Session(
            token_digest=token_digest(token),
            principal_id=principal_id,
            role=role,
            issued_at=now,
            expires_at=now + self._session_ttl,
        )
        with self._store.transaction() as txn:
            txn.put("sessions", session)
        return IssuedSession(token=token, principal_id=principal_id, role=role, expires_at=session.expires_at)

    def authenticate(self, token: str) -> Principal:
        """Resolve a live session to a principal; 401-family errors otherwise."""
        digest = token_digest(token)
        session = self._store.get("sessions", digest)
        if session is None or not hmac.compare_digest(session.token_digest, digest):
            raise UnknownToken()
        if self._clock() >= session.expires_at:
            raise ExpiredToken()
        return Principal(id=session.principal_id, role=session.role)

    def logout(self, token: str) -> None:
        """Invalidate the session; idempotent, also ok for never-issued tokens."""
        with self._store.transaction() as txn:
            txn.delete("sessions", token_digest(token))

    def ensure_admin(self, username: str, password: str) -> bool:
        """Create the bootstrap admin account iff no admin exists yet."""
        with self._store.transaction() as txn:
            if txn.values("admins"):
                return False
            txn.put("admins", new_admin_account(username, self.hash_password(password)))
        return True
