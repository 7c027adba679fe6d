"""Transactional entity storage: in-memory for tests, file-backed for deployment.

Both backends share one transaction engine. A transaction takes the store-wide
lock at begin, works on a scratch copy of every entity set, and at commit
re-validates the uniqueness constraints before swapping the scratch in
(first-committer-wins). The file backend additionally persists the full state
as an atomic snapshot (write temp, fsync, rename) on every commit, so a killed
process reopens to its last committed state.
"""
from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Callable, Iterator

from .domain import (
    AdminAccount,
    Appointment,
    AppointmentState,
    Doctor,
    HealthSchedule,
    Hospital,
    Notification,
    Patient,
    Session,
)

FILE_FORMAT_VERSION = 1

# entity set -> (codec class, key attribute)
_SETS: dict[str, tuple[type, str]] = {
    "patients": (Patient, "id"),
    "admins": (AdminAccount, "id"),
    "hospitals": (Hospital, "id"),
    "doctors": (Doctor, "id"),
    "appointments": (Appointment, "id"),
    "notifications": (Notification, "id"),
    "sessions": (Session, "token_digest"),
    "health_schedules": (HealthSchedule, "group"),
}

ENTITY_SETS = tuple(_SETS)

State = dict[str, dict[str, object]]


class ConstraintViolation(Exception):
    """A uniqueness constraint failed at commit; the store is unchanged."""

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


class StorageUnavailable(Exception):
    """The backing medium rejected a write; the in-memory state is unchanged."""


class StoreCorrupt(Exception):
    """The store file exists but cannot be decoded."""


def _key_of(set_name: str, entity: object) -> str:
    return getattr(entity, _SETS[set_name][1])


def check_constraints(state: State) -> None:
    """Raise ConstraintViolation if any uniqueness rule is broken in state."""
    seen_usernames: set[str] = set()
    seen_emails: set[str] = set()
    for patient in state["patients"].values():
        if patient.username in seen_usernames:
            raise ConstraintViolation("patients.username", f"duplicate username {patient.username!r}")
        if patient.email in seen_emails:
            raise ConstraintViolation("patients.email", f"duplicate email {patient.email!r}")
        seen_usernames.add(patient.username)
        seen_emails.add(patient.email)

    seen_admins: set[str] = set()
    for admin in state["admins"].values():
        if admin.username in seen_admins:
            raise ConstraintViolation("admins.username", f"duplicate admin username {admin.username!r}")
        seen_admins.add(admin.username)

    reserved: set[tuple[str, str, str]] = set()
    for appointment in state["appointments"].values():
        if appointment.state is not AppointmentState.RESERVED:
            continue
        key = appointment.slot.slot_key()
        if key in reserved:
            raise ConstraintViolation(
                "appointments.reserved_slot",
                f"slot {key[2]} on {key[1]} for doctor {key[0]} is already reserved",
            )
        reserved.add(key)


class Transaction:
    """All-or-nothing view over every entity set; serialized store-wide.

    Obtain via Store.transaction() and use as a context manager: the block's
    normal exit commits, an exception rolls back. Nesting transactions on the
    same store from one thread deadlocks by design (single writer).
    """

    def __init__(self, store: "Store"):
        self._store = store
        self._scratch: State = {name: dict(entities) for name, entities in store._state.items()}
        self._finished = False

    def get(self, set_name: str, key: str):
        return self._scratch[set_name].get(key)

    def put(self, set_name: str, entity) -> None:
        self._scratch[set_name][_key_of(set_name, entity)] = entity

    def delete(self, set_name: str, key: str) -> None:
        self._scratch[set_name].pop(key, None)

    def values(self, set_name: str) -> list:
        return list(self._scratch[set_name].values())

    def clear(self, set_name: str) -> None:
        self._scratch[set_name] = {}

    def commit(self) -> None:
        if self._finished:
            raise RuntimeError("transaction already finished")
        try:
            self._store._apply(self._scratch)
        finally:
            self._finished = True
            self._store._lock.release()

    def rollback(self) -> None:
        if self._finished:
            return
        self._finished = True
        self._store._lock.release()

    def __enter__(self) -> "Transaction":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.commit()
        else:
            self.rollback()


class Store:
    """Base engine: serialized transactions over in-memory entity sets."""

    def __init__(self):
        self._lock = threading.Lock()
        self._state: State = {name: {} for name in ENTITY_SETS}

    def begin(self) -> Transaction:
        """Acquire the store lock and open a transaction (see Transaction)."""
        self._lock.acquire()
        return Transaction(self)

    # alias that reads better in `with store.transaction() as txn:` blocks
    transaction = begin

    def view(self) -> State:
        """A consistent read-only snapshot (shallow copies; entities are immutable)."""
        with self._lock:
            return {name: dict(entities) for name, entities in self._state.items()}

    def get(self, set_name: str, key: str):
        with self._lock:
            return self._state[set_name].get(key)

    def values(self, set_name: str) -> list:
        with self._lock:
            return list(self._state[set_name].values())

    def find(self, set_name: str, predicate: Callable[[object], bool]) -> Iterator:
        yield from (e for e in self.values(set_name) if predicate(e))

    def _apply(self, new_state: State) -> None:
        # caller holds the lock
        check_constraints(new_state)
        self._persist(new_state)
        self._state = new_state

    def _persist(self, state: State) -> None:
        pass


class MemoryStore(Store):
    """Non-durable backend for tests and ephemeral runs."""


class FileStore(Store):
    """Durable backend: one JSON snapshot file, replaced atomically per commit."""

    def __init__(self, path: str | Path):
        super().__init__()
        self._path = Path(path)
        self._path.parent.mkdir(parents=True, exist_ok=True)
        if self._path.exists():
            self._state = self._load()

    @property
    def path(self) -> Path:
        return self._path

    def _load(self) -> State:
        try:
            payload = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise StoreCorrupt(f"cannot read store file {self._path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("version") != FILE_FORMAT_VERSION:
            raise StoreCorrupt(f"store file {self._path} has unsupported format")
        entities = payload.get("entities", {})
        state: State = {name: {} for name in ENTITY_SETS}
        try:
            for name, (codec, _) in _SETS.items():
                for rec in entities.get(name, []):
                    entity = codec.from_record(rec)
                    state[name][_key_of(name, entity)] = entity
        except Exception as exc:
            raise StoreCorrupt(f"store file {self._path} has a malformed record: {exc}") from exc
        return state

    def _persist(self, state: State) -> None:
        payload = {
            "version": FILE_FORMAT_VERSION,
            "entities": {
                name: [entity.to_record() for entity in entities.values()]
                for name, entities in state.items()
            },
        }
        tmp = self._path.with_name(self._path.name + ".tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, separators=(",", ":"))
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp, self._path)
        except OSError as exc:
            raise StorageUnavailable(f"cannot write store file {self._path}: {exc}") from exc
