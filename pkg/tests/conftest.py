from __future__ import annotations

from types import SimpleNamespace

import pytest

from medbook.auth import AuthService
from medbook.booking import BookingService
from medbook.catalog import AboutContent, CatalogService
from medbook.domain import Principal, Role
from medbook.storage import FileStore, MemoryStore

from support import FakeClock

# keep password hashing cheap in tests; production default stays high
TEST_HASH_ITERATIONS = 500

ADMIN_USERNAME = "root"
ADMIN_PASSWORD = "super-secret-admin"


@pytest.fixture(params=["memory", "file"])
def store_factory(request, tmp_path):
    """Builds fresh stores of one backend; the whole suite runs against both."""
    made = []

    def make():
        if request.param == "memory":
            store = MemoryStore()
        else:
            store = FileStore(tmp_path / f"store-{len(made)}" / "store.json")
        made.append(store)
        return store

    make.kind = request.param
    return make


@pytest.fixture
def store(store_factory):
    return store_factory()


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def services(store, clock):
    auth = AuthService(store, clock=clock, hash_iterations=TEST_HASH_ITERATIONS)
    auth.ensure_admin(ADMIN_USERNAME, ADMIN_PASSWORD)
    admin_account = store.values("admins")[0]
    return SimpleNamespace(
        store=store,
        clock=clock,
        auth=auth,
        catalog=CatalogService(store, about=AboutContent("Book doctors online.", ("Team",))),
        booking=BookingService(store, clock=clock),
        admin=Principal(admin_account.id, Role.ADMIN),
    )
