import json
import threading

import pytest

from medbook.auth import hash_password, verify_password
from medbook.domain import Role
from medbook.errors import (
    DuplicateEmail,
    DuplicateUsername,
    ExpiredToken,
    InvalidCredentials,
    MSG_PASSWORDS_DONT_MATCH,
    UnknownToken,
    ValidationFailed,
)

from conftest import ADMIN_PASSWORD, ADMIN_USERNAME


class TestPasswordHashing:
    def test_verify_round_trip(self):
        encoded = hash_password("secret123", iterations=500)
        assert verify_password("secret123", encoded)
        assert not verify_password("secret124", encoded)

    def test_digest_never_contains_plaintext(self):
        encoded = hash_password("hunter2secret", iterations=500)
        assert "hunter2secret" not in encoded

    def test_salting_gives_distinct_digests_for_equal_passwords(self):
        a = hash_password("same-password", iterations=500)
        b = hash_password("same-password", iterations=500)
        assert a != b
        assert verify_password("same-password", a) and verify_password("same-password", b)

    def test_garbage_digest_never_verifies(self):
        assert not verify_password("x", "not-a-digest")
        assert not verify_password("x", "pbkdf2_sha256$oops$zz$zz")


class TestRegistration:
    def test_register_then_login_round_trip(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        issued = services.auth.login_patient("ali", "secret123")
        principal = services.auth.authenticate(issued.token)
        assert principal.role is Role.PATIENT

    def test_mismatched_passwords_persist_nothing(self, services):
        with pytest.raises(ValidationFailed) as excinfo:
            services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret124")
        assert excinfo.value.message == MSG_PASSWORDS_DONT_MATCH
        assert services.store.values("patients") == []

    def test_duplicate_username_leaves_store_unchanged(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        before = services.store.view()
        with pytest.raises(DuplicateUsername):
            services.auth.register_patient("ali", "other@mail.com", "secret123", "secret123")
        assert services.store.view() == before

    def test_duplicate_email_rejected(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        with pytest.raises(DuplicateEmail):
            services.auth.register_patient("omar", "ali@mail.com", "secret123", "secret123")

    def test_concurrent_same_username_registrations_yield_one_account(self, services):
        outcomes = []

        def attempt(n):
            try:
                services.auth.register_patient(
                    "shared", f"mail{n}@mail.example", "secret123", "secret123"
                )
                outcomes.append("ok")
            except DuplicateUsername:
                outcomes.append("duplicate")

        threads = [threading.Thread(target=attempt, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert outcomes.count("ok") == 1
        assert len(services.store.values("patients")) == 1

    def test_no_plaintext_password_anywhere_in_store(self, services):
        password = "hunter2secret"
        services.auth.register_patient("ali", "ali@mail.com", password, password)
        services.auth.login_patient("ali", password)
        dump = json.dumps(
            {name: [e.to_record() for e in services.store.values(name)] for name in ("patients", "sessions", "admins")}
        )
        assert password not in dump
        assert ADMIN_PASSWORD not in dump


class TestLogin:
    def test_unknown_user_and_wrong_password_messages_are_byte_identical(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        with pytest.raises(InvalidCredentials) as wrong_password:
            services.auth.login_patient("ali", "wrong-password")
        with pytest.raises(InvalidCredentials) as unknown_user:
            services.auth.login_patient("ghost", "x")
        assert wrong_password.value.message.encode() == unknown_user.value.message.encode()

    def test_single_character_perturbation_always_fails(self, services):
        password = "secret123"
        services.auth.register_patient("ali", "ali@mail.com", password, password)
        for i in range(len(password)):
            mutated = password[:i] + chr(ord(password[i]) + 1) + password[i + 1 :]
            with pytest.raises(InvalidCredentials):
                services.auth.login_patient("ali", mutated)

    def test_admin_login_uses_admin_accounts(self, services):
        issued = services.auth.login_admin(ADMIN_USERNAME, ADMIN_PASSWORD)
        assert issued.role is Role.ADMIN
        with pytest.raises(InvalidCredentials):
            services.auth.login_patient(ADMIN_USERNAME, ADMIN_PASSWORD)

    def test_admin_bootstrap_runs_once(self, services):
        assert services.auth.ensure_admin("second", "another-password") is False
        assert len(services.store.values("admins")) == 1


class TestSessions:
    def test_authenticate_requires_known_token(self, services):
        with pytest.raises(UnknownToken):
            services.auth.authenticate("never-issued-token")

    def test_expired_session_never_authenticates(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        issued = services.auth.login_patient("ali", "secret123")
        services.clock.advance(hours=25)
        with pytest.raises(ExpiredToken):
            services.auth.authenticate(issued.token)

    def test_session_valid_until_just_before_expiry(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        issued = services.auth.login_patient("ali", "secret123")
        services.clock.advance(hours=23)
        assert services.auth.authenticate(issued.token).role is Role.PATIENT

    def test_logout_invalidates_and_is_idempotent(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        issued = services.auth.login_patient("ali", "secret123")
        services.auth.logout(issued.token)
        with pytest.raises(UnknownToken):
            services.auth.authenticate(issued.token)
        services.auth.logout(issued.token)  # second call still ok

    def test_logout_of_never_issued_token_changes_nothing(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        services.auth.login_patient("ali", "secret123")
        before = services.store.view()
        services.auth.logout("never-issued-token")
        assert services.store.view() == before

    def test_tokens_are_unique_and_long(self, services):
        services.auth.register_patient("ali", "ali@mail.com", "secret123", "secret123")
        tokens = {services.auth.login_patient("ali", "secret123").token for _ in range(20)}
        assert len(tokens) == 20
        assert all(len(t) >= 32 for t in tokens)
