"""Operator entry point: `medbook serve` and `medbook seed`.

Configuration precedence is flags > MEDBOOK_* environment > --config file >
defaults. Exit codes: 1 startup/config failure, 2 invalid fixture,
3 already-seeded without --force.
"""
from __future__ import annotations

import logging
import os
import socket
import sys
import time
from pathlib import Path

import click
import uvicorn

from .api import create_app
from .auth import hash_password
from .config import Config, load_config
from .errors import ConfigInvalid
from .seed import AlreadySeeded, FixtureInvalid, load_fixture, seed_store
from .storage import FileStore, MemoryStore, StoreCorrupt

logger = logging.getLogger("medbook")


def _configure_logging() -> None:
    formatter = logging.Formatter("%(asctime)s.%(msecs)03dZ %(levelname)s %(message)s", "%Y-%m-%dT%H:%M:%S")
    formatter.converter = time.gmtime
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(formatter)
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(logging.INFO)


def _load_config(flags: dict, config_path: str | None) -> Config:
    try:
        return load_config(flags=flags, env=os.environ, file_path=config_path)
    except ConfigInvalid as exc:
        raise click.ClickException(f"invalid configuration: {exc.message}") from exc


def _open_store(config: Config):
    if not config.db:
        return MemoryStore()
    db_dir = Path(config.db)
    if not db_dir.exists():
        db_dir.mkdir(parents=True)
        logger.info("event=store_dir_created path=%s", db_dir)
    try:
        return FileStore(db_dir / "store.json")
    except StoreCorrupt as exc:
        raise click.ClickException(str(exc)) from exc


def _resolve_port(host: str, port: int) -> int:
    """Fail fast when the port is occupied; resolve 0 to a free ephemeral port."""
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
            probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            probe.bind((host, port))
            return probe.getsockname()[1]
    except OSError as exc:
        raise click.ClickException(f"port {port} is already in use ({exc})") from exc


@click.group()
def main() -> None:
    """MedBook appointment-booking server."""


@main.command()
@click.option("--host", default=None, help="Bind address (default 127.0.0.1).")
@click.option("--port", type=int, default=None, help="TCP port (default 8080, 0 picks a free one).")
@click.option("--db", "db", type=click.Path(file_okay=False), default=None, help="Store directory; omit for in-memory.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON config file.")
def serve(host: str | None, port: int | None, db: str | None, config_path: str | None) -> None:
    """Run the HTTP service until interrupted."""
    _configure_logging()
    config = _load_config({"host": host, "port": port, "db": db}, config_path)
    resolved_port = _resolve_port(config.host, config.port)
    store = _open_store(config)
    app = create_app(config, store=store)
    logger.info(
        "event=server_start address=http://%s:%d db=%s",
        config.host,
        resolved_port,
        config.db or "<memory>",
    )
    uvicorn.run(app, host=config.host, port=resolved_port, log_level="warning", access_log=False)


@main.command()
@click.argument("fixture", type=click.Path(dir_okay=False))
@click.option("--force", is_flag=True, help="Wipe the store and reseed (destructive).")
@click.option("--db", "db", type=click.Path(file_okay=False), default=None, help="Store directory; omit for in-memory (dry run).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON config file.")
def seed(fixture: str, force: bool, db: str | None, config_path: str | None) -> None:
    """Load FIXTURE (a JSON seed document) into the store and print counts."""
    _configure_logging()
    config = _load_config({"db": db}, config_path)
    store = _open_store(config)
    try:
        parsed = load_fixture(fixture)
    except FixtureInvalid as exc:
        click.echo(f"invalid fixture: {exc}", err=True)
        raise SystemExit(2) from exc
    try:
        counts = seed_store(
            store,
            parsed,
            hash_password=lambda pw: hash_password(pw, iterations=config.hash_iterations),
            force=force,
        )
    except AlreadySeeded as exc:
        click.echo("store is already seeded (use --force to replace it)", err=True)
        raise SystemExit(3) from exc
    for name in ("hospitals", "doctors", "schedules", "admins"):
        click.echo(f"{name}: {counts[name]}")


if __name__ == "__main__":
    main()
