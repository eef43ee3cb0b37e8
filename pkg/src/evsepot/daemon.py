"""Daemon supervisor: binds all decoy services, drives the simulation tick,
and coordinates an all-or-nothing startup and graceful shutdown."""

from __future__ import annotations

import logging
import signal
import threading
import time

from . import ftpd, httpd, telnetd
from .config import HoneypotConfig
from .logbook import InteractionLog
from .simulation import SessionProfile, Station

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BIND = 2


class BindError(Exception):
    pass


def build_station(cfg: HoneypotConfig) -> Station:
    profile = SessionProfile()
    for key, value in cfg.simulation.profile.items():
        if not hasattr(profile, key):
            raise ValueError(f"unknown profile key: {key}")
        current = getattr(profile, key)
        setattr(profile, key, tuple(value) if isinstance(current, tuple) else value)
    return Station(seed=cfg.simulation.seed,
                   column_count=cfg.simulation.column_count,
                   profile=profile)


class Daemon:
    """Owns the service lifetimes.  start() binds everything or nothing."""

    def __init__(self, cfg: HoneypotConfig):
        self.cfg = cfg
        self.ilog: InteractionLog = None
        self.station: Station = None
        self._servers = []
        self._threads = []
        self._stop = threading.Event()

    def start(self) -> None:
        cfg = self.cfg
        self.ilog = InteractionLog(cfg.logging.directory,
                                   rotate_daily=cfg.logging.rotate_daily,
                                   buffer_limit=cfg.logging.buffer_limit)
        self.station = build_station(cfg)
        factories = [
            ("http-login", lambda: httpd.make_login_server(cfg, self.station, self.ilog)),
            ("http-app", lambda: httpd.make_app_server(cfg, self.station, self.ilog)),
            ("ftp", lambda: ftpd.DecoyFTPServer(cfg, self.ilog)),
            ("telnet", lambda: telnetd.DecoyTelnetServer(cfg, self.ilog)),
        ]
        try:
            for name, factory in factories:
                server = factory()
                self._servers.append(server)
        except OSError as exc:
            self._close_servers()
            self.ilog.close()
            raise BindError(f"failed to bind {name}: {exc}") from exc
        except FileNotFoundError:
            self._close_servers()
            self.ilog.close()
            raise
        for server in self._servers:
            thread = threading.Thread(target=server.serve_forever,
                                      kwargs={"poll_interval": 0.2},
                                      daemon=True)
            thread.start()
            self._threads.append(thread)
        tick = threading.Thread(target=self._tick_loop, daemon=True)
        tick.start()
        self._threads.append(tick)
        self.ilog.record("Port", 0, "-", {"event": "startup"})
        log.info("all services bound: ports %s",
                 [s.server_address[1] for s in self._servers])

    def _tick_loop(self) -> None:
        # simulation clock tracks wall-clock time 1:1 while running
        last = time.monotonic()
        while not self._stop.wait(self.cfg.simulation.tick_interval):
            now = time.monotonic()
            self.station.advance(now - last)
            last = now

    def stop(self) -> None:
        self._stop.set()
        deadline = time.monotonic() + self.cfg.shutdown_grace_s
        for server in self._servers:
            server.shutdown()
            server.server_close()
        for thread in self._threads:
            thread.join(timeout=max(0.1, deadline - time.monotonic()))
        if self.ilog is not None:
            self.ilog.record("Port", 0, "-", {"event": "shutdown"})
            self.ilog.close()
        self._servers = []
        self._threads = []

    def _close_servers(self) -> None:
        for server in self._servers:
            try:
                server.server_close()
            except OSError:
                pass
        self._servers = []


def run(cfg: HoneypotConfig) -> int:
    """Run until SIGTERM/SIGINT; returns a process exit code."""
    daemon = Daemon(cfg)
    try:
        daemon.start()
    except BindError as exc:
        log.error("%s", exc)
        return EXIT_BIND
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    stop_requested = threading.Event()

    def _handler(signum, frame):
        stop_requested.set()

    signal.signal(signal.SIGTERM, _handler)
    signal.signal(signal.SIGINT, _handler)
    try:
        while not stop_requested.wait(0.5):
            pass
    finally:
        daemon.stop()
    return EXIT_OK
