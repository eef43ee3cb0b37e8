"""Decoy web application.

Two listeners: the "app" server (device info, user dashboard, admin
dashboard, JSON API) and the "login" server (login and registration forms
that reject every credential pair).  Every request yields exactly one log
record; every connection additionally yields a Port record.

The /api/status wire format (version 1):
    {"version": 1, "clock": <s>, "aggregate_demand_kw": <kW>,
     "columns": [null | {"session_id", "status", "completion_pct",
                         "delivered_kwh", "cost", "remaining_s"}, ...]}
"""

from __future__ import annotations

import json
import time
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import simulation
from .config import HoneypotConfig
from .logbook import InteractionLog
from .simulation import (ActionKind, ChargeAction, IllegalTransition,
                         Station, UnknownSession)

STATUS_WIRE_VERSION = 1
MAX_BODY_DRAIN = 1024 * 1024
MAX_TIMING_MS = 24 * 3600 * 1000

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".css": "text/css",
    ".js": "application/javascript",
    ".json": "application/json",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


def status_payload(view: simulation.DashboardView) -> dict:
    columns = []
    for col in view.columns:
        if col is None:
            columns.append(None)
        else:
            columns.append({
                "session_id": col.session_id,
                "status": col.status,
                "completion_pct": round(col.completion_pct, 2),
                "delivered_kwh": round(col.delivered_kwh, 3),
                "cost": col.cost,
                "remaining_s": round(col.remaining_s),
            })
    return {
        "version": STATUS_WIRE_VERSION,
        "clock": view.clock,
        "aggregate_demand_kw": round(view.aggregate_demand_kw, 2),
        "columns": columns,
    }


class DecoyHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, addr, handler, cfg: HoneypotConfig, station: Station,
                 ilog: InteractionLog):
        self.cfg = cfg
        self.station = station
        self.ilog = ilog
        self.content_dir = Path(cfg.http.content_dir)
        device_path = Path(cfg.identity.device_info_content_path)
        if not device_path.is_file():
            raise FileNotFoundError(
                f"device info content file not found: {device_path}")
        self.device_info_bytes = device_path.read_bytes()
        super().__init__(addr, handler)


class _DecoyHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    timeout = 30

    server: DecoyHTTPServer

    def version_string(self):
        return self.server.cfg.identity.http_server_string

    def log_message(self, format, *args):  # keep stderr quiet
        pass

    def setup(self):
        super().setup()
        self.server.ilog.record(
            "Port", self.server.server_address[1],
            self.client_address[0], {"event": "connect", "proto": "http"})

    @property
    def src_ip(self) -> str:
        return self.client_address[0]

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    # -- request plumbing ---------------------------------------------------

    def handle(self):
        # hostile clients reset connections all the time; not our problem
        try:
            super().handle()
        except (ConnectionResetError, BrokenPipeError, TimeoutError):
            self.close_connection = True

    def handle_one_request(self):
        self._recorded = False
        super().handle_one_request()

    def send_error(self, code, message=None, explain=None):
        # parse failures short-circuit before do_*; still log them
        if not getattr(self, "_recorded", True):
            self._log_http(code)
        super().send_error(code, message, explain)

    def _read_body(self) -> bytes:
        try:
            length = int(self.headers.get("Content-Length", 0) or 0)
        except ValueError:
            length = 0
        cap = self.server.cfg.http.body_excerpt_bytes
        excerpt = self.rfile.read(min(length, cap)) if length else b""
        rest = length - len(excerpt)
        if rest > 0:
            if rest <= MAX_BODY_DRAIN:
                self.rfile.read(rest)
            else:
                self.close_connection = True
        return excerpt

    def _split_target(self):
        parsed = urllib.parse.urlsplit(getattr(self, "path", "") or "")
        return parsed.path, parsed.query

    def _log_http(self, status: int, body: bytes = b""):
        path, query = self._split_target()
        command = getattr(self, "command", None)
        self.server.ilog.record("HttpRequest", self.port, self.src_ip, {
            "method": command.upper() if command else "-",
            "path": path,
            "query": query,
            "body_excerpt": body.decode("utf-8", errors="replace"),
            "status": status,
        })
        self._recorded = True

    def _respond(self, status: int, body: bytes,
                 content_type: str = "text/html; charset=utf-8",
                 extra_headers: dict | None = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for key, value in (extra_headers or {}).items():
            self.send_header(key, value)
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(body)

    def _respond_json(self, status: int, obj: dict):
        self._respond(status, json.dumps(obj).encode("utf-8"),
                      "application/json")

    def _page(self, name: str) -> bytes:
        return (self.server.content_dir / name).read_bytes()

    def _not_found(self, body: bytes = b""):
        self._log_http(404, body)
        self._respond(404, self._page("not_found.html"))

    def _serve_static(self, path: str):
        rel = path[len("/static/"):]
        base = (self.server.content_dir / "static").resolve()
        target = (base / rel).resolve()
        if base not in target.parents and target != base or not target.is_file():
            self._not_found()
            return
        self._log_http(200)
        self._respond(200, target.read_bytes(),
                      _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))

    def do_HEAD(self):
        self.do_GET()


class AppHandler(_DecoyHandler):
    """Dashboard server: device info, dashboards, JSON API."""

    def do_GET(self):
        path, _ = self._split_target()
        if path == "/":
            self._log_http(200)
            self._respond(200, self.server.device_info_bytes)
        elif path == "/dashboard":
            self._log_http(200)
            self._respond(200, self._render_dashboard())
        elif path == "/admin":
            self._log_http(200)
            self._respond(200, self._render_admin())
        elif path == "/api/status":
            self._log_http(200)
            view = self.server.station.snapshot()
            self._respond_json(200, status_payload(view))
        elif path.startswith("/static/"):
            self._serve_static(path)
        else:
            self._not_found()

    def do_POST(self):
        path, _ = self._split_target()
        body = self._read_body()
        if path == "/api/action":
            self._handle_action(body)
        elif path == "/api/timing":
            self._handle_timing(body)
        else:
            self._not_found(body)

    # -- API ------------------------------------------------------------------

    def _parse_fields(self, body: bytes) -> dict:
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        try:
            if ctype == "application/json":
                obj = json.loads(body.decode("utf-8", errors="replace"))
                return obj if isinstance(obj, dict) else {}
            fields = urllib.parse.parse_qs(
                body.decode("utf-8", errors="replace"))
            return {k: v[0] for k, v in fields.items()}
        except ValueError:
            return {}

    def _handle_action(self, body: bytes):
        fields = self._parse_fields(body)
        kind_raw = str(fields.get("kind", ""))
        session_id = str(fields.get("session_id", ""))
        try:
            kind = ActionKind(kind_raw)
        except ValueError:
            self._log_http(400, body)
            self._respond_json(400, {"ok": False, "error": "unknown-kind"})
            return
        action = ChargeAction(kind=kind, session_id=session_id,
                              source_ip=self.src_ip, received_at=time.time())
        try:
            new_status = self.server.station.apply_action(action)
            result, status_code = new_status.value, 200
        except UnknownSession:
            result, status_code = "unknown-session", 404
        except IllegalTransition:
            result, status_code = "illegal-transition", 409
        self.server.ilog.record("Actions", self.port, self.src_ip, {
            "kind": kind.value,
            "session_id": session_id,
            "result": result,
        })
        self._recorded = True
        if status_code == 200:
            self._respond_json(200, {"ok": True, "status": result})
        else:
            self._respond_json(status_code, {"ok": False, "error": result})

    def _handle_timing(self, body: bytes):
        fields = self._parse_fields(body)
        page = str(fields.get("page", ""))
        try:
            ms = float(fields.get("ms"))
        except (TypeError, ValueError):
            self._log_http(400, body)
            self._respond_json(400, {"ok": False, "error": "bad-duration"})
            return
        ms = min(max(ms, 0.0), float(MAX_TIMING_MS))
        self.server.ilog.record("Timing", self.port, self.src_ip, {
            "page": page,
            "duration_ms": ms,
        })
        self._recorded = True
        self._respond_json(200, {"ok": True})

    # -- server-side rendering (pages still work with scripts disabled) -------

    def _render(self, name: str, mapping: dict) -> bytes:
        text = self._page(name).decode("utf-8")
        for key, value in mapping.items():
            text = text.replace("{{" + key + "}}", str(value))
        return text.encode("utf-8")

    def _column_rows(self, view) -> str:
        rows = []
        for i, col in enumerate(view.columns):
            if col is None:
                rows.append(
                    f"<tr><td>{i + 1}</td><td colspan=5>vacant</td></tr>")
            else:
                rows.append(
                    f"<tr data-session=\"{col.session_id}\">"
                    f"<td>{i + 1}</td><td>{col.status}</td>"
                    f"<td>{col.completion_pct:.1f}%</td>"
                    f"<td>{col.delivered_kwh:.2f} kWh</td>"
                    f"<td>{col.cost:.2f}</td>"
                    f"<td>{int(col.remaining_s // 60)} min</td></tr>")
        return "\n".join(rows)

    def _render_dashboard(self) -> bytes:
        view = self.server.station.snapshot()
        return self._render("dashboard.html", {
            "rows": self._column_rows(view),
            "demand": f"{view.aggregate_demand_kw:.2f}",
        })

    def _render_admin(self) -> bytes:
        view = self.server.station.snapshot()
        occupied = sum(1 for c in view.columns if c is not None)
        return self._render("admin.html", {
            "rows": self._column_rows(view),
            "demand": f"{view.aggregate_demand_kw:.2f}",
            "occupied": occupied,
            "total": len(view.columns),
        })


class LoginHandler(_DecoyHandler):
    """Bait login/registration server; authentication always fails."""

    def do_GET(self):
        path, _ = self._split_target()
        if path in ("/", "/login"):
            self._log_http(200)
            self._respond(200, self._page("login.html"))
        elif path == "/register":
            self._log_http(200)
            self._respond(200, self._page("register.html"))
        elif path.startswith("/static/"):
            self._serve_static(path)
        else:
            self._not_found()

    def do_POST(self):
        path, _ = self._split_target()
        body = self._read_body()
        if path not in ("/", "/login", "/register"):
            self._not_found(body)
            return
        fields = urllib.parse.parse_qs(body.decode("utf-8", errors="replace"))
        username = fields.get("username", [None])[0]
        password = fields.get("password", [None])[0]
        if username is None or password is None:
            self._log_http(400, body)
            self._respond(400, b"Bad Request")
            return
        form_kind = "Registration" if path == "/register" else "Login"
        self.server.ilog.record("Login", self.port, self.src_ip, {
            "form_kind": form_kind,
            "username": username,
            "password": password,
        })
        self._recorded = True
        # fake credential verification latency
        time.sleep(self.server.cfg.http.login_delay_s)
        self._respond(401, self._page("invalid_login.html"))


def make_app_server(cfg: HoneypotConfig, station: Station,
                    ilog: InteractionLog) -> DecoyHTTPServer:
    return DecoyHTTPServer((cfg.bind_address, cfg.service_ports.http_app),
                           AppHandler, cfg, station, ilog)


def make_login_server(cfg: HoneypotConfig, station: Station,
                      ilog: InteractionLog) -> DecoyHTTPServer:
    return DecoyHTTPServer((cfg.bind_address, cfg.service_ports.http_login),
                           LoginHandler, cfg, station, ilog)
