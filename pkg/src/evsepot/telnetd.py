"""Decoy Telnet login prompt.

Presents an embedded-device banner, collects username/password pairs, and
answers "Login incorrect" every time.  Telnet option negotiation (IAC
sequences) is consumed and discarded so real clients still line up on the
prompts.
"""

from __future__ import annotations

import socket
import socketserver
import time

from .config import HoneypotConfig
from .logbook import InteractionLog

IAC = 255
SB = 250
SE = 240
WILL, WONT, DO, DONT = 251, 252, 253, 254


class DecoyTelnetServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, cfg: HoneypotConfig, ilog: InteractionLog):
        self.cfg = cfg
        self.ilog = ilog
        super().__init__((cfg.bind_address, cfg.service_ports.telnet),
                         TelnetHandler)


class TelnetHandler(socketserver.BaseRequestHandler):
    server: DecoyTelnetServer

    def handle(self):
        cfg = self.server.cfg
        port = self.server.server_address[1]
        src = self.client_address[0]
        self.server.ilog.record("Port", port, src,
                                {"event": "connect", "proto": "telnet"})
        sock = self.request
        sock.settimeout(cfg.telnet.idle_timeout_s)
        self._pending = b""
        self._iac_state = 0
        try:
            self._send(sock, cfg.identity.telnet_banner + "\r\n")
            for attempt in range(1, cfg.telnet.max_attempts + 1):
                self._send(sock, "login: ")
                username = self._read_line(sock)
                if username is None:
                    return
                self._send(sock, "Password: ")
                password = self._read_line(sock)
                if password is None:
                    return
                time.sleep(cfg.telnet.reject_delay_s)
                self._send(sock, "\r\nLogin incorrect\r\n\r\n")
                self.server.ilog.record("Telnet", port, src, {
                    "username": username,
                    "password": password,
                    "attempt_index": attempt,
                })
        except (socket.timeout, OSError):
            return
        finally:
            try:
                sock.close()
            except OSError:
                pass

    def _send(self, sock, text: str):
        sock.sendall(text.encode("latin-1"))

    def _read_line(self, sock):
        """Read one line, stripping IAC negotiation and control bytes."""
        line = bytearray()
        while True:
            while self._pending:
                byte = self._pending[0]
                self._pending = self._pending[1:]
                skip = self._filter_iac(byte)
                if skip:
                    continue
                if byte in (10,):  # LF ends the line
                    return line.decode("latin-1", errors="replace")
                if byte == 13 or byte < 32 or byte == 127:
                    continue
                line.append(byte)
            try:
                chunk = sock.recv(512)
            except (socket.timeout, OSError):
                return None
            if not chunk:
                return None
            self._pending += chunk

    def _filter_iac(self, byte: int) -> bool:
        """Tiny IAC state machine; returns True if the byte is negotiation."""
        if self._iac_state == 0:
            if byte == IAC:
                self._iac_state = 1
                return True
            return False
        if self._iac_state == 1:  # just saw IAC
            if byte == IAC:  # escaped 0xFF: treat as data
                self._iac_state = 0
                return False
            if byte in (WILL, WONT, DO, DONT):
                self._iac_state = 2
            elif byte == SB:
                self._iac_state = 3
            else:
                self._iac_state = 0
            return True
        if self._iac_state == 2:  # option byte after WILL/WONT/DO/DONT
            self._iac_state = 0
            return True
        if self._iac_state == 3:  # inside subnegotiation, wait for IAC SE
            if byte == IAC:
                self._iac_state = 4
            return True
        if self._iac_state == 4:
            self._iac_state = 0 if byte == SE else 3
            return True
        return False
