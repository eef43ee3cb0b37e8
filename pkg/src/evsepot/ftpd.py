"""Decoy FTP control channel: speaks just enough RFC 959 to look real,
never authenticates anyone, logs every command line."""

from __future__ import annotations

import socket
import socketserver

from .config import HoneypotConfig
from .logbook import InteractionLog

# verbs a real server would know; anything else is a syntax error (502)
KNOWN_VERBS = {
    "USER", "PASS", "QUIT", "NOOP", "SYST", "FEAT", "TYPE", "PWD", "CWD",
    "CDUP", "LIST", "NLST", "RETR", "STOR", "DELE", "MKD", "RMD", "PASV",
    "PORT", "EPSV", "EPRT", "SIZE", "MDTM", "REST", "ABOR", "STAT", "HELP",
    "ACCT", "MODE", "STRU", "RNFR", "RNTO", "APPE", "ALLO", "SITE", "AUTH",
}


class DecoyFTPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, cfg: HoneypotConfig, ilog: InteractionLog):
        self.cfg = cfg
        self.ilog = ilog
        super().__init__((cfg.bind_address, cfg.service_ports.ftp),
                         FtpHandler)


class FtpHandler(socketserver.StreamRequestHandler):
    server: DecoyFTPServer

    def handle(self):
        cfg = self.server.cfg
        port = self.server.server_address[1]
        src = self.client_address[0]
        self.server.ilog.record("Port", port, src,
                                {"event": "connect", "proto": "ftp"})
        self.connection.settimeout(cfg.ftp.idle_timeout_s)
        try:
            self._reply(220, cfg.identity.ftp_banner)
            for _ in range(cfg.ftp.max_commands):
                line = self._read_line()
                if line is None:
                    return
                verb, _, argument = line.partition(" ")
                verb = verb.upper()
                code, text = self._dispatch(verb, argument)
                self.server.ilog.record("Ftp", port, src, {
                    "command": verb,
                    "argument": argument,
                    "reply_code": code,
                })
                self._reply(code, text)
                if verb == "QUIT":
                    return
            # command budget exhausted; disconnect politely
            self._reply(221, "Goodbye.")
        except (socket.timeout, OSError):
            return

    def _dispatch(self, verb: str, argument: str):
        if verb == "USER":
            return 331, "Please specify the password."
        if verb == "PASS":
            return 530, "Login incorrect."
        if verb == "QUIT":
            return 221, "Goodbye."
        if verb in KNOWN_VERBS:
            return 530, "Please login with USER and PASS."
        return 502, "Command not implemented."

    def _reply(self, code: int, text: str):
        self.wfile.write(f"{code} {text}\r\n".encode("latin-1"))

    def _read_line(self):
        try:
            raw = self.rfile.readline(1024)
        except (socket.timeout, OSError):
            return None
        if not raw:
            return None
        return raw.decode("latin-1", errors="replace").rstrip("\r\n")
