import socket

import pytest

from evsepot.ftpd import DecoyFTPServer
from evsepot.logbook import read_log

from conftest import serve


@pytest.fixture
def ftp_server(test_config, ilog):
    server = DecoyFTPServer(test_config, ilog)
    serve(server)
    yield server
    server.shutdown()
    server.server_close()


class FtpClient:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        self.fh = self.sock.makefile("rb")

    def reply(self):
        return self.fh.readline().decode().rstrip("\r\n")

    def send(self, line):
        self.sock.sendall((line + "\r\n").encode())

    def cmd(self, line):
        self.send(line)
        return self.reply()

    def close(self):
        self.sock.close()


def test_banner_then_login_always_fails(ftp_server, test_config, ilog):
    client = FtpClient(test_config.service_ports.ftp)
    banner = client.reply()
    assert banner.startswith("220 ")
    assert test_config.identity.ftp_banner in banner
    assert client.cmd("USER anonymous").startswith("331 ")
    assert client.cmd("PASS guest").startswith("530 ")
    assert client.cmd("QUIT").startswith("221 ")
    client.close()
    ilog.close()
    recs = read_log(test_config.logging.directory, category="Ftp")
    assert [(r.payload["command"], r.payload["reply_code"]) for r in recs] \
        == [("USER", 331), ("PASS", 530), ("QUIT", 221)]


def test_known_verb_before_login_530(ftp_server, test_config):
    client = FtpClient(test_config.service_ports.ftp)
    client.reply()
    assert client.cmd("LIST").startswith("530 ")
    assert client.cmd("RETR firmware.bin").startswith("530 ")
    client.close()


def test_unknown_verb_502(ftp_server, test_config):
    client = FtpClient(test_config.service_ports.ftp)
    client.reply()
    assert client.cmd("FROB something").startswith("502 ")
    client.close()


def test_no_success_reply_for_any_credentials(ftp_server, test_config):
    client = FtpClient(test_config.service_ports.ftp)
    client.reply()
    for i in range(30):
        client.cmd(f"USER user{i}")
        reply = client.cmd(f"PASS hunter{i}")
        assert reply.startswith("530 ")
        assert not reply.startswith("230")
    client.close()


def test_command_cap_disconnects(test_config, ilog):
    test_config.ftp.max_commands = 10
    server = DecoyFTPServer(test_config, ilog)
    serve(server)
    try:
        client = FtpClient(test_config.service_ports.ftp)
        client.reply()
        replies = [client.cmd("NOOP") for _ in range(10)]
        assert all(r.startswith("530 ") for r in replies)
        # budget exhausted: server says goodbye and closes
        assert client.reply().startswith("221 ")
        assert client.fh.readline() == b""
        client.close()
    finally:
        server.shutdown()
        server.server_close()


def test_exchange_count_matches_command_count(ftp_server, test_config, ilog):
    client = FtpClient(test_config.service_ports.ftp)
    client.reply()
    for i in range(25):
        client.cmd(f"USER u{i}")
        client.cmd(f"PASS p{i}")
    client.cmd("QUIT")
    client.close()
    ilog.close()
    recs = read_log(test_config.logging.directory, category="Ftp")
    assert len(recs) == 51
    port_recs = read_log(test_config.logging.directory, category="Port")
    assert len(port_recs) == 1


def test_zero_byte_connection_still_logged(ftp_server, test_config, ilog):
    sock = socket.create_connection(
        ("127.0.0.1", test_config.service_ports.ftp), timeout=5)
    sock.close()
    import time
    time.sleep(0.2)
    ilog.close()
    recs = read_log(test_config.logging.directory, category="Port")
    assert len(recs) == 1
    assert recs[0].payload["proto"] == "ftp"
