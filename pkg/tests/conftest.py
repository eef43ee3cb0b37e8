import socket
import threading

import pytest

from evsepot.config import HoneypotConfig
from evsepot.logbook import InteractionLog
from evsepot.simulation import Station


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture
def test_config(tmp_path):
    """Config suitable for fast local tests: loopback, ephemeral ports,
    no artificial delays."""
    cfg = HoneypotConfig()
    cfg.bind_address = "127.0.0.1"
    cfg.service_ports.http_login = free_port()
    cfg.service_ports.http_app = free_port()
    cfg.service_ports.ftp = free_port()
    cfg.service_ports.telnet = free_port()
    cfg.http.login_delay_s = 0.0
    cfg.telnet.reject_delay_s = 0.0
    cfg.ftp.idle_timeout_s = 5.0
    cfg.telnet.idle_timeout_s = 5.0
    cfg.logging.directory = str(tmp_path / "logs")
    cfg.simulation.seed = 42
    return cfg


@pytest.fixture
def ilog(test_config):
    log = InteractionLog(test_config.logging.directory)
    yield log
    log.close()


@pytest.fixture
def station(test_config):
    return Station(seed=test_config.simulation.seed,
                   column_count=test_config.simulation.column_count)


def serve(server):
    thread = threading.Thread(target=server.serve_forever,
                              kwargs={"poll_interval": 0.05}, daemon=True)
    thread.start()
    return thread
