"""Honeypot configuration: YAML file + defaults + validation.

Every knob has a default so a minimal config (even an empty file) runs; the
documented grammar lives in README.md and the shipped example config.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

_PACKAGE_CONTENT = Path(__file__).parent / "content"


class ConfigError(Exception):
    pass


class MissingConfigFile(ConfigError):
    pass


class DuplicatePortError(ConfigError):
    pass


class InvalidConfigValue(ConfigError):
    pass


@dataclass
class ServicePorts:
    http_login: int = 80
    http_app: int = 5000
    ftp: int = 21
    telnet: int = 23


@dataclass
class Identity:
    http_server_string: str = "mini_httpd/1.30 26Oct2018"
    ftp_banner: str = "EVSE-CTRL FTP server (Version 6.4) ready."
    telnet_banner: str = "evse-ctrl login service"
    device_info_content_path: str = str(_PACKAGE_CONTENT / "device_info.html")


@dataclass
class SimulationConfig:
    seed: int = 1
    column_count: int = 4
    tick_interval: float = 1.0
    # overrides for the session distribution profile; keys mirror
    # SessionProfile field names
    profile: dict = field(default_factory=dict)


@dataclass
class LoggingConfig:
    directory: str = "./logs"
    rotate_daily: bool = True
    buffer_limit: int = 1000


@dataclass
class EnrichmentConfig:
    endpoint: str = "https://api.greynoise.io/v3/community/{ip}"
    rate_limit_per_s: float = 2.0
    cache_path: str = "./enrichment-cache.json"
    ttl_days: float = 7.0


@dataclass
class HttpConfig:
    login_delay_s: float = 0.8
    body_excerpt_bytes: int = 2048
    content_dir: str = str(_PACKAGE_CONTENT)


@dataclass
class FtpConfig:
    idle_timeout_s: float = 120.0
    max_commands: int = 100


@dataclass
class TelnetConfig:
    max_attempts: int = 3
    reject_delay_s: float = 1.0
    idle_timeout_s: float = 120.0


@dataclass
class HoneypotConfig:
    bind_address: str = "0.0.0.0"
    service_ports: ServicePorts = field(default_factory=ServicePorts)
    identity: Identity = field(default_factory=Identity)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    enrichment: EnrichmentConfig = field(default_factory=EnrichmentConfig)
    http: HttpConfig = field(default_factory=HttpConfig)
    ftp: FtpConfig = field(default_factory=FtpConfig)
    telnet: TelnetConfig = field(default_factory=TelnetConfig)
    shutdown_grace_s: float = 10.0


def _apply(section_obj, data: dict, section_name: str):
    for key, value in data.items():
        if not hasattr(section_obj, key):
            raise InvalidConfigValue(f"unknown key: {section_name}.{key}")
        setattr(section_obj, key, value)


def load_config(path: Optional[str] = None) -> HoneypotConfig:
    """Load and validate a config file; None means all defaults."""
    cfg = HoneypotConfig()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise MissingConfigFile(f"config file not found: {path}")
        raw = yaml.safe_load(p.read_text()) or {}
        if not isinstance(raw, dict):
            raise InvalidConfigValue("config root must be a mapping")
        sections = {
            "service_ports": cfg.service_ports,
            "identity": cfg.identity,
            "simulation": cfg.simulation,
            "logging": cfg.logging,
            "enrichment": cfg.enrichment,
            "http": cfg.http,
            "ftp": cfg.ftp,
            "telnet": cfg.telnet,
        }
        for key, value in raw.items():
            if key == "bind_address":
                cfg.bind_address = str(value)
            elif key == "shutdown_grace_s":
                cfg.shutdown_grace_s = float(value)
            elif key in sections:
                if not isinstance(value, dict):
                    raise InvalidConfigValue(f"{key} must be a mapping")
                _apply(sections[key], value, key)
            else:
                raise InvalidConfigValue(f"unknown key: {key}")
    # environment overrides
    if os.environ.get("EVSEPOT_BIND_ADDRESS"):
        cfg.bind_address = os.environ["EVSEPOT_BIND_ADDRESS"]
    validate(cfg)
    return cfg


def validate(cfg: HoneypotConfig) -> None:
    ports = {
        "service_ports.http_login": cfg.service_ports.http_login,
        "service_ports.http_app": cfg.service_ports.http_app,
        "service_ports.ftp": cfg.service_ports.ftp,
        "service_ports.telnet": cfg.service_ports.telnet,
    }
    seen = {}
    for key, port in ports.items():
        if not isinstance(port, int) or not (1 <= port <= 65535):
            raise InvalidConfigValue(f"{key}: port out of range: {port}")
        if port in seen:
            raise DuplicatePortError(
                f"duplicate port {port}: {seen[port]} and {key}")
        seen[port] = key
    if cfg.simulation.tick_interval <= 0:
        raise InvalidConfigValue(
            f"simulation.tick_interval must be > 0, "
            f"got {cfg.simulation.tick_interval}")
    if cfg.simulation.column_count < 1:
        raise InvalidConfigValue(
            f"simulation.column_count must be >= 1, "
            f"got {cfg.simulation.column_count}")
    if cfg.http.body_excerpt_bytes < 0:
        raise InvalidConfigValue("http.body_excerpt_bytes must be >= 0")
    if cfg.telnet.max_attempts < 1:
        raise InvalidConfigValue("telnet.max_attempts must be >= 1")
    if not Path(cfg.identity.device_info_content_path).is_file():
        raise InvalidConfigValue(
            "identity.device_info_content_path: file not found: "
            f"{cfg.identity.device_info_content_path}")
