"""Source-IP reputation enrichment with a local file cache.

The provider is anything with a ``lookup(ip) -> dict`` method; the shipped
client speaks the GreyNoise community API.  Provider failures degrade to an
"unknown" label and never abort a pipeline.
"""

from __future__ import annotations

import ipaddress
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import requests

LABELS = ("malicious", "benign", "unknown")
DEFAULT_TTL_S = 7 * 24 * 3600.0


@dataclass
class IpEnrichment:
    ip: str
    label: str = "unknown"
    organization: Optional[str] = None
    actor: Optional[str] = None
    country: Optional[str] = None
    fetched_at: float = 0.0
    transient_failure: bool = False


def canonical_ip(ip: str) -> str:
    try:
        return str(ipaddress.ip_address(ip.strip()))
    except ValueError:
        return ip.strip()


class EnrichmentCache:
    """Single-file JSON store, write-serialized."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict = {}
        if self.path.is_file():
            self._entries = json.loads(self.path.read_text() or "{}")

    def get(self, ip: str) -> Optional[IpEnrichment]:
        entry = self._entries.get(ip)
        if entry is None:
            return None
        return IpEnrichment(ip=ip, **entry)

    def put(self, enrichment: IpEnrichment) -> None:
        with self._lock:
            self._entries[enrichment.ip] = {
                "label": enrichment.label,
                "organization": enrichment.organization,
                "actor": enrichment.actor,
                "country": enrichment.country,
                "fetched_at": enrichment.fetched_at,
            }
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(json.dumps(self._entries, indent=1, sort_keys=True))
            tmp.replace(self.path)

    def all(self) -> list:
        return [IpEnrichment(ip=ip, **entry)
                for ip, entry in self._entries.items()]


class GreyNoiseClient:
    """Thin reputation API client with a crude request-rate cap."""

    def __init__(self, endpoint: str, api_key: Optional[str] = None,
                 rate_limit_per_s: float = 2.0, timeout_s: float = 10.0):
        self.endpoint = endpoint
        self.api_key = api_key or os.environ.get("GREYNOISE_API_KEY", "")
        self.timeout_s = timeout_s
        self._min_interval = 1.0 / rate_limit_per_s if rate_limit_per_s else 0.0
        self._last_call = 0.0
        self._lock = threading.Lock()

    def lookup(self, ip: str) -> dict:
        with self._lock:
            wait = self._min_interval - (time.monotonic() - self._last_call)
            if wait > 0:
                time.sleep(wait)
            self._last_call = time.monotonic()
        headers = {"Accept": "application/json"}
        if self.api_key:
            headers["key"] = self.api_key
        resp = requests.get(self.endpoint.format(ip=ip), headers=headers,
                            timeout=self.timeout_s)
        resp.raise_for_status()
        data = resp.json()
        return {
            "label": data.get("classification") or data.get("label") or "unknown",
            "organization": data.get("organization") or data.get("name"),
            "actor": data.get("actor"),
            "country": data.get("country") or data.get("country_code"),
        }


def enrich_ip(ip: str, provider, cache: EnrichmentCache,
              ttl_s: float = DEFAULT_TTL_S,
              now: Optional[float] = None) -> IpEnrichment:
    """Cached lookup of one IP; cache-only mode when provider is None."""
    ip = canonical_ip(ip)
    now = time.time() if now is None else now
    cached = cache.get(ip)
    if cached is not None and now - cached.fetched_at < ttl_s:
        return cached
    if provider is None:
        return cached or IpEnrichment(ip=ip, label="unknown", fetched_at=now)
    try:
        data = provider.lookup(ip)
    except Exception:
        # transient provider failure must never break the pipeline
        return IpEnrichment(ip=ip, label="unknown", fetched_at=now,
                            transient_failure=True)
    label = data.get("label", "unknown")
    if label not in LABELS:
        label = "unknown"
    enrichment = IpEnrichment(
        ip=ip,
        label=label,
        organization=data.get("organization"),
        actor=data.get("actor"),
        country=data.get("country"),
        fetched_at=now,
    )
    cache.put(enrichment)
    return enrichment
