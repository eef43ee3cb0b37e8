"""Deterministic aggregation of the interaction log into a report."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..logbook import InteractionRecord


@dataclass
class AggregateReport:
    method_counts: dict = field(default_factory=dict)
    malicious_method_counts: dict = field(default_factory=dict)
    mean_page_time_ms: dict = field(default_factory=dict)
    ip_counts: dict = field(default_factory=dict)
    label_shares: dict = field(default_factory=dict)
    top_organizations: list = field(default_factory=list)
    country_counts: dict = field(default_factory=dict)
    total_http_requests: int = 0
    total_malicious: int = 0


def aggregate(records: Iterable[InteractionRecord],
              classifications: Mapping[int, object],
              enrichments: Optional[Iterable] = None,
              top_k: int = 5) -> AggregateReport:
    """Count interactions; classifications must cover every HttpRequest record.

    ``enrichments`` is an optional iterable of IpEnrichment; without it the
    label/organization/country sections stay empty.
    """
    methods = Counter()
    malicious = Counter()
    ips = Counter()
    page_totals = defaultdict(float)
    page_counts = Counter()

    total_http = 0
    total_mal = 0
    for rec in records:
        ips[rec.source_ip] += 1
        if rec.category == "HttpRequest":
            total_http += 1
            method = rec.payload.get("method", "-")
            methods[method] += 1
            cls = classifications.get(rec.record_id)
            if cls is None:
                raise ValueError(
                    f"missing classification for record {rec.record_id}")
            if cls.verdict == "Malicious":
                malicious[method] += 1
                total_mal += 1
        elif rec.category == "Timing":
            page = rec.payload.get("page", "")
            page_totals[page] += float(rec.payload.get("duration_ms", 0))
            page_counts[page] += 1

    mean_times = {page: page_totals[page] / page_counts[page]
                  for page in page_counts}

    label_shares: dict = {}
    country_counts: dict = {}
    top_orgs: list = []
    if enrichments is not None:
        unique = {e.ip: e for e in enrichments}  # one label per unique IP
        if unique:
            labels = Counter(e.label for e in unique.values())
            total = sum(labels.values())
            label_shares = {label: round(100.0 * n / total, 1)
                            for label, n in sorted(labels.items())}
            country_counts = dict(Counter(
                e.country for e in unique.values()
                if e.label == "malicious" and e.country))
        top_orgs = top_organizations(unique.values(), top_k)

    return AggregateReport(
        method_counts=dict(methods),
        malicious_method_counts=dict(malicious),
        mean_page_time_ms=mean_times,
        ip_counts=dict(ips),
        label_shares=label_shares,
        top_organizations=top_orgs,
        country_counts=country_counts,
        total_http_requests=total_http,
        total_malicious=total_mal,
    )


def top_organizations(enrichments: Iterable, k: int) -> list:
    """Organizations ranked by count of distinct malicious IPs.

    Ties break lexicographically by organization name.
    """
    org_ips = defaultdict(set)
    for e in enrichments:
        if e.label == "malicious" and e.organization:
            org_ips[e.organization].add(e.ip)
    ranked = sorted(((org, len(ips)) for org, ips in org_ips.items()),
                    key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def format_report(report: AggregateReport) -> str:
    lines = ["Interaction report", "=================="]
    lines.append(f"HTTP requests: {report.total_http_requests} "
                 f"({report.total_malicious} malicious)")
    lines.append("Requests by method:")
    for method in sorted(report.method_counts):
        mal = report.malicious_method_counts.get(method, 0)
        lines.append(f"  {method:<6} {report.method_counts[method]:>6}"
                     f"  malicious {mal}")
    if report.mean_page_time_ms:
        lines.append("Mean time on page:")
        for page in sorted(report.mean_page_time_ms):
            lines.append(f"  {page:<20} {report.mean_page_time_ms[page]:.0f} ms")
    lines.append(f"Distinct source IPs: {len(report.ip_counts)}")
    if report.label_shares:
        shares = ", ".join(f"{label} {pct}%"
                           for label, pct in report.label_shares.items())
        lines.append(f"IP labels: {shares}")
    if report.top_organizations:
        lines.append("Top organizations by malicious IPs:")
        for org, count in report.top_organizations:
            lines.append(f"  {org}: {count}")
    if report.country_counts:
        lines.append("Malicious IPs by country:")
        for country in sorted(report.country_counts):
            lines.append(f"  {country}: {report.country_counts[country]}")
    return "\n".join(lines)
