"""Offline analysis of the interaction log: classify, aggregate, enrich."""

from .aggregate import AggregateReport, aggregate, format_report, top_organizations
from .classifier import (ClassifierRule, RequestClassification, RuleSetError,
                         classify_request, load_rules)
from .enrich import (EnrichmentCache, GreyNoiseClient, IpEnrichment,
                     canonical_ip, enrich_ip)

__all__ = [
    "AggregateReport", "aggregate", "format_report", "top_organizations",
    "ClassifierRule", "RequestClassification", "RuleSetError",
    "classify_request", "load_rules",
    "EnrichmentCache", "GreyNoiseClient", "IpEnrichment", "canonical_ip",
    "enrich_ip",
]
