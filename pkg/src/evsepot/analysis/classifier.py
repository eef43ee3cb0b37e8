"""Rule-based classification of logged HTTP requests.

A request is malicious iff at least one rule matches.  Matching is
case-insensitive and runs on a single-pass decoded form of the request
(percent-decoding and plus-to-space, applied exactly once); double-encoded
payloads only trip rules written against encoded forms.
"""

from __future__ import annotations

import json
import re
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from ..logbook import InteractionRecord

DEFAULT_RULES_PATH = Path(__file__).parent / "rules.json"

_BAD_PERCENT = re.compile(r"%(?![0-9A-Fa-f]{2})")


@dataclass(frozen=True)
class ClassifierRule:
    rule_id: str
    pattern: str
    description: str = ""

    def compiled(self) -> re.Pattern:
        return re.compile(self.pattern, re.IGNORECASE)


@dataclass
class RequestClassification:
    verdict: str  # "Malicious" | "Benign"
    matched_rules: list = field(default_factory=list)
    record_id: int = 0
    decode_failed: bool = False


class RuleSetError(Exception):
    pass


def load_rules(path: Optional[str] = None) -> list:
    data = json.loads(Path(path or DEFAULT_RULES_PATH).read_text())
    rules = [ClassifierRule(rule_id=r["rule_id"], pattern=r["pattern"],
                            description=r.get("description", ""))
             for r in data["rules"]]
    ids = [r.rule_id for r in rules]
    if len(set(ids)) != len(ids):
        raise RuleSetError("duplicate rule_id in rule set")
    for rule in rules:
        rule.compiled()  # fail fast on bad regexes
    return rules


def request_text(record: InteractionRecord) -> tuple[str, bool]:
    """Canonical matching text for one HttpRequest record.

    Returns (text, decode_failed).  Malformed percent-encoding leaves the
    raw string in place so the record is still classified.
    """
    p = record.payload
    raw = "{} {}?{}\n{}".format(p.get("method", ""), p.get("path", ""),
                                p.get("query", ""), p.get("body_excerpt", ""))
    if _BAD_PERCENT.search(raw):
        return raw, True
    return urllib.parse.unquote_plus(raw), False


def classify_request(record: InteractionRecord,
                     rules: Iterable[ClassifierRule]) -> RequestClassification:
    if record.category != "HttpRequest":
        raise ValueError(f"expected an HttpRequest record, got {record.category}")
    text, decode_failed = request_text(record)
    matched = [r.rule_id for r in rules if r.compiled().search(text)]
    return RequestClassification(
        verdict="Malicious" if matched else "Benign",
        matched_rules=matched,
        record_id=record.record_id,
        decode_failed=decode_failed,
    )
