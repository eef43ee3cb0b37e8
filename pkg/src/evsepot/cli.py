"""Command-line entry point: daemon control plus the offline analysis tools."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__, daemon
from .analysis import (EnrichmentCache, GreyNoiseClient, aggregate,
                       classify_request, enrich_ip, format_report, load_rules)
from .config import ConfigError, load_config
from .logbook import read_log


def _classify_all(records, rules):
    http_records = [r for r in records if r.category == "HttpRequest"]
    return http_records, {r.record_id: classify_request(r, rules)
                          for r in http_records}


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return daemon.EXIT_CONFIG
    return daemon.run(cfg)


def cmd_validate(args) -> int:
    try:
        load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return daemon.EXIT_CONFIG
    print("configuration OK")
    return 0


def cmd_classify(args) -> int:
    rules = load_rules(args.rules)
    records = read_log(args.log, category="HttpRequest")
    for record in records:
        cls = classify_request(record, rules)
        if args.json:
            print(json.dumps({
                "record_id": cls.record_id,
                "verdict": cls.verdict,
                "matched_rules": cls.matched_rules,
                "decode_failed": cls.decode_failed,
            }))
        else:
            rules_txt = ",".join(cls.matched_rules) or "-"
            p = record.payload
            print(f"{cls.record_id:>8} {cls.verdict:<9} {rules_txt:<30} "
                  f"{p.get('method', '-')} {p.get('path', '')}")
    return 0


def cmd_report(args) -> int:
    rules = load_rules(args.rules)
    records = read_log(args.log)
    _, classifications = _classify_all(records, rules)
    enrichments = None
    if args.enrich_cache:
        enrichments = EnrichmentCache(args.enrich_cache).all()
    report = aggregate(records, classifications, enrichments=enrichments)
    if args.json:
        print(json.dumps(report.__dict__, default=list, indent=1))
    else:
        print(format_report(report))
    return 0


def cmd_enrich(args) -> int:
    cfg = load_config(args.config) if args.config else load_config(None)
    cache = EnrichmentCache(args.cache or cfg.enrichment.cache_path)
    provider = None
    if not args.cache_only:
        provider = GreyNoiseClient(cfg.enrichment.endpoint,
                                   rate_limit_per_s=cfg.enrichment.rate_limit_per_s)
    records = read_log(args.log)
    ips = sorted({r.source_ip for r in records if r.source_ip not in ("-", "")})
    ttl_s = cfg.enrichment.ttl_days * 86400.0
    for ip in ips:
        enrichment = enrich_ip(ip, provider, cache, ttl_s=ttl_s)
        flag = " (transient failure)" if enrichment.transient_failure else ""
        print(f"{ip:<40} {enrichment.label:<10} "
              f"{enrichment.organization or '-'}{flag}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evsepot",
        description="EV charging station honeypot daemon and log analysis tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="start the honeypot daemon")
    p_run.add_argument("--config", help="path to YAML config file")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", help="path to YAML config file")
    p_val.set_defaults(func=cmd_validate)

    p_ver = sub.add_parser("version", help="print version and exit")
    p_ver.set_defaults(func=lambda args: (print(__version__), 0)[1])

    p_cls = sub.add_parser("classify", help="classify logged HTTP requests")
    p_cls.add_argument("--log", required=True,
                       help="log file or log directory")
    p_cls.add_argument("--rules", help="rule set JSON (default: built-in)")
    p_cls.add_argument("--json", action="store_true")
    p_cls.set_defaults(func=cmd_classify)

    p_rep = sub.add_parser("report", help="aggregate the log into a report")
    p_rep.add_argument("--log", required=True)
    p_rep.add_argument("--rules")
    p_rep.add_argument("--enrich-cache", dest="enrich_cache",
                       help="enrichment cache file to join labels from")
    p_rep.add_argument("--json", action="store_true")
    p_rep.set_defaults(func=cmd_report)

    p_enr = sub.add_parser("enrich", help="enrich source IPs via reputation API")
    p_enr.add_argument("--log", required=True)
    p_enr.add_argument("--cache", help="cache file (default from config)")
    p_enr.add_argument("--config", help="config for endpoint/rate/TTL")
    p_enr.add_argument("--cache-only", action="store_true",
                       help="no network; unseen IPs stay unknown")
    p_enr.set_defaults(func=cmd_enrich)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
