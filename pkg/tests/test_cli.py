import json

import pytest

from evsepot.cli import main
from evsepot.logbook import InteractionLog


@pytest.fixture
def sample_log(tmp_path):
    logdir = tmp_path / "logs"
    ilog = InteractionLog(logdir)
    ilog.record("HttpRequest", 5000, "203.0.113.5",
                {"method": "GET", "path": "/", "query": "",
                 "body_excerpt": "", "status": 200})
    ilog.record("HttpRequest", 5000, "198.51.100.7",
                {"method": "GET", "path": "/cgi-bin/test.sh", "query": "",
                 "body_excerpt": "", "status": 404})
    ilog.record("Timing", 5000, "203.0.113.5",
                {"page": "/dashboard", "duration_ms": 2000})
    ilog.close()
    return logdir


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip()


def test_validate_ok(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("bind_address: 127.0.0.1\n")
    assert main(["validate", "--config", str(cfg)]) == 0


def test_validate_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("service_ports:\n  ftp: 21\n  telnet: 21\n")
    assert main(["validate", "--config", str(cfg)]) == 1
    assert "duplicate port" in capsys.readouterr().err


def test_classify_output(sample_log, capsys):
    assert main(["classify", "--log", str(sample_log), "--json"]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    verdicts = {l["record_id"]: l["verdict"] for l in lines}
    assert verdicts[1] == "Benign"
    assert verdicts[2] == "Malicious"


def test_report_output(sample_log, capsys):
    assert main(["report", "--log", str(sample_log)]) == 0
    out = capsys.readouterr().out
    assert "HTTP requests: 2 (1 malicious)" in out
    assert "2000 ms" in out


def test_report_json_with_enrichment(sample_log, tmp_path, capsys):
    cache = tmp_path / "cache.json"
    cache.write_text(json.dumps({
        "198.51.100.7": {"label": "malicious", "organization": "ExampleOrg",
                         "actor": None, "country": "CN",
                         "fetched_at": 0.0}}))
    assert main(["report", "--log", str(sample_log), "--json",
                 "--enrich-cache", str(cache)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["label_shares"] == {"malicious": 100.0}
    assert report["top_organizations"] == [["ExampleOrg", 1]]


def test_enrich_cache_only(sample_log, tmp_path, capsys):
    cache = tmp_path / "cache.json"
    assert main(["enrich", "--log", str(sample_log), "--cache", str(cache),
                 "--cache-only"]) == 0
    out = capsys.readouterr().out
    assert "203.0.113.5" in out and "unknown" in out
