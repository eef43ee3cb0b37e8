import json
import threading

import pytest

from evsepot.logbook import (InteractionLog, LogCorruption, read_log)


@pytest.fixture
def logdir(tmp_path):
    return tmp_path / "logs"


def test_roundtrip_order_and_payload(logdir):
    ilog = InteractionLog(logdir)
    events = [
        ("HttpRequest", 5000, "203.0.113.5", {"method": "GET", "path": "/",
                                              "query": "", "body_excerpt": "",
                                              "status": 200}),
        ("Ftp", 21, "198.51.100.9", {"command": "USER", "argument": "x",
                                     "reply_code": 331}),
        ("Telnet", 23, "198.51.100.9", {"username": "root",
                                        "password": "root",
                                        "attempt_index": 1}),
    ]
    for cat, port, ip, payload in events:
        ilog.record(cat, port, ip, payload)
    ilog.close()
    records = read_log(logdir)
    assert [(r.category, r.port, r.source_ip, r.payload)
            for r in records] == events
    assert [r.record_id for r in records] == sorted(r.record_id
                                                    for r in records)


def test_ids_strictly_increase_and_survive_restart(logdir):
    ilog = InteractionLog(logdir)
    first = ilog.record("Port", 80, "1.2.3.4", {"event": "connect"})
    ilog.close()
    ilog2 = InteractionLog(logdir)
    second = ilog2.record("Port", 80, "1.2.3.4", {"event": "connect"})
    ilog2.close()
    assert second > first


def test_concurrent_writers_produce_complete_lines(logdir):
    ilog = InteractionLog(logdir)

    def hammer(n):
        for i in range(200):
            ilog.record("Timing", 5000, f"10.0.0.{n}",
                        {"page": "/dashboard", "duration_ms": i})

    threads = [threading.Thread(target=hammer, args=(n,)) for n in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ilog.close()
    records = read_log(logdir)
    assert len(records) == 8 * 200
    ids = [r.record_id for r in records]
    assert len(set(ids)) == len(ids)


def test_unknown_category_rejected(logdir):
    ilog = InteractionLog(logdir)
    with pytest.raises(ValueError):
        ilog.record("Bogus", 80, "1.2.3.4", {})
    ilog.close()


def test_torn_trailing_line_skipped(logdir):
    ilog = InteractionLog(logdir)
    for i in range(5):
        ilog.record("Port", 21, "1.2.3.4", {"event": "connect", "n": i})
    ilog.close()
    path = next(logdir.glob("interactions*.log"))
    data = path.read_bytes()
    path.write_bytes(data[:-20])  # tear the final record mid-line
    records = read_log(logdir)
    assert len(records) == 4
    assert [r.payload["n"] for r in records] == [0, 1, 2, 3]


def test_corrupt_middle_line_raises(logdir):
    ilog = InteractionLog(logdir)
    for i in range(3):
        ilog.record("Port", 21, "1.2.3.4", {"n": i})
    ilog.close()
    path = next(logdir.glob("interactions*.log"))
    lines = path.read_text().splitlines()
    lines[1] = "@@garbage@@"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(LogCorruption) as exc:
        read_log(logdir)
    assert exc.value.line_no == 2


def test_filters(logdir):
    ilog = InteractionLog(logdir)
    ilog.record("Actions", 5000, "10.0.0.1", {"kind": "Pause"})
    ilog.record("HttpRequest", 5000, "10.0.0.2",
                {"method": "GET", "path": "/", "query": "",
                 "body_excerpt": "", "status": 200})
    ilog.record("Actions", 5000, "10.0.0.2", {"kind": "Stop"})
    ilog.close()
    actions = read_log(logdir, category="Actions")
    assert [r.payload["kind"] for r in actions] == ["Pause", "Stop"]
    from_two = read_log(logdir, source_ip="10.0.0.2")
    assert len(from_two) == 2
    assert read_log(logdir) == read_log(logdir, category=None)


def test_unwritable_destination_buffers_then_drops(tmp_path):
    logdir = tmp_path / "logs"
    ilog = InteractionLog(logdir, buffer_limit=3)
    ilog.record("Port", 80, "1.2.3.4", {"event": "connect"})

    # simulate the destination going away
    class Broken:
        def write(self, *_):
            raise OSError("read-only")

        def flush(self):
            raise OSError("read-only")

        def close(self):
            pass

    ilog._fh = Broken()
    for i in range(6):
        ilog.record("Port", 80, "1.2.3.4", {"n": i})
    assert len(ilog._buffer) == 3
    # recovery: reopen and drain, with a drop-counter record
    ilog._fh = None
    ilog.record("Port", 80, "1.2.3.4", {"event": "recovered"})
    ilog.close()
    records = read_log(logdir)
    drop_markers = [r for r in records
                    if r.payload.get("event") == "records-dropped"]
    assert len(drop_markers) == 1
    assert drop_markers[0].payload["count"] == 3


def test_line_format_is_documented_schema(logdir):
    ilog = InteractionLog(logdir)
    ilog.record("Login", 80, "9.9.9.9",
                {"form_kind": "Login", "username": "a", "password": "b"})
    ilog.close()
    line = next(logdir.glob("interactions*.log")).read_text().strip()
    obj = json.loads(line)
    assert set(obj) == {"schema", "id", "ts", "category", "port", "src",
                        "payload"}
    assert obj["schema"] == 1
    assert obj["ts"].endswith("+00:00")
