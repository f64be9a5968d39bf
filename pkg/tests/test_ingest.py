from __future__ import annotations

import calendar
import random
import time
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logcurves.ingest import (EmptyInput, IngestConfig, LogRecord, RawLine,
                              assemble_records, format_records,
                              make_strftime_pattern, parse_severity,
                              parse_timestamp)


def epoch_ms(*args) -> int:
    return int(datetime(*args, tzinfo=timezone.utc).timestamp() * 1000)


class TestParseTimestamp:
    def test_paper_format_yy_mm_dd(self):
        hit = parse_timestamp("23-09-12 13:01 WARN - Unexpected value")
        assert hit is not None
        assert hit.pattern_id == "yy-mm-dd"
        assert hit.epoch_ms == epoch_ms(2023, 9, 12, 13, 1)
        assert hit.span == (0, 14)

    def test_continuation_line_has_no_timestamp(self):
        assert parse_timestamp("    at com.example.Foo.bar(Foo.java:17)") is None

    def test_iso_with_millis_and_zone(self):
        hit = parse_timestamp("2024-01-02T03:04:05.678Z msg")
        assert hit is not None
        # independent calendar-to-epoch oracle
        oracle = calendar.timegm(time.strptime("2024-01-02T03:04:05", "%Y-%m-%dT%H:%M:%S"))
        assert hit.epoch_ms == oracle * 1000 + 678 == 1704164645678
        assert hit.pattern_id == "iso8601"

    def test_iso_timezone_offset(self):
        plus = parse_timestamp("2024-01-02T03:04:05+02:00 x")
        utc = parse_timestamp("2024-01-02T01:04:05Z x")
        assert plus.epoch_ms == utc.epoch_ms

    def test_iso_without_zone_assumed_utc(self):
        hit = parse_timestamp("2024-01-02 03:04:05,123 body")
        assert hit.epoch_ms == epoch_ms(2024, 1, 2, 3, 4, 5) + 123

    def test_syslog_uses_base_year(self):
        cfg = IngestConfig(base_year=2021)
        hit = parse_timestamp("Jun 14 15:16:01 combo sshd[19939]: error", config=cfg)
        assert hit.pattern_id == "syslog"
        assert hit.epoch_ms == epoch_ms(2021, 6, 14, 15, 16, 1)

    def test_android_month_day(self):
        cfg = IngestConfig(base_year=2020)
        hit = parse_timestamp("03-17 16:13:38.811 1702 poll failed", config=cfg)
        assert hit.pattern_id == "mm-dd"
        assert hit.epoch_ms == epoch_ms(2020, 3, 17, 16, 13, 38) + 811

    def test_epoch_prefixes(self):
        assert parse_timestamp("1704164645678 payload").epoch_ms == 1704164645678
        assert parse_timestamp("1704164645 payload").epoch_ms == 1704164645000

    def test_format_hint_tried_first(self):
        # with the hint, the ambiguous line must resolve via the hinted pattern
        line = "23-09-12 13:01:05 body"
        assert parse_timestamp(line, format_hint="yy-mm-dd").pattern_id == "yy-mm-dd"

    def test_search_window_limits_false_positives(self):
        pad = "x" * 60
        assert parse_timestamp(f"{pad} 2024-01-02T03:04:05Z") is None

    def test_invalid_calendar_date_rejected(self):
        # matches the yy-mm-dd shape but is not a real date
        assert parse_timestamp("23-19-42 13:01 level") is None

    def test_extra_pattern_takes_priority(self):
        cfg = IngestConfig(extra_timestamp_patterns=[
            make_strftime_pattern("slash", r"\d{4}/\d{2}/\d{2} \d{2}:\d{2}:\d{2}",
                                  "%Y/%m/%d %H:%M:%S")])
        hit = parse_timestamp("2024/05/06 07:08:09 body", config=cfg)
        assert hit.pattern_id == "slash"
        assert hit.epoch_ms == epoch_ms(2024, 5, 6, 7, 8, 9)


class TestParseSeverity:
    @pytest.mark.parametrize("body,level", [
        ("WARN - Unexpected value", 40),
        ("starting service", 30),
        ("[ERROR] disk full", 50),
        ("TRACE entering loop", 10),
        ("DEBUG cache warm", 20),
        ("INFO ok", 30),
        ("WARNING: low disk", 40),
        ("ERR unreachable", 50),
        ("FATAL shutting down", 60),
        ("CRITICAL failure", 60),
        ("SEVERE wedged", 60),
    ])
    def test_mapping_table(self, body, level):
        assert parse_severity(body) == level

    def test_keyword_must_be_whole_token(self):
        assert parse_severity("ERRORS everywhere") == 30
        assert parse_severity("xINFOx") == 30

    def test_keyword_outside_window_ignored(self):
        assert parse_severity("x" * 70 + " ERROR") == 30

    def test_lowercase_payload_words_are_not_levels(self):
        assert parse_severity("error rate is low") == 30

    def test_extra_keywords(self):
        cfg = IngestConfig(extra_severity_keywords={"NOTICE": 35})
        assert parse_severity("NOTICE something", cfg) == 35


def _lines(file_id: str, texts: list[str]) -> list[RawLine]:
    return [RawLine(file_id, i, t) for i, t in enumerate(texts, 1)]


class TestAssembleRecords:
    def test_continuation_joined(self):
        res = assemble_records(_lines("a.log", [
            "2024-01-02T03:04:05Z first",
            "    at com.example.Foo(Foo.java:1)",
            "2024-01-02T03:04:06Z second",
        ]))
        assert len(res.records) == 2
        assert res.records[0].body == "first\n    at com.example.Foo(Foo.java:1)"
        assert res.records[1].body == "second"

    def test_two_files_merge_sorted(self):
        a = _lines("a.log", ["2024-01-02T03:00:01Z a1", "2024-01-02T03:00:03Z a2"])
        b = _lines("b.log", ["2024-01-02T03:00:02Z b1", "2024-01-02T03:00:04Z b2"])
        res = assemble_records(a + b)
        assert [r.body for r in res.records] == ["a1", "b1", "a2", "b2"]

    def test_unsorted_input_sorted_by_timestamp(self):
        res = assemble_records(_lines("a.log", [
            "2024-01-02T03:00:03Z t3",
            "2024-01-02T03:00:01Z t1",
            "2024-01-02T03:00:02Z t2",
        ]))
        assert [r.body for r in res.records] == ["t1", "t2", "t3"]

    def test_timestamps_non_decreasing(self):
        rng = random.Random(5)
        texts = [f"2024-01-02T03:{rng.randint(0,59):02d}:{rng.randint(0,59):02d}Z m{i}"
                 for i in range(50)]
        res = assemble_records(_lines("a.log", texts))
        ts = [r.timestamp for r in res.records]
        assert ts == sorted(ts)

    def test_leading_continuation_becomes_synthetic_first_record(self):
        res = assemble_records(_lines("a.log", [
            "banner line one",
            "banner line two",
            "2024-01-02T03:04:05Z real start",
        ]))
        assert len(res.records) == 2
        first = res.records[0]
        assert first.body == "banner line one\nbanner line two"
        assert first.timestamp == res.records[1].timestamp
        assert res.reports[0].synthetic_first_record

    def test_empty_input_raises(self):
        with pytest.raises(EmptyInput):
            assemble_records(_lines("a.log", ["no timestamps here", "none at all"]))

    def test_tie_broken_by_source_position(self):
        res = assemble_records(
            _lines("b.log", ["2024-01-02T03:04:05Z from-b"])
            + _lines("a.log", ["2024-01-02T03:04:05Z from-a"]))
        assert [r.source_file for r in res.records] == ["a.log", "b.log"]

    def test_severity_comes_from_body(self):
        res = assemble_records(_lines("a.log", ["23-09-12 13:01 WARN - Unexpected value"]))
        rec = res.records[0]
        assert rec.severity == 40
        assert rec.body == "WARN - Unexpected value"

    def test_every_line_lands_in_exactly_one_record(self):
        rng = random.Random(9)
        texts = []
        expected_lines = 0
        for i in range(200):
            if rng.random() < 0.3 and texts:
                texts.append(f"  continuation {i}")
            else:
                texts.append(f"2024-01-02T03:04:{i % 60:02d}Z message {i}")
            expected_lines += 1
        res = assemble_records(_lines("a.log", texts))
        body_lines = [ln for r in res.records for ln in r.body.split("\n")]
        assert len(body_lines) == expected_lines
        # continuation lines preserved verbatim, lead lines keep their payload
        for i, t in enumerate(texts):
            if t.startswith("  continuation"):
                assert t in body_lines
            else:
                assert t.split("Z ", 1)[1] in body_lines

    def test_sticky_format_per_file(self):
        # first line fixes the file format; later ambiguous lines reuse it
        res = assemble_records(_lines("a.log", [
            "23-09-12 13:01 first",
            "23-09-12 13:02 second",
            "23-09-12 13:03 third",
        ]))
        assert res.reports[0].pattern_id == "yy-mm-dd"
        assert len(res.records) == 3

    def test_reingesting_serialized_output_is_idempotent(self):
        res = assemble_records(_lines("a.log", [
            "2024-01-02T03:04:05.100Z first",
            "  trace detail",
            "2024-01-02T03:04:06.200Z WARN second",
        ]))
        text = format_records(res.records)
        res2 = assemble_records(_lines("b.log", text.splitlines()))
        assert [(r.timestamp, r.severity, r.body) for r in res.records] == \
               [(r.timestamp, r.severity, r.body) for r in res2.records]
        assert format_records(res2.records) == text


@settings(max_examples=60, deadline=None)
@given(st.lists(
    st.tuples(st.booleans(),
              st.integers(min_value=0, max_value=86_399),
              st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"),
                                             max_codepoint=0x17F),
                      min_size=1, max_size=12)),
    min_size=1, max_size=30))
def test_property_no_line_lost(entries):
    texts = []
    any_ts = False
    for has_ts, second, payload in entries:
        if has_ts:
            any_ts = True
            hh, mm, ss = second // 3600, (second // 60) % 60, second % 60
            texts.append(f"2024-01-02T{hh:02d}:{mm:02d}:{ss:02d}Z {payload}")
        else:
            texts.append(f"cont {payload}")
    lines = [RawLine("f.log", i, t) for i, t in enumerate(texts, 1)]
    if not any_ts:
        with pytest.raises(EmptyInput):
            assemble_records(lines)
        return
    res = assemble_records(lines)
    body_lines = [ln for r in res.records for ln in r.body.split("\n")]
    assert len(body_lines) == len(texts)
    ts = [r.timestamp for r in res.records]
    assert ts == sorted(ts)
    for r in res.records:
        assert r.body.strip()
        assert r.severity in (10, 20, 30, 40, 50, 60)
