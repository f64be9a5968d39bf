"""Parse raw log files into chronologically ordered log records.

Lines that carry a timestamp start a record; lines without one are glued to
the previous record as continuation lines (stack traces, wrapped messages).
Severity keywords are mapped to integer levels that later drive event
segmentation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence


class EmptyInput(ValueError):
    """No line in any input file produced a parseable timestamp."""


# Severity keyword -> integer level. Steps of 10 leave room for custom levels.
SEVERITY_LEVELS = {
    "TRACE": 10,
    "DEBUG": 20,
    "INFO": 30,
    "WARN": 40,
    "WARNING": 40,
    "ERROR": 50,
    "ERR": 50,
    "FATAL": 60,
    "CRITICAL": 60,
    "SEVERE": 60,
}
DEFAULT_SEVERITY = 30

# Canonical name per level, used for the masked severity token in templates.
LEVEL_NAMES = {10: "TRACE", 20: "DEBUG", 30: "INFO", 40: "WARN", 50: "ERROR", 60: "FATAL"}

# Severity keywords are matched as whole tokens, case-sensitive (log level
# tags are upper-case by convention; lower-case "error" in payload text stays
# payload), and only within the first SEVERITY_SEARCH_LIMIT characters.
SEVERITY_SEARCH_LIMIT = 64
_SEVERITY_RE = re.compile(r"\b(" + "|".join(sorted(SEVERITY_LEVELS, key=len, reverse=True)) + r")\b")

# Timestamp search is limited to the head of the line to avoid false
# positives in payload digits.
TIMESTAMP_SEARCH_LIMIT = 48

_MONTHS = {m: i + 1 for i, m in enumerate(
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"])}


@dataclass(frozen=True)
class RawLine:
    file_id: str
    line_number: int  # 1-based
    text: str


@dataclass
class LogRecord:
    timestamp: int  # epoch milliseconds, UTC
    severity: int
    body: str
    source_file: str
    source_line: int  # first line of the record

    @property
    def source(self) -> tuple[str, int]:
        return (self.source_file, self.source_line)


@dataclass
class TimestampPattern:
    """One recognizer: a regex plus a converter from its match to epoch ms."""

    pattern_id: str
    regex: re.Pattern
    to_epoch_ms: "callable"

    def try_match(self, line: str, base_year: int) -> Optional["TimestampMatch"]:
        m = self.regex.search(line, 0, TIMESTAMP_SEARCH_LIMIT)
        if m is None:
            return None
        try:
            epoch_ms = self.to_epoch_ms(m, base_year)
        except ValueError:
            return None
        return TimestampMatch(epoch_ms, m.span(), self.pattern_id)


@dataclass(frozen=True)
class TimestampMatch:
    epoch_ms: int
    span: tuple[int, int]
    pattern_id: str


def _epoch_ms(year, month, day, hour, minute, second=0, millis=0, tzoff_minutes=0):
    dt = datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)
    return int(dt.timestamp()) * 1000 + millis - tzoff_minutes * 60_000


def _from_iso(m, base_year):
    frac = m.group("frac") or ""
    millis = int((frac + "000")[:3]) if frac else 0
    tz = m.group("tz")
    off = 0
    if tz and tz != "Z":
        sign = -1 if tz[0] == "-" else 1
        hh, mm = tz[1:3], tz[-2:]
        off = sign * (int(hh) * 60 + int(mm))
    sec = int(m.group(6)) if m.group(6) else 0
    return _epoch_ms(int(m.group(1)), int(m.group(2)), int(m.group(3)),
                     int(m.group(4)), int(m.group(5)), sec, millis, off)


def _from_yymmdd(m, base_year):
    sec = int(m.group(6)) if m.group(6) else 0
    return _epoch_ms(2000 + int(m.group(1)), int(m.group(2)), int(m.group(3)),
                     int(m.group(4)), int(m.group(5)), sec)


def _from_syslog(m, base_year):
    return _epoch_ms(base_year, _MONTHS[m.group(1)], int(m.group(2)),
                     int(m.group(3)), int(m.group(4)), int(m.group(5)))


def _from_mmdd(m, base_year):
    return _epoch_ms(base_year, int(m.group(1)), int(m.group(2)),
                     int(m.group(3)), int(m.group(4)), int(m.group(5)), int(m.group(6)))


def _from_epoch13(m, base_year):
    return int(m.group(1))


def _from_epoch10(m, base_year):
    return int(m.group(1)) * 1000


BUILTIN_PATTERNS: list[TimestampPattern] = [
    TimestampPattern(
        "iso8601",
        re.compile(r"(?<!\d)(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2})(?::(\d{2}))?"
                   r"(?:[.,](?P<frac>\d{1,6}))?(?P<tz>Z|[+-]\d{2}:?\d{2})?"),
        _from_iso,
    ),
    TimestampPattern(
        "yy-mm-dd",
        re.compile(r"(?<!\d)(\d{2})-(\d{2})-(\d{2}) (\d{2}):(\d{2})(?::(\d{2}))?(?!\d)"),
        _from_yymmdd,
    ),
    TimestampPattern(
        "syslog",
        re.compile(r"\b(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) +(\d{1,2}) "
                   r"(\d{2}):(\d{2}):(\d{2})\b"),
        _from_syslog,
    ),
    TimestampPattern(
        "mm-dd",
        re.compile(r"(?<!\d)(\d{2})-(\d{2}) (\d{2}):(\d{2}):(\d{2})\.(\d{3})(?!\d)"),
        _from_mmdd,
    ),
    TimestampPattern("epoch-ms", re.compile(r"^(\d{13})(?!\d)"), _from_epoch13),
    TimestampPattern("epoch-s", re.compile(r"^(\d{10})(?!\d)"), _from_epoch10),
]


@dataclass
class IngestConfig:
    base_year: int = field(default_factory=lambda: datetime.now(timezone.utc).year)
    extra_timestamp_patterns: list[TimestampPattern] = field(default_factory=list)
    extra_severity_keywords: dict[str, int] = field(default_factory=dict)

    def patterns(self) -> list[TimestampPattern]:
        # User-supplied patterns win over builtins.
        return list(self.extra_timestamp_patterns) + BUILTIN_PATTERNS

    def severity_regex(self) -> re.Pattern:
        if not self.extra_severity_keywords:
            return _SEVERITY_RE
        keywords = dict(SEVERITY_LEVELS)
        keywords.update(self.extra_severity_keywords)
        return re.compile(r"\b(" + "|".join(sorted(keywords, key=len, reverse=True)) + r")\b")

    def severity_table(self) -> dict[str, int]:
        table = dict(SEVERITY_LEVELS)
        table.update(self.extra_severity_keywords)
        return table


def make_strftime_pattern(pattern_id: str, regex: str, fmt: str) -> TimestampPattern:
    """Build a TimestampPattern from a regex plus a strftime-style format.

    The regex selects the span; the matched text is parsed with `fmt`.
    Formats without a year get the configured base year.
    """
    compiled = re.compile(regex)
    year_less = "%Y" not in fmt and "%y" not in fmt

    def conv(m, base_year):
        dt = datetime.strptime(m.group(0), fmt)
        if year_less:
            dt = dt.replace(year=base_year)
        dt = dt.replace(tzinfo=timezone.utc) if dt.tzinfo is None else dt
        return int(dt.timestamp() * 1000)

    return TimestampPattern(pattern_id, compiled, conv)


def parse_timestamp(line: str, format_hint: Optional[str] = None,
                    config: Optional[IngestConfig] = None) -> Optional[TimestampMatch]:
    """Find the first timestamp in a raw line.

    Patterns are tried in a fixed order; `format_hint` (a pattern id) is tried
    first to keep per-file formats sticky. Returns None for continuation
    lines.
    """
    config = config or _DEFAULT_CONFIG
    patterns = config.patterns()
    if format_hint is not None:
        for p in patterns:
            if p.pattern_id == format_hint:
                hit = p.try_match(line, config.base_year)
                if hit is not None:
                    return hit
                break
    for p in patterns:
        if format_hint is not None and p.pattern_id == format_hint:
            continue
        hit = p.try_match(line, config.base_year)
        if hit is not None:
            return hit
    return None


def parse_severity(body: str, config: Optional[IngestConfig] = None) -> int:
    """Level of the first whole-token severity keyword near the head of the body."""
    config = config or _DEFAULT_CONFIG
    m = config.severity_regex().search(body, 0, SEVERITY_SEARCH_LIMIT)
    if m is None:
        return DEFAULT_SEVERITY
    return config.severity_table()[m.group(1)]


def find_severity_token(body: str, config: Optional[IngestConfig] = None):
    """Return (level, span) of the first severity keyword, or None."""
    config = config or _DEFAULT_CONFIG
    m = config.severity_regex().search(body, 0, SEVERITY_SEARCH_LIMIT)
    if m is None:
        return None
    return config.severity_table()[m.group(1)], m.span(1)


_DEFAULT_CONFIG = IngestConfig()


def _excise(text: str, span: tuple[int, int]) -> str:
    """Remove a span from a line, keeping payload on both sides."""
    head = text[: span[0]].strip()
    tail = text[span[1]:].strip()
    if head and tail:
        return head + " " + tail
    return head or tail


@dataclass
class FileReport:
    file_id: str
    line_count: int
    record_count: int
    pattern_id: Optional[str]  # sticky format of the file
    synthetic_first_record: bool
    dropped: bool  # file had lines but no parseable timestamp


@dataclass
class IngestResult:
    records: list[LogRecord]
    reports: list[FileReport]


def assemble_records(lines: Sequence[RawLine],
                     config: Optional[IngestConfig] = None) -> IngestResult:
    """Assemble raw lines (grouped per file, in file order) into sorted records.

    Timestamp-less lines are appended to the preceding record. Leading
    timestamp-less lines of a file form a synthetic first record stamped with
    the file's first parsed timestamp. Records are sorted by timestamp, with
    ties broken by source position.
    """
    config = config or _DEFAULT_CONFIG
    by_file: dict[str, list[RawLine]] = {}
    for ln in lines:
        by_file.setdefault(ln.file_id, []).append(ln)

    records: list[LogRecord] = []
    reports: list[FileReport] = []
    for file_id, file_lines in by_file.items():
        recs, report = _assemble_file(file_id, file_lines, config)
        records.extend(recs)
        reports.append(report)

    if not records:
        raise EmptyInput("no input line yielded a parseable timestamp")
    records.sort(key=lambda r: (r.timestamp, r.source_file, r.source_line))
    return IngestResult(records, reports)


def _assemble_file(file_id: str, file_lines: Sequence[RawLine],
                   config: IngestConfig) -> tuple[list[LogRecord], FileReport]:
    records: list[LogRecord] = []
    leading: list[RawLine] = []  # lines before the first timestamp
    sticky: Optional[str] = None
    current: Optional[LogRecord] = None

    for ln in file_lines:
        hit = parse_timestamp(ln.text, sticky, config)
        if hit is None:
            if current is None:
                leading.append(ln)
            else:
                current.body += "\n" + ln.text
            continue
        if sticky is None:
            sticky = hit.pattern_id
        body = _excise(ln.text, hit.span)
        if not body:
            body = ln.text.strip()  # timestamp-only line: keep it verbatim
        if current is not None:
            records.append(current)
        current = LogRecord(hit.epoch_ms, parse_severity(body, config), body,
                            file_id, ln.line_number)
    if current is not None:
        records.append(current)

    synthetic = False
    if leading and records:
        synthetic = True
        body = "\n".join(ln.text for ln in leading)
        first = LogRecord(records[0].timestamp, parse_severity(body, config),
                          body, file_id, leading[0].line_number)
        records.insert(0, first)

    dropped = bool(file_lines) and not records
    report = FileReport(file_id, len(file_lines), len(records), sticky, synthetic, dropped)
    return records, report


def read_log_files(paths: Iterable[str | Path]) -> list[RawLine]:
    """Read plain-text log files as RawLines (UTF-8, invalid bytes replaced)."""
    lines: list[RawLine] = []
    for path in paths:
        path = Path(path)
        with open(path, encoding="utf-8", errors="replace") as fh:
            for i, text in enumerate(fh, 1):
                lines.append(RawLine(str(path), i, text.rstrip("\n").rstrip("\r")))
    return lines


def ingest_files(paths: Iterable[str | Path],
                 config: Optional[IngestConfig] = None) -> IngestResult:
    return assemble_records(read_log_files(paths), config)


def format_records(records: Iterable[LogRecord]) -> str:
    """Serialize records back to log text; re-ingesting it is idempotent."""
    out = []
    for r in records:
        ts = datetime.fromtimestamp(r.timestamp / 1000, tz=timezone.utc)
        iso = ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{r.timestamp % 1000:03d}Z"
        out.append(f"{iso} {r.body}")
    return "\n".join(out) + "\n"
