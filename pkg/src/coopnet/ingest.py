"""Parsing and cleaning of raw commit histories.

Two input formats are supported:

* the canonical NDJSON commit log (one JSON object per line), consumed by
  :func:`parse_commit_log`;
* the raw text produced by the documented ``git log`` extraction recipe
  (sentinel-separated records), bridged to NDJSON by :func:`convert_vcs_log`.

Per-line problems never abort a parse; they are collected in a
:class:`ValidationReport` so nothing is silently dropped.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable

SHA_RE = re.compile(r"^[0-9a-f]{40}$")
RECORD_SENTINEL = "\x01COMMIT\x01"

CANONICAL_FIELDS = ("sha", "author_name", "author_email", "timestamp", "files")

OK = "ok"
FIXABLE = "fixable"
INVALID_EMAIL = "invalid-email"


class CommitLogError(Exception):
    """Stream-level failure: the input as a whole cannot be processed."""


@dataclass(frozen=True)
class CommitRecord:
    """One atomic change event from the repository history."""

    sha: str
    author_name: str
    author_email: str
    timestamp: datetime  # always UTC
    files: tuple[str, ...]  # deduplicated, lexicographically sorted


@dataclass
class ValidationReport:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    cleaned: list[tuple[str, str]] = field(default_factory=list)


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp and normalize it to UTC.

    Raises ValueError for naive timestamps or anything fromisoformat
    rejects.
    """
    ts = datetime.fromisoformat(text.replace("Z", "+00:00").replace("z", "+00:00"))
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


def format_rfc3339(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def normalize_email(email: str) -> str:
    return email.strip().lower()


def classify_email(email: str) -> str:
    """Classify an address as ok / fixable / invalid-email.

    An address is invalid when it has no "@" or no dot in the domain part;
    fixable when normalization (trim + lowercase) would change it.
    """
    normalized = normalize_email(email)
    local, sep, domain = normalized.rpartition("@")
    if not sep or not local or "." not in domain:
        return INVALID_EMAIL
    if normalized != email:
        return FIXABLE
    return OK


def _parse_line(line: str) -> tuple[CommitRecord, list[str]]:
    """Parse one NDJSON line into a record plus applied-fix notes.

    Raises ValueError with a rejection reason on any schema violation.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError("not a JSON object")
    for name in CANONICAL_FIELDS:
        if name not in obj:
            raise ValueError(f"missing field: {name}")
    for name in obj:
        if name not in CANONICAL_FIELDS:
            raise ValueError(f"unknown field: {name}")
    sha = obj["sha"]
    if not isinstance(sha, str) or not SHA_RE.match(sha):
        raise ValueError("sha is not a 40-char lowercase hex string")
    if not isinstance(obj["author_name"], str):
        raise ValueError("author_name is not a string")
    if not isinstance(obj["author_email"], str):
        raise ValueError("author_email is not a string")
    if not isinstance(obj["timestamp"], str):
        raise ValueError("timestamp is not a string")
    try:
        timestamp = parse_rfc3339(obj["timestamp"])
    except ValueError:
        raise ValueError("timestamp is not RFC 3339") from None
    files = obj["files"]
    if not isinstance(files, list) or any(not isinstance(f, str) for f in files):
        raise ValueError("files is not a list of strings")
    if not files:
        raise ValueError("no files")
    if any(f == "" for f in files):
        raise ValueError("empty file path")

    fixes = []
    deduped = tuple(sorted(set(files)))
    if list(deduped) != files:
        fixes.append("files deduplicated and sorted")
    email = normalize_email(obj["author_email"])
    if email != obj["author_email"]:
        fixes.append("email normalized")
    if email == "":
        fixes.append("missing email")
    record = CommitRecord(
        sha=sha,
        author_name=obj["author_name"],
        author_email=email,
        timestamp=timestamp,
        files=deduped,
    )
    return record, fixes


def parse_commit_log(stream: Iterable[str] | str) -> tuple[list[CommitRecord], ValidationReport]:
    """Parse a canonical NDJSON commit log.

    Records come back in input order. Malformed lines are rejected with a
    reason in the report; blank lines are ignored. Emails are lowercased
    and trimmed, file lists deduplicated and sorted.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    records: list[CommitRecord] = []
    report = ValidationReport()
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record, fixes = _parse_line(line)
        except ValueError as exc:
            report.rejected.append((line_number, str(exc)))
            continue
        records.append(record)
        report.accepted += 1
        for fix in fixes:
            report.cleaned.append((record.sha, fix))
    return records, report


def validate_commits(records: list[CommitRecord]) -> ValidationReport:
    """Classify each record's email as ok, fixable, or invalid.

    Pure classification: invalid-email records are retained (marked in
    ``cleaned``) so identity resolution can still apply explicit overrides.
    """
    report = ValidationReport(accepted=len(records))
    for record in records:
        if record.author_email == "":
            report.cleaned.append((record.sha, "missing email"))
            continue
        kind = classify_email(record.author_email)
        if kind == INVALID_EMAIL:
            report.cleaned.append((record.sha, "invalid email"))
        elif kind == FIXABLE:
            fixed = normalize_email(record.author_email)
            report.cleaned.append((record.sha, f"email normalized to {fixed}"))
    return report


def convert_vcs_log(raw: str) -> tuple[str, int]:
    """Convert raw extraction-recipe output into canonical NDJSON.

    The recipe emits, per commit: the sentinel line, then sha, author name,
    author email and the committer ISO-8601 date on separate lines, then
    the name-only file list. Merge records (zero file lines) are dropped;
    the drop count is returned alongside the NDJSON text.

    Raises CommitLogError, naming the byte offset of the offending record,
    when the sentinel is missing or a record is truncated.
    """
    offset = 0
    line_starts: list[tuple[int, str]] = []
    for line in raw.splitlines(keepends=True):
        line_starts.append((offset, line.rstrip("\r\n")))
        offset += len(line.encode("utf-8"))

    # Group lines into records delimited by the sentinel.
    records: list[tuple[int, list[str]]] = []
    current: list[str] | None = None
    for at, line in line_starts:
        if line == RECORD_SENTINEL:
            current = []
            records.append((at, current))
        elif current is None:
            if line.strip():
                raise CommitLogError(f"missing sentinel before content at byte {at}")
        else:
            current.append(line)

    out_lines = []
    merges_dropped = 0
    for at, body in records:
        while body and not body[-1].strip():
            body.pop()
        if len(body) < 4:
            raise CommitLogError(f"unterminated record at byte {at}")
        sha, author_name, author_email, date_line = body[:4]
        try:
            timestamp = parse_rfc3339(date_line)
        except ValueError:
            raise CommitLogError(
                f"unparseable committer date in record at byte {at}"
            ) from None
        files = [f for f in body[4:] if f.strip()]
        if not files:
            merges_dropped += 1
            continue
        obj = {
            "sha": sha,
            "author_name": author_name,
            "author_email": author_email,
            "timestamp": format_rfc3339(timestamp),
            "files": files,
        }
        out_lines.append(json.dumps(obj, ensure_ascii=False))
    return "".join(line + "\n" for line in out_lines), merges_dropped
