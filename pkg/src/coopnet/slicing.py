"""Release windows: partitioning the commit stream by release date.

Each window is a half-open interval (previous release date, release date],
expressed in UTC. The first window is unbounded below; commits after the
last release date get the post-release marker and are excluded from
analysis.
"""

from __future__ import annotations

import csv
import io
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime, timezone

POST_RELEASE = "post-release"


class ReleaseConfigError(Exception):
    pass


@dataclass(frozen=True)
class ReleaseWindow:
    name: str
    start: datetime | None  # exclusive; None for the first window
    end: datetime  # inclusive


def load_releases(config: str) -> list[ReleaseWindow]:
    """Parse releases CSV (header name,date) into ordered windows.

    Calendar dates are expanded to 23:59:59Z of that day, so commits
    landing on a release date belong to that release.
    """
    reader = csv.reader(io.StringIO(config))
    try:
        header = next(reader)
    except StopIteration:
        raise ReleaseConfigError("empty releases file") from None
    if header != ["name", "date"]:
        raise ReleaseConfigError(f"expected header name,date, got {','.join(header)}")
    entries: list[tuple[str, datetime]] = []
    seen: set[str] = set()
    for row_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ReleaseConfigError(f"row {row_number}: expected 2 columns")
        name, date_text = row[0].strip(), row[1].strip()
        if not name:
            raise ReleaseConfigError(f"row {row_number}: empty release name")
        if name in seen:
            raise ReleaseConfigError(f"row {row_number}: duplicate release name {name}")
        seen.add(name)
        try:
            day = datetime.strptime(date_text, "%Y-%m-%d")
        except ValueError:
            raise ReleaseConfigError(
                f"row {row_number}: invalid date {date_text!r}"
            ) from None
        end = day.replace(hour=23, minute=59, second=59, tzinfo=timezone.utc)
        if entries and end <= entries[-1][1]:
            raise ReleaseConfigError(f"row {row_number}: dates not strictly ascending")
        entries.append((name, end))
    if not entries:
        raise ReleaseConfigError("no releases defined")
    windows = []
    previous: datetime | None = None
    for name, end in entries:
        windows.append(ReleaseWindow(name=name, start=previous, end=end))
        previous = end
    return windows


def assign_release(t: datetime, windows: list[ReleaseWindow]) -> str:
    """Name of the window containing t, or the post-release marker."""
    ends = [w.end for w in windows]
    i = bisect_left(ends, t)
    if i == len(windows):
        return POST_RELEASE
    return windows[i].name
