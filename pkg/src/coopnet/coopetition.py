"""Revenue-stream coopetition analysis.

For each revenue stream, cohesion of the firms competing for it is
compared against cohesion of the remaining firms: both node-induced
subgraphs are measured independently, so cross-group edges count toward
neither side.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .graph import CollaborationGraph, induced_by_firms
from .metrics import density


class RevenueModelError(Exception):
    pass


@dataclass(frozen=True)
class RevenueStream:
    name: str
    competing_firms: frozenset[str]


@dataclass(frozen=True)
class DensityComparison:
    stream: str
    n_alpha: int  # edges among competing firms
    den_alpha: float | None
    n_beta: int  # edges among non-competing firms
    den_beta: float | None


def load_revenue_models(config: str, universe: set[str]) -> list[RevenueStream]:
    """Parse revenue CSV (header stream,firm), validating firms against the universe.

    Streams keep first-appearance order.
    """
    reader = csv.reader(io.StringIO(config))
    try:
        header = next(reader)
    except StopIteration:
        raise RevenueModelError("empty revenue models file") from None
    if header != ["stream", "firm"]:
        raise RevenueModelError(f"expected header stream,firm, got {','.join(header)}")
    grouped: dict[str, set[str]] = {}
    for row_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise RevenueModelError(f"row {row_number}: expected 2 columns")
        stream, firm = row[0].strip(), row[1].strip()
        if not stream or not firm:
            raise RevenueModelError(f"row {row_number}: empty stream or firm")
        if firm not in universe:
            raise RevenueModelError(f"row {row_number}: unknown firm {firm}")
        grouped.setdefault(stream, set()).add(firm)
    return [
        RevenueStream(name=name, competing_firms=frozenset(firms))
        for name, firms in grouped.items()
    ]


def compare_revenue_stream(
    g: CollaborationGraph, stream: RevenueStream, universe: set[str]
) -> DensityComparison:
    """Edge counts and densities of competing vs non-competing subgraphs.

    When the stream covers every firm the complement is empty: n_beta is 0
    and den_beta undefined.
    """
    if not stream.competing_firms <= universe:
        raise RevenueModelError(
            f"stream {stream.name} names firms outside the universe: "
            f"{sorted(stream.competing_firms - universe)}"
        )
    alpha = induced_by_firms(g, set(stream.competing_firms))
    complement = universe - stream.competing_firms
    if complement:
        beta = induced_by_firms(g, complement)
        n_beta, den_beta = beta.edge_count, density(beta)
    else:
        n_beta, den_beta = 0, None
    return DensityComparison(
        stream=stream.name,
        n_alpha=alpha.edge_count,
        den_alpha=density(alpha),
        n_beta=n_beta,
        den_beta=den_beta,
    )
