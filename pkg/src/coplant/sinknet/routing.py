"""Least-cost corridor routing over a raster cost surface.

8-neighbor movement; stepping between adjacent cells costs the mean of the
two cell multipliers times the cell size (times sqrt(2) on diagonals).
Nodata cells are hard barriers.  Ties break toward the smaller cell index,
which makes paths deterministic across platforms.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from coplant.sinknet.raster import CostSurface

SQRT2 = math.sqrt(2.0)


class UnreachableError(ValueError):
    def __init__(self, a: int, b: int):
        super().__init__(f"no traversable path between cells {a} and {b}")
        self.cells = (a, b)


def _neighbors(surface: CostSurface, cell: int):
    r, c = surface.rowcol(cell)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            nr, nc = r + dr, c + dc
            if 0 <= nr < surface.nrows and 0 <= nc < surface.ncols:
                yield surface.index(nr, nc), (SQRT2 if dr and dc else 1.0)


def step_cost(surface: CostSurface, a: int, b: int, diag_factor: float) -> float:
    return 0.5 * (surface.cost(a) + surface.cost(b)) * surface.cell_size * diag_factor


def least_cost_path(surface: CostSurface, a: int, b: int) -> tuple[list[int], float]:
    """Dijkstra shortest path; returns (cells from a to b inclusive, cost).

    a == b returns an empty path with zero cost.
    """
    for cell in (a, b):
        if not 0 <= cell < surface.n_cells:
            raise ValueError(f"cell {cell} outside the surface")
        if not surface.traversable(cell):
            raise ValueError(f"cell {cell} is nodata")
    if a == b:
        return [], 0.0

    dist = {a: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, a)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == b:
            break
        done.add(u)
        for v, diag in _neighbors(surface, u):
            if v in done or not surface.traversable(v):
                continue
            nd = d + step_cost(surface, u, v, diag)
            old = dist.get(v)
            # ties resolve toward the smaller cell index via the heap ordering
            if old is None or nd < old:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if b not in dist:
        raise UnreachableError(a, b)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    path.reverse()
    return path, dist[b]


@dataclass(frozen=True)
class SourceNode:
    id: str
    cell: int
    capturable: float         # t CO2 / yr
    eq_capture_cost: float    # $/t CO2


@dataclass(frozen=True)
class SinkNode:
    id: str
    cell: int
    capacity: float           # t CO2 / yr
    sequestration_cost: float  # $/t CO2


@dataclass(frozen=True)
class CandidateEdge:
    source_id: str
    sink_id: str
    path: tuple[int, ...]
    length_km: float
    terrain_cost: float            # path cost = sum of per-km multipliers x km
    cost_per_tonne: float | None = None  # overrides pipeline sizing when set


@dataclass
class ReachabilityReport:
    unreachable_sources: list[str]
    unreachable_sinks: list[str]

    @property
    def ok(self) -> bool:
        return not self.unreachable_sources and not self.unreachable_sinks


def _path_length_km(surface: CostSurface, path: list[int]) -> float:
    length = 0.0
    for u, v in zip(path, path[1:]):
        ru, cu = surface.rowcol(u)
        rv, cv = surface.rowcol(v)
        diag = SQRT2 if (ru != rv and cu != cv) else 1.0
        length += surface.cell_size * diag
    return length


def build_candidates(surface: CostSurface, sources: list[SourceNode],
                     sinks: list[SinkNode]) -> tuple[list[CandidateEdge], ReachabilityReport]:
    """Least-cost corridor for every source-sink pair.

    Pairs separated by nodata barriers are skipped; nodes unreachable from
    every counterpart are listed in the reachability report.
    """
    for node in list(sources) + list(sinks):
        if not surface.traversable(node.cell):
            raise ValueError(f"node {node.id} sits on a nodata cell")
    edges: list[CandidateEdge] = []
    reached_sources: set[str] = set()
    reached_sinks: set[str] = set()
    for src in sources:
        for snk in sinks:
            try:
                path, cost = least_cost_path(surface, src.cell, snk.cell)
            except UnreachableError:
                continue
            edges.append(CandidateEdge(
                source_id=src.id, sink_id=snk.id, path=tuple(path),
                length_km=_path_length_km(surface, path) if path else 0.0,
                terrain_cost=cost))
            reached_sources.add(src.id)
            reached_sinks.add(snk.id)
    report = ReachabilityReport(
        unreachable_sources=[s.id for s in sources if s.id not in reached_sources],
        unreachable_sinks=[s.id for s in sinks if s.id not in reached_sinks])
    return edges, report
