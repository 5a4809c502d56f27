"""Bipartite view of sampling patterns: neighborhoods, maximum matching, and
row-connectivity.

Row vertices are coordinates (0..d-1), column vertices are pattern columns
(0..N-1). The matching engine works on plain adjacency lists so other modules
can drive it without building a :class:`BipartiteGraph` first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .patterns import SamplingPattern

__all__ = [
    "BipartiteGraph",
    "build",
    "neighborhood",
    "maximum_matching",
    "max_matching",
    "augmenting_path",
    "is_r_row_connected",
]

_EXHAUSTIVE_LIMIT = 10**6


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph of a sampling pattern.

    ``adjacency[i]`` lists, sorted and duplicate-free, the row vertices
    adjacent to column vertex ``i``; edge (j, i) exists exactly when the
    pattern observes coordinate j in column i.
    """

    row_count: int
    col_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.row_count < 1 or self.col_count < 1:
            raise ValueError("graph needs at least one row and one column vertex")
        if len(self.adjacency) != self.col_count:
            raise ValueError("adjacency length must equal col_count")
        for i, rows in enumerate(self.adjacency):
            if list(rows) != sorted(set(rows)):
                raise ValueError(f"adjacency of column {i} must be sorted and duplicate-free")
            if rows and (rows[0] < 0 or rows[-1] >= self.row_count):
                raise ValueError(f"adjacency of column {i} has out-of-range rows")


def build(p: "SamplingPattern") -> BipartiteGraph:
    """Graph whose edges mirror the pattern's nonzero entries exactly."""
    return BipartiteGraph(
        row_count=p.d,
        col_count=p.n_cols,
        adjacency=tuple(p.column_supports),
    )


def neighborhood(g: BipartiteGraph, cols: Iterable[int]) -> frozenset[int]:
    """Union of the row vertices adjacent to the given column vertices."""
    rows: set[int] = set()
    for c in cols:
        if not 0 <= c < g.col_count:
            raise ValueError(f"column index {c} out of range [0, {g.col_count})")
        rows.update(g.adjacency[c])
    return frozenset(rows)


def maximum_matching(adjacency: Sequence[Sequence[int]]) -> dict[int, int]:
    """Maximum bipartite matching (Hopcroft-Karp), column index -> row index.

    Deterministic: vertices are scanned in index order, so the same input
    always yields the same pairing. The matching size is canonical either way.
    """
    pair_col: dict[int, int] = {}
    pair_row: dict[int, int] = {}
    n = len(adjacency)
    dist: dict[int, float] = {}
    inf = float("inf")

    def bfs() -> bool:
        queue: deque[int] = deque()
        for c in range(n):
            if c not in pair_col:
                dist[c] = 0.0
                queue.append(c)
            else:
                dist[c] = inf
        found = False
        while queue:
            c = queue.popleft()
            for row in adjacency[c]:
                nxt = pair_row.get(row)
                if nxt is None:
                    found = True
                elif dist[nxt] == inf:
                    dist[nxt] = dist[c] + 1.0
                    queue.append(nxt)
        return found

    def dfs(start: int) -> bool:
        # Iterative alternating DFS along the BFS layering.
        stack: list[tuple[int, Iterable[int]]] = [(start, iter(adjacency[start]))]
        path: list[tuple[int, int]] = []
        while stack:
            c, it = stack[-1]
            advanced = False
            for row in it:
                nxt = pair_row.get(row)
                if nxt is None:
                    path.append((c, row))
                    for col, r in path:
                        pair_col[col] = r
                        pair_row[r] = col
                    return True
                if dist.get(nxt) == dist[c] + 1.0:
                    path.append((c, row))
                    stack.append((nxt, iter(adjacency[nxt])))
                    advanced = True
                    break
            if not advanced:
                dist[c] = inf
                stack.pop()
                if path and len(path) >= len(stack):
                    path.pop()
        return False

    while bfs():
        for c in range(n):
            if c not in pair_col:
                dfs(c)
    return dict(pair_col)


def max_matching(g: BipartiteGraph) -> tuple[int, dict[int, int]]:
    """Maximum matching size plus one witnessing pairing (column -> row)."""
    pairing = maximum_matching(g.adjacency)
    return len(pairing), pairing


def augmenting_path(
    adjacency,
    col,
    pair_col: dict,
    pair_row: dict,
) -> list[tuple] | None:
    """Search for an augmenting path from an unmatched column vertex.

    ``adjacency`` may be a sequence or a mapping from column keys to row
    iterables. Nothing is mutated: on success the path is returned as a list
    of (column, row) edges whose application (assigning each column to its
    row) enlarges the matching by one; on failure ``None``. This is the
    single-column Kuhn step used to maintain matchings incrementally.
    """
    visited: set[int] = set()
    stack: list[tuple] = [(col, iter(adjacency[col]))]
    path: list[tuple] = []
    while stack:
        c, it = stack[-1]
        advanced = False
        for row in it:
            if row in visited:
                continue
            visited.add(row)
            owner = pair_row.get(row)
            path.append((c, row))
            if owner is None:
                return path
            stack.append((owner, iter(adjacency[owner])))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if path and len(path) >= len(stack):
                path.pop()
    return None


def _row_to_cols(g: BipartiteGraph) -> list[list[int]]:
    table: list[list[int]] = [[] for _ in range(g.row_count)]
    for c, rows in enumerate(g.adjacency):
        for j in rows:
            table[j].append(c)
    return table


def _is_connected_without(g: BipartiteGraph, removed: frozenset[int], row_to_cols) -> bool:
    """Connectivity over the vertices that remain after deleting ``removed`` rows.

    Isolated vertices count as disconnecting; a remaining vertex set of size
    zero or one is trivially connected.
    """
    rows_left = [j for j in range(g.row_count) if j not in removed]
    total = len(rows_left) + g.col_count
    if total <= 1:
        return True
    # BFS over the union of both vertex classes; row j is node j, column i is
    # node d + i.
    start = rows_left[0] if rows_left else g.row_count
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v < g.row_count:
            for c in row_to_cols[v]:
                node = g.row_count + c
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        else:
            for j in g.adjacency[v - g.row_count]:
                if j not in removed and j not in seen:
                    seen.add(j)
                    queue.append(j)
    return len(seen) == total


def _pair_min_cut(g: BipartiteGraph, s: int, t: int, cap: int) -> list[int] | None:
    """Rows whose removal separates column ``s`` from column ``t``, if at most
    ``cap`` rows suffice; ``None`` when every cut needs more than ``cap``.

    Unit-capacity flow with split row vertices; columns are uncuttable
    (infinite capacity). Augmentation stops as soon as ``cap`` is exceeded.
    """
    # Nodes: columns 0..N-1, row j enters at N + 2j and leaves at N + 2j + 1.
    n_nodes = g.col_count + 2 * g.row_count
    graph: list[list[list[int]]] = [[] for _ in range(n_nodes)]  # [to, capacity, rev]
    inf = 10**9

    def add_edge(u: int, v: int, c: int) -> None:
        graph[u].append([v, c, len(graph[v])])
        graph[v].append([u, 0, len(graph[u]) - 1])

    for j in range(g.row_count):
        add_edge(g.col_count + 2 * j, g.col_count + 2 * j + 1, 1)
    for c, rows in enumerate(g.adjacency):
        for j in rows:
            add_edge(c, g.col_count + 2 * j, inf)
            add_edge(g.col_count + 2 * j + 1, c, inf)

    flow = 0
    while flow <= cap:
        # BFS for a shortest augmenting path.
        parent: list[tuple[int, int] | None] = [None] * n_nodes
        parent[s] = (s, -1)
        queue = deque([s])
        while queue and parent[t] is None:
            u = queue.popleft()
            for k, (v, c, _) in enumerate(graph[u]):
                if c > 0 and parent[v] is None:
                    parent[v] = (u, k)
                    queue.append(v)
        if parent[t] is None:
            break
        v = t
        while v != s:
            u, k = parent[v]
            graph[u][k][1] -= 1
            rev = graph[u][k][2]
            graph[v][rev][1] += 1
            v = u
        flow += 1
    if flow > cap:
        return None
    # Min cut: rows whose entry node is reachable in the residual graph but
    # whose exit node is not.
    reachable = [False] * n_nodes
    reachable[s] = True
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, c, _ in graph[u]:
            if c > 0 and not reachable[v]:
                reachable[v] = True
                queue.append(v)
    cut = [
        j
        for j in range(g.row_count)
        if reachable[g.col_count + 2 * j] and not reachable[g.col_count + 2 * j + 1]
    ]
    return cut


def is_r_row_connected(
    g: BipartiteGraph, r: int, method: str = "auto"
) -> tuple[bool, tuple[int, ...] | None]:
    """Whether the graph stays connected after deleting any r-1 row vertices.

    Returns ``(True, None)`` when it does. Otherwise the second element is a
    separating row set of size <= r-1 (empty when the graph is disconnected
    before any removal).

    ``method`` selects the engine: ``"exhaustive"`` enumerates every
    (r-1)-subset of rows (the definitional oracle), ``"flow"`` uses
    column-pair minimum cuts with only row vertices cuttable, and ``"auto"``
    picks exhaustive while C(d, r-1) stays within 10^6.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if method not in ("auto", "exhaustive", "flow"):
        raise ValueError(f"unknown method {method!r}")
    row_to_cols = _row_to_cols(g)
    if not _is_connected_without(g, frozenset(), row_to_cols):
        return False, ()
    if r == 1:
        return True, None

    if method == "exhaustive" or (
        method == "auto" and comb(g.row_count, r - 1) <= _EXHAUSTIVE_LIMIT
    ):
        for removed in combinations(range(g.row_count), r - 1):
            if not _is_connected_without(g, frozenset(removed), row_to_cols):
                return False, tuple(removed)
        return True, None

    # Flow route. A column becomes isolated exactly when its whole support is
    # removed, which only takes <= r-1 rows for skinny columns; otherwise any
    # disconnection must separate two column vertices, because rows keep all
    # their incident edges (columns are never removed).
    for c, rows in enumerate(g.adjacency):
        if len(rows) <= r - 1:
            return False, tuple(rows)
    for s, t in combinations(range(g.col_count), 2):
        cut = _pair_min_cut(g, s, t, r - 1)
        if cut is not None:
            return False, tuple(sorted(cut))
    return True, None
