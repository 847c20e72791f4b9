"""Qubit-connectivity graphs: finite heavy-hexagon devices, the 10-site
translation cell of the infinite lattice, and small test fixtures."""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import InvalidArgument

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..num_vertices-1``.

    ``coords`` optionally holds a ``(row, col)`` drawing position per vertex;
    heavy-hex builders fill it in, fixtures leave it empty.
    """

    num_vertices: int
    edges: tuple[Edge, ...]
    name: str = ""
    coords: tuple[tuple[int, int], ...] = ()
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InvalidArgument("graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidArgument(f"self-loop at {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InvalidArgument(f"edge {(u, v)} out of range")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise InvalidArgument(f"duplicate edge {e}")
            norm.add(e)
        edges = tuple(sorted(norm))
        object.__setattr__(self, "edges", edges)
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        if not is_connected(self):
            raise InvalidArgument("graph is not connected")

    @property
    def m(self) -> int:
        return self.num_vertices

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max(len(a) for a in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def digest(self) -> str:
        """Stable hash of the vertex count and edge set."""
        return hashlib.sha256(to_edge_list(self).encode()).hexdigest()[:16]


def is_connected(g: Graph) -> bool:
    seen = {0}
    todo = [0]
    while todo:
        u = todo.pop()
        for w in g.adjacency[u]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == g.num_vertices


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.num_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def girth(g: Graph) -> float:
    """Length of the shortest cycle, ``inf`` for a forest."""
    best = float("inf")
    for s in range(g.num_vertices):
        dist = [-1] * g.num_vertices
        parent = [-1] * g.num_vertices
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in g.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.num_vertices
    color[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if color[w] < 0:
                color[w] = 1 - color[u]
                queue.append(w)
            elif color[w] == color[u]:
                return False
    return True


def local_tree_radius(g: Graph, v: int) -> int:
    """Largest ``r`` such that the ball of radius ``r`` around ``v`` has no cycle.

    If the whole component is acyclic the answer is the eccentricity of ``v``.
    """
    if not 0 <= v < g.num_vertices:
        raise InvalidArgument(f"vertex {v} not in graph")
    dist = bfs_distances(g, v)
    ecc = max(dist)
    for r in range(1, ecc + 1):
        inside = [u for u in range(g.num_vertices) if dist[u] <= r]
        inside_set = set(inside)
        n_edges = sum(1 for a, b in g.edges if a in inside_set and b in inside_set)
        # a connected ball is a tree iff |E| == |V| - 1
        if n_edges != len(inside) - 1:
            return r - 1
    return ecc


class HeavyHexSize(str, Enum):
    EAGLE127 = "eagle127"
    OSPREY433 = "osprey433"
    CONDOR1121 = "condor1121"


# (main rows, columns per main row)
_HEAVY_HEX_PARAMS = {
    HeavyHexSize.EAGLE127: (7, 15),
    HeavyHexSize.OSPREY433: (13, 27),
    HeavyHexSize.CONDOR1121: (21, 43),
}


def connector_offset(row: int) -> int:
    """Column offset of the connectors hanging below main row ``row``."""
    return 0 if row % 2 == 0 else 2


def heavy_hex_grid(rows: int, cols: int, name: str = "") -> Graph:
    """Heavy-hex lattice with ``rows`` main rows of ``cols`` sites.

    The first main row lacks its last site and the last main row lacks its
    first site. Between consecutive main rows sit ``(cols + 1) // 4``
    connector qubits at columns ``offset, offset + 4, ...`` with the offset
    alternating 0, 2, 0, ... Labels run left to right, top to bottom.
    """
    if cols % 4 != 3 or rows < 2:
        raise InvalidArgument("cols must be 3 mod 4 and rows >= 2")
    label: dict[tuple[int, int], int] = {}
    coords: list[tuple[int, int]] = []

    def add(pos):
        label[pos] = len(coords)
        coords.append(pos)

    for r in range(rows):
        for c in range(cols):
            if (r == 0 and c == cols - 1) or (r == rows - 1 and c == 0):
                continue
            add((2 * r, c))
        if r < rows - 1:
            for c in range(connector_offset(r), cols, 4):
                add((2 * r + 1, c))

    edges = []
    for (y, x), u in label.items():
        if y % 2 == 0:
            if (y, x + 1) in label:
                edges.append((u, label[(y, x + 1)]))
        else:
            edges.append((label[(y - 1, x)], u))
            edges.append((u, label[(y + 1, x)]))
    return Graph(len(coords), tuple(edges), name=name, coords=tuple(coords))


def build_heavy_hex(size: HeavyHexSize | str) -> Graph:
    size = HeavyHexSize(size)
    rows, cols = _HEAVY_HEX_PARAMS[size]
    return heavy_hex_grid(rows, cols, name=size.value)


@dataclass(frozen=True)
class UnitCellGraph:
    """Translation cell of the infinite heavy-hex lattice.

    ``inter_edges`` entries are ``(site_a, site_b, (dx, dy))``: site_a in cell
    ``(x, y)`` couples to site_b in cell ``(x + dx, y + dy)``.
    """

    cell_size: int
    intra_edges: tuple[Edge, ...]
    inter_edges: tuple[tuple[int, int, tuple[int, int]], ...]
    # (row, col) of each site inside the 2-main-row x 4-column block
    positions: tuple[tuple[int, int], ...]

    def degrees(self) -> list[int]:
        deg = [0] * self.cell_size
        for a, b in self.intra_edges:
            deg[a] += 1
            deg[b] += 1
        for a, b, _ in self.inter_edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def quotient(self) -> Graph:
        """Cell graph with inter-cell edges folded back onto the shared tensors.

        Every edge class appears once; this is the graph the simple update
        runs on in the translation-invariant setting.
        """
        edges = list(self.intra_edges) + [(a, b) for a, b, _ in self.inter_edges]
        return Graph(self.cell_size, tuple(edges), name="infinite",
                     coords=self.positions)

    def tile(self, nx: int, ny: int) -> Graph:
        """Open ``nx`` by ``ny`` block of cells; label = cell_index * 10 + site."""
        n = self.cell_size

        def lab(cx, cy, s):
            return (cy * nx + cx) * n + s

        edges = []
        coords = []
        for cy in range(ny):
            for cx in range(nx):
                for a, b in self.intra_edges:
                    edges.append((lab(cx, cy, a), lab(cx, cy, b)))
                for a, b, (dx, dy) in self.inter_edges:
                    tx, ty = cx + dx, cy + dy
                    if 0 <= tx < nx and 0 <= ty < ny:
                        edges.append((lab(cx, cy, a), lab(tx, ty, b)))
        for cy in range(ny):
            for cx in range(nx):
                for r, c in self.positions:
                    coords.append((4 * cy + r, 4 * cx + c))
        return Graph(n * nx * ny, tuple(edges), name=f"tile{nx}x{ny}",
                     coords=tuple(coords))


def build_unit_cell() -> UnitCellGraph:
    # Two main rows A (sites 0-3) and B (sites 5-8), four columns each.
    # Site 4 bridges A->B at column 2; site 9 bridges B->next A at column 0.
    positions = (
        (0, 0), (0, 1), (0, 2), (0, 3),
        (1, 2),
        (2, 0), (2, 1), (2, 2), (2, 3),
        (3, 0),
    )
    intra = ((0, 1), (1, 2), (2, 3), (2, 4), (4, 7), (5, 6), (6, 7), (7, 8), (5, 9))
    inter = ((3, 0, (1, 0)), (8, 5, (1, 0)), (9, 0, (0, 1)))
    return UnitCellGraph(10, intra, inter, positions)


def to_edge_list(g: Graph) -> str:
    lines = [f"m {g.num_vertices}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str, name: str = "") -> Graph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("m "):
        raise InvalidArgument("edge list must start with 'm <count>'")
    m = int(lines[0].split()[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InvalidArgument(f"bad edge line: {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(m, tuple(edges), name=name)


FIXTURES = ("path8", "tree10", "ring12hex", "patch20")


def load_fixture(name: str) -> Graph:
    if name not in FIXTURES:
        raise InvalidArgument(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("gpeps.fixtures").joinpath(f"{name}.txt").read_text()
    return parse_edge_list(text, name=name)


def read_edge_list(path: str | Path) -> Graph:
    path = Path(path)
    return parse_edge_list(path.read_text(), name=path.stem)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    keep = sorted(set(vertices))
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    coords = tuple(g.coords[v] for v in keep) if g.coords else ()
    return Graph(len(keep), tuple(edges), coords=coords)
