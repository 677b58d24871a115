"""Brute-force polygon oracle on the curve arrangement of a combined diagram.

Independent of the profile enumerator in ``polygons``: the torus is cut
into micro-cells by every alpha, beta and gamma curve; candidate
boundaries are closed walks along the curves through a prescribed corner
set, and each walk is kept only if the 2-chain it bounds is an embedded,
empty disk with convex corners exactly at the prescribed points and with
alpha-boundary ``y - x``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .polygons import SCALE, CombinedDiagram, micro_breaks
from .states import state_list

Vertex = Tuple[int, int]
Cell = Tuple[int, int]


@dataclass(frozen=True)
class OraclePolygon:
    kind: str
    source: Tuple[int, ...]
    target: Tuple[int, ...]
    cells: FrozenSet[Cell]
    o_rows: Tuple[int, ...]


class Arrangement:
    def __init__(self, cd: CombinedDiagram):
        self.cd = cd
        self.xs, self.ys = micro_breaks(cd)
        self.NX, self.NY = len(self.xs), len(self.ys)
        self.xi = {x: i for i, x in enumerate(self.xs)}
        self.yi = {y: k for k, y in enumerate(self.ys)}
        self.curves: Dict[str, List[Vertex]] = {}
        n = cd.n
        for r in range(n):
            k = self.yi[SCALE * r]
            self.curves[f"a{r}"] = [(i, k) for i in range(self.NX)]
        for j in range(n):
            i = self.xi[SCALE * j]
            self.curves[f"b{j}"] = [(i, k) for k in range(self.NY)]
        self.curves["g"] = self._gamma()
        self.position = {name: {v: p for p, v in enumerate(vs)} for name, vs in self.curves.items()}

    def _gamma(self) -> List[Vertex]:
        cd = self.cd
        hk = [self.yi[h] for h in cd.crossing_heights]
        gi = [self.xi[x] for x in cd.gamma_x]
        out: List[Vertex] = []
        for b in range(4):
            k = hk[b - 1]
            i = gi[b]
            while k != hk[b]:
                out.append((i, k))
                k = (k + 1) % self.NY
            nxt = gi[(b + 1) % 4]
            step = 1 if nxt > i else -1
            while i != nxt:
                out.append((i, k))
                i += step
        return out

    # -- points of the diagram
    def state_vertex(self, grid: str, col: int, row: int) -> Vertex:
        cd = self.cd
        if col == cd.c + 1 and grid == "minus":
            x = cd.gamma_at(SCALE * row)
        else:
            x = SCALE * col
        return (self.xi[x], self.yi[SCALE * row])

    def state_curves(self, grid: str, col: int, row: int) -> Tuple[str, str]:
        vert = "g" if (col == self.cd.c + 1 and grid == "minus") else f"b{col}"
        return (f"a{row}", vert)

    def crossing_vertex(self, idx: int) -> Vertex:
        return (self.xi[self.cd.beta_x], self.yi[self.cd.crossing_heights[idx]])

    # -- walks
    def arcs(self, curve: str, u: Vertex, v: Vertex) -> List[List[Vertex]]:
        verts = self.curves[curve]
        pos = self.position[curve]
        L = len(verts)
        pu, pv = pos[u], pos[v]
        fwd = [verts[(pu + t) % L] for t in range((pv - pu) % L + 1)]
        bwd = [verts[(pu - t) % L] for t in range((pu - pv) % L + 1)]
        return [fwd, bwd]

    def edge_chain(self, walk: Sequence[Vertex]) -> Optional[Dict[Tuple[str, int, int], int]]:
        chain: Dict[Tuple[str, int, int], int] = {}
        NX, NY = self.NX, self.NY
        for a, b in zip(walk, walk[1:]):
            (i0, k0), (i1, k1) = a, b
            if k0 == k1 and (i0 + 1) % NX == i1:
                key, sgn = ("h", i0, k0), 1
            elif k0 == k1 and (i1 + 1) % NX == i0:
                key, sgn = ("h", i1, k0), -1
            elif i0 == i1 and (k0 + 1) % NY == k1:
                key, sgn = ("v", i0, k0), 1
            elif i0 == i1 and (k1 + 1) % NY == k0:
                key, sgn = ("v", i0, k1), -1
            else:
                raise AssertionError(f"non-adjacent step {a}->{b}")
            if key in chain:
                return None
            chain[key] = sgn
        return chain

    def bounded_chain(self, chain) -> Optional[Dict[Cell, int]]:
        """The 2-chain with boundary ``chain`` (left side positive), min shifted to 0."""
        NX, NY = self.NX, self.NY
        D = {(0, 0): 0}
        q = deque([(0, 0)])
        while q:
            i, k = q.popleft()
            d = D[(i, k)]
            nbrs = [
                ((i + 1) % NX, k, d - chain.get(("v", (i + 1) % NX, k), 0)),
                ((i - 1) % NX, k, d + chain.get(("v", i, k), 0)),
                (i, (k + 1) % NY, d + chain.get(("h", i, (k + 1) % NY), 0)),
                (i, (k - 1) % NY, d - chain.get(("h", i, k), 0)),
            ]
            for a, b, val in nbrs:
                if (a, b) in D:
                    if D[(a, b)] != val:
                        return None
                else:
                    D[(a, b)] = val
                    q.append((a, b))
        lo = min(D.values())
        return {c: v - lo for c, v in D.items()}

    def cells_at(self, v: Vertex) -> List[Cell]:
        i, k = v
        return [(i, k), ((i - 1) % self.NX, k), (i, (k - 1) % self.NY), ((i - 1) % self.NX, (k - 1) % self.NY)]

    def marking_cell(self, x: int, y: int) -> Cell:
        i = max(t for t, b in enumerate(self.xs) if b <= x)
        k = max(t for t, b in enumerate(self.ys) if b <= y)
        return (i, k)

    def euler_characteristic(self, cells: Set[Cell]) -> int:
        verts, edges = set(), set()
        for i, k in cells:
            i1, k1 = (i + 1) % self.NX, (k + 1) % self.NY
            verts.update([(i, k), (i1, k), (i, k1), (i1, k1)])
            edges.update([("h", i, k), ("h", i, k1), ("v", i, k), ("v", i1, k)])
        return len(verts) - len(edges) + len(cells)

    def connected(self, cells: Set[Cell]) -> bool:
        if not cells:
            return False
        start = next(iter(cells))
        seen = {start}
        q = [start]
        while q:
            i, k = q.pop()
            for c in (((i + 1) % self.NX, k), ((i - 1) % self.NX, k), (i, (k + 1) % self.NY), (i, (k - 1) % self.NY)):
                if c in cells and c not in seen:
                    seen.add(c)
                    q.append(c)
        return len(seen) == len(cells)


def _loops(arr: Arrangement, corners: List[Tuple[Vertex, Tuple[str, str]]]):
    """Closed walks visiting every corner once, turning onto the other curve at each."""
    corner_set = {v for v, _ in corners}
    start_v, start_curves = corners[0]
    for leave in start_curves:
        arrive_at_start = start_curves[1] if leave == start_curves[0] else start_curves[0]
        stack = [(start_v, leave, [start_v], {start_v})]
        while stack:
            u, curve, walk, visited = stack.pop()
            for v, vc in corners:
                if curve not in vc:
                    continue
                closing = v == start_v
                if closing:
                    if len(visited) != len(corners) or curve != arrive_at_start:
                        continue
                elif v in visited:
                    continue
                for arc in arr.arcs(curve, u, v):
                    inner = arc[1:-1]
                    if any(p in corner_set for p in inner):
                        continue
                    if any(p in walk for p in inner):
                        continue
                    new_walk = walk + arc[1:]
                    if closing:
                        yield new_walk
                    else:
                        nxt = vc[1] if vc[0] == curve else vc[0]
                        stack.append((v, nxt, new_walk, visited | {v}))


def find_polygons(arr: Arrangement, kind: str, x, y, x_grid: str, y_grid: str,
                  extra: Sequence[int]) -> List[OraclePolygon]:
    cd = arr.cd
    n = cd.n
    x_pts = {(j, x[j]) for j in range(n)}
    y_pts = {(j, y[j]) for j in range(n)}
    corners = []
    for j, r in sorted(x_pts - y_pts):
        corners.append((arr.state_vertex(x_grid, j, r), arr.state_curves(x_grid, j, r), ("x", j, r)))
    for j, r in sorted(y_pts - x_pts):
        corners.append((arr.state_vertex(y_grid, j, r), arr.state_curves(y_grid, j, r), ("y", j, r)))
    # points on the distinguished circle sit on different curves in the two grids
    k = cd.c + 1
    if x_grid != y_grid and x[k] == y[k]:
        corners.append((arr.state_vertex(x_grid, k, x[k]), arr.state_curves(x_grid, k, x[k]), ("x", k, x[k])))
        corners.append((arr.state_vertex(y_grid, k, y[k]), arr.state_curves(y_grid, k, y[k]), ("y", k, y[k])))
    for idx in extra:
        corners.append((arr.crossing_vertex(idx), ("b%d" % k, "g"), ("c", idx)))
    expected = 4 + len(extra)
    if len(corners) != expected:
        return []
    if len({c[0] for c in corners}) != len(corners):
        return []
    plain = [(v, cv) for v, cv, _ in corners]
    found: Dict[FrozenSet[Cell], OraclePolygon] = {}
    x_all = {arr.state_vertex(x_grid, j, x[j]) for j in range(n)}
    y_all = {arr.state_vertex(y_grid, j, y[j]) for j in range(n)}
    for walk in _loops(arr, plain):
        chain = arr.edge_chain(walk)
        if chain is None:
            continue
        D = arr.bounded_chain(chain)
        if D is None or any(val not in (0, 1) for val in D.values()):
            continue
        cells = {c for c, val in D.items() if val == 1}
        if not arr.connected(cells) or arr.euler_characteristic(cells) != 1:
            continue
        if any(sum(1 for c in arr.cells_at(v) if c in cells) != 1 for v, _ in plain):
            continue
        if any(all(c in cells for c in arr.cells_at(v)) for v in x_all | y_all):
            continue
        if not _alpha_boundary_ok(arr, D, x_all, y_all):
            continue
        if extra and not _crossing_order_ok(arr, walk, kind, plain):
            continue
        o_rows = [0] * n
        for m in cd.markings:
            if m.kind == "O" and arr.marking_cell(m.x, m.y) in cells:
                o_rows[m.row] += 1
        fz = frozenset(cells)
        found[fz] = OraclePolygon(kind, tuple(x), tuple(y), fz, tuple(o_rows))
    return list(found.values())


def _alpha_boundary_ok(arr: Arrangement, D: Dict[Cell, int], x_all, y_all) -> bool:
    """The alpha part of the boundary of D, as a 0-chain, must be y - x."""
    target: Dict[Vertex, int] = {}
    for v in y_all:
        target[v] = target.get(v, 0) + 1
    for v in x_all:
        target[v] = target.get(v, 0) - 1
    for r in range(arr.cd.n):
        k = arr.yi[SCALE * r]
        f = [D[(i, k)] - D[(i, (k - 1) % arr.NY)] for i in range(arr.NX)]
        for i in range(arr.NX):
            got = f[i - 1] - f[i]
            if got != target.get((i, k), 0):
                return False
    return True


def _crossing_order_ok(arr: Arrangement, walk, kind: str, plain) -> bool:
    """Hexagon corners s, t must be consecutive in the required boundary order.

    Accepted walks keep the region on their left, i.e. run counter-clockwise.
    """
    if not kind.startswith("hexagon"):
        return True
    cd = arr.cd
    s_v, t_v = arr.crossing_vertex(cd.s_index), arr.crossing_vertex(cd.t_index)
    first, second = (s_v, t_v) if kind == "hexagon_st" else (t_v, s_v)
    corner_vs = {v for v, _ in plain}
    seq = [v for v in walk[:-1] if v in corner_vs]
    i = seq.index(first)
    return seq[(i + 1) % len(seq)] == second


def oracle_polygons(cd: CombinedDiagram, kind: str) -> List[OraclePolygon]:
    """All polygons of ``kind`` over every state pair (normalized coordinates)."""
    arr = Arrangement(cd)
    spec = {
        "pentagon_s": ("plus", "minus", [cd.s_index]),
        "pentagon_t": ("minus", "plus", [cd.t_index]),
        "hexagon_st": ("minus", "minus", [cd.s_index, cd.t_index]),
        "hexagon_ts": ("plus", "plus", [cd.t_index, cd.s_index]),
    }[kind]
    xg, yg, extra = spec
    xs = state_list(cd.plus if xg == "plus" else cd.minus)
    ys = state_list(cd.plus if yg == "plus" else cd.minus)
    out = []
    for x in xs:
        for y in ys:
            out.extend(find_polygons(arr, kind, x, y, xg, yg, extra))
    return out
