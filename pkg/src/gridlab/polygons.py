"""Empty rectangles, pentagons and hexagons.

Pentagons and hexagons live in the combined diagram of a cross-commutation
pair: both grids drawn on one torus with the markings fixed, the
distinguished vertical circle of G+ drawn straight (``beta``) and that of
G- drawn as a weaving curve (``gamma``).  Every admissible polygon is a
region between two height profiles: a straight side on an ordinary vertical
circle and a composite side that runs along beta and gamma, switching at
the distinguished intersection points.

All geometry is exact integer arithmetic in units of 1/16:

* vertical circles at ``16 j``; beta at ``16 (c+1)``;
* gamma at ``16c + 6`` (west bulge) or ``16c + 26`` (east bulge);
* marking centres at ``16 k + 8``;
* beta/gamma crossings at heights ``16 r + 12`` just above marking row r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .grid import (
    CrossCommutation,
    GridDiagram,
    apply_column_swap,
    designate_plus,
    detect_cross_commutation,
    rotate_columns,
)

SCALE = 16
State = Tuple[int, ...]


def _cyc(v: int, lo: int, period: int) -> int:
    return (v - lo) % period


# ---------------------------------------------------------------- rectangles

@dataclass(frozen=True)
class Rect:
    source: State
    target: State
    left: int           # column of the west side
    right: int          # column of the east side (reached eastward from left)
    bottom: int         # row of the south side
    top: int            # row of the north side (reached northward from bottom)
    o_count: Tuple[int, ...]   # indexed by the row of the O marking
    x_count: Tuple[int, ...]   # indexed by the row of the X marking

    @property
    def h_wrap(self) -> bool:
        return self.right < self.left

    @property
    def v_wrap(self) -> bool:
        return self.top < self.bottom

    @property
    def num_o(self) -> int:
        return sum(self.o_count)

    @property
    def num_x(self) -> int:
        return sum(self.x_count)


def _rect_markings(g: GridDiagram, a: int, b: int, lo: int, hi: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    n = g.n
    width = _cyc(b, a, n)
    height = _cyc(hi, lo, n)
    oc = [0] * n
    xc = [0] * n
    for k in range(width):
        col = (a + k) % n
        if _cyc(g.o_rows[col], lo, n) < height:
            oc[g.o_rows[col]] = 1
        if _cyc(g.x_rows[col], lo, n) < height:
            xc[g.x_rows[col]] = 1
    return tuple(oc), tuple(xc)


def _rect_if_empty(g: GridDiagram, x: State, a: int, b: int) -> Optional[Rect]:
    n = g.n
    lo, hi = x[a], x[b]
    width = _cyc(b, a, n)
    height = _cyc(hi, lo, n)
    for k in range(1, width):
        col = (a + k) % n
        if 0 < _cyc(x[col], lo, n) < height:
            return None
    y = list(x)
    y[a], y[b] = x[b], x[a]
    oc, xc = _rect_markings(g, a, b, lo, hi)
    return Rect(tuple(x), tuple(y), a, b, lo, hi, oc, xc)


def empty_rectangles(g: GridDiagram, x: State, y: State) -> List[Rect]:
    """The empty rectangles from ``x`` to ``y`` (zero, one or two)."""
    diff = [j for j in range(g.n) if x[j] != y[j]]
    if len(diff) != 2:
        return []
    i, j = diff
    if x[i] != y[j] or x[j] != y[i]:
        return []
    out = []
    for a, b in ((i, j), (j, i)):
        r = _rect_if_empty(g, x, a, b)
        if r is not None:
            out.append(r)
    return out


def rectangles_from(g: GridDiagram, x: State) -> List[Rect]:
    """Every empty rectangle starting at ``x``."""
    out = []
    n = g.n
    for i in range(n):
        for j in range(i + 1, n):
            for a, b in ((i, j), (j, i)):
                r = _rect_if_empty(g, x, a, b)
                if r is not None:
                    out.append(r)
    return out


# ---------------------------------------------------------- combined diagram

class CombinedDiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Marking:
    x: int      # centre, 1/16 units
    y: int
    kind: str   # "X" or "O"
    row: int


@dataclass
class CombinedDiagram:
    """Planar model of a cross-commutation pair (normalized coordinates).

    ``plus``/``minus`` are the normalized grids; ``rotation`` columns were
    added (mod n) to the caller's grids to keep the swapped pair off the
    seam.  Band ``k`` lies between crossings ``k-1`` and ``k`` and contains
    the marking of row ``marking_rows[k]``.
    """

    plus: GridDiagram
    minus: GridDiagram
    original_plus: GridDiagram
    original_minus: GridDiagram
    rotation: int
    c: int
    marking_rows: Tuple[int, int, int, int]
    marking_cols: Tuple[int, int, int, int]     # 0 = column c, 1 = column c+1
    marking_kinds: Tuple[str, str, str, str]
    crossing_heights: Tuple[int, int, int, int]
    gamma_x: Tuple[int, int, int, int]
    s_index: int
    t_index: int
    o1_row: int
    o2_row: int
    plus_is_a: bool
    markings: Tuple[Marking, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.plus.n

    @property
    def period(self) -> int:
        return SCALE * self.n

    @property
    def beta_x(self) -> int:
        return SCALE * (self.c + 1)

    @property
    def s_height(self) -> int:
        return self.crossing_heights[self.s_index]

    @property
    def t_height(self) -> int:
        return self.crossing_heights[self.t_index]

    def band_of(self, y: int) -> int:
        """Band containing height ``y`` (``y`` must not be a crossing height)."""
        P = self.period
        h = self.crossing_heights
        for k in range(4):
            lo, hi = h[k - 1], h[k]
            if 0 < _cyc(y, lo, P) < _cyc(hi, lo, P) or (lo == hi):
                return k
        raise ValueError(f"height {y} is a crossing height")

    def gamma_at(self, y: int) -> int:
        return self.gamma_x[self.band_of(y)]

    def band_of_row(self, r: int) -> int:
        return self.band_of(SCALE * r)

    def to_normalized(self, sigma: State) -> State:
        n, k = self.n, self.rotation
        out = [0] * n
        for j in range(n):
            out[(j + k) % n] = sigma[j]
        return tuple(out)

    def from_normalized(self, sigma: State) -> State:
        n, k = self.n, self.rotation
        return tuple(sigma[(j + k) % n] for j in range(n))

    def describe(self) -> str:
        lines = [
            f"n={self.n} c={self.c} rotation={self.rotation} plus_is_a={self.plus_is_a}",
            f"marking rows={list(self.marking_rows)} kinds={list(self.marking_kinds)} cols={list(self.marking_cols)}",
            f"crossing heights (1/16)={list(self.crossing_heights)} gamma_x={list(self.gamma_x)}",
            f"s=crossing {self.s_index} t=crossing {self.t_index} O1 row={self.o1_row} O2 row={self.o2_row}",
        ]
        return "\n".join(lines)


def _normalize(a: GridDiagram, b: GridDiagram, w: CrossCommutation) -> Tuple[GridDiagram, GridDiagram, int, int]:
    n = a.n
    c = w.column
    rot = 0
    if c == n - 1:
        rot = 1
    a2, b2 = rotate_columns(a, rot), rotate_columns(b, rot)
    c2 = (c + rot) % n
    assert c2 + 1 <= n - 1 and apply_column_swap(a2, c2) == b2
    return a2, b2, c2, rot


def build_combined(a: GridDiagram, b: GridDiagram, s_rule: str = "o2") -> CombinedDiagram:
    """Canonical combined diagram for a cross-commutation pair.

    ``s_rule="o2"`` places ``s`` at the vertex shared by the bigon of the
    lower O marking and its X-marked neighbour; ``"o1"`` uses the upper O
    instead (kept only for auditing the labelling convention).
    """
    if a.n != b.n:
        raise CombinedDiagramError("grids of different sizes")
    w = detect_cross_commutation(a, b)
    if w is None:
        raise CombinedDiagramError("grids are not related by a column cross-commutation")
    tag, _ = designate_plus(a, b, w)
    plus_is_a = tag == "a"
    g_plus, g_minus = (a, b) if plus_is_a else (b, a)
    wp = detect_cross_commutation(g_plus, g_minus)
    assert wp is not None
    plus, minus, c, rot = _normalize(g_plus, g_minus, wp)
    n = plus.n

    tagged = []
    for off in (0, 1):
        col = c + off
        tagged.append((plus.x_rows[col], off, "X"))
        tagged.append((plus.o_rows[col], off, "O"))
    tagged.sort()
    rows = tuple(t[0] for t in tagged)
    cols = tuple(t[1] for t in tagged)
    kinds = tuple(t[2] for t in tagged)
    if cols not in ((0, 1, 0, 1), (1, 0, 1, 0)):
        raise CombinedDiagramError("marking rows do not interleave")

    heights = tuple(SCALE * r + 12 for r in rows)
    gamma = tuple(SCALE * c + (6 if off == 0 else 26) for off in cols)

    xb = [k for k in range(4) if kinds[k] == "X"]
    ob = [k for k in range(4) if kinds[k] == "O"]
    # band k is bounded by crossing k-1 below and crossing k above
    if (xb[0] + 1) % 4 == xb[1]:
        t_index = xb[0]
    elif (xb[1] + 1) % 4 == xb[0]:
        t_index = xb[1]
    else:
        raise CombinedDiagramError("X bigons are not adjacent")
    o_rows_sorted = sorted(rows[k] for k in ob)
    o2_row, o1_row = o_rows_sorted[0], o_rows_sorted[1]
    anchor_row = o2_row if s_rule == "o2" else o1_row
    anchor = rows.index(anchor_row)
    if kinds[(anchor + 1) % 4] == "X":
        s_index = anchor
    elif kinds[(anchor - 1) % 4] == "X":
        s_index = (anchor - 1) % 4
    else:
        raise CombinedDiagramError("O bigon has no X neighbour")
    if s_index == t_index:
        raise CombinedDiagramError("s and t coincide")

    marks = []
    for col in range(n):
        marks.append(Marking(SCALE * col + 8, SCALE * plus.x_rows[col] + 8, "X", plus.x_rows[col]))
        marks.append(Marking(SCALE * col + 8, SCALE * plus.o_rows[col] + 8, "O", plus.o_rows[col]))

    return CombinedDiagram(
        plus=plus,
        minus=minus,
        original_plus=g_plus,
        original_minus=g_minus,
        rotation=rot,
        c=c,
        marking_rows=rows,
        marking_cols=cols,
        marking_kinds=kinds,
        crossing_heights=heights,
        gamma_x=gamma,
        s_index=s_index,
        t_index=t_index,
        o1_row=o1_row,
        o2_row=o2_row,
        plus_is_a=plus_is_a,
        markings=tuple(marks),
    )


def bigon_census(cd: CombinedDiagram) -> List[int]:
    """Number of markings inside each of the four beta/gamma bigons."""
    P = cd.period
    out = []
    for k in range(4):
        lo, hi = cd.crossing_heights[k - 1], cd.crossing_heights[k]
        xl, xr = sorted((cd.gamma_x[k], cd.beta_x))
        count = 0
        for m in cd.markings:
            if 0 < _cyc(m.y, lo, P) < _cyc(hi, lo, P) and xl < m.x < xr:
                count += 1
        out.append(count)
    return out


# ------------------------------------------------------------------ polygons

@dataclass(frozen=True)
class Polygon:
    """A rectangle-like region with one composite (beta/gamma) side.

    ``side`` says whether the composite side is the west ("L") or east
    ("R") boundary.  ``curves`` lists the curves of the composite side from
    bottom to top and ``switches`` the crossing indices where it turns,
    also bottom to top.
    """

    kind: str
    source: State
    target: State
    source_grid: str    # "plus" | "minus"
    target_grid: str
    side: str
    other_column: int
    bottom: int
    top: int
    curves: Tuple[str, ...]
    switches: Tuple[int, ...]
    o_count: Tuple[int, ...]
    x_count: Tuple[int, ...]

    @property
    def num_o(self) -> int:
        return sum(self.o_count)

    @property
    def num_x(self) -> int:
        return sum(self.x_count)

    def corner_order(self) -> Tuple[int, ...]:
        """Switch corners in boundary order (counter-clockwise traversal)."""
        return tuple(reversed(self.switches)) if self.side == "L" else self.switches


class _Profile:
    """Height profile of one candidate polygon (1/16 units, lifted to the cover)."""

    def __init__(self, cd: CombinedDiagram, side: str, other: int, bottom: int, top: int,
                 curves: Sequence[str], switch_heights: Sequence[int]):
        self.cd = cd
        P = cd.period
        self.side = side
        self.yb = SCALE * bottom
        self.length = _cyc(SCALE * top, self.yb, P)
        self.yt = self.yb + self.length
        self.curves = tuple(curves)
        self.switch_heights = tuple(switch_heights)
        ox = SCALE * other
        if side == "L":
            self.other_x = ox if ox > cd.beta_x else ox + P
        else:
            self.other_x = ox if ox < cd.beta_x else ox - P

    def composite_x(self, y: int) -> int:
        i = sum(1 for h in self.switch_heights if h < y)
        if self.curves[i] == "beta":
            return self.cd.beta_x
        return self.cd.gamma_at(y % self.cd.period)

    def bounds(self, y: int) -> Tuple[int, int]:
        cx = self.composite_x(y)
        return (cx, self.other_x) if self.side == "L" else (self.other_x, cx)

    def contains(self, px: int, py: int) -> bool:
        P = self.cd.period
        dy = _cyc(py, self.yb, P)
        if not 0 < dy < self.length:
            return False
        y = self.yb + dy
        lo, hi = self.bounds(y)
        pxl = lo + _cyc(px, lo, P)
        return lo < pxl < hi

    def convex_switches(self) -> bool:
        bx = self.cd.beta_x
        for i, h in enumerate(self.switch_heights):
            below = self._curve_x(self.curves[i], h - 1)
            above = self._curve_x(self.curves[i + 1], h + 1)
            if _quadrants(self.side, below, bx) + _quadrants(self.side, above, bx) != 1:
                return False
        return True

    def _curve_x(self, curve: str, y: int) -> int:
        return self.cd.beta_x if curve == "beta" else self.cd.gamma_at(y % self.cd.period)


def _quadrants(side: str, curve_x: int, px: int) -> int:
    """Quadrants at a switch point on one side (above or below) inside the region."""
    if side == "L":       # region lies east of the boundary
        return 2 if curve_x < px else (1 if curve_x == px else 0)
    return 2 if curve_x > px else (1 if curve_x == px else 0)


def _point_x(cd: CombinedDiagram, grid: str, col: int, row: int) -> int:
    if col == cd.c + 1:
        return cd.beta_x if grid == "plus" else cd.gamma_at(SCALE * row)
    return SCALE * col


def _lift_into(h: int, yb: int, P: int) -> int:
    return yb + _cyc(h, yb, P)


def _polygon_candidates(cd: CombinedDiagram, kind: str, x: State, y: State,
                        x_grid: str, y_grid: str, switch_order: Sequence[int]) -> List[Polygon]:
    n = cd.n
    k = cd.c + 1
    diff = [j for j in range(n) if x[j] != y[j]]
    if len(diff) != 2 or k not in diff:
        return []
    j = diff[0] if diff[1] == k else diff[1]
    if x[j] != y[k] or x[k] != y[j]:
        return []
    P = cd.period
    curve_of = {"plus": "beta", "minus": "gamma"}
    out = []
    for side in ("L", "R"):
        if side == "L":
            bottom, top = x[k], x[j]
            bottom_curve, top_curve = curve_of[x_grid], curve_of[y_grid]
        else:
            bottom, top = x[j], x[k]
            bottom_curve, top_curve = curve_of[y_grid], curve_of[x_grid]
        yb = SCALE * bottom
        length = _cyc(SCALE * top, yb, P)
        lifted = [_lift_into(cd.crossing_heights[s], yb, P) for s in switch_order]
        if any(h >= yb + length for h in lifted):
            continue
        order = sorted(range(len(lifted)), key=lambda i: lifted[i])
        heights = [lifted[i] for i in order]
        switches = tuple(switch_order[i] for i in order)
        if len(switch_order) == 1:
            curves = (bottom_curve, top_curve)
            if bottom_curve == top_curve:
                continue
        else:
            if bottom_curve != top_curve:
                continue
            mid = "gamma" if bottom_curve == "beta" else "beta"
            curves = (bottom_curve, mid, top_curve)
        prof = _Profile(cd, side, j, bottom, top, curves, heights)
        if not prof.convex_switches():
            continue
        empty = True
        for col in range(n):
            if col in (j, k):
                continue
            if prof.contains(SCALE * col, SCALE * x[col]):
                empty = False
                break
        if not empty:
            continue
        oc = [0] * n
        xc = [0] * n
        for m in cd.markings:
            if prof.contains(m.x, m.y):
                (oc if m.kind == "O" else xc)[m.row] += 1
        out.append(Polygon(kind, tuple(x), tuple(y), x_grid, y_grid, side, j, bottom, top,
                           curves, switches, tuple(oc), tuple(xc)))
    return out


def pentagons(cd: CombinedDiagram, vertex: str, x: State, y: State) -> List[Polygon]:
    """Empty pentagons with fifth corner at ``s`` (G+ -> G-) or ``t`` (G- -> G+).

    States are in the diagram's normalized coordinates.
    """
    if vertex == "s":
        return _polygon_candidates(cd, "pentagon_s", x, y, "plus", "minus", [cd.s_index])
    if vertex == "t":
        return _polygon_candidates(cd, "pentagon_t", x, y, "minus", "plus", [cd.t_index])
    raise ValueError(f"vertex must be 's' or 't', got {vertex!r}")


def hexagons(cd: CombinedDiagram, order: str, x: State, y: State) -> List[Polygon]:
    """Empty hexagons with consecutive corners s,t ("st", on G-) or t,s ("ts", on G+)."""
    if order == "st":
        grid, first, second = "minus", cd.s_index, cd.t_index
    elif order == "ts":
        grid, first, second = "plus", cd.t_index, cd.s_index
    else:
        raise ValueError(f"order must be 'st' or 'ts', got {order!r}")
    found = _polygon_candidates(cd, "hexagon_" + order, x, y, grid, grid, [cd.s_index, cd.t_index])
    return [p for p in found if p.corner_order() == (first, second)]


def polygons_from(cd: CombinedDiagram, kind: str, x: State) -> List[Polygon]:
    """All polygons of ``kind`` starting at ``x`` (normalized coordinates)."""
    n = cd.n
    k = cd.c + 1
    out = []
    for j in range(n):
        if j == k:
            continue
        y = list(x)
        y[j], y[k] = x[k], x[j]
        y = tuple(y)
        if kind == "pentagon_s":
            out.extend(pentagons(cd, "s", x, y))
        elif kind == "pentagon_t":
            out.extend(pentagons(cd, "t", x, y))
        elif kind == "hexagon_st":
            out.extend(hexagons(cd, "st", x, y))
        elif kind == "hexagon_ts":
            out.extend(hexagons(cd, "ts", x, y))
        else:
            raise ValueError(kind)
    return out


# ---------------------------------------------------------------- raster/debug

def micro_breaks(cd: CombinedDiagram) -> Tuple[List[int], List[int]]:
    """Breakpoints of the micro-grid refining every curve of the diagram."""
    xs = sorted({SCALE * j for j in range(cd.n)} | {SCALE * cd.c + 6, SCALE * cd.c + 26})
    ys = sorted({SCALE * r for r in range(cd.n)} | set(cd.crossing_heights))
    return xs, ys


def rasterize(cd: CombinedDiagram, p: Polygon) -> frozenset:
    """Micro-cells ``(i, k)`` whose centre lies inside ``p``."""
    xs, ys = micro_breaks(cd)
    P = cd.period
    prof = _Profile(cd, p.side, p.other_column, p.bottom, p.top, p.curves,
                    [_lift_into(cd.crossing_heights[s], SCALE * p.bottom, P) for s in p.switches])
    cells = set()
    for i in range(len(xs)):
        x0, x1 = xs[i], xs[i + 1] if i + 1 < len(xs) else xs[0] + P
        for k in range(len(ys)):
            y0, y1 = ys[k], ys[k + 1] if k + 1 < len(ys) else ys[0] + P
            # centres land on odd 1/32 positions; compare doubled coordinates
            if prof_contains_doubled(prof, x0 + x1, y0 + y1):
                cells.add((i, k))
    return frozenset(cells)


def prof_contains_doubled(prof: _Profile, px2: int, py2: int) -> bool:
    P2 = 2 * prof.cd.period
    yb2 = 2 * prof.yb
    dy = (py2 - yb2) % P2
    if not 0 < dy < 2 * prof.length:
        return False
    y2 = yb2 + dy
    # the profile only changes at even 1/32 heights, so evaluate just below y2
    lo, hi = prof.bounds((y2 - 1) // 2) if y2 % 2 else prof.bounds(y2 // 2)
    lo2, hi2 = 2 * lo, 2 * hi
    pxl = lo2 + (px2 - lo2) % P2
    return lo2 < pxl < hi2


def dump_polygon(cd: CombinedDiagram, p: Polygon) -> str:
    """Text dump: kind, corners and the band profile table."""
    P = cd.period
    lines = [f"kind {p.kind}", f"from {p.source_grid} {list(p.source)}", f"to {p.target_grid} {list(p.target)}",
             f"side {p.side} other_column {p.other_column} rows {p.bottom}->{p.top}",
             f"curves {'/'.join(p.curves)} switches {list(p.switches)}",
             f"O {list(p.o_count)} X {list(p.x_count)}"]
    prof = _Profile(cd, p.side, p.other_column, p.bottom, p.top, p.curves,
                    [_lift_into(cd.crossing_heights[s], SCALE * p.bottom, P) for s in p.switches])
    cuts = sorted({prof.yb, prof.yt} | {h for h in prof.switch_heights}
                  | {_lift_into(h, prof.yb, P) for h in cd.crossing_heights if _lift_into(h, prof.yb, P) < prof.yt})
    for lo, hi in zip(cuts, cuts[1:]):
        left, right = prof.bounds((lo + hi) // 2)
        lines.append(f"band [{lo},{hi}] x in ({left},{right})")
    return "\n".join(lines)
