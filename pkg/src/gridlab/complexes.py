"""Grid chain complexes, crossing-change maps and their verification.

Everything here is checked by exact composition of ring-linear maps over
F2[V_1..V_n]; nothing is taken on faith from the combinatorics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .algebra import (
    ModuleMap,
    Poly,
    add,
    compose,
    graded_part,
    identity,
    poly_str,
    sum_maps,
    variable,
)
from .grid import GridDiagram, require_knot
from .polygons import (
    CombinedDiagram,
    Polygon,
    _rect_markings,
    build_combined,
    polygons_from,
    rectangles_from,
)
from .states import grading_table, state_index, state_list

FLAVORS = ("unblocked", "filtered", "tilde")

# dH + Hd must match the (-2, -1) shift of C+ C- and V_1, and d lowers M by one
HOMOTOPY_DEGREE = (-1, 0)


class ComplexError(RuntimeError):
    """A differential fails to square to zero."""


class VerificationError(RuntimeError):
    """A crossing-change identity failed; carries the report."""

    def __init__(self, report: "Report"):
        super().__init__(report.summary())
        self.report = report


@dataclass
class Report:
    name: str
    passed: bool
    witness: Optional[dict] = None
    histogram: Dict[Tuple[int, int], int] = field(default_factory=dict)
    detail: str = ""

    def summary(self) -> str:
        s = f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
        if self.detail:
            s += f" ({self.detail})"
        if self.witness:
            s += f" witness={self.witness}"
        return s

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness,
            "histogram": {f"{m},{a}": k for (m, a), k in sorted(self.histogram.items())},
            "detail": self.detail,
        }


@dataclass
class GridComplex:
    grid: GridDiagram
    flavor: str
    differential: ModuleMap
    gradings: Tuple[Tuple[int, int], ...]


def _mono(counts) -> Tuple[int, ...]:
    return tuple(counts)


def _first_nonzero(m: ModuleMap) -> Optional[dict]:
    if m.is_zero():
        return None
    states_s, states_t = state_list(m.source), state_list(m.target)
    x = min(m.cols)
    y = min(m.cols[x])
    return {"source": list(states_s[x]), "target": list(states_t[y]), "coefficient": poly_str(m.cols[x][y])}


def _columns(g: GridDiagram, flavor: str, lo: int, hi: int, max_n: int) -> Dict[int, Dict[int, Poly]]:
    states = state_list(g, max_n)
    index = state_index(g, max_n)
    zero = (0,) * g.n
    cols: Dict[int, Dict[int, Poly]] = {}
    for xi in range(lo, hi):
        col: Dict[int, set] = {}
        for r in rectangles_from(g, states[xi]):
            if flavor != "filtered" and r.num_x:
                continue
            if flavor == "tilde" and r.num_o:
                continue
            m = zero if flavor == "tilde" else _mono(r.o_count)
            bucket = col.setdefault(index[r.target], set())
            bucket ^= {m}
        if col:
            cols[xi] = {y: frozenset(p) for y, p in col.items() if p}
    return cols


def differential_map(g: GridDiagram, flavor: str, max_n: Optional[int] = None, jobs: int = 1) -> ModuleMap:
    """Rectangle-counting differential; ``jobs > 1`` splits source states over processes."""
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    total = len(state_list(g, max_n))
    if jobs <= 1:
        cols = _columns(g, flavor, 0, total, max_n)
    else:
        from concurrent.futures import ProcessPoolExecutor

        step = -(-total // jobs)
        bounds = [(lo, min(total, lo + step)) for lo in range(0, total, step)]
        cols = {}
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_columns, g, flavor, lo, hi, max_n) for lo, hi in bounds]
            for f in futs:
                cols.update(f.result())
    mode = "filtered" if flavor == "filtered" else "graded"
    return ModuleMap(g, g, cols, degree=(-1, 0), mode=mode, name=f"d[{flavor}]")


def differential(g: GridDiagram, flavor: str = "unblocked", max_n: Optional[int] = None,
                 jobs: int = 1) -> GridComplex:
    """Build and check a grid complex (raises ComplexError if d^2 != 0)."""
    require_knot(g)
    d = differential_map(g, flavor, max_n, jobs)
    d.check_degree()
    dd = compose(d, d)
    if not dd.is_zero():
        raise ComplexError(f"d^2 != 0 for flavor {flavor}: {_first_nonzero(dd)}")
    return GridComplex(g, flavor, d, grading_table(g, max_n))


# ---------------------------------------------------------------- verifiers

def verify_chain_map(f: ModuleMap, src: GridComplex, tgt: GridComplex) -> Report:
    """Check ``d_tgt o f + f o d_src = 0``."""
    lhs = add(compose(f, tgt.differential), compose(src.differential, f))
    w = _first_nonzero(lhs)
    return Report(f"chain map {f.name}", w is None, w)


def verify_degrees(f: ModuleMap, claimed: Tuple[int, int]) -> Report:
    """Every term must shift M by exactly ``claimed[0]`` and A by at most ``claimed[1]``."""
    hist = f.shift_stats()
    m, t = claimed
    bad = [(dm, da) for (dm, da) in hist if dm != m or da > t]
    witness = None
    if bad:
        gs, gt = grading_table(f.source), grading_table(f.target)
        ss, st = state_list(f.source), state_list(f.target)
        for x, y, mono in f.terms():
            dm = gt[y][0] - 2 * sum(mono) - gs[x][0]
            da = gt[y][1] - sum(mono) - gs[x][1]
            if (dm, da) in bad:
                witness = {"source": list(ss[x]), "target": list(st[y]), "shift": [dm, da]}
                break
    return Report(f"degree {f.name} ({m}, <={t})", not bad, witness, hist)


def homotopy_residual(d: ModuleMap, h: ModuleMap, a: ModuleMap, b: ModuleMap, v: Poly) -> ModuleMap:
    """``d H + H d + b o a + v * id`` (``a`` applied first)."""
    parts = [compose(h, d), compose(d, h), compose(a, b), identity(d.source, v)]
    return sum_maps(parts)


@dataclass
class CrossingPackage:
    cd: CombinedDiagram
    plus: GridComplex          # filtered complexes, caller's coordinates
    minus: GridComplex
    C_minus: ModuleMap
    C_plus: ModuleMap
    H_minus: ModuleMap
    H_plus: ModuleMap
    v1: int                    # O row carrying the variable V_1
    reports: List[Report] = field(default_factory=list)
    s_rule: str = "o2"

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def report_json(self) -> dict:
        return {
            "plus": self.plus.grid.serialize(),
            "minus": self.minus.grid.serialize(),
            "column": (self.cd.c - self.cd.rotation) % self.cd.n,
            "v1_row": self.v1,
            "s_rule": self.s_rule,
            "checks": [r.to_json() for r in self.reports],
            "passed": self.passed,
        }


def _polygon_map(cd: CombinedDiagram, kind: str, src: GridDiagram, tgt: GridDiagram,
                 degree: Tuple[int, int], name: str) -> Tuple[ModuleMap, List[Polygon]]:
    states = state_list(src)
    tindex = state_index(tgt)
    cols: Dict[int, Dict[int, Poly]] = {}
    found = []
    for xi, x in enumerate(states):
        col: Dict[int, set] = {}
        for p in polygons_from(cd, kind, cd.to_normalized(x)):
            found.append(p)
            yi = tindex[cd.from_normalized(p.target)]
            col.setdefault(yi, set()).symmetric_difference_update({tuple(p.o_count)})
        if col:
            cols[xi] = {y: frozenset(q) for y, q in col.items() if q}
    return ModuleMap(src, tgt, cols, degree=degree, mode="filtered", name=name), found


def build_maps(cd: CombinedDiagram) -> Dict[str, ModuleMap]:
    gp, gm = cd.original_plus, cd.original_minus
    cm, _ = _polygon_map(cd, "pentagon_s", gp, gm, (0, 0), "C-")
    cp, _ = _polygon_map(cd, "pentagon_t", gm, gp, (-2, -1), "C+")
    hm, _ = _polygon_map(cd, "hexagon_st", gm, gm, HOMOTOPY_DEGREE, "H-")
    hp, _ = _polygon_map(cd, "hexagon_ts", gp, gp, HOMOTOPY_DEGREE, "H+")
    return {"C_minus": cm, "C_plus": cp, "H_minus": hm, "H_plus": hp}


def verify_homotopy(pkg: CrossingPackage) -> List[Report]:
    v = variable(pkg.cd.n, pkg.v1)
    out = []
    for name, cx, h, a, b in (
        ("homotopy on G+: dH+ + H+d + C+C- + V1", pkg.plus, pkg.H_plus, pkg.C_minus, pkg.C_plus),
        ("homotopy on G-: dH- + H-d + C-C+ + V1", pkg.minus, pkg.H_minus, pkg.C_plus, pkg.C_minus),
    ):
        res = homotopy_residual(cx.differential, h, a, b, v)
        w = _first_nonzero(res)
        out.append(Report(name, w is None, w))
    return out


def run_checks(pkg: CrossingPackage) -> List[Report]:
    reports = [
        verify_chain_map(pkg.C_minus, pkg.plus, pkg.minus),
        verify_chain_map(pkg.C_plus, pkg.minus, pkg.plus),
        verify_degrees(pkg.C_minus, (0, 0)),
        verify_degrees(pkg.C_plus, (-2, -1)),
        verify_degrees(pkg.H_minus, HOMOTOPY_DEGREE),
        verify_degrees(pkg.H_plus, HOMOTOPY_DEGREE),
    ]
    reports.extend(verify_homotopy(pkg))
    return reports


def crossing_package(a: GridDiagram, b: GridDiagram, strict: bool = True) -> CrossingPackage:
    """Crossing-change maps and homotopies for a cross-commutation pair.

    The verifiers always run.  If the default choice of ``s`` fails, the
    alternative choice is tried and recorded in ``s_rule``; with
    ``strict`` a remaining failure raises VerificationError.
    """
    require_knot(a)
    require_knot(b)
    first = None
    for rule in ("o2", "o1"):
        try:
            cd = build_combined(a, b, s_rule=rule)
        except ValueError:
            if rule == "o2":
                raise
            continue
        plus = differential(cd.original_plus, "filtered")
        minus = differential(cd.original_minus, "filtered")
        maps = build_maps(cd)
        pkg = CrossingPackage(cd, plus, minus, v1=cd.o1_row, s_rule=rule, **maps)
        pkg.reports = run_checks(pkg)
        if pkg.passed:
            return pkg
        if first is None:
            first = pkg
    if strict:
        bad = next(r for r in first.reports if not r.passed)
        raise VerificationError(bad)
    return first


def package_from_parts(cd: CombinedDiagram, maps: Dict[str, ModuleMap]) -> CrossingPackage:
    """Package with caller-supplied maps (used to audit corrupted maps)."""
    plus = differential(cd.original_plus, "filtered")
    minus = differential(cd.original_minus, "filtered")
    pkg = CrossingPackage(cd, plus, minus, v1=cd.o1_row, **maps)
    pkg.reports = run_checks(pkg)
    return pkg


def graded_package_reports(pkg: CrossingPackage) -> List[Report]:
    """Associated-graded versions of the identities on the unblocked complexes."""
    up = differential(pkg.cd.original_plus, "unblocked")
    um = differential(pkg.cd.original_minus, "unblocked")
    cm = graded_part(pkg.C_minus, 0)
    cp = graded_part(pkg.C_plus, -1)
    hp = graded_part(pkg.H_plus, -1)
    hm = graded_part(pkg.H_minus, -1)
    v = variable(pkg.cd.n, pkg.v1)
    out = [verify_chain_map(cm, up, um), verify_chain_map(cp, um, up)]
    for name, cx, h, a, b in (("graded homotopy on G+", up, hp, cm, cp), ("graded homotopy on G-", um, hm, cp, cm)):
        w = _first_nonzero(homotopy_residual(cx.differential, h, a, b, v))
        out.append(Report(name, w is None, w))
    return out


# ------------------------------------------------------------ local tables

TABLE_S = {"A": (-1, -1, -1, 0, 0), "B": (0, 1, 0, 0, 0), "C": (0, 1, 1, 0, 0), "D": (0, 1, 0, 0, 0)}
TABLE_T = {"A": (1, 1, 1, -2, -1), "B": (0, -1, 0, -2, -1), "C": (0, -1, -1, -2, -1), "D": (0, -1, 0, -2, -1)}


def band_classes(cd: CombinedDiagram) -> Dict[int, str]:
    """Position class of each band between consecutive beta/gamma crossings.

    The two O bigons meet at the one crossing that is neither ``s`` nor
    ``t``; A is the O band directly above it, and B, C, D follow upward
    (so B and C are the X bands below and above ``t``).
    """
    third = ({0, 1, 2, 3} - {cd.s_index, cd.t_index})
    oo = next(k for k in third if cd.marking_kinds[k] == "O" and cd.marking_kinds[(k + 1) % 4] == "O")
    a = (oo + 1) % 4
    return {(a + i) % 4: "ABCD"[i] for i in range(4)}


@dataclass(frozen=True)
class TableRow:
    kind: str
    label: str
    delta_r: int
    delta_m: int
    delta_a: int
    m_shift: int
    a_shift: int


def _rect_o_total(g: GridDiagram, p: Polygon, c1: int) -> int:
    if p.side == "L":
        a, b, lo, hi = c1, p.other_column, p.bottom, p.top
    else:
        a, b, lo, hi = p.other_column, c1, p.bottom, p.top
    oc, _ = _rect_markings(g, a, b, lo, hi)
    return sum(oc)


def table_rows(cd: CombinedDiagram, vertex: str, classes: Optional[Dict[int, str]] = None) -> List[TableRow]:
    """Local grading changes for every empty pentagon at ``vertex`` (normalized coords)."""
    from .states import gradings

    classes = band_classes(cd) if classes is None else classes
    c1 = cd.c + 1
    if vertex == "s":
        kind, src, tgt, ref = "pentagon_s", cd.plus, cd.minus, cd.plus
    else:
        kind, src, tgt, ref = "pentagon_t", cd.minus, cd.plus, cd.minus
    out = []
    for x in state_list(src):
        for p in polygons_from(cd, kind, x):
            y = p.target
            mt, _, at = gradings(tgt, y)
            mr, _, ar = gradings(ref, y)
            ms, _, as_ = gradings(src, x)
            o_p = sum(p.o_count)
            o_r = _rect_o_total(ref, p, c1)
            label = classes[cd.band_of_row(y[c1])]
            out.append(TableRow(kind, label, o_p - o_r, mt - mr, int(at - ar),
                                mt - 2 * o_p - ms, int(at - o_p - as_)))
    return out


def check_tables(cd: CombinedDiagram) -> Report:
    bad = None
    count = 0
    for vertex, table, m_total, a_bound in (("s", TABLE_S, 0, 0), ("t", TABLE_T, -2, -1)):
        for row in table_rows(cd, vertex):
            count += 1
            want = table[row.label]
            got = (row.delta_r, row.delta_m, row.delta_a)
            if got != want[:3] or row.m_shift != m_total or row.a_shift > a_bound:
                bad = {"kind": row.kind, "class": row.label, "got": [*got, row.m_shift, row.a_shift],
                       "expected": list(want)}
                break
        if bad:
            break
    return Report("pentagon tables", bad is None, bad, detail=f"{count} pentagons")
