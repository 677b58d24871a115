"""Bigraded homology slices, U-torsion order, tilde homology and l-bounds.

Two slice engines share one interface:

``multivariable``
    the unblocked complex over F2[V_1..V_n]; slice (d, s) is spanned by the
    monomial multiples ``V^k x`` of Maslov grading d and Alexander grading s.
    This is the ground truth.

``collapsed``
    the same complex with every V_i sent to one variable U.  Its homology is
    GH^- tensored with (n-1) copies of a two-dimensional space in bigradings
    (0,0) and (-1,-1), so it has the same torsion orders; it is far cheaper
    and is used as a cross-check with the full-depth window.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import ModuleMap, Poly, add, compose, identity, scale, slice_basis, sum_maps
from .complexes import (
    CrossingPackage,
    GridComplex,
    _first_nonzero,
    crossing_package,
    differential,
    differential_map,
)
from .gf2 import PivotBasis, kernel_basis, rank
from .grid import GridDiagram, detect_cross_commutation, parse_grid, require_knot, trace_components
from .states import grading_table, state_list

Bigrading = Tuple[int, int]


# ------------------------------------------------------------------ engines

class _Slices:
    """Slice bases and differential matrices for one grid (cached)."""

    def __init__(self, g: GridDiagram, engine: str = "multivariable", max_n: Optional[int] = None,
                 jobs: int = 1):
        if engine not in ("multivariable", "collapsed"):
            raise ValueError(f"unknown engine {engine!r}")
        require_knot(g)
        self.g = g
        self.engine = engine
        self.table = grading_table(g, max_n)
        self.d = differential_map(g, "unblocked", max_n, jobs)
        self._bases: Dict[Bigrading, Tuple[list, dict]] = {}
        self._dmat: Dict[Bigrading, List[int]] = {}
        self._hom: Dict[Bigrading, "SliceHomology"] = {}
        if engine == "collapsed":
            self._dcol = {x: {y: _collapse(p) for y, p in col.items()} for x, col in self.d.cols.items()}

    def basis(self, d: int, s: int) -> Tuple[list, dict]:
        key = (d, s)
        if key not in self._bases:
            if self.engine == "multivariable":
                sb = slice_basis(self.g, d, s)
                elems, index = sb.elements, sb.index
            else:
                elems = []
                for x, (m, a) in enumerate(self.table):
                    k = a - s
                    if k >= 0 and m - 2 * k == d:
                        elems.append((x, (k,)))
                index = {e: i for i, e in enumerate(elems)}
            self._bases[key] = (elems, index)
        return self._bases[key]

    def dim(self, d: int, s: int) -> int:
        return len(self.basis(d, s)[0])

    def dmatrix(self, d: int, s: int) -> List[int]:
        """Columns of the differential from slice (d, s) into (d-1, s)."""
        key = (d, s)
        if key not in self._dmat:
            elems, _ = self.basis(d, s)
            _, tindex = self.basis(d - 1, s)
            cols = []
            if self.engine == "multivariable":
                for x, e in elems:
                    v = 0
                    for y, p in self.d.image(x).items():
                        for m in p:
                            i = tindex.get((y, tuple(a + b for a, b in zip(e, m))))
                            if i is not None:
                                v ^= 1 << i
                    cols.append(v)
            else:
                for x, (k,) in elems:
                    v = 0
                    for y, exps in self._dcol.get(x, {}).items():
                        for j in exps:
                            i = tindex.get((y, (k + j,)))
                            if i is not None:
                                v ^= 1 << i
                    cols.append(v)
            self._dmat[key] = cols
        return self._dmat[key]

    def multiply(self, vec: int, src: Bigrading, power: int, var: int = 0) -> int:
        """``V_var^power`` (or ``U^power``) applied to a slice vector."""
        elems, _ = self.basis(*src)
        tgt = (src[0] - 2 * power, src[1] - power)
        _, tindex = self.basis(*tgt)
        out = 0
        i = 0
        while vec:
            if vec & 1:
                x, e = elems[i]
                if self.engine == "multivariable":
                    e2 = list(e)
                    e2[var] += power
                    key = (x, tuple(e2))
                else:
                    key = (x, (e[0] + power,))
                out ^= 1 << tindex[key]
            vec >>= 1
            i += 1
        return out

    def homology(self, d: int, s: int) -> "SliceHomology":
        key = (d, s)
        if key not in self._hom:
            dim = self.dim(d, s)
            image = PivotBasis()
            if dim:
                for col in self.dmatrix(d + 1, s):
                    image.add(col)
            cycles = kernel_basis(self.dmatrix(d, s)) if dim else []
            quotient = PivotBasis(pivots=dict(image.pivots))
            reps = []
            for z in cycles:
                independent, _, _ = quotient.add(z)
                if independent:
                    reps.append(z)
            self._hom[key] = SliceHomology(key, dim, len(cycles), len(image), reps, image)
        return self._hom[key]

    def u_rank(self, d: int, s: int, power: int = 1, var: int = 0) -> int:
        """Rank of ``V_var^power`` from H_{d,s} to H_{d-2p,s-p}."""
        src = self.homology(d, s)
        if not src.reps:
            return 0
        tgt = self.homology(d - 2 * power, s - power)
        basis = PivotBasis(pivots=dict(tgt.image.pivots))
        r = 0
        for z in src.reps:
            independent, _, _ = basis.add(self.multiply(z, (d, s), power, var))
            r += independent
        return r


def _collapse(p: Poly) -> List[int]:
    """Exponents of U after sending every V_i to U (mod 2)."""
    acc: Dict[int, int] = {}
    for m in p:
        k = sum(m)
        acc[k] = acc.get(k, 0) ^ 1
    return sorted(k for k, v in acc.items() if v)


@dataclass
class SliceHomology:
    bigrading: Bigrading
    chain_dim: int
    cycle_dim: int
    boundary_dim: int
    reps: List[int]
    image: PivotBasis = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.reps)


_ENGINES: Dict[Tuple[GridDiagram, str], _Slices] = {}


def clear_engines() -> None:
    _ENGINES.clear()


def engine_for(g: GridDiagram, engine: str = "multivariable", jobs: int = 1) -> _Slices:
    key = (g, engine)
    if key not in _ENGINES:
        _ENGINES[key] = _Slices(g, engine, jobs=jobs)
    return _ENGINES[key]


def homology_slice(g: GridDiagram, d: int, s: int, engine: str = "multivariable") -> Tuple[int, List[int]]:
    """``(dim H_{d,s}, cycle representatives as slice vectors)``."""
    h = engine_for(g, engine).homology(d, s)
    return h.dim, list(h.reps)


def u_map_rank(g: GridDiagram, d: int, s: int, var: int = 0, engine: str = "multivariable") -> int:
    return engine_for(g, engine).u_rank(d, s, 1, var)


# ------------------------------------------------------------ homology table

@dataclass
class HomologyTable:
    grid: GridDiagram
    engine: str
    window: List[Bigrading]
    dims: Dict[Bigrading, int]
    u_ranks: Dict[Bigrading, int]
    stabilization_evidence: Dict[int, Dict[str, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "engine": self.engine,
            "dims": [[d, s, k] for (d, s), k in sorted(self.dims.items()) if k],
            "u_ranks": [[d, s, k] for (d, s), k in sorted(self.u_ranks.items()) if k],
        }


def _maslov_range(sl: _Slices, s: int) -> range:
    lo = min(m - 2 * (a - s) for m, a in sl.table if a >= s)
    hi = max(m - 2 * (a - s) for m, a in sl.table if a >= s)
    return range(lo, hi + 1)


def homology_table(g: GridDiagram, s_lo: int, s_hi: Optional[int] = None, engine: str = "multivariable",
                   progress: bool = False, jobs: int = 1) -> HomologyTable:
    sl = engine_for(g, engine, jobs)
    top = max(a for _, a in sl.table)
    s_hi = top if s_hi is None else s_hi
    dims, ranks, window = {}, {}, []
    for s in range(s_hi, s_lo - 1, -1):
        if progress:
            print(f"[homology] row s={s}", file=sys.stderr)
        for d in _maslov_range(sl, s):
            window.append((d, s))
            h = sl.homology(d, s)
            dims[(d, s)] = h.dim
            if s - 1 >= s_lo:
                ranks[(d, s)] = sl.u_rank(d, s)
    return HomologyTable(g, engine, window, dims, ranks)


# ------------------------------------------------------------ torsion order

@dataclass
class TorsionResult:
    grid: GridDiagram
    engine: str
    status: str                       # "ok" | "inconclusive"
    value: Optional[int]
    B: int
    window: Tuple[int, int]           # Alexander rows (low, high)
    source_floor: int
    orders: Dict[Bigrading, int]
    torsion_dims: Dict[Bigrading, int]
    row_dims: Dict[int, int]
    row_u_ranks: Dict[int, int]
    tower_count: int

    def to_json(self) -> dict:
        return {
            "engine": self.engine,
            "status": self.status,
            "torsion_order": self.value,
            "B": self.B,
            "window": list(self.window),
            "source_floor": self.source_floor,
            "torsion": [[d, s, k, self.orders[(d, s)]] for (d, s), k in sorted(self.torsion_dims.items()) if k],
            "stabilization": {
                "rows": {str(s): self.row_dims[s] for s in sorted(self.row_dims)},
                "u_ranks": {str(s): self.row_u_ranks[s] for s in sorted(self.row_u_ranks)},
                "expected_towers": self.tower_count,
            },
        }


def default_depth(g: GridDiagram, engine: str, full_window: bool = False) -> Tuple[int, int]:
    """(source floor, initial B) for the torsion window.

    The full window starts the sources at the lowest Alexander grading of
    any state and reaches ``range + n + 1`` rows below it.  The multivariable
    default starts at ``min A + n - 1`` instead: the collapsed homology is
    generated in gradings >= min A and equals GH^- tensored with a space
    whose lowest shift is (1-n, 1-n), so GH^- is generated there.
    """
    table = grading_table(g)
    lo = min(a for _, a in table)
    hi = max(a for _, a in table)
    if engine == "collapsed" or full_window:
        return lo, (hi - lo) + g.n + 1
    floor = lo + g.n - 1
    return floor, max(3, hi - floor + 1)


def torsion_order(g: GridDiagram, engine: str = "multivariable", B: Optional[int] = None,
                  max_B: Optional[int] = None, progress: bool = False,
                  full_window: bool = False, jobs: int = 1) -> TorsionResult:
    """U-torsion order with stabilization evidence.

    Sources are the slices at or above the source floor (every homology
    class of the complex is a U-multiple of one there); the window extends
    B rows below the floor.  The bottom three rows must carry nothing but
    the free part (one tower, or 2^(n-1) for the collapsed engine) with
    injective U maps between them; otherwise B grows until ``max_B``, after
    which the result is reported as inconclusive.
    """
    sl = engine_for(g, engine, jobs)
    floor, B0 = default_depth(g, engine, full_window)
    B = B0 if B is None else B
    max_B = B + 4 if max_B is None else max_B
    top = max(a for _, a in sl.table)
    towers = 1 if engine == "multivariable" else 2 ** (g.n - 1)
    while True:
        bottom = floor - B
        row_dims, row_ranks = {}, {}
        for s in range(bottom, bottom + 3):
            if progress:
                print(f"[torsion] stabilization row s={s} (B={B})", file=sys.stderr)
            row_dims[s] = sum(sl.homology(d, s).dim for d in _maslov_range(sl, s))
            if s > bottom:
                row_ranks[s] = sum(sl.u_rank(d, s) for d in _maslov_range(sl, s))
        stable = all(v == towers for v in row_dims.values()) and all(v == towers for v in row_ranks.values())
        if stable or B >= max_B:
            break
        B += 1
    orders: Dict[Bigrading, int] = {}
    tors: Dict[Bigrading, int] = {}
    if stable:
        for s in range(top, floor - 1, -1):
            if progress:
                print(f"[torsion] source row s={s}", file=sys.stderr)
            for d in _maslov_range(sl, s):
                h = sl.homology(d, s)
                if not h.dim:
                    continue
                ranks = [h.dim] + [sl.u_rank(d, s, k) for k in range(1, B + 1)]
                final = ranks[-1]
                orders[(d, s)] = next(k for k, r in enumerate(ranks) if r == final)
                tors[(d, s)] = h.dim - final
    value = max(orders.values(), default=0) if stable else None
    return TorsionResult(g, engine, "ok" if stable else "inconclusive", value, B, (floor - B, top), floor,
                         orders, tors, row_dims, row_ranks, towers)


# ------------------------------------------------------------------- tilde

def tilde_rank(g: GridDiagram, max_n: Optional[int] = None) -> int:
    d = differential_map(g, "tilde", max_n)
    cols = [0] * len(state_list(g, max_n))
    for x, col in d.cols.items():
        v = 0
        for y in col:
            v |= 1 << y
        cols[x] = v
    return rank(cols)


def tilde_dim(g: GridDiagram, max_n: Optional[int] = None) -> int:
    """Total dimension of the homology of the tilde complex."""
    return len(state_list(g, max_n)) - 2 * tilde_rank(g, max_n)


def tilde_bigraded(g: GridDiagram, max_n: Optional[int] = None) -> Dict[Bigrading, int]:
    d = differential_map(g, "tilde", max_n)
    table = grading_table(g, max_n)
    groups: Dict[Bigrading, List[int]] = {}
    for i, mg in enumerate(table):
        groups.setdefault(mg, []).append(i)

    def block_rank(src: Sequence[int], tgt: Sequence[int]) -> int:
        pos = {y: k for k, y in enumerate(tgt)}
        cols = []
        for x in src:
            v = 0
            for y in d.image(x):
                if y in pos:
                    v ^= 1 << pos[y]
            cols.append(v)
        return rank(cols)

    out = {}
    for (m, a), xs in sorted(groups.items()):
        h = len(xs) - block_rank(xs, groups.get((m - 1, a), [])) - block_rank(groups.get((m + 1, a), []), xs)
        if h:
            out[(m, a)] = h
    return out


def is_unknot_grid(g: GridDiagram) -> bool:
    """Unknot oracle: tilde homology of dimension exactly 2^(n-1)."""
    return trace_components(g) == 1 and tilde_dim(g) == 2 ** (g.n - 1)


# -------------------------------------------------------------- l-bounds

class CertificateError(ValueError):
    pass


@dataclass
class LBoundCertificate:
    grids: List[GridDiagram]
    directions: List[str]

    def validate(self) -> None:
        if not self.grids:
            raise CertificateError("certificate has no grids")
        n = self.grids[0].n
        for g in self.grids:
            if g.n != n:
                raise CertificateError("grids of different sizes")
            require_knot(g)
        if len(self.directions) != len(self.grids) - 1:
            raise CertificateError("need one direction tag per step")
        for i, (a, b) in enumerate(zip(self.grids, self.grids[1:])):
            if detect_cross_commutation(a, b) is None:
                raise CertificateError(f"step {i}: grids are not related by a cross-commutation")
            if self.directions[i] not in ("+to-", "-to+"):
                raise CertificateError(f"step {i}: bad direction tag {self.directions[i]!r}")

    @property
    def steps(self) -> int:
        return len(self.grids) - 1


def load_certificate(text: str, base_dir: Optional[str] = None) -> LBoundCertificate:
    import os

    doc = json.loads(text)
    grids = []
    for item in doc["grids"]:
        if "\n" in item or item.startswith("n="):
            grids.append(parse_grid(item))
        else:
            path = item if base_dir is None or os.path.isabs(item) else os.path.join(base_dir, item)
            with open(path) as fh:
                grids.append(parse_grid(fh.read()))
    directions = doc.get("direction", doc.get("directions"))
    if directions is None:
        directions = [infer_direction(a, b) for a, b in zip(grids, grids[1:])]
    return LBoundCertificate(grids, list(directions))


def infer_direction(a: GridDiagram, b: GridDiagram) -> str:
    from .grid import designate_plus

    w = detect_cross_commutation(a, b)
    if w is None:
        raise CertificateError("grids are not related by a cross-commutation")
    tag, _ = designate_plus(a, b, w)
    return "+to-" if tag == "a" else "-to+"


@dataclass
class StepMaps:
    forward: ModuleMap       # A_i -> A_{i+1}
    backward: ModuleMap      # A_{i+1} -> A_i
    h_source: ModuleMap      # on A_i: backward o forward = V + dH + Hd
    h_target: ModuleMap      # on A_{i+1}: forward o backward = V + dH + Hd
    var: int


def step_maps(pkg: CrossingPackage, direction: str) -> StepMaps:
    if direction == "+to-":
        return StepMaps(pkg.C_minus, pkg.C_plus, pkg.H_plus, pkg.H_minus, pkg.v1)
    return StepMaps(pkg.C_plus, pkg.C_minus, pkg.H_minus, pkg.H_plus, pkg.v1)


@dataclass
class Composite:
    F: ModuleMap
    G: ModuleMap
    H_F: ModuleMap           # on A_0: G o F = P + dH_F + H_F d
    H_G: ModuleMap           # on A_m: F o G = P + dH_G + H_G d
    monomial: Tuple[int, ...]
    residual_zero: bool
    witness: Optional[dict]


def compose_certificates(pkgs: Sequence[CrossingPackage], directions: Sequence[str],
                         complexes: Sequence[GridComplex]) -> Composite:
    """Composite maps and homotopies along a chain of verified steps.

    With stepwise ``b a = V + [d, H]``, the composite over steps i..m-1
    satisfies ``G F = P + [d, H']`` with ``H' = P_rest * H_step + b H_rest a``
    where ``P`` is the product of the step variables.  The residual is
    recomputed exactly at the end.
    """
    m = len(pkgs)
    n = complexes[0].grid.n
    if m == 0:
        g = complexes[0].grid
        idm = identity(g)
        zero = ModuleMap(g, g, {}, (1, 0), "filtered", "0")
        return Composite(idm, idm, zero, zero, (0,) * n, True, None)
    steps = [step_maps(p, d) for p, d in zip(pkgs, directions)]
    for i, st in enumerate(steps):
        if st.forward.source != complexes[i].grid or st.forward.target != complexes[i + 1].grid:
            raise CertificateError(f"step {i} does not connect consecutive grids")

    # G o F on A_0, built from the far end inward
    F = steps[-1].forward
    G = steps[-1].backward
    H_F = steps[-1].h_source
    mono = [0] * n
    mono[steps[-1].var] += 1
    for st in reversed(steps[:-1]):
        P_rest = frozenset([tuple(mono)])
        H_F = add(scale(st.h_source, P_rest), compose(compose(st.forward, H_F), st.backward))
        F = compose(st.forward, F)
        G = compose(G, st.backward)
        mono[st.var] += 1

    # F o G on A_m, built from the near end outward
    H_G = steps[0].h_target
    mono_g = [0] * n
    mono_g[steps[0].var] += 1
    for st in steps[1:]:
        P_rest = frozenset([tuple(mono_g)])
        H_G = add(scale(st.h_target, P_rest), compose(compose(st.backward, H_G), st.forward))
        mono_g[st.var] += 1
    assert mono == mono_g

    P = frozenset([tuple(mono)])
    res_a = sum_maps([compose(F, G), identity(complexes[0].grid, P),
                      compose(H_F, complexes[0].differential), compose(complexes[0].differential, H_F)])
    res_b = sum_maps([compose(G, F), identity(complexes[-1].grid, P),
                      compose(H_G, complexes[-1].differential), compose(complexes[-1].differential, H_G)])
    w = _first_nonzero(res_a) or _first_nonzero(res_b)
    return Composite(F, G, H_F, H_G, tuple(mono), w is None, w)


@dataclass
class LBoundReport:
    lower: Optional[int]
    upper: int
    exact: bool
    residual_zero: bool
    monomial: Tuple[int, ...]
    torsion: Optional[TorsionResult]
    falsification: bool = False

    def to_json(self) -> dict:
        ev = {"residual_zero": self.residual_zero, "monomial": list(self.monomial)}
        if self.torsion is not None:
            ev["torsion_window"] = list(self.torsion.window)
            ev["torsion_status"] = self.torsion.status
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact, "evidence": ev,
                "falsification": self.falsification}


def lbound(cert: LBoundCertificate, engine: str = "multivariable", progress: bool = False,
           jobs: int = 1) -> LBoundReport:
    """Sandwich ``t(K) <= l(K) <= m`` from a verified unknotting certificate."""
    cert.validate()
    if not is_unknot_grid(cert.grids[-1]):
        raise CertificateError("the last grid of the certificate does not pass the unknot oracle")
    complexes = [differential(g, "filtered") for g in cert.grids]
    pkgs = []
    for i, (a, b) in enumerate(zip(cert.grids, cert.grids[1:])):
        if progress:
            print(f"[lbound] verifying step {i}", file=sys.stderr)
        pkg = crossing_package(a, b)
        want = "+to-" if pkg.cd.plus_is_a else "-to+"
        if cert.directions[i] != want:
            raise CertificateError(f"step {i}: direction {cert.directions[i]} but the grids say {want}")
        pkgs.append(pkg)
    comp = compose_certificates(pkgs, cert.directions, complexes)
    if not comp.residual_zero:
        raise CertificateError(f"composite homotopy residual is nonzero: {comp.witness}")
    tor = torsion_order(cert.grids[0], engine=engine, progress=progress, jobs=jobs)
    lower = tor.value
    upper = cert.steps
    falsified = lower is not None and lower > upper
    exact = lower is not None and lower == upper
    return LBoundReport(lower, upper, exact, comp.residual_zero, comp.monomial, tor, falsified)
