"""Free modules over F2[V_1..V_n] generated by grid states.

Monomials are exponent tuples; a polynomial is a frozenset of monomials
(coefficient 1 means present), so addition is symmetric difference.
Variables are indexed by the row of their O marking, which is stable under
column moves and therefore shared by every grid in a cross-commutation
sequence.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from .gf2 import GF2Matrix
from .grid import GridDiagram
from .states import grading_table, state_index, state_list

Monomial = Tuple[int, ...]
Poly = FrozenSet[Monomial]
Element = Dict[int, Poly]

ZERO: Poly = frozenset()


def one(n: int) -> Poly:
    return frozenset([(0,) * n])


def variable(n: int, i: int, power: int = 1) -> Poly:
    e = [0] * n
    e[i] = power
    return frozenset([tuple(e)])


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def poly_add(p: Poly, q: Poly) -> Poly:
    return p ^ q


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    acc = set()
    for a in p:
        for b in q:
            m = mono_mul(a, b)
            if m in acc:
                acc.remove(m)
            else:
                acc.add(m)
    return frozenset(acc)


def poly_str(p: Poly) -> str:
    if not p:
        return "0"
    terms = []
    for m in sorted(p):
        factors = []
        for i, k in enumerate(m):
            if k == 1:
                factors.append(f"V{i}")
            elif k > 1:
                factors.append(f"V{i}^{k}")
        terms.append("*".join(factors) or "1")
    return " + ".join(terms)


def elem_add_into(acc: Dict[int, Poly], idx: int, p: Poly) -> None:
    q = acc.get(idx, ZERO) ^ p
    if q:
        acc[idx] = q
    else:
        acc.pop(idx, None)


class DegreeError(ValueError):
    """A map term violates the declared (maslov, alexander) degree."""


class SpaceMismatch(ValueError):
    pass


@dataclass
class ModuleMap:
    """Ring-linear map between free modules spanned by grid states.

    ``cols[x][y]`` is the polynomial coefficient of generator ``y`` of the
    target in the image of generator ``x`` of the source.  ``degree`` is the
    claimed ``(maslov_shift, alexander_shift)``; in ``filtered`` mode the
    Alexander shift is an upper bound, in ``graded`` mode it is exact.
    """

    source: GridDiagram
    target: GridDiagram
    cols: Dict[int, Dict[int, Poly]]
    degree: Tuple[int, int] = (0, 0)
    mode: str = "filtered"
    name: str = ""

    def __post_init__(self):
        if self.source.n != self.target.n:
            raise SpaceMismatch("source and target grids differ in size")
        for x in list(self.cols):
            col = {y: p for y, p in self.cols[x].items() if p}
            if col:
                self.cols[x] = col
            else:
                del self.cols[x]

    @property
    def n(self) -> int:
        return self.source.n

    def image(self, x: int) -> Dict[int, Poly]:
        return self.cols.get(x, {})

    def apply(self, elem: Element) -> Element:
        out: Element = {}
        for x, p in elem.items():
            for y, q in self.image(x).items():
                elem_add_into(out, y, poly_mul(p, q))
        return out

    def terms(self) -> Iterator[Tuple[int, int, Monomial]]:
        for x in sorted(self.cols):
            col = self.cols[x]
            for y in sorted(col):
                for m in sorted(col[y]):
                    yield x, y, m

    def num_terms(self) -> int:
        return sum(len(p) for col in self.cols.values() for p in col.values())

    def is_zero(self) -> bool:
        return not self.cols

    def copy(self, **changes) -> "ModuleMap":
        cols = {x: dict(col) for x, col in self.cols.items()}
        kw = dict(source=self.source, target=self.target, cols=cols, degree=self.degree, mode=self.mode, name=self.name)
        kw.update(changes)
        return ModuleMap(**kw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.cols == other.cols

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return add(self, other)

    def shift_stats(self) -> Dict[Tuple[int, int], int]:
        """Histogram of (maslov shift, alexander shift) over all terms."""
        gs, gt = grading_table(self.source), grading_table(self.target)
        hist: Dict[Tuple[int, int], int] = defaultdict(int)
        for x, y, m in self.terms():
            k = sum(m)
            hist[(gt[y][0] - 2 * k - gs[x][0], gt[y][1] - k - gs[x][1])] += 1
        return dict(hist)

    def check_degree(self) -> None:
        m_claim, a_claim = self.degree
        for (dm, da), _ in self.shift_stats().items():
            if dm != m_claim:
                raise DegreeError(f"{self.name or 'map'}: Maslov shift {dm} != {m_claim}")
            if self.mode == "graded" and da != a_claim:
                raise DegreeError(f"{self.name or 'map'}: Alexander shift {da} != {a_claim}")
            if da > a_claim:
                raise DegreeError(f"{self.name or 'map'}: Alexander shift {da} > {a_claim}")

    def to_json(self) -> dict:
        states_s = state_list(self.source)
        states_t = state_list(self.target)
        entries = []
        for x in sorted(self.cols, key=lambda i: states_s[i]):
            col = self.cols[x]
            for y in sorted(col, key=lambda i: states_t[i]):
                entries.append([list(states_s[x]), list(states_t[y]), [list(m) for m in sorted(col[y])]])
        return {
            "source_grid_hash": self.source.digest(),
            "target_grid_hash": self.target.digest(),
            "degree": list(self.degree),
            "entries": entries,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def identity(g: GridDiagram, coeff: Optional[Poly] = None, name: str = "id") -> ModuleMap:
    coeff = one(g.n) if coeff is None else coeff
    k = min((sum(m) for m in coeff), default=0)
    cols = {x: {x: coeff} for x in range(len(state_list(g)))} if coeff else {}
    return ModuleMap(g, g, cols, degree=(-2 * k, -k), mode="graded", name=name)


def multiplication(g: GridDiagram, i: int, power: int = 1) -> ModuleMap:
    """Multiplication by ``V_i^power`` (variable indexed by O row)."""
    return identity(g, variable(g.n, i, power), name=f"V{i}^{power}")


def zero_map(source: GridDiagram, target: GridDiagram, degree=(0, 0), mode="filtered", name="0") -> ModuleMap:
    return ModuleMap(source, target, {}, degree, mode, name)


def compose(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    """``g o f``."""
    if f.target != g.source:
        raise SpaceMismatch("compose: f.target != g.source")
    cols: Dict[int, Dict[int, Poly]] = {}
    for x, col in f.cols.items():
        acc: Element = {}
        for y, p in col.items():
            for z, q in g.image(y).items():
                elem_add_into(acc, z, poly_mul(p, q))
        if acc:
            cols[x] = acc
    mode = "graded" if f.mode == g.mode == "graded" else "filtered"
    degree = (f.degree[0] + g.degree[0], f.degree[1] + g.degree[1])
    return ModuleMap(f.source, g.target, cols, degree, mode, name=f"({g.name})o({f.name})")


def add(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    if f.source != g.source or f.target != g.target:
        raise SpaceMismatch("add: maps between different spaces")
    cols = {x: dict(col) for x, col in f.cols.items()}
    for x, col in g.cols.items():
        acc = cols.setdefault(x, {})
        for y, p in col.items():
            elem_add_into(acc, y, p)
    return ModuleMap(f.source, f.target, cols, f.degree, f.mode, name=f"{f.name}+{g.name}")


def sum_maps(maps: List[ModuleMap]) -> ModuleMap:
    out = maps[0]
    for f in maps[1:]:
        out = add(out, f)
    return out


def scale(f: ModuleMap, coeff: Poly) -> ModuleMap:
    k = min((sum(m) for m in coeff), default=0)
    cols = {}
    for x, col in f.cols.items():
        new = {y: poly_mul(p, coeff) for y, p in col.items()}
        cols[x] = new
    return ModuleMap(f.source, f.target, cols, (f.degree[0] - 2 * k, f.degree[1] - k), f.mode, name=f"c*{f.name}")


def graded_part(f: ModuleMap, delta_a: int) -> ModuleMap:
    """Terms whose Alexander shift is exactly ``delta_a``."""
    gs, gt = grading_table(f.source), grading_table(f.target)
    cols: Dict[int, Dict[int, Poly]] = {}
    for x, col in f.cols.items():
        for y, p in col.items():
            keep = frozenset(m for m in p if gt[y][1] - sum(m) - gs[x][1] == delta_a)
            if keep:
                cols.setdefault(x, {})[y] = keep
    return ModuleMap(f.source, f.target, cols, (f.degree[0], delta_a), "graded", name=f"gr{delta_a}({f.name})")


def restrict_terms(f: ModuleMap, predicate) -> ModuleMap:
    """Keep only the terms ``(x, y, monomial)`` accepted by ``predicate``."""
    cols: Dict[int, Dict[int, Poly]] = {}
    for x, col in f.cols.items():
        for y, p in col.items():
            keep = frozenset(m for m in p if predicate(x, y, m))
            if keep:
                cols.setdefault(x, {})[y] = keep
    return f.copy(cols=cols)


# Finite bigraded slices.

def weak_compositions(total: int, parts: int) -> Iterator[Monomial]:
    """All tuples of ``parts`` nonnegative ints summing to ``total`` (lex order)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class SliceBasis:
    grid: GridDiagram
    bigrading: Tuple[int, int]
    elements: List[Tuple[int, Monomial]]
    index: Dict[Tuple[int, Monomial], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=4096)
def _slice_elements(g: GridDiagram, d: int, s: int) -> Tuple[Tuple[int, Monomial], ...]:
    out = []
    for x, (m, a) in enumerate(grading_table(g)):
        k = a - s
        if k < 0 or m - 2 * k != d:
            continue
        for e in weak_compositions(k, g.n):
            out.append((x, e))
    return tuple(out)


def slice_basis(g: GridDiagram, d: int, s: int) -> SliceBasis:
    """All ``V^k x`` with Maslov grading ``d`` and Alexander grading ``s``."""
    return SliceBasis(g, (d, s), list(_slice_elements(g, d, s)))


class SliceMismatch(ValueError):
    pass


def matrix_on_slice(f: ModuleMap, src: SliceBasis, tgt: SliceBasis) -> GF2Matrix:
    """Matrix of ``f`` from one slice to another (terms landing elsewhere dropped).

    For filtered maps this selects the part with Alexander shift
    ``tgt.s - src.s``; the Maslov shift must match the declared degree.
    """
    if src.grid != f.source or tgt.grid != f.target:
        raise SliceMismatch("slice grids do not match the map")
    (d0, s0), (d1, s1) = src.bigrading, tgt.bigrading
    if d1 - d0 != f.degree[0]:
        raise SliceMismatch(f"Maslov shift {d1 - d0} incompatible with declared degree {f.degree}")
    if f.mode == "graded" and s1 - s0 != f.degree[1]:
        raise SliceMismatch(f"Alexander shift {s1 - s0} incompatible with declared degree {f.degree}")
    if f.mode == "filtered" and s1 - s0 > f.degree[1]:
        raise SliceMismatch(f"Alexander shift {s1 - s0} above the filtration bound {f.degree[1]}")
    cols = []
    tindex = tgt.index
    for x, e in src.elements:
        v = 0
        for y, p in f.image(x).items():
            for m in p:
                key = (y, mono_mul(e, m))
                i = tindex.get(key)
                if i is not None:
                    v ^= 1 << i
        cols.append(v)
    return GF2Matrix(len(tgt), len(src), cols)


def element_to_vector(elem: Element, basis: SliceBasis) -> int:
    v = 0
    for x, p in elem.items():
        for m in p:
            i = basis.index.get((x, m))
            if i is None:
                raise SliceMismatch(f"element term {(x, m)} not in slice {basis.bigrading}")
            v ^= 1 << i
    return v


def vector_to_element(v: int, basis: SliceBasis) -> Element:
    out: Element = {}
    i = 0
    while v:
        if v & 1:
            x, m = basis.elements[i]
            elem_add_into(out, x, frozenset([m]))
        v >>= 1
        i += 1
    return out


def lookup_state(g: GridDiagram, sigma) -> int:
    return state_index(g)[tuple(sigma)]
