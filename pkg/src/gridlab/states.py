"""Grid states and the Maslov/Alexander functions.

A grid state is a permutation ``sigma``: its component on vertical circle
``j`` is the lattice point ``(j, sigma[j])``.  All pairings are evaluated on
representatives in the fundamental domain ``[0, n)^2`` with exact
arithmetic; coordinates are doubled internally so marking centres stay
integral.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .grid import GridDiagram

DEFAULT_MAX_N = 7

State = Tuple[int, ...]
Point = Tuple[Fraction, Fraction]


class StateCapError(ValueError):
    """Grid number above the configured enumeration cap."""


_cap = DEFAULT_MAX_N


def set_state_cap(k: int) -> None:
    """Process-wide cap on ``n`` used when no explicit ``max_n`` is given."""
    global _cap
    _cap = k


def state_cap() -> int:
    return _cap


@dataclass(frozen=True)
class Bigrading:
    maslov: int
    alexander: Fraction

    def as_tuple(self) -> Tuple[int, int]:
        return self.maslov, int(self.alexander)


def enumerate_states(g: GridDiagram, max_n: Optional[int] = None) -> Iterator[State]:
    """All ``n!`` states in lexicographic order of ``sigma``."""
    if max_n is None:
        max_n = _cap
    if g.n > max_n:
        raise StateCapError(f"n={g.n} exceeds the state cap {max_n} (raise max_n to override)")
    return permutations(range(g.n))


@lru_cache(maxsize=64)
def state_list(g: GridDiagram, max_n: Optional[int] = None) -> Tuple[State, ...]:
    return tuple(enumerate_states(g, max_n))


@lru_cache(maxsize=64)
def state_index(g: GridDiagram, max_n: Optional[int] = None) -> Dict[State, int]:
    return {s: i for i, s in enumerate(state_list(g, max_n))}


FormalSum = Union[Mapping[Point, int], Iterable[Point]]


def _as_counter(P: FormalSum) -> Counter:
    if isinstance(P, Mapping):
        return Counter({p: k for p, k in P.items() if k})
    return Counter(P)


def _dominations(P: Mapping, Q: Mapping) -> int:
    total = 0
    for p, a in P.items():
        for q, b in Q.items():
            if p[0] < q[0] and p[1] < q[1]:
                total += a * b
    return total


def j_pairing(P: FormalSum, Q: FormalSum) -> Fraction:
    """Symmetrised domination count, extended bilinearly to formal sums."""
    P, Q = _as_counter(P), _as_counter(Q)
    return Fraction(_dominations(P, Q) + _dominations(Q, P), 2)


def formal_difference(P: Iterable[Point], Q: Iterable[Point]) -> Counter:
    out = Counter(P)
    out.subtract(Counter(Q))
    return out


def state_points(x: State) -> List[Point]:
    return [(Fraction(j), Fraction(r)) for j, r in enumerate(x)]


def marking_points(rows: Tuple[int, ...]) -> List[Point]:
    half = Fraction(1, 2)
    return [(c + half, r + half) for c, r in enumerate(rows)]


# Fast integer path: doubled coordinates, I-counts only.

def _count_less(P, Q) -> int:
    return sum(1 for p in P for q in Q if p[0] < q[0] and p[1] < q[1])


class _MaslovKit:
    """Precomputed marking data for repeated M evaluations on one grid."""

    def __init__(self, rows: Tuple[int, ...]):
        self.marks = [(2 * c + 1, 2 * r + 1) for c, r in enumerate(rows)]
        # 2 * J(marks, marks) = 2 * I(marks, marks)
        self.jmm2 = 2 * _count_less(self.marks, self.marks)

    def maslov(self, x: State) -> int:
        pts = [(2 * j, 2 * r) for j, r in enumerate(x)]
        jxx2 = 2 * _count_less(pts, pts)
        jxm2 = _count_less(pts, self.marks) + _count_less(self.marks, pts)
        twice = jxx2 - 2 * jxm2 + self.jmm2
        assert twice % 2 == 0
        return twice // 2 + 1


@lru_cache(maxsize=64)
def _kits(g: GridDiagram) -> Tuple[_MaslovKit, _MaslovKit]:
    return _MaslovKit(g.o_rows), _MaslovKit(g.x_rows)


class GradingError(RuntimeError):
    """Non-integral Alexander grading on a knot: signals a grading bug."""


def gradings(g: GridDiagram, x: State) -> Tuple[int, int, Fraction]:
    """``(M_O, M_X, A)`` for the state ``x`` of ``g``."""
    ko, kx = _kits(g)
    mo, mx = ko.maslov(x), kx.maslov(x)
    a = Fraction(mo - mx, 2) - Fraction(g.n - 1, 2)
    if a.denominator != 1:
        from .grid import trace_components

        if trace_components(g) == 1:
            raise GradingError(f"non-integral Alexander grading {a} for state {x}")
    return mo, mx, a


def bigrading(g: GridDiagram, x: State) -> Bigrading:
    mo, _, a = gradings(g, x)
    return Bigrading(mo, a)


def maslov_via_j(g: GridDiagram, x: State, marks: str = "O") -> Fraction:
    """Reference evaluation of M through ``j_pairing`` on formal sums."""
    rows = g.o_rows if marks == "O" else g.x_rows
    diff = formal_difference(state_points(x), marking_points(rows))
    return j_pairing(diff, diff) + 1


@lru_cache(maxsize=64)
def grading_table(g: GridDiagram, max_n: Optional[int] = None) -> Tuple[Tuple[int, int], ...]:
    """``(M, A)`` for every state, indexed like ``state_list``."""
    out = []
    for x in state_list(g, max_n):
        mo, _, a = gradings(g, x)
        if a.denominator != 1:
            raise GradingError(f"non-integral Alexander grading {a}; is this a knot?")
        out.append((mo, int(a)))
    return tuple(out)


def nwo_state(g: GridDiagram) -> State:
    """State sitting at the upper-left corner of every O-marked square."""
    return tuple((r + 1) % g.n for r in g.o_rows)


def nearest_point_map(cd, y_minus: State) -> State:
    """Nearest-point bijection ``S(G-) -> S(G+)`` for a combined diagram.

    Both grids share all vertical circles except the distinguished one, and
    the distinguished curves meet every horizontal circle exactly once; the
    nearest point to ``gamma`` on the same horizontal circle is the point of
    ``beta`` there.  Hence the permutation is unchanged and only the
    component on the distinguished circle moves (from gamma to beta).
    """
    if len(y_minus) != cd.n:
        raise ValueError("state size does not match the combined diagram")
    return tuple(y_minus)


def nearest_point_inverse(cd, y_plus: State) -> State:
    return tuple(y_plus)
