"""Grid diagrams, their text format, and cross-commutations.

Coordinates are 0-based.  The marking of column ``c`` in row ``r`` occupies
the unit cell ``[c, c+1) x [r, r+1)``; vertical circles sit at integer
``x``, horizontal circles at integer ``y``, and the torus is the square
``[0, n)^2`` with opposite sides glued.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple


class GridFormatError(ValueError):
    """Malformed grid text or marking data that violates the grid rules."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class NotAKnotError(ValueError):
    """Raised when an operation that requires a knot receives a link."""


class GridConsistencyError(RuntimeError):
    """Internal inconsistency (e.g. a cross-commutation with writhe change != 2)."""


def _check_permutation(seq: Sequence[int], n: int, field: str, line: Optional[int] = None) -> None:
    if len(seq) != n:
        raise GridFormatError(f"expected {n} entries, got {len(seq)}", line, field)
    if sorted(seq) != list(range(n)):
        raise GridFormatError(f"not a permutation of 0..{n - 1}: {list(seq)}", line, field)


@dataclass(frozen=True)
class GridDiagram:
    n: int
    x_rows: Tuple[int, ...]
    o_rows: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_rows", tuple(int(r) for r in self.x_rows))
        object.__setattr__(self, "o_rows", tuple(int(r) for r in self.o_rows))
        if self.n < 1:
            raise GridFormatError("grid number must be positive", field="n")
        _check_permutation(self.x_rows, self.n, "X")
        _check_permutation(self.o_rows, self.n, "O")
        for c in range(self.n):
            if self.x_rows[c] == self.o_rows[c]:
                raise GridFormatError(f"X/O collision in column {c}", field="X,O")

    @property
    def x_cols(self) -> Tuple[int, ...]:
        """``x_cols[r]`` is the column of the X marking in row ``r``."""
        inv = [0] * self.n
        for c, r in enumerate(self.x_rows):
            inv[r] = c
        return tuple(inv)

    @property
    def o_cols(self) -> Tuple[int, ...]:
        inv = [0] * self.n
        for c, r in enumerate(self.o_rows):
            inv[r] = c
        return tuple(inv)

    def serialize(self) -> str:
        return serialize_grid(self)

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def __str__(self) -> str:
        return f"GridDiagram(n={self.n}, X={list(self.x_rows)}, O={list(self.o_rows)})"


@dataclass(frozen=True)
class CrossCommutation:
    column: int
    strip_rows: Tuple[int, int, int, int]
    # column offset (0 = column c, 1 = column c+1) owning each of strip_rows
    interleaved: Tuple[int, int, int, int]


def parse_grid(text: str) -> GridDiagram:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    fields = {}
    for lineno, ln in enumerate(lines, start=1):
        if not ln:
            continue
        if "=" not in ln:
            raise GridFormatError(f"expected key=value, got {ln!r}", lineno)
        key, _, value = ln.partition("=")
        key = key.strip()
        if key not in ("n", "X", "O"):
            raise GridFormatError(f"unknown key {key!r}", lineno, key)
        if key in fields:
            raise GridFormatError("duplicate key", lineno, key)
        fields[key] = (lineno, value.strip())
    for key in ("n", "X", "O"):
        if key not in fields:
            raise GridFormatError("missing field", field=key)

    lineno, raw = fields["n"]
    try:
        n = int(raw)
    except ValueError:
        raise GridFormatError(f"not an integer: {raw!r}", lineno, "n") from None
    if n < 1:
        raise GridFormatError("grid number must be positive", lineno, "n")

    seqs = {}
    for key in ("X", "O"):
        lineno, raw = fields[key]
        try:
            seq = [int(tok) for tok in raw.split(",")] if raw else []
        except ValueError:
            raise GridFormatError(f"not a comma-separated integer list: {raw!r}", lineno, key) from None
        _check_permutation(seq, n, key, lineno)
        seqs[key] = seq
    for c in range(n):
        if seqs["X"][c] == seqs["O"][c]:
            raise GridFormatError(f"X/O collision in column {c}", fields["O"][0], "O")
    return GridDiagram(n, tuple(seqs["X"]), tuple(seqs["O"]))


def serialize_grid(g: GridDiagram) -> str:
    xs = ",".join(str(r) for r in g.x_rows)
    os_ = ",".join(str(r) for r in g.o_rows)
    return f"n={g.n}\nX={xs}\nO={os_}\n"


def trace_components(g: GridDiagram) -> int:
    """Number of link components (cycles of column -> O row -> X column)."""
    x_cols = g.x_cols
    seen = [False] * g.n
    count = 0
    for start in range(g.n):
        if seen[start]:
            continue
        count += 1
        c = start
        while not seen[c]:
            seen[c] = True
            c = x_cols[g.o_rows[c]]
    return count


def require_knot(g: GridDiagram) -> None:
    k = trace_components(g)
    if k != 1:
        raise NotAKnotError(f"grid has {k} components; a knot is required")


def writhe(g: GridDiagram) -> int:
    """Signed crossing count; vertical strands pass over horizontal ones."""
    n = g.n
    x_cols, o_cols = g.x_cols, g.o_cols
    total = 0
    for c in range(n):
        lo_r, hi_r = sorted((g.x_rows[c], g.o_rows[c]))
        vy = 1 if g.o_rows[c] > g.x_rows[c] else -1
        for r in range(lo_r + 1, hi_r):
            lo_c, hi_c = sorted((o_cols[r], x_cols[r]))
            if lo_c < c < hi_c:
                hx = 1 if x_cols[r] > o_cols[r] else -1
                # det((0, vy), (hx, 0))
                total += -vy * hx
    return total


def transpose(g: GridDiagram) -> GridDiagram:
    """Reflect across the diagonal: columns become rows."""
    return GridDiagram(g.n, g.x_cols, g.o_cols)


def mirror(g: GridDiagram) -> GridDiagram:
    """Reverse the row order (a reflection of the diagram)."""
    n = g.n
    return GridDiagram(n, tuple(n - 1 - r for r in g.x_rows), tuple(n - 1 - r for r in g.o_rows))


def rotate_columns(g: GridDiagram, k: int) -> GridDiagram:
    """Cyclically relabel columns so that old column ``c`` becomes ``c + k``."""
    n = g.n
    xs = [0] * n
    os_ = [0] * n
    for c in range(n):
        xs[(c + k) % n] = g.x_rows[c]
        os_[(c + k) % n] = g.o_rows[c]
    return GridDiagram(n, tuple(xs), tuple(os_))


def apply_column_swap(g: GridDiagram, c: int) -> GridDiagram:
    if not 0 <= c < g.n:
        raise ValueError(f"column {c} out of range for n={g.n}")
    d = (c + 1) % g.n
    xs, os_ = list(g.x_rows), list(g.o_rows)
    xs[c], xs[d] = xs[d], xs[c]
    os_[c], os_[d] = os_[d], os_[c]
    return GridDiagram(g.n, tuple(xs), tuple(os_))


def _interleaving(g: GridDiagram, c: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    d = (c + 1) % g.n
    tagged = sorted([(g.x_rows[c], 0), (g.o_rows[c], 0), (g.x_rows[d], 1), (g.o_rows[d], 1)])
    rows = tuple(r for r, _ in tagged)
    owners = tuple(t for _, t in tagged)
    if len(set(rows)) < 4:
        return None
    if owners not in ((0, 1, 0, 1), (1, 0, 1, 0)):
        return None
    return rows, owners


def detect_cross_commutation(a: GridDiagram, b: GridDiagram) -> Optional[CrossCommutation]:
    """Witness that ``b`` is ``a`` with two adjacent interleaved columns swapped."""
    if a.n != b.n:
        raise ValueError("grids of different sizes")
    if a == b or a.n < 2:
        return None
    for c in range(a.n):
        if apply_column_swap(a, c) != b:
            continue
        found = _interleaving(a, c)
        if found is not None:
            rows, owners = found
            return CrossCommutation(c, rows, owners)
    return None


def detect_row_cross_commutation(a: GridDiagram, b: GridDiagram) -> Optional[CrossCommutation]:
    """Row version, reported in the coordinates of the transposed grids."""
    return detect_cross_commutation(transpose(a), transpose(b))


def designate_plus(a: GridDiagram, b: GridDiagram, w: CrossCommutation) -> Tuple[str, int]:
    """Return ``("a" | "b", writhe(a) - writhe(b))`` naming the positive-crossing grid."""
    if apply_column_swap(a, w.column) != b:
        raise GridConsistencyError("witness does not relate the two grids")
    if w.column == a.n - 1:
        # a swap across the seam is only a planar crossing change after rotating
        a, b = rotate_columns(a, 1), rotate_columns(b, 1)
    diff = writhe(a) - writhe(b)
    if diff not in (2, -2):
        raise GridConsistencyError(f"writhe difference {diff} across a cross-commutation (expected +-2)")
    return ("a" if diff > 0 else "b"), diff
