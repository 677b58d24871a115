"""GF(2) linear algebra on bit-packed vectors.

Vectors are Python ints (bit ``i`` = coordinate ``i``), which gives
word-level XOR for free; a matrix is a list of column vectors.  The numpy
routines at the bottom are a deliberately separate dense implementation used
as an oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np


@dataclass
class GF2Matrix:
    nrows: int
    ncols: int
    cols: List[int]

    def column(self, j: int) -> int:
        return self.cols[j]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for j, v in enumerate(self.cols):
            i = 0
            while v:
                if v & 1:
                    out[i, j] = 1
                v >>= 1
                i += 1
        return out

    def rank(self) -> int:
        return rank(self.cols)


@dataclass
class PivotBasis:
    """Echelon basis keyed by leading (highest) bit.

    ``reduce`` returns the residual of a vector; when ``track`` is on, each
    stored vector also carries the combination of inserted inputs that
    produced it, which is how kernels are read off.
    """

    track: bool = False
    pivots: Dict[int, int] = field(default_factory=dict)
    combos: Dict[int, int] = field(default_factory=dict)

    def reduce(self, v: int, combo: int = 0) -> Tuple[int, int]:
        pivots = self.pivots
        while v:
            lead = v.bit_length() - 1
            p = pivots.get(lead)
            if p is None:
                break
            v ^= p
            if self.track:
                combo ^= self.combos[lead]
        return v, combo

    def add(self, v: int, combo: int = 0) -> Tuple[bool, int, int]:
        """Insert ``v``; returns (independent, residual, residual-combo)."""
        r, c = self.reduce(v, combo)
        if r:
            lead = r.bit_length() - 1
            self.pivots[lead] = r
            if self.track:
                self.combos[lead] = c
            return True, r, c
        return False, r, c

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def __len__(self) -> int:
        return len(self.pivots)


def rank(cols: Iterable[int]) -> int:
    basis = PivotBasis()
    for v in cols:
        basis.add(v)
    return len(basis)


def kernel_basis(cols: Sequence[int]) -> List[int]:
    """Basis of ``{a : sum_j a_j col_j = 0}`` as bitmasks over column indices."""
    basis = PivotBasis(track=True)
    kernel = []
    for j, v in enumerate(cols):
        independent, _, combo = basis.add(v, 1 << j)
        if not independent:
            kernel.append(combo)
    return kernel


def apply(cols: Sequence[int], a: int) -> int:
    """Matrix-vector product: XOR of the columns selected by ``a``."""
    out = 0
    j = 0
    while a:
        if a & 1:
            out ^= cols[j]
        a >>= 1
        j += 1
    return out


def solve(cols: Sequence[int], target: int) -> Optional[int]:
    """Some ``a`` with ``apply(cols, a) == target``, or None."""
    basis = PivotBasis(track=True)
    for j, v in enumerate(cols):
        basis.add(v, 1 << j)
    r, combo = basis.reduce(target)
    return combo if r == 0 else None


def bits(v: int) -> List[int]:
    out = []
    i = 0
    while v:
        if v & 1:
            out.append(i)
        v >>= 1
        i += 1
    return out


# Dense oracle (independent code path, numpy).

def dense_rank(M: np.ndarray) -> int:
    A = (np.array(M, dtype=np.uint8) & 1).copy()
    nr, nc = A.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        hits = np.nonzero(A[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        rows = np.nonzero(A[:, c])[0]
        rows = rows[rows != r]
        A[rows] ^= A[r]
        r += 1
    return r


def dense_nullity(M: np.ndarray) -> int:
    M = np.asarray(M)
    return M.shape[1] - dense_rank(M)


def dense_homology_dim(d_in: np.ndarray, d_out: np.ndarray, dim: int) -> int:
    """``dim ker(d_out) - rank(d_in)`` for a slice of dimension ``dim``."""
    k = dim - (dense_rank(d_out) if d_out.size else 0)
    b = dense_rank(d_in) if d_in.size else 0
    return k - b
