from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlab.gf2 import GF2Matrix, PivotBasis, apply, dense_homology_dim, dense_nullity, dense_rank, kernel_basis, rank, solve


@st.composite
def matrices(draw, max_rows=24, max_cols=24):
    nr = draw(st.integers(0, max_rows))
    nc = draw(st.integers(0, max_cols))
    cols = [draw(st.integers(0, (1 << nr) - 1)) for _ in range(nc)]
    return GF2Matrix(nr, nc, cols)


@given(matrices())
def test_rank_matches_dense_oracle(m):
    assert rank(m.cols) == dense_rank(m.to_dense())


@given(matrices())
def test_kernel_basis(m):
    ker = kernel_basis(m.cols)
    assert all(apply(m.cols, a) == 0 for a in ker)
    assert rank(ker) == len(ker)
    assert len(ker) == dense_nullity(m.to_dense())


@given(matrices(), st.data())
def test_solve_in_image(m, data):
    a = data.draw(st.integers(0, (1 << m.ncols) - 1))
    target = apply(m.cols, a)
    sol = solve(m.cols, target)
    assert sol is not None and apply(m.cols, sol) == target


@settings(max_examples=50)
@given(st.integers(1, 12), st.data())
def test_homology_of_a_square_zero_pair(n, data):
    # d_out o d_in = 0 by construction: d_in maps into ker(d_out)
    d_out = GF2Matrix(n, n, [data.draw(st.integers(0, (1 << n) - 1)) for _ in range(n)])
    ker = kernel_basis(d_out.cols)
    k = data.draw(st.integers(0, 6))
    d_in_cols = []
    for _ in range(k):
        combo = data.draw(st.integers(0, (1 << len(ker)) - 1)) if ker else 0
        v = 0
        for i, a in enumerate(ker):
            if combo >> i & 1:
                v ^= a
        d_in_cols.append(v)
    d_in = GF2Matrix(n, k, d_in_cols)
    want = len(ker) - rank(d_in_cols)
    assert dense_homology_dim(d_in.to_dense(), d_out.to_dense(), n) == want


def test_pivot_basis_tracks_combinations():
    b = PivotBasis(track=True)
    b.add(0b011, 0b001)
    b.add(0b110, 0b010)
    independent, residual, combo = b.add(0b101, 0b100)
    assert not independent and residual == 0 and combo == 0b111


def test_dense_rank_identity():
    assert dense_rank(np.eye(7, dtype=np.uint8)) == 7
