from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crossing_pairs
from gridlab import catalog
from gridlab.grid import (
    GridConsistencyError,
    GridDiagram,
    GridFormatError,
    NotAKnotError,
    apply_column_swap,
    designate_plus,
    detect_cross_commutation,
    detect_row_cross_commutation,
    mirror,
    parse_grid,
    require_knot,
    rotate_columns,
    serialize_grid,
    trace_components,
    transpose,
    writhe,
)


@st.composite
def grid_diagrams(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    xs = draw(st.permutations(range(n)))
    os_ = draw(st.permutations(range(n)).filter(lambda p: all(a != b for a, b in zip(xs, p))))
    return GridDiagram(n, tuple(xs), tuple(os_))


def test_parse_small():
    g = parse_grid("n=2\nX=0,1\nO=1,0")
    assert g.n == 2 and g.x_rows == (0, 1) and g.o_rows == (1, 0)


def test_collision_reported_with_column():
    with pytest.raises(GridFormatError, match="collision in column 0"):
        parse_grid("n=2\nX=0,1\nO=0,1")


@pytest.mark.parametrize("text,line,field", [
    ("n=3\nX=0,1,1\nO=1,2,0", 2, "X"),
    ("n=3\nX=0,1,2\nO=1,2", 3, "O"),
    ("n=x\nX=0\nO=0", 1, "n"),
    ("n=2\nX=0,1\nQ=1,0", 3, "Q"),
    ("n=2\nX=0,1", None, "O"),
    ("n=2\nX=0,a\nO=1,0", 2, "X"),
])
def test_format_errors_carry_location(text, line, field):
    with pytest.raises(GridFormatError) as err:
        parse_grid(text)
    assert err.value.line == line
    assert err.value.field == field


def test_catalog_round_trip_bit_exact():
    for name in catalog.names():
        text = catalog.text(name)
        assert serialize_grid(parse_grid(text)) == text


@given(grid_diagrams())
def test_round_trip(g):
    assert parse_grid(serialize_grid(g)) == g


def test_spec_trefoil_text_is_a_knot():
    g = parse_grid("n=5\nX=4,0,1,2,3\nO=1,2,3,4,0")
    assert trace_components(g) == 1


def test_components():
    assert trace_components(catalog.load("unknot2")) == 1
    split = GridDiagram(4, (0, 1, 2, 3), (1, 0, 3, 2))
    assert trace_components(split) == 2
    with pytest.raises(NotAKnotError):
        require_knot(split)
    for name in catalog.names():
        assert trace_components(catalog.load(name)) == 1


@given(grid_diagrams(), st.integers(0, 10))
def test_components_invariant_under_swap(g, c):
    assert trace_components(apply_column_swap(g, c % g.n)) == trace_components(g)


def test_writhe_values():
    assert writhe(catalog.load("unknot2")) == 0
    assert writhe(catalog.load("trefoil5")) == 3
    # the grid from the task text is the mirror image
    assert writhe(parse_grid("n=5\nX=4,0,1,2,3\nO=1,2,3,4,0")) == -3


@given(grid_diagrams())
def test_mirror_negates_writhe(g):
    assert writhe(mirror(g)) == -writhe(g)


def test_swap_involution():
    g = catalog.load("trefoil5")
    for c in range(g.n):
        assert apply_column_swap(apply_column_swap(g, c), c) == g
    u = catalog.load("unknot2")
    assert apply_column_swap(u, 0) == GridDiagram(2, (1, 0), (0, 1))


def test_detect_interleaved():
    a = GridDiagram(4, (0, 1, 2, 3), (2, 3, 0, 1))
    b = apply_column_swap(a, 0)
    w = detect_cross_commutation(a, b)
    assert w is not None and w.column == 0 and w.strip_rows == (0, 1, 2, 3)
    assert detect_cross_commutation(a, a) is None


def test_nested_is_not_cross_commutation():
    a = GridDiagram(4, (0, 1, 3, 2), (3, 2, 1, 0))   # column 1 span {1,2} inside column 0 span {0,3}
    assert detect_cross_commutation(a, apply_column_swap(a, 0)) is None


def test_designate_plus_catalog_pairs():
    for plus, minus in (("trefoil5", "trefoil5-unknotted"), ("unknot4b", "unknot4a")):
        a, b = catalog.load(plus), catalog.load(minus)
        w = detect_cross_commutation(a, b)
        assert designate_plus(a, b, w) == ("a", 2)
        w2 = detect_cross_commutation(b, a)
        assert designate_plus(b, a, w2) == ("b", -2)


def test_designate_plus_guard():
    a = catalog.load("trefoil5")
    w = detect_cross_commutation(a, apply_column_swap(a, 1))
    with pytest.raises(GridConsistencyError):
        designate_plus(a, apply_column_swap(a, 2), w)


def test_all_4x4_pairs_designate_including_seam():
    seam = 0
    for a, b in crossing_pairs(4):
        w = detect_cross_commutation(a, b)
        tag, diff = designate_plus(a, b, w)
        assert abs(diff) == 2
        assert designate_plus(b, a, detect_cross_commutation(b, a))[0] == ("b" if tag == "a" else "a")
        seam += w.column == a.n - 1
    assert seam > 0


@settings(max_examples=200)
@given(grid_diagrams(min_n=3, max_n=6), st.integers(0, 10))
def test_writhe_changes_by_two(g, c):
    c %= g.n
    h = apply_column_swap(g, c)
    w = detect_cross_commutation(g, h)
    if w is None or trace_components(g) != 1:
        return
    tag, diff = designate_plus(g, h, w)
    assert abs(diff) == 2


@given(grid_diagrams())
def test_transpose_involution(g):
    assert transpose(transpose(g)) == g


@given(grid_diagrams(min_n=3), st.integers(0, 10))
def test_row_detection_is_column_detection_of_transpose(g, r):
    ta = transpose(g)
    tb = apply_column_swap(ta, r % g.n)
    a, b = transpose(ta), transpose(tb)
    assert detect_row_cross_commutation(a, b) == detect_cross_commutation(ta, tb)


@given(grid_diagrams(), st.integers(-7, 7))
def test_rotation_preserves_components(g, k):
    assert trace_components(rotate_columns(g, k)) == trace_components(g)
