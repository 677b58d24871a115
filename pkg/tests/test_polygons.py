from __future__ import annotations

import random

import pytest

from conftest import crossing_pairs
from gridlab import catalog
from gridlab.arrangement import oracle_polygons
from gridlab.complexes import HOMOTOPY_DEGREE
from gridlab.polygons import (
    SCALE,
    bigon_census,
    build_combined,
    empty_rectangles,
    hexagons,
    pentagons,
    polygons_from,
    rasterize,
    rectangles_from,
)
from gridlab.states import gradings, state_list
from test_states import all_rectangles

KINDS = ("pentagon_s", "pentagon_t", "hexagon_st", "hexagon_ts")
SOURCE = {"pentagon_s": "plus", "pentagon_t": "minus", "hexagon_st": "minus", "hexagon_ts": "plus"}


def primary_set(cd, kind):
    src = cd.plus if SOURCE[kind] == "plus" else cd.minus
    return {(p.source, p.target, rasterize(cd, p), p.o_count)
            for x in state_list(src) for p in polygons_from(cd, kind, x)}


def oracle_set(cd, kind):
    return {(q.source, q.target, q.cells, q.o_rows) for q in oracle_polygons(cd, kind)}


def test_rectangle_examples():
    g = catalog.load("unknot2")
    assert empty_rectangles(g, (0, 1), (0, 1)) == []
    assert len(empty_rectangles(g, (0, 1), (1, 0))) == 2
    assert len(empty_rectangles(g, (1, 0), (0, 1))) == 2


@pytest.mark.parametrize("name", ["trefoil5", "figure8-6"])
def test_rectangles_match_brute_force(name):
    g = catalog.load(name)
    rng = random.Random(7)
    for x in rng.sample(state_list(g), 5):
        brute = sorted((y, no, nx) for y, no, nx, inside in all_rectangles(g, x) if inside == 0)
        got = sorted((r.target, r.num_o, r.num_x) for r in rectangles_from(g, x))
        assert got == brute


def test_rectangle_corners():
    g = catalog.load("trefoil5")
    for x in state_list(g)[:20]:
        for r in rectangles_from(g, x):
            diff = [j for j in range(g.n) if r.source[j] != r.target[j]]
            assert sorted(diff) == sorted((r.left, r.right))


def test_combined_geometry_4x4():
    cd = build_combined(catalog.load("unknot4a"), catalog.load("unknot4b"))
    assert [h % SCALE for h in cd.crossing_heights] == [12] * 4
    assert [(h - 12) // SCALE for h in cd.crossing_heights] == sorted(cd.marking_rows)
    for k, gx in enumerate(cd.gamma_x):
        assert gx in (SCALE * cd.c + 6, SCALE * cd.c + 26)
        # gamma bulges toward the column of the marking in its band
        assert (gx > cd.beta_x) == (cd.marking_cols[k] == 1)
    kinds = cd.marking_kinds
    assert kinds[cd.t_index] == "X" and kinds[(cd.t_index + 1) % 4] == "X"


def test_roles_swapped_give_the_same_points():
    a, b = catalog.load("unknot4a"), catalog.load("unknot4b")
    one, two = build_combined(a, b), build_combined(b, a)
    assert one.plus == two.plus and one.minus == two.minus
    assert (one.s_index, one.t_index) == (two.s_index, two.t_index)
    assert one.plus_is_a != two.plus_is_a


def test_bigon_census():
    for a, b in list(crossing_pairs(4)) + [(catalog.load("trefoil5"), catalog.load("trefoil5-unknotted"))]:
        assert bigon_census(build_combined(a, b)) == [1, 1, 1, 1]


def test_no_polygons_between_states_differing_in_three_places():
    cd = build_combined(catalog.load("unknot4a"), catalog.load("unknot4b"))
    states = state_list(cd.plus)
    for x in states:
        for y in states:
            if sum(a != b for a, b in zip(x, y)) < 3:
                continue
            assert pentagons(cd, "s", x, y) == [] and pentagons(cd, "t", x, y) == []
            assert hexagons(cd, "st", x, y) == [] and hexagons(cd, "ts", x, y) == []


def test_polygons_are_deterministic_and_distinct():
    cd = build_combined(catalog.load("trefoil5"), catalog.load("trefoil5-unknotted"))
    for kind in KINDS:
        src = cd.plus if SOURCE[kind] == "plus" else cd.minus
        for x in state_list(src)[:40]:
            first = polygons_from(cd, kind, x)
            assert first == polygons_from(cd, kind, x)
            assert len({rasterize(cd, p) for p in first}) == len(first)


def test_polygon_shape():
    cd = build_combined(catalog.load("trefoil5"), catalog.load("trefoil5-unknotted"))
    for x in state_list(cd.plus):
        for p in polygons_from(cd, "pentagon_s", x):
            assert p.switches == (cd.s_index,)
            assert len({j for j in range(5) if p.source[j] != p.target[j]}) <= 2
        for p in polygons_from(cd, "hexagon_ts", x):
            assert p.corner_order() == (cd.t_index, cd.s_index)
    for x in state_list(cd.minus):
        for p in polygons_from(cd, "hexagon_st", x):
            assert p.corner_order() == (cd.s_index, cd.t_index)


def test_hexagon_terms_have_homotopy_degree():
    cd = build_combined(catalog.load("unknot4a"), catalog.load("unknot4b"))
    for kind, g in (("hexagon_st", cd.minus), ("hexagon_ts", cd.plus)):
        for x in state_list(g):
            m0, _, a0 = gradings(g, x)
            for p in hexagons(cd, kind[-2:], x, x) + polygons_from(cd, kind, x):
                m1, _, a1 = gradings(g, p.target)
                assert m1 - 2 * p.num_o - m0 == HOMOTOPY_DEGREE[0]
                assert a1 - p.num_o - a0 <= 0


@pytest.mark.parametrize("kind", KINDS)
def test_oracle_agreement_catalog_4x4(kind):
    cd = build_combined(catalog.load("unknot4a"), catalog.load("unknot4b"))
    prim = primary_set(cd, kind)
    assert prim == oracle_set(cd, kind)
    assert prim


def test_oracle_agreement_every_4x4_pair():
    totals = dict.fromkeys(KINDS, 0)
    for a, b in crossing_pairs(4):
        cd = build_combined(a, b)
        for kind in KINDS:
            prim = primary_set(cd, kind)
            assert prim == oracle_set(cd, kind), (a, b, kind)
            totals[kind] += len(prim)
    assert all(totals.values())
