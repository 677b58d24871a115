from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlab import catalog
from gridlab.algebra import (
    DegreeError,
    ModuleMap,
    SliceMismatch,
    SpaceMismatch,
    add,
    compose,
    element_to_vector,
    graded_part,
    identity,
    matrix_on_slice,
    multiplication,
    poly_mul,
    poly_str,
    scale,
    slice_basis,
    variable,
    vector_to_element,
    zero_map,
)
from gridlab.complexes import differential_map
from gridlab.gf2 import dense_rank, rank
from gridlab.states import state_list

monomials = st.lists(st.integers(0, 2), min_size=3, max_size=3).map(tuple)
polys = st.frozensets(monomials, max_size=4)


@given(polys, polys, polys)
def test_poly_ring_laws(p, q, r):
    assert poly_mul(p, q) == poly_mul(q, p)
    assert poly_mul(poly_mul(p, q), r) == poly_mul(p, poly_mul(q, r))
    assert poly_mul(p, p ^ q) == poly_mul(p, p) ^ poly_mul(p, q)


def test_identity_and_variable_composition():
    g = catalog.load("trefoil5")
    d = differential_map(g, "unblocked")
    assert compose(identity(g), d) == d
    assert compose(d, identity(g)) == d
    v = multiplication(g, 0)
    assert compose(v, v) == multiplication(g, 0, 2)
    assert poly_str(variable(5, 0, 2)) == "V0^2"


@pytest.mark.parametrize("name", ["unknot2", "trefoil5"])
def test_d_squared_zero(name):
    g = catalog.load(name)
    for fl in ("unblocked", "filtered", "tilde"):
        d = differential_map(g, fl)
        assert compose(d, d).is_zero()


@settings(deadline=None, max_examples=30)
@given(st.data())
def test_composition_is_associative(data):
    g = catalog.load("unknot4a")
    n_states = len(state_list(g))

    def random_map():
        cols = {}
        for x in data.draw(st.lists(st.integers(0, n_states - 1), max_size=5)):
            cols[x] = {data.draw(st.integers(0, n_states - 1)): data.draw(polys.map(
                lambda p: frozenset(m + (0,) for m in p)))}
        return ModuleMap(g, g, cols)

    f, h, k = random_map(), random_map(), random_map()
    assert compose(compose(f, h), k) == compose(f, compose(h, k))
    assert compose(f, add(h, k)) == add(compose(f, h), compose(f, k))
    assert add(f, f).is_zero()


def test_space_mismatch():
    a, b = catalog.load("unknot4a"), catalog.load("unknot4b")
    with pytest.raises(SpaceMismatch):
        compose(identity(a), identity(b))
    with pytest.raises(SpaceMismatch):
        add(identity(a), zero_map(a, b))


def test_degree_claims():
    g = catalog.load("trefoil5")
    d = differential_map(g, "filtered")
    d.check_degree()
    with pytest.raises(DegreeError):
        d.copy(degree=(0, 0)).check_degree()
    with pytest.raises(DegreeError):
        d.copy(mode="graded").check_degree()


def test_slice_examples_unknot2():
    g = catalog.load("unknot2")
    assert len(slice_basis(g, 5, 5)) == 0
    b = slice_basis(g, 0, 0)
    assert b.elements == [(state_list(g).index((0, 1)), (0, 0))]
    low = slice_basis(g, -2, -1)
    assert sorted(e for _, e in low.elements) == [(0, 1), (1, 0)]
    assert len(low) == 2


def test_variable_full_rank_on_unknot2():
    g = catalog.load("unknot2")
    for s in range(0, -4, -1):
        src, tgt = slice_basis(g, 2 * s, s), slice_basis(g, 2 * s - 2, s - 1)
        m = matrix_on_slice(multiplication(g, 0), src, tgt)
        assert m.rank() == len(src)


def test_identity_matrix_on_slice():
    g = catalog.load("trefoil5")
    b = slice_basis(g, -2, 0)
    m = matrix_on_slice(identity(g), b, b)
    assert m.cols == [1 << i for i in range(len(b))]


def test_trefoil_slice_matrix_rank_vs_dense():
    g = catalog.load("trefoil5")
    d = differential_map(g, "unblocked")
    m = matrix_on_slice(d, slice_basis(g, 0, 1), slice_basis(g, -1, 1))
    assert m.rank() == dense_rank(m.to_dense()) == rank(m.cols)
    with pytest.raises(SliceMismatch):
        matrix_on_slice(d, slice_basis(g, 0, 1), slice_basis(g, -2, 1))


def test_element_vector_round_trip():
    g = catalog.load("trefoil5")
    b = slice_basis(g, -2, 0)
    v = (1 << len(b)) - 1
    assert element_to_vector(vector_to_element(v, b), b) == v


@pytest.mark.parametrize("name", catalog.names())
def test_associated_graded_is_the_unblocked_differential(name):
    g = catalog.load(name)
    assert graded_part(differential_map(g, "filtered"), 0).cols == differential_map(g, "unblocked").cols


def test_graded_part_of_a_variable():
    g = catalog.load("unknot4a")
    v = multiplication(g, 0)
    assert graded_part(v, -1).cols == v.cols
    assert graded_part(v, 0).is_zero()


def test_scale_lowers_degree():
    g = catalog.load("unknot4a")
    d = differential_map(g, "unblocked")
    s = scale(d, variable(4, 2))
    assert s.degree == (-3, -1)
    s.check_degree()


def test_json_export_is_canonical():
    g = catalog.load("unknot4a")
    d = differential_map(g, "filtered")
    doc = d.to_json()
    assert set(doc) == {"source_grid_hash", "target_grid_hash", "degree", "entries"}
    keys = [(e[0], e[1]) for e in doc["entries"]]
    assert keys == sorted(keys)
    assert json.loads(d.dumps()) == doc
