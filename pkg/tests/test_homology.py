from __future__ import annotations

import json
from math import comb

import numpy as np
import pytest

from gridlab import catalog
from gridlab import homology as hom
from gridlab.algebra import matrix_on_slice, slice_basis
from gridlab.complexes import build_maps, crossing_package, differential, package_from_parts
from gridlab.gf2 import dense_homology_dim
from gridlab.homology import (
    CertificateError,
    LBoundCertificate,
    compose_certificates,
    engine_for,
    homology_slice,
    homology_table,
    infer_direction,
    is_unknot_grid,
    lbound,
    load_certificate,
    tilde_bigraded,
    tilde_dim,
    torsion_order,
    u_map_rank,
)
from gridlab.polygons import build_combined
from test_complexes import drop_term

SMALL = ["unknot2", "unknot4a", "unknot4b", "trefoil5", "trefoil5-unknotted"]


def cert(name):
    path = catalog.certificate_path(name)
    return load_certificate(path.read_text(), str(path.parent))


def test_unknot2_slices():
    g = catalog.load("unknot2")
    assert homology_slice(g, 0, 0)[0] == 1
    assert homology_slice(g, -1, -1)[0] == 0
    for s in range(0, -4, -1):
        assert homology_slice(g, 2 * s, s)[0] == 1
        assert u_map_rank(g, 2 * s, s) == 1


def test_trefoil_homology_table():
    t = homology_table(catalog.load("trefoil5"), -3)
    nonzero = {k: v for k, v in t.dims.items() if v}
    assert nonzero == {(0, 1): 1, (-2, -1): 1, (-4, -2): 1, (-6, -3): 1}
    assert t.u_ranks[(0, 1)] == 0 and t.u_ranks[(-2, -1)] == 1


@pytest.mark.parametrize("name,value", [
    ("unknot2", 0), ("unknot4a", 0), ("unknot4b", 0), ("trefoil5", 1), ("trefoil5-unknotted", 0), ("figure8-6", 1),
])
@pytest.mark.parametrize("engine", ["multivariable", "collapsed"])
def test_torsion_order(name, value, engine):
    t = torsion_order(catalog.load(name), engine)
    assert t.status == "ok"
    assert t.value == value
    assert all(v == t.tower_count for v in t.row_dims.values())


def test_trefoil_torsion_location():
    t = torsion_order(catalog.load("trefoil5"))
    assert {k: v for k, v in t.torsion_dims.items() if v} == {(0, 1): 1}
    c = torsion_order(catalog.load("trefoil5"), "collapsed")
    # GH^- tensored with (n-1) two-dimensional factors: binomial multiplicities
    assert sorted(v for v in c.torsion_dims.values() if v) == sorted(comb(4, j) for j in range(5))


def test_figure_eight_torsion_location():
    t = torsion_order(catalog.load("figure8-6"))
    assert {k: v for k, v in t.torsion_dims.items() if v} == {(1, 1): 1, (0, 0): 1}


@pytest.mark.parametrize("name", ["unknot2", "unknot4a"])
def test_full_window_agrees_on_small_grids(name):
    g = catalog.load(name)
    full = torsion_order(g, full_window=True)
    assert full.status == "ok" and full.value == torsion_order(g).value
    assert full.window[0] < torsion_order(g).window[0]


def test_inconclusive_when_window_too_shallow():
    t = torsion_order(catalog.load("trefoil5"), B=0, max_B=0)
    assert t.status == "inconclusive" and t.value is None
    assert t.to_json()["torsion_order"] is None


def _dense_dim(g, d, s, dmap):
    b = slice_basis(g, d, s)
    bi, bo = slice_basis(g, d + 1, s), slice_basis(g, d - 1, s)
    din = matrix_on_slice(dmap, bi, b).to_dense() if len(bi) else np.zeros((len(b), 0), np.uint8)
    dout = matrix_on_slice(dmap, b, bo).to_dense() if len(bo) else np.zeros((0, len(b)), np.uint8)
    return dense_homology_dim(din, dout, len(b))


@pytest.mark.parametrize("name", SMALL)
def test_dense_oracle_agrees_on_every_window_slice(name):
    g = catalog.load(name)
    t = torsion_order(g)
    sl = engine_for(g)
    checked = 0
    for s in range(t.window[1], t.window[0] - 1, -1):
        for d in hom._maslov_range(sl, s):
            if not sl.dim(d, s):
                continue
            assert _dense_dim(g, d, s, sl.d) == sl.homology(d, s).dim, (d, s)
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("name", SMALL)
def test_dense_oracle_agrees_on_collapsed_slices(name):
    g = catalog.load(name)
    t = torsion_order(g, "collapsed")
    sl = engine_for(g, "collapsed")
    for s in range(t.window[1], t.window[0] - 1, -1):
        for d in hom._maslov_range(sl, s):
            dim = sl.dim(d, s)
            if not dim:
                continue
            din = _cols_to_dense(sl.dmatrix(d + 1, s), dim)
            dout = _cols_to_dense(sl.dmatrix(d, s), sl.dim(d - 1, s))
            assert dense_homology_dim(din, dout, dim) == sl.homology(d, s).dim


def _cols_to_dense(cols, nrows):
    out = np.zeros((nrows, len(cols)), dtype=np.uint8)
    for j, v in enumerate(cols):
        for i in range(nrows):
            out[i, j] = v >> i & 1
    return out


@pytest.mark.parametrize("name", ["trefoil5", "trefoil5-unknotted", "unknot4a"])
def test_collapsed_is_tensor_product(name):
    g = catalog.load(name)
    n = g.n
    mv, co = engine_for(g), engine_for(g, "collapsed")
    top = max(a for _, a in mv.table)
    lo = top - 6
    mv_dims = {}
    for s in range(top, lo - 1, -1):
        for d in hom._maslov_range(mv, s):
            mv_dims[(d, s)] = mv.homology(d, s).dim
    for s in range(top, lo - 1, -1):
        for d in hom._maslov_range(co, s):
            want = sum(comb(n - 1, j) * mv_dims.get((d + j, s + j), 0) for j in range(n))
            assert co.homology(d, s).dim == want, (d, s)


@pytest.mark.parametrize("name", ["trefoil5", "unknot4a"])
def test_u_rank_independent_of_variable(name):
    g = catalog.load(name)
    sl = engine_for(g)
    top = max(a for _, a in sl.table)
    for s in range(top, top - 4, -1):
        for d in hom._maslov_range(sl, s):
            ranks = {sl.u_rank(d, s, 1, v) for v in range(g.n)}
            assert len(ranks) == 1, (d, s, ranks)


@pytest.mark.parametrize("name,dim", [
    ("unknot2", 2), ("unknot4a", 8), ("unknot4b", 8), ("trefoil5", 48), ("trefoil5-unknotted", 16), ("figure8-6", 160),
])
def test_tilde_dim(name, dim):
    g = catalog.load(name)
    assert tilde_dim(g) == dim
    assert sum(tilde_bigraded(g).values()) == dim
    assert is_unknot_grid(g) == (dim == 2 ** (g.n - 1))


def test_trefoil_tilde_top():
    big = tilde_bigraded(catalog.load("trefoil5"))
    assert max(a for _, a in big) == 1
    assert big[(0, 1)] == 1


# ---------------------------------------------------------------- certificates

def test_trefoil_certificate():
    rep = lbound(cert("trefoil-cert"))
    assert (rep.lower, rep.upper, rep.exact, rep.residual_zero) == (1, 1, True, True)
    doc = rep.to_json()
    assert {k: doc[k] for k in ("lower", "upper", "exact")} == {"lower": 1, "upper": 1, "exact": True}
    assert doc["evidence"]["residual_zero"] is True


def test_three_step_certificate():
    rep = lbound(cert("trefoil-long-cert"))
    assert (rep.lower, rep.upper, rep.exact) == (1, 3, False)
    assert sum(rep.monomial) == 3


def test_round_trip_certificate_on_4x4():
    c = cert("unknot4-roundtrip-cert")
    assert c.directions == ["-to+", "+to-"]
    rep = lbound(c)
    assert (rep.lower, rep.upper, rep.residual_zero) == (0, 2, True)


def test_empty_certificate():
    rep = lbound(cert("unknot-cert"))
    assert (rep.lower, rep.upper, rep.exact) == (0, 0, True)


@pytest.mark.parametrize("m", [1, 2])
def test_composite_residual_zero(m):
    a, b = catalog.load("trefoil5"), catalog.load("trefoil5-unknotted")
    grids = [a, b, a][: m + 1]
    dirs = [infer_direction(x, y) for x, y in zip(grids, grids[1:])]
    pkgs = [crossing_package(x, y) for x, y in zip(grids, grids[1:])]
    comp = compose_certificates(pkgs, dirs, [differential(g, "filtered") for g in grids])
    assert comp.residual_zero and comp.witness is None
    assert sum(comp.monomial) == m


def test_corrupted_step_gives_nonzero_residual():
    a, b = catalog.load("unknot4a"), catalog.load("unknot4b")
    cd = build_combined(a, b)
    maps = build_maps(cd)
    x, y, m = next(maps["H_plus"].terms())
    maps["H_plus"] = drop_term(maps["H_plus"], x, y, m)
    pkg = package_from_parts(cd, maps)
    grids = [cd.original_plus, cd.original_minus]
    comp = compose_certificates([pkg], ["+to-"], [differential(g, "filtered") for g in grids])
    assert not comp.residual_zero and comp.witness


def test_certificate_errors():
    t, u = catalog.load("trefoil5"), catalog.load("trefoil5-unknotted")
    with pytest.raises(CertificateError, match="direction"):
        lbound(LBoundCertificate([t, u], ["-to+"]))
    with pytest.raises(CertificateError, match="unknot oracle"):
        lbound(LBoundCertificate([u, t], ["-to+"]))
    with pytest.raises(CertificateError, match="cross-commutation"):
        LBoundCertificate([t, t], ["+to-"]).validate()
    with pytest.raises(CertificateError, match="one direction tag"):
        LBoundCertificate([t, u], []).validate()


def test_inline_grid_texts_in_certificate():
    doc = {"grids": [catalog.text("trefoil5"), catalog.text("trefoil5-unknotted")], "direction": ["+to-"]}
    c = load_certificate(json.dumps(doc))
    assert c.grids == [catalog.load("trefoil5"), catalog.load("trefoil5-unknotted")]


def test_falsification_is_reported(monkeypatch):
    real = hom.torsion_order

    def inflated(g, **kw):
        r = real(g, **kw)
        r.value = 5
        return r

    monkeypatch.setattr(hom, "torsion_order", inflated)
    rep = lbound(cert("trefoil-cert"))
    assert rep.falsification and rep.lower == 5 and rep.upper == 1
    assert rep.to_json()["falsification"] is True
