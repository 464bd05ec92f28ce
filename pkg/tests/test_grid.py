import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus
from discrete_fk import shapes
from discrete_fk.errors import ShapeError
from discrete_fk.grid import (
    D4,
    Cell,
    D4Element,
    Subgraph,
    automorphisms,
    boundary,
    canonical_form,
    components,
    is_connected,
    is_simply_connected,
    is_strongly_connected,
    is_walled_in,
    slice,
    transform,
    walls_in,
)

cell_sets = st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=14)


def test_cell_adjacency():
    assert Cell(0, 0).adjacent(Cell(1, 0))
    assert not Cell(0, 0).adjacent(Cell(1, 1))
    assert not Cell(0, 0).adjacent(Cell(0, 0))


def test_subgraph_dedup_and_bbox():
    g = Subgraph([(2, 1), (0, 0), (2, 1), (-1, 3)])
    assert len(g) == 3
    assert g.bbox == (-1, 2, 0, 3)
    assert g.cells == ((0, 0), (2, 1), (-1, 3))


def test_empty_rejected():
    with pytest.raises(ShapeError, match="empty shape"):
        Subgraph([])


def test_immutable():
    g = shapes.plus()
    with pytest.raises(AttributeError):
        g.foo = 1


def test_boundary_examples():
    assert boundary(Subgraph([(0, 0)])) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert boundary(shapes.domino()) == {(-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (2, 0)}
    assert len(boundary(shapes.plus())) == 8


def test_slices_of_plus():
    g = shapes.plus()
    assert slice(g, "row", 0).cells == ((-1, 0), (0, 0), (1, 0))
    assert slice(g, "diagonal", 0).cells == ((0, 0),)
    assert slice(g, "row", 2).cells == ()
    assert slice(g, "column", 0).support() == (-1, 0, 1)
    with pytest.raises(ValueError):
        slice(g, "spiral", 0)


def test_connectivity_examples():
    assert is_connected(shapes.plus())
    assert not is_connected(Subgraph([(0, 0), (2, 0)]))
    assert is_connected(shapes.domino())
    assert len(components(Subgraph([(0, 0), (2, 0), (2, 1)]))) == 2


def test_strong_connectivity_examples():
    assert is_strongly_connected(shapes.plus())
    assert not is_strongly_connected(Subgraph([(0, 0), (2, 0), (1, 1)]))
    assert all(is_strongly_connected(shapes.path(k)) for k in range(1, 8))
    # row/column convex but not connected
    assert not is_strongly_connected(Subgraph([(0, 0), (1, 1)]))


def test_walls_in_examples():
    g = Subgraph([(-1, 0), (0, 0), (1, 0), (0, 1), (1, 1)])
    assert walls_in(slice(g, "row", 0), slice(g, "row", 1))
    h = Subgraph([(-1, 0), (0, 0), (1, 0), (0, 1), (1, 1), (2, 1)])
    assert not walls_in(slice(h, "row", 0), slice(h, "row", 1))
    assert not walls_in(slice(h, "row", 1), slice(h, "row", 0))
    assert walls_in(slice(h, "row", 0), slice(h, "row", 0))
    with pytest.raises(ValueError):
        walls_in(slice(h, "row", 0), slice(h, "column", 0))


def test_walled_in_examples():
    assert is_walled_in(shapes.square(2))
    assert is_walled_in(shapes.plus())
    assert not is_walled_in(shapes.s_tetromino())


def test_simple_connectivity_examples():
    assert not is_simply_connected(shapes.square_with_hole(3))
    assert all(is_simply_connected(shapes.square(k)) for k in range(1, 6))
    assert is_simply_connected(shapes.plus())
    # four squares meeting diagonally around an empty cell leave it open at the corners
    ring = Subgraph([(1, 0), (0, 1), (2, 1), (1, 2)])
    assert is_simply_connected(ring)


def test_transform_examples():
    rot = D4Element.named("rot90")
    assert canonical_form(transform(shapes.plus(), rot), "fixed") == canonical_form(shapes.plus(), "fixed")
    assert transform(shapes.domino(), rot) == Subgraph([(0, 0), (0, 1)])
    assert transform(shapes.plus(), D4Element()) == shapes.plus()


def test_canonical_form_examples():
    dom = Subgraph([(0, 0), (1, 0)])
    assert canonical_form(shapes.domino().translate(5, -3), "fixed") == dom
    assert canonical_form(Subgraph([(3, 3), (3, 4)]), "free") == dom
    assert canonical_form(shapes.plus(), "free") == shapes.plus().translate(1, 1)
    with pytest.raises(ValueError):
        canonical_form(dom, "loose")


def test_automorphism_counts():
    assert len(automorphisms(shapes.plus())) == 8
    assert len(automorphisms(shapes.domino())) == 4
    auts = automorphisms(shapes.l_tromino())
    assert len(auts) == 2
    assert {a.name for a in auts} == {"id", "flip_diag"}
    assert automorphisms(shapes.p_pentomino()) == [D4Element()]


def test_d4_group_closed_and_invertible():
    elems = [D4Element(i, tx, ty) for i in range(8) for tx in (-1, 0, 2) for ty in (0, 3)]
    linear = {e.linear for e in D4}
    for a, b in itertools.product(D4, repeat=2):
        assert a.compose(b).linear in linear
    for e in elems:
        assert e.compose(e.inverse()) == D4Element()
        assert e.inverse().compose(e) == D4Element()
    c = Cell(2, -5)
    for a, b in itertools.product(elems[:12], repeat=2):
        assert a.compose(b).apply(c) == a.apply(b.apply(c))


@settings(max_examples=150, deadline=None)
@given(cell_sets, st.integers(0, 7))
def test_predicates_invariant_under_d4(cells, k):
    g = Subgraph(cells)
    h = transform(g, D4[k])
    for pred in (is_connected, is_strongly_connected, is_walled_in, is_simply_connected):
        assert pred(g) == pred(h)
    b = boundary(g)
    assert not (b & g.cell_set)
    assert len(b) >= 4


@settings(max_examples=150, deadline=None)
@given(cell_sets)
def test_predicate_implication_chain(cells):
    g = Subgraph(cells)
    if is_walled_in(g):
        assert is_strongly_connected(g)
    if is_strongly_connected(g):
        assert is_connected(g)
        assert is_simply_connected(g)


def test_strongly_connected_implies_simply_connected_exhaustively():
    for g in corpus(8):
        if is_strongly_connected(g):
            assert is_simply_connected(g)


@settings(max_examples=100, deadline=None)
@given(cell_sets, st.integers(0, 7), st.integers(-3, 3), st.integers(-3, 3))
def test_canonical_form_orbit_constant(cells, k, dx, dy):
    g = Subgraph(cells)
    c = canonical_form(g, "free")
    assert canonical_form(c, "free") == c
    assert canonical_form(transform(g, D4Element(k, dx, dy)), "free") == c
    assert canonical_form(g.translate(dx, dy), "fixed") == canonical_form(g, "fixed")
