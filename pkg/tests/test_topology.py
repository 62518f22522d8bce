from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arlequin.cells import locate_atoms
from arlequin.core import AtomSet, ElementLocation, IsoCoords, Mesh
from arlequin.demo import square_annulus, structured_hex_mesh, structured_quad_mesh
from arlequin.raytrace import BadAnchorError
from arlequin.topology import (
    FE_SIDE,
    MD_SIDE,
    BoundaryError,
    boundary_loops,
    build_coupling_map,
    coupling_elements,
    decompose,
    extract_boundary,
    label_sides,
)


def loc(atom, elem):
    return ElementLocation(atom, elem, IsoCoords("quad4", (0.0, 0.0)), "in")


def test_coupling_elements():
    assert coupling_elements([]) == set()
    assert coupling_elements([loc(0, 7)]) == {7}
    out = ElementLocation(1, 3, IsoCoords("quad4", (2.0, 0.0)), "out")
    assert coupling_elements([loc(0, 7), out, loc(2, 7)]) == {7}


def test_triangles():
    mesh = Mesh.from_arrays([[0, 0], [1, 0], [0, 1], [1, 1]], [("tri3", [0, 1, 2]), ("tri3", [1, 3, 2])])
    assert len(extract_boundary([0], mesh)) == 3
    edges = extract_boundary([0, 1], mesh)
    assert len(edges) == 4
    assert (1, 2) not in {e.key for e in edges}
    assert all(e.key == tuple(sorted(e.nodes)) for e in edges)


@given(st.integers(1, 8), st.integers(1, 8))
def test_patch_edge_count(n, m):
    mesh = structured_quad_mesh(n, m)
    assert len(extract_boundary([e.id for e in mesh.elements], mesh)) == 2 * (n + m)


@pytest.mark.parametrize("nx, ny, nz", [(1, 1, 1), (2, 3, 1), (3, 2, 4)])
def test_hex_block_face_count(nx, ny, nz):
    mesh = structured_hex_mesh(nx, ny, nz)
    faces = extract_boundary([e.id for e in mesh.elements], mesh)
    assert len(faces) == 2 * (nx * ny + ny * nz + nx * nz)
    assert all(len(f.triangles()) == 2 for f in faces)


def test_tet_pair_shares_one_face():
    coords = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
    mesh = Mesh.from_arrays(coords, [("tet4", [0, 1, 2, 3]), ("tet4", [1, 2, 3, 4])])
    assert len(extract_boundary([0, 1], mesh)) == 6


@given(st.integers(0, 10_000))
def test_repetition_scan_matches_multiset(seed):
    rng = np.random.default_rng(seed)
    mesh = structured_quad_mesh(6, 5)
    subset = [e.id for e in mesh.elements if rng.random() < 0.5] or [1]
    counts = Counter(s.key for s in decompose(mesh, subset))
    got = {s.key for s in extract_boundary(subset, mesh)}
    assert got == {k for k, c in counts.items() if c == 1}
    # Every boundary node is owned by a coupling element.
    owned = {n for eid in subset for n in mesh.element_by_id[eid].connectivity}
    assert {n for k in got for n in k} <= owned


def test_errors():
    mesh = structured_quad_mesh(2, 2)
    with pytest.raises(BoundaryError):
        extract_boundary([], mesh)
    with pytest.raises(BoundaryError):
        boundary_loops(extract_boundary([1], mesh)[:3])


def test_annulus_loops_and_sides():
    pb = square_annulus()
    cmap = build_coupling_map(pb.mesh, locate_atoms(pb.mesh, pb.atoms), pb.anchors)
    assert boundary_loops(cmap.boundary) == 2
    assert set(cmap.sides) == set(cmap.boundary_nodes)
    c = pb.center
    for nid, side in cmap.sides.items():
        r = np.abs(pb.mesh.coords[pb.mesh.node_row[nid]] - c).max()
        assert side == (MD_SIDE if r == pytest.approx(2.0) else FE_SIDE)
        assert r in (pytest.approx(2.0), pytest.approx(3.0))


def test_strip_labels():
    mesh = structured_quad_mesh(4, 1)
    atoms = AtomSet([[0.5 + i, 0.5] for i in range(4)], np.ones(4))
    cmap = build_coupling_map(mesh, locate_atoms(mesh, atoms))
    sides = label_sides(mesh, cmap.boundary, [[-0.5, 0.5]])
    for nid, s in sides.items():
        x = mesh.coords[mesh.node_row[nid], 0]
        if x == 0:
            assert s == MD_SIDE
        else:
            assert s == FE_SIDE


def _l_problem():
    n = 12
    hole = {(i, j) for i in range(3, 9) for j in range(3, 6)} | {(i, j) for i in range(3, 6) for j in range(3, 9)}
    ring = {(i + di, j + dj) for i, j in hole for di in (-1, 0, 1) for dj in (-1, 0, 1)} - hole
    mesh = structured_quad_mesh(n, n, skip=hole)
    cells = sorted(ring | hole)
    atoms = AtomSet([[i + 0.5, j + 0.5] for i, j in cells], np.ones(len(cells)))
    anchors = np.array([[7.513, 4.507], [4.511, 7.517]])
    return mesh, atoms, anchors, hole


def _flood_fill_md_nodes(mesh, hole, start):
    """Node ids touching pure-MD cells reachable from ``start`` through the hole."""
    seen, stack = set(), [start]
    while stack:
        c = stack.pop()
        if c in seen or c not in hole:
            continue
        seen.add(c)
        i, j = c
        stack += [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
    corners = {(i + di, j + dj) for i, j in seen for di in (0, 1) for dj in (0, 1)}
    lookup = {tuple(np.round(x).astype(int)): nid for nid, x in zip(mesh.node_ids, mesh.coords)}
    return {lookup[c] for c in corners if c in lookup}


def test_l_shaped_region_matches_flood_fill():
    mesh, atoms, anchors, hole = _l_problem()
    cmap = build_coupling_map(mesh, locate_atoms(mesh, atoms), anchors)
    assert boundary_loops(cmap.boundary) == 2
    md_nodes = _flood_fill_md_nodes(mesh, hole, (7, 4))
    for nid, side in cmap.sides.items():
        assert side == (MD_SIDE if nid in md_nodes else FE_SIDE), nid


def test_anchor_inside_coupling_element_is_rejected():
    pb = square_annulus()
    locs = locate_atoms(pb.mesh, pb.atoms)
    with pytest.raises(BadAnchorError):
        build_coupling_map(pb.mesh, locs, [[2.5, 2.5]])
    with pytest.raises(BadAnchorError):
        build_coupling_map(pb.mesh, locs, [[50.0, 50.0]])


def test_no_atoms_gives_empty_map():
    mesh = structured_quad_mesh(2, 2)
    cmap = build_coupling_map(mesh, [], [[0.5, 0.5]])
    assert cmap.elements == () and cmap.boundary == []
