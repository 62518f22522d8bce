"""Generators for demonstration and benchmark geometries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AtomSet, Mesh
from .lattice import neighbor_pairs

R0 = 1.2405


def structured_quad_mesh(nx: int, ny: int, h=1.0, origin=(0.0, 0.0), skip=()) -> Mesh:
    """nx x ny quad4 grid. Elements listed in ``skip`` as (i, j) are left out,
    and nodes used by no element are dropped. Ids start at 1."""
    hx, hy = np.broadcast_to(np.asarray(h, dtype=float), (2,))
    skip = set(skip)
    grid = lambda i, j: j * (nx + 1) + i  # noqa: E731
    conns = []
    for j in range(ny):
        for i in range(nx):
            if (i, j) in skip:
                continue
            # Counter-clockwise from the (+,+) corner to match the quad4 corner table.
            conns.append([grid(i + 1, j + 1), grid(i, j + 1), grid(i, j), grid(i + 1, j)])
    used = sorted({n for c in conns for n in c})
    new_id = {old: k + 1 for k, old in enumerate(used)}
    xs = origin[0] + hx * (np.array(used) % (nx + 1))
    ys = origin[1] + hy * (np.array(used) // (nx + 1))
    elements = [("quad4", [new_id[n] for n in c]) for c in conns]
    return Mesh.from_arrays(
        np.column_stack([xs, ys]),
        elements,
        node_ids=[new_id[n] for n in used],
        element_ids=range(1, len(elements) + 1),
    )


def structured_hex_mesh(nx: int, ny: int, nz: int, h=1.0) -> Mesh:
    def nid(i, j, k):
        return (k * (ny + 1) + j) * (nx + 1) + i + 1

    coords = np.array(
        [[i * h, j * h, k * h] for k in range(nz + 1) for j in range(ny + 1) for i in range(nx + 1)], dtype=float
    )
    elems = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                elems.append(
                    (
                        "hex8",
                        [
                            nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k), nid(i, j + 1, k),
                            nid(i, j, k + 1), nid(i + 1, j, k + 1), nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1),
                        ],
                    )
                )
    return Mesh.from_arrays(coords, elems, node_ids=range(1, len(coords) + 1), element_ids=range(1, len(elems) + 1))


def checkerboard_lattice(origin, n_i: int, n_j: int, r0=R0, masses=1.0, tol=1e-3) -> AtomSet:
    """Square lattice of spacing r0 rotated 45 degrees: points
    origin + d (i + 1/2, j + 1/2) with i + j even and d = r0 / sqrt(2)."""
    d = r0 / np.sqrt(2.0)
    ii, jj = np.meshgrid(np.arange(n_i), np.arange(n_j), indexing="xy")
    keep = (ii + jj) % 2 == 0
    pts = np.asarray(origin, dtype=float) + d * np.column_stack([ii[keep] + 0.5, jj[keep] + 0.5])
    pairs = neighbor_pairs(pts, r0, tol)
    return AtomSet(pts, np.full(len(pts), float(masses)), pairs)


@dataclass
class DemoProblem:
    mesh: Mesh
    atoms: AtomSet
    reference_atoms: AtomSet
    anchors: np.ndarray
    center: np.ndarray
    h: float


def wave_demo(r0=R0) -> DemoProblem:
    """2D Arlequin wave demo.

    A 19 x 19 quad4 grid of edge h = 3 sqrt(2) r0 (about 5.2632) with the
    central 5 x 5 elements removed. Atoms fill the central 9 x 9 element
    block, giving 1458 atoms of which 1008 lie in the 56 overlap elements.
    The reference lattice covers the whole square.
    """
    h = 3.0 * np.sqrt(2.0) * r0
    hole = {(i, j) for i in range(7, 12) for j in range(7, 12)}
    mesh = structured_quad_mesh(19, 19, h, skip=hole)
    per_elem = 6  # lattice columns per element edge
    atoms = checkerboard_lattice((5 * h, 5 * h), 9 * per_elem, 9 * per_elem, r0)
    reference = checkerboard_lattice((0.0, 0.0), 19 * per_elem, 19 * per_elem, r0)
    c = np.array([9.5 * h, 9.5 * h])
    # Slightly off centre so no anchor ray runs along a mesh line.
    anchor = c + np.array([0.013 * h, 0.007 * h])
    return DemoProblem(mesh, atoms, reference, anchor[None], c, h)


def square_annulus(n_outer=10, n_hole=4, n_md=6, h=1.0, atoms_per_edge=4) -> DemoProblem:
    """Ring of quad4 elements around a pure-MD hole.

    The mesh is n_outer^2 with the central n_hole^2 removed; atoms fill the
    central n_md^2 elements, so the overlap is a square annulus of width
    (n_md - n_hole) / 2 elements.
    """
    if (n_outer - n_hole) % 2 or (n_md - n_hole) % 2 or not n_hole < n_md <= n_outer:
        raise ValueError("inconsistent annulus sizes")
    lo_h = (n_outer - n_hole) // 2
    hole = {(i, j) for i in range(lo_h, lo_h + n_hole) for j in range(lo_h, lo_h + n_hole)}
    mesh = structured_quad_mesh(n_outer, n_outer, h, skip=hole)
    lo_m = (n_outer - n_md) // 2
    r0 = np.sqrt(2.0) * h / atoms_per_edge
    n = n_md * atoms_per_edge
    atoms = checkerboard_lattice((lo_m * h, lo_m * h), n, n, r0)
    c = np.full(2, n_outer * h / 2)
    return DemoProblem(mesh, atoms, atoms, (c + np.array([1e-3, 2e-3]) * h)[None], c, h)


def benchmark_search_problem(n=20, n_atoms=2000, seed=0):
    """n x n unit quad mesh with jittered nodes and uniformly scattered atoms."""
    rng = np.random.default_rng(seed)
    mesh = structured_quad_mesh(n, n, 1.0)
    xy = mesh.coords.copy()
    interior = (xy > 0).all(axis=1) & (xy < n).all(axis=1)
    xy[interior] += rng.uniform(-0.2, 0.2, size=(interior.sum(), 2))
    mesh = Mesh.from_arrays(
        xy,
        [(e.kind, e.connectivity) for e in mesh.elements],
        node_ids=mesh.node_ids,
        element_ids=[e.id for e in mesh.elements],
    )
    atoms = AtomSet(rng.uniform(0, n, size=(n_atoms, 2)), np.ones(n_atoms), np.zeros((0, 2), int))
    return mesh, atoms
