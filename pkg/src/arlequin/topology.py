"""Coupling region, its boundary, and which side of the overlap each boundary node faces."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .core import ArlequinError, ElementLocation, Mesh
from .raytrace import T_BAND, BadAnchorError, Ray, RayGrazingError, point_str, raw_hits, ray_hits

MD_SIDE = "md_side"
FE_SIDE = "fe_side"

# Local node tuples of each element's sub-entities, in element node order.
FACETS = {
    "bar2": ((0,), (1,)),
    "tri3": ((0, 1), (1, 2), (2, 0)),
    "quad4": ((0, 1), (1, 2), (2, 3), (3, 0)),
    "tet4": ((0, 1, 2), (0, 1, 3), (1, 2, 3), (0, 2, 3)),
    "hex8": ((0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7)),
}


class BoundaryError(ArlequinError):
    pass


@dataclass(frozen=True)
class SurfaceObject:
    key: tuple[int, ...]  # node ids, ascending
    owner: int
    nodes: tuple[int, ...]  # node ids in element order

    def triangles(self) -> list[tuple[int, int, int]]:
        """Planar pieces for ray tests; a quad face (p1..p4) splits along p1-p3."""
        if len(self.nodes) == 4:
            p1, p2, p3, p4 = self.nodes
            return [(p1, p2, p3), (p1, p3, p4)]
        return [self.nodes]


@dataclass
class CouplingMap:
    elements: tuple[int, ...]
    locations: list[ElementLocation]
    boundary: list[SurfaceObject]
    sides: dict[int, str] = field(default_factory=dict)

    @property
    def boundary_nodes(self) -> list[int]:
        return sorted({n for s in self.boundary for n in s.key})

    def location_of(self) -> dict[int, ElementLocation]:
        return {loc.atom: loc for loc in self.locations}

    def nodes(self, mesh: Mesh) -> list[int]:
        """Ids of every node touched by a coupling element, ascending."""
        return sorted({n for e in self.elements for n in mesh.element_by_id[e].connectivity})


def coupling_elements(locations) -> set[int]:
    return {loc.element for loc in locations if loc.status == "in"}


def decompose(mesh: Mesh, element_ids) -> list[SurfaceObject]:
    out = []
    for eid in element_ids:
        e = mesh.element_by_id[eid]
        if e.kind not in FACETS:
            raise BoundaryError(f"unknown element kind {e.kind!r}")
        for local in FACETS[e.kind]:
            nodes = tuple(e.connectivity[i] for i in local)
            out.append(SurfaceObject(tuple(sorted(nodes)), eid, nodes))
    return out


def _unique_by_scan(objects: list[SurfaceObject]) -> list[SurfaceObject]:
    """Keep objects whose key occurs once: after sorting, first and last
    occurrence of a key coincide exactly when it is unique."""
    srt = sorted(objects, key=lambda s: (s.key, s.owner))
    first, last = {}, {}
    for i, s in enumerate(srt):
        first.setdefault(s.key, i)
        last[s.key] = i
    return [s for i, s in enumerate(srt) if first[s.key] == last[s.key] == i]


def extract_boundary(element_ids, mesh: Mesh) -> list[SurfaceObject]:
    ids = sorted(element_ids)
    if not ids:
        raise BoundaryError("empty element subset")
    objects = decompose(mesh, ids)
    unique = _unique_by_scan(objects)
    counts = Counter(s.key for s in objects)
    if {s.key for s in unique} != {k for k, c in counts.items() if c == 1}:
        raise BoundaryError("repetition scan disagrees with multiset count")
    return unique


def boundary_primitives(mesh: Mesh, boundary: list[SurfaceObject]):
    """Coordinates of ray-test primitives and, per primitive, its node ids.

    1D boundaries are points (s, 1, 1), 2D edges (s, 2, 2), 3D faces are
    triangles (s, 3, 3).
    """
    conn = [t for s in boundary for t in s.triangles()] if mesh.dimension == 3 else [s.nodes for s in boundary]
    if not conn:
        return np.zeros((0, mesh.dimension, mesh.dimension)), []
    rows = np.array([[mesh.node_row[n] for n in c] for c in conn])
    return mesh.coords[rows], [set(c) for c in conn]


def nearest_anchor(anchors, x) -> np.ndarray:
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    return anchors[np.argmin(np.linalg.norm(anchors - x, axis=1))]


def check_anchors(mesh: Mesh, coupling: CouplingMap, anchors):
    """Reject anchors inside a coupling element or not enclosed by the boundary."""
    from .inverse_iso import inverse_map_batch, status_batch

    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if anchors.size == 0:
        raise BadAnchorError("no anchor given")
    if anchors.shape[1] != mesh.dimension:
        raise BadAnchorError(f"anchor dimension {anchors.shape[1]} != mesh dimension {mesh.dimension}")
    prims, _ = boundary_primitives(mesh, coupling.boundary)
    centre = prims.reshape(-1, mesh.dimension).mean(axis=0)
    for a in anchors:
        for eid in coupling.elements:
            e = mesh.element_by_id[eid]
            iso, valid = inverse_map_batch(e.kind, mesh.element_coords(e)[None], a[None])
            if status_batch(e.kind, iso, valid)[0]:
                raise BadAnchorError(f"anchor {point_str(a)} lies inside coupling element {eid}")
        dirs = list(np.eye(mesh.dimension)) + list(-np.eye(mesh.dimension))
        if np.linalg.norm(a - centre) > 0:
            dirs.append(a - centre)
        for d in dirs:
            if not ray_hits(Ray(a, a + d), prims):
                raise BadAnchorError(f"anchor {point_str(a)} is not enclosed by the coupling boundary")


def label_sides(mesh: Mesh, boundary: list[SurfaceObject], anchors) -> dict[int, str]:
    """md_side when the ray from the nearest anchor reaches the node without
    crossing the boundary first; fe_side otherwise."""
    prims, prim_nodes = boundary_primitives(mesh, boundary)
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    sides = {}
    for nid in sorted({n for s in boundary for n in s.key}):
        x = mesh.coords[mesh.node_row[nid]]
        ray = Ray(nearest_anchor(anchors, x), x)
        t, hit = raw_hits(ray, prims)
        near_one = hit & (np.abs(t - 1) <= T_BAND)
        for p in np.flatnonzero(near_one):
            if nid not in prim_nodes[p]:
                raise RayGrazingError(
                    f"ray from anchor {point_str(ray.anchor)} to node {nid} meets another surface at the node; adjust the anchor"
                )
        before = hit & (t > 0) & (t < 1 - T_BAND)
        sides[nid] = FE_SIDE if before.any() else MD_SIDE
    return sides


def build_coupling_map(mesh: Mesh, locations, anchors=None) -> CouplingMap:
    inside = [loc for loc in locations if loc.status == "in"]
    elems = tuple(sorted(coupling_elements(inside)))
    if not elems:
        return CouplingMap((), [], [], {})
    boundary = extract_boundary(elems, mesh)
    cmap = CouplingMap(elems, sorted(inside, key=lambda l: l.atom), boundary)
    if anchors is not None and len(anchors):
        check_anchors(mesh, cmap, anchors)
        cmap.sides = label_sides(mesh, boundary, anchors)
    return cmap


def boundary_loops(boundary: list[SurfaceObject]) -> int:
    """Number of connected components of a 2D boundary edge graph.

    Raises if a node has odd degree, since the edges then cannot close.
    """
    adj = defaultdict(set)
    for s in boundary:
        if len(s.key) != 2:
            raise BoundaryError("loop counting needs 2D edges")
        a, b = s.key
        adj[a].add(b)
        adj[b].add(a)
    if any(len(v) % 2 for v in adj.values()):
        raise BoundaryError("boundary edges do not form closed loops")
    seen, loops = set(), 0
    for start in adj:
        if start in seen:
            continue
        loops += 1
        stack = [start]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adj[n] - seen)
    return loops
