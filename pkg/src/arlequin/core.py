"""Domain model shared by every stage: meshes, atoms, iso-coordinates, config."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

KINDS = ("bar2", "tri3", "quad4", "tet4", "hex8")

NODES_PER_KIND = {"bar2": 2, "tri3": 3, "quad4": 4, "tet4": 4, "hex8": 8}
DIM_OF_KIND = {"bar2": 1, "tri3": 2, "quad4": 2, "tet4": 3, "hex8": 3}
ISO_LEN = {"bar2": 1, "tri3": 3, "quad4": 2, "tet4": 4, "hex8": 3}

# Corner iso-coordinates. quad4 follows the assignment for which the closed-form
# inverse (Hua) is consistent with the bilinear forward map.
QUAD4_CORNERS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
HEX8_CORNERS = np.array(
    [
        [-1, -1, -1],
        [1, -1, -1],
        [1, 1, -1],
        [-1, 1, -1],
        [-1, -1, 1],
        [1, -1, 1],
        [1, 1, 1],
        [-1, 1, 1],
    ],
    dtype=float,
)
BAR2_CORNERS = np.array([[-1.0], [1.0]])


class ArlequinError(Exception):
    """Base class for errors raised by this package."""


class KindMismatchError(ArlequinError, ValueError):
    pass


class DegenerateElementError(ArlequinError, ValueError):
    pass


@dataclass(frozen=True)
class Node:
    id: int
    coords: tuple[float, ...]


@dataclass(frozen=True)
class Element:
    id: int
    kind: str
    connectivity: tuple[int, ...]


@dataclass(frozen=True)
class Mesh:
    dimension: int
    nodes: tuple[Node, ...]
    elements: tuple[Element, ...]

    @classmethod
    def from_arrays(cls, coords, elements: Sequence[tuple[str, Sequence[int]]], node_ids=None, element_ids=None):
        """Build a mesh from a coordinate array and (kind, connectivity) pairs.

        Connectivity refers to node ids; when ``node_ids`` is omitted, ids are
        ``0..n-1`` so connectivity can be given as row indices.
        """
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if node_ids is None:
            node_ids = range(len(coords))
        if element_ids is None:
            element_ids = range(len(elements))
        nodes = tuple(Node(int(i), tuple(float(c) for c in x)) for i, x in zip(node_ids, coords))
        elems = tuple(
            Element(int(eid), kind, tuple(int(n) for n in conn))
            for eid, (kind, conn) in zip(element_ids, elements)
        )
        return cls(coords.shape[1], nodes, elems)

    @cached_property
    def coords(self) -> np.ndarray:
        out = np.array([n.coords for n in self.nodes], dtype=float).reshape(len(self.nodes), self.dimension)
        out.setflags(write=False)
        return out

    @cached_property
    def node_ids(self) -> np.ndarray:
        return np.array([n.id for n in self.nodes], dtype=int)

    @cached_property
    def node_row(self) -> dict[int, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    @cached_property
    def element_by_id(self) -> dict[int, Element]:
        return {e.id: e for e in self.elements}

    def rows(self, element: Element) -> np.ndarray:
        """Row indices into ``coords`` for the element's nodes."""
        return np.array([self.node_row[n] for n in element.connectivity], dtype=int)

    def element_coords(self, element: Element) -> np.ndarray:
        return self.coords[self.rows(element)]

    def max_element_extent(self) -> np.ndarray:
        """Largest bounding-box edge of any element, per axis."""
        ext = np.zeros(self.dimension)
        for e in self.elements:
            x = self.element_coords(e)
            ext = np.maximum(ext, x.max(axis=0) - x.min(axis=0))
        return ext


@dataclass(frozen=True)
class AtomSet:
    """Atom positions, masses and the nearest-neighbour pair list.

    ``pairs`` holds index pairs (i < j) into ``positions``; the equilibrium
    distance vector of a pair is ``positions[j] - positions[i]``.
    """

    positions: np.ndarray
    masses: np.ndarray
    pairs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=int))
    ids: np.ndarray | None = None

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.size == 0:
            pos = pos.reshape(0, pos.shape[-1] if pos.ndim == 2 else 2)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        pairs = np.asarray(self.pairs, dtype=int).reshape(-1, 2)
        ids = np.arange(len(pos)) if self.ids is None else np.asarray(self.ids, dtype=int)
        if len(masses) != len(pos) or len(ids) != len(pos):
            raise ValueError("positions, masses and ids must have equal length")
        if not np.all(np.isfinite(pos)):
            raise ValueError("atom positions must be finite")
        if np.any(masses <= 0):
            raise ValueError("atom masses must be positive")
        for name, arr in (("positions", pos), ("masses", masses), ("pairs", pairs), ("ids", ids)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.positions)

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def pair_vectors(self) -> np.ndarray:
        return self.positions[self.pairs[:, 1]] - self.positions[self.pairs[:, 0]]

    def with_pairs(self, pairs) -> "AtomSet":
        return AtomSet(self.positions, self.masses, pairs, self.ids)

    def subset(self, index) -> "AtomSet":
        """Atoms at ``index`` with the pairs fully inside the subset."""
        index = np.asarray(index, dtype=int)
        remap = -np.ones(len(self), dtype=int)
        remap[index] = np.arange(len(index))
        p = remap[self.pairs]
        keep = np.all(p >= 0, axis=1)
        return AtomSet(self.positions[index], self.masses[index], p[keep], self.ids[index])


@dataclass(frozen=True)
class IsoCoords:
    """Element-local coordinates of a point.

    ``valid`` is False when the inverse mapping found no real solution (a
    quad4 quadratic with negative discriminant); such points are always out.
    """

    kind: str
    values: tuple[float, ...]
    valid: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindMismatchError(f"unknown element kind {self.kind!r}")
        if len(self.values) != ISO_LEN[self.kind]:
            raise KindMismatchError(f"{self.kind} expects {ISO_LEN[self.kind]} iso values, got {len(self.values)}")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class ElementLocation:
    atom: int
    element: int
    iso: IsoCoords
    status: str  # "in" | "out"


@dataclass
class Config:
    cell_size: tuple[float, ...] | None = None
    anchors: tuple[tuple[float, ...], ...] = ()
    alpha_method: str = "temperature"
    coupling_method: str = "wcm"
    variant: str = "arlequin_temperature"
    dt: float = 0.04
    steps: int = 220
    amplitude: float | None = None
    sigma: float | None = None
    center: tuple[float, ...] | None = None
    alpha_min: float = 1e-3
    solver_tol: float = 1e-10
    epsilon: float = 1.0
    n_exp: float = 6.0
    m_exp: float = 12.0
    r0: float = 1.2405
    density: float | None = None
    neighbor_tol: float = 1e-3
    snapshot_steps: tuple[int, ...] = (120, 220)
    benchmark_search: bool = False

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self, mesh: Mesh | None = None) -> list[str]:
        out = []
        if not self.dt > 0:
            out.append("dt must be positive")
        if not 0 <= self.alpha_min < 0.5:
            out.append("alpha_min must lie in [0, 0.5)")
        if self.alpha_method not in ("direct", "temperature"):
            out.append(f"alpha_method must be direct|temperature, got {self.alpha_method!r}")
        if self.coupling_method not in ("wcm", "bdm"):
            out.append(f"coupling_method must be wcm|bdm, got {self.coupling_method!r}")
        if self.variant not in VARIANTS:
            out.append(f"variant must be one of {', '.join(VARIANTS)}")
        if self.steps < 0:
            out.append("steps must be >= 0")
        if mesh is not None and self.cell_size is not None:
            ext = mesh.max_element_extent()
            if len(self.cell_size) != mesh.dimension or np.any(np.asarray(self.cell_size) < ext):
                out.append(f"cell_size {self.cell_size} smaller than the largest element extent {tuple(ext)}")
        return out

    # Demo defaults that depend on r0.
    @property
    def amplitude_value(self) -> float:
        return 0.1 * self.r0 if self.amplitude is None else self.amplitude

    @property
    def sigma_value(self) -> float:
        return 8.0 * self.r0 if self.sigma is None else self.sigma

    @property
    def density_value(self) -> float:
        """Mass density of the continuum; unit atomic mass per Wigner-Seitz area."""
        return 1.0 / (self.r0**2 / 2.0) if self.density is None else self.density


VARIANTS = ("arlequin_direct", "arlequin_temperature", "none", "constant_half")


def validate_mesh(mesh: Mesh) -> list[str]:
    """Return one diagnostic string per violated mesh invariant."""
    diags = []
    if mesh.dimension not in (1, 2, 3):
        diags.append(f"mesh dimension {mesh.dimension} not in (1, 2, 3)")
    seen = set()
    for n in mesh.nodes:
        if n.id in seen:
            diags.append(f"node {n.id}: duplicate id")
        seen.add(n.id)
        if len(n.coords) != mesh.dimension:
            diags.append(f"node {n.id}: {len(n.coords)} coordinates in a {mesh.dimension}D mesh")
        elif not all(np.isfinite(n.coords)):
            diags.append(f"node {n.id}: non-finite coordinates")
    eids = set()
    for e in mesh.elements:
        if e.id in eids:
            diags.append(f"element {e.id}: duplicate id")
        eids.add(e.id)
        if e.kind not in KINDS:
            diags.append(f"element {e.id}: unknown kind {e.kind!r}")
            continue
        if len(e.connectivity) != NODES_PER_KIND[e.kind]:
            diags.append(
                f"element {e.id}: connectivity length {len(e.connectivity)} != {NODES_PER_KIND[e.kind]} for {e.kind}"
            )
        if DIM_OF_KIND[e.kind] != mesh.dimension:
            diags.append(f"element {e.id}: {e.kind} in a {mesh.dimension}D mesh")
        missing = [n for n in e.connectivity if n not in seen]
        if missing:
            diags.append(f"element {e.id}: missing node ids {missing}")
    return diags


def shape_values(kind: str, iso) -> np.ndarray:
    """Vectorised shape functions: ``iso`` is (..., ISO_LEN[kind]), result (..., nodes)."""
    iso = np.asarray(iso, dtype=float)
    if kind in ("tri3", "tet4"):
        return iso.copy()
    if kind == "bar2":
        xi = iso[..., 0]
        return np.stack([(1 - xi) / 2, (1 + xi) / 2], axis=-1)
    corners = {"quad4": QUAD4_CORNERS, "hex8": HEX8_CORNERS}.get(kind)
    if corners is None:
        raise KindMismatchError(f"unknown element kind {kind!r}")
    scale = 0.5 ** corners.shape[1]
    return scale * np.prod(1.0 + iso[..., None, :] * corners, axis=-1)


def element_shape_values(kind: str, iso: IsoCoords | Sequence[float]) -> list[float]:
    if isinstance(iso, IsoCoords):
        if iso.kind != kind:
            raise KindMismatchError(f"iso coordinates for {iso.kind} used with {kind}")
        values = iso.values
    else:
        values = tuple(iso)
        if kind not in KINDS:
            raise KindMismatchError(f"unknown element kind {kind!r}")
        if len(values) != ISO_LEN[kind]:
            raise KindMismatchError(f"{kind} expects {ISO_LEN[kind]} iso values")
    return shape_values(kind, values).tolist()


def forward_map(kind: str, nodes, iso) -> np.ndarray:
    """Physical point(s) for iso-coordinates; ``nodes`` is (..., n_nodes, dim)."""
    N = shape_values(kind, iso)
    return np.einsum("...k,...kd->...d", N, np.asarray(nodes, dtype=float))
