"""Arlequin weight α: 0 where the atomistic model is exact, 1 on the continuum side.

Two constructions are available. The direct one is a distance ratio along
an anchor ray; the temperature one solves a steady heat problem over the
coupling elements with α fixed to 0 and 1 on the two boundary sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .core import ArlequinError, Mesh, shape_values
from .fem import assemble, conduction_matrix, gauss_rule
from .raytrace import Ray, boundary_points
from .topology import FE_SIDE, MD_SIDE, CouplingMap, boundary_primitives, nearest_anchor

ITERATIVE_THRESHOLD = 50_000
CG_RTOL = 1e-12


class SingularHeatSystemError(ArlequinError):
    pass


class MissingLocationError(ArlequinError, KeyError):
    pass


@dataclass
class AlphaField:
    nodal: dict[int, float]  # node id -> α, coupling nodes only
    gauss: dict[tuple[int, int], float]  # (element id, gauss index) -> α
    atoms: dict[int, float]  # coupling atom id -> α
    method: str

    def node_array(self, mesh: Mesh, default=1.0) -> np.ndarray:
        """α on every mesh row; nodes outside the coupling region get ``default``."""
        out = np.full(len(mesh.nodes), float(default))
        for nid, a in self.nodal.items():
            out[mesh.node_row[nid]] = a
        return out

    def atom_array(self, atom_ids, default=0.0) -> np.ndarray:
        return np.array([self.atoms.get(int(i), default) for i in atom_ids])

    def md_scaling(self) -> dict[int, float]:
        """Per-atom MD weight 1 - α."""
        return {k: 1.0 - v for k, v in self.atoms.items()}


def alpha_from_parameters(T0: float, T1: float) -> float:
    """α for a target at t = 1 between boundary parameters T0 <= 1 <= T1.

    Collinearity makes |x - x0| / |x1 - x0| equal to (1 - T0) / (T1 - T0),
    which is exactly 0 or 1 when the target is itself a boundary point.
    """
    if T1 == T0:
        raise ArlequinError("target coincides with both boundary points")
    return float(np.clip((1.0 - T0) / (T1 - T0), 0.0, 1.0))


def alpha_direct(x, anchors, primitives) -> float:
    x = np.asarray(x, dtype=float)
    bp = boundary_points(Ray(nearest_anchor(anchors, x), x), primitives)
    return alpha_from_parameters(bp.T0, bp.T1)


def alpha_direct_nodes(mesh: Mesh, cmap: CouplingMap, anchors) -> dict[int, float]:
    prims, _ = boundary_primitives(mesh, cmap.boundary)
    return {nid: alpha_direct(mesh.coords[mesh.node_row[nid]], anchors, prims) for nid in cmap.nodes(mesh)}


def _solve_spd(A, b, tol):
    if A.shape[0] > ITERATIVE_THRESHOLD:
        x, info = spla.cg(A, b, rtol=CG_RTOL, maxiter=10 * A.shape[0])
        if info != 0:
            raise SingularHeatSystemError(f"conjugate gradient did not converge (info={info})")
    else:
        x = spla.spsolve(A.tocsc(), b)
    res = np.linalg.norm(A @ x - b)
    if not np.all(np.isfinite(x)) or res > tol * max(np.linalg.norm(b), 1.0):
        raise SingularHeatSystemError(f"heat system residual {res:.3e} above tolerance")
    return x


def solve_alpha_temperature(mesh: Mesh, element_ids, sides: dict[int, str], tol=1e-10) -> dict[int, float]:
    """Nodal α from the Laplace problem over ``element_ids``.

    Each connected component of the element subgraph is solved separately
    and must carry at least one Dirichlet node.
    """
    element_ids = sorted(element_ids)
    fixed = {n: (0.0 if s == MD_SIDE else 1.0) for n, s in sides.items()}
    if MD_SIDE not in sides.values() or FE_SIDE not in sides.values():
        raise SingularHeatSystemError("both md_side and fe_side Dirichlet sets must be non-empty")
    K = assemble(mesh, lambda e, xy: conduction_matrix(e.kind, xy), element_ids)
    nodes = sorted({n for e in element_ids for n in mesh.element_by_id[e].connectivity})
    rows = np.array([mesh.node_row[n] for n in nodes])
    K = K[rows][:, rows].tocsr()
    # Components follow element connectivity, not matrix sparsity, since a
    # conduction entry can vanish for some element shapes.
    G = assemble(mesh, lambda e, xy: np.ones((len(e.connectivity),) * 2), element_ids)
    n_comp, label = connected_components(G[rows][:, rows], directed=False)
    alpha = np.zeros(len(nodes))
    is_fixed = np.array([n in fixed for n in nodes])
    alpha[is_fixed] = [fixed[n] for n in np.asarray(nodes)[is_fixed]]
    for c in range(n_comp):
        comp = label == c
        if not (comp & is_fixed).any():
            raise SingularHeatSystemError(f"coupling component {c} has no Dirichlet node")
        free = np.flatnonzero(comp & ~is_fixed)
        if len(free) == 0:
            continue
        fix = np.flatnonzero(comp & is_fixed)
        A = K[free][:, free]
        b = -K[free][:, fix] @ alpha[fix]
        alpha[free] = _solve_spd(A, b, tol)
    return {n: float(a) for n, a in zip(nodes, alpha)}


def heat_residual(mesh: Mesh, element_ids, nodal: dict[int, float], sides) -> float:
    """Relative residual of the Laplace equations at the free nodes."""
    element_ids = sorted(element_ids)
    K = assemble(mesh, lambda e, xy: conduction_matrix(e.kind, xy), element_ids)
    nodes = sorted(nodal)
    rows = np.array([mesh.node_row[n] for n in nodes])
    K = K[rows][:, rows]
    a = np.array([nodal[n] for n in nodes])
    free = np.array([n not in sides for n in nodes])
    r = (K @ a)[free]
    return float(np.linalg.norm(r) / max(np.linalg.norm(K @ np.where(free, 0.0, a)), 1e-300))


def interpolate_alpha(mesh: Mesh, cmap: CouplingMap, nodal: dict[int, float]):
    """α at stiffness Gauss points of coupling elements and at coupling atoms."""
    gauss = {}
    for eid in cmap.elements:
        e = mesh.element_by_id[eid]
        missing = [n for n in e.connectivity if n not in nodal]
        if missing:
            raise MissingLocationError(f"element {eid}: no nodal α at nodes {missing}")
        a = np.array([nodal[n] for n in e.connectivity])
        pts, _ = gauss_rule(e.kind)
        for g, val in enumerate(shape_values(e.kind, pts) @ a):
            gauss[(eid, g)] = float(val)
    atoms = {}
    for loc in cmap.locations:
        e = mesh.element_by_id[loc.element]
        try:
            a = np.array([nodal[n] for n in e.connectivity])
        except KeyError as exc:
            raise MissingLocationError(f"atom {loc.atom}: element {loc.element} has no nodal α") from exc
        atoms[loc.atom] = float(shape_values(e.kind, np.asarray(loc.iso.values)) @ a)
    return gauss, atoms


def alpha_at_atoms(cmap: CouplingMap, atoms_ids, field: AlphaField) -> np.ndarray:
    """α for every atom id, failing loudly for coupling atoms without a value."""
    loc = cmap.location_of()
    out = np.zeros(len(atoms_ids))
    for k, aid in enumerate(atoms_ids):
        aid = int(aid)
        if aid in loc:
            if aid not in field.atoms:
                raise MissingLocationError(f"coupling atom {aid} has no α")
            out[k] = field.atoms[aid]
    return out


def build_alpha_field(method: str, mesh: Mesh, cmap: CouplingMap, anchors, tol=1e-10) -> AlphaField:
    if method == "direct":
        nodal = alpha_direct_nodes(mesh, cmap, anchors)
    elif method == "temperature":
        nodal = solve_alpha_temperature(mesh, cmap.elements, cmap.sides, tol)
    else:
        raise ValueError(f"unknown alpha method {method!r}")
    # Labelled boundary nodes carry their exact Dirichlet value.
    for n, s in cmap.sides.items():
        nodal[n] = 0.0 if s == MD_SIDE else 1.0
    gauss, atoms = interpolate_alpha(mesh, cmap, nodal)
    return AlphaField(nodal, gauss, atoms, method)

