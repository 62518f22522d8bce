"""Linear finite-element kernels: quadrature, shape gradients, element matrices."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps

from .core import BAR2_CORNERS, HEX8_CORNERS, QUAD4_CORNERS, Mesh, shape_values

_G = 1.0 / np.sqrt(3.0)


def gauss_rule(kind: str, purpose: str = "stiffness"):
    """Quadrature points (as full iso-coordinate vectors) and weights.

    2 points per axis on bar2/quad4/hex8, 4 points on tet4. tri3 uses the
    centroid for gradient integrands and a 3-point rule when ``purpose`` is
    ``"mass"`` (the integrand is quadratic).
    """
    if kind == "bar2":
        return np.array([[-_G], [_G]]), np.ones(2)
    if kind == "quad4":
        pts = np.array([[x, y] for y in (-_G, _G) for x in (-_G, _G)])
        return pts, np.ones(4)
    if kind == "hex8":
        pts = np.array([[x, y, z] for z in (-_G, _G) for y in (-_G, _G) for x in (-_G, _G)])
        return pts, np.ones(8)
    if kind == "tri3":
        if purpose == "mass":
            pts = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
            return pts, np.full(3, 1 / 6)
        return np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([0.5])
    if kind == "tet4":
        a, b = 0.5854101966249685, 0.1381966011250105
        pts = np.array([[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]])
        return pts, np.full(4, 1 / 24)
    raise ValueError(f"unknown element kind {kind!r}")


def shape_derivatives(kind: str, iso) -> np.ndarray:
    """dN/d(independent iso parameters); shape (..., nodes, param_dim)."""
    iso = np.asarray(iso, dtype=float)
    lead = iso.shape[:-1]
    if kind == "tri3":
        d = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
        return np.broadcast_to(d, lead + d.shape).copy()
    if kind == "tet4":
        d = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0], [-1.0, -1.0, -1.0]])
        return np.broadcast_to(d, lead + d.shape).copy()
    corners = {"bar2": BAR2_CORNERS, "quad4": QUAD4_CORNERS, "hex8": HEX8_CORNERS}[kind]
    dim = corners.shape[1]
    one = 1.0 + iso[..., None, :] * corners  # (..., k, dim)
    out = np.empty(lead + corners.shape)
    for j in range(dim):
        others = np.prod(np.delete(one, j, axis=-1), axis=-1)
        out[..., j] = corners[:, j] * others
    return out * 0.5**dim


def jacobian(kind: str, nodes, iso) -> np.ndarray:
    """dx/d(param); (..., dim, param_dim)."""
    dN = shape_derivatives(kind, iso)
    return np.einsum("...kd,...kp->...dp", np.asarray(nodes, dtype=float), dN)


def jacobian_det(kind: str, nodes, iso) -> np.ndarray:
    return np.linalg.det(jacobian(kind, nodes, iso))


def element_gradients(kind: str, nodes, purpose="stiffness"):
    """Shape values, physical gradients and integration weights at the Gauss points.

    Returns ``N`` (q, k), ``dNdx`` (q, k, dim) and ``wdet`` (q,) with
    ``wdet = weight * |det J|``.
    """
    pts, w = gauss_rule(kind, purpose)
    nodes = np.asarray(nodes, dtype=float)
    N = shape_values(kind, pts)
    dN = shape_derivatives(kind, pts)
    J = np.einsum("kd,qkp->qdp", nodes, dN)
    det = np.linalg.det(J)
    dNdx = np.einsum("qkp,qpd->qkd", dN, np.linalg.inv(J))
    return N, dNdx, w * np.abs(det)


def conduction_matrix(kind, nodes, conductivity=None):
    """Element matrix of the integral of grad(N)^T kappa grad(N)."""
    _, dNdx, wdet = element_gradients(kind, nodes)
    dim = dNdx.shape[-1]
    kappa = np.eye(dim) if conductivity is None else np.asarray(conductivity)
    return np.einsum("qid,de,qje,q->ij", dNdx, kappa, dNdx, wdet)


def mass_matrix(kind, nodes, density=1.0, factors=None):
    """Scalar consistent mass; ``factors`` weights each mass Gauss point."""
    N, _, wdet = element_gradients(kind, nodes, "mass")
    f = np.ones(len(wdet)) if factors is None else np.asarray(factors, dtype=float)
    return density * np.einsum("qi,qj,q->ij", N, N, wdet * f)


def strain_matrices(dNdx) -> np.ndarray:
    """2D engineering-strain B matrices (q, 3, 2k) with dof order (x0, y0, x1, y1, ...)."""
    q, k, _ = dNdx.shape
    B = np.zeros((q, 3, 2 * k))
    B[:, 0, 0::2] = dNdx[..., 0]
    B[:, 1, 1::2] = dNdx[..., 1]
    B[:, 2, 0::2] = dNdx[..., 1]
    B[:, 2, 1::2] = dNdx[..., 0]
    return B


def elastic_stiffness(kind, nodes, D, factors=None):
    """2D plane element stiffness with per-Gauss-point weighting ``factors``."""
    _, dNdx, wdet = element_gradients(kind, nodes)
    f = np.ones(len(wdet)) if factors is None else np.asarray(factors, dtype=float)
    B = strain_matrices(dNdx)
    return np.einsum("qai,ab,qbj,q->ij", B, D, B, wdet * f)


def vector_dofs(rows, dim) -> np.ndarray:
    rows = np.asarray(rows, dtype=int)
    return (rows[:, None] * dim + np.arange(dim)).reshape(-1)


def assemble(mesh: Mesh, element_matrix, element_ids=None, dofs_per_node=1, n_dof=None):
    """Sum ``element_matrix(element, coords)`` into a sparse global matrix."""
    n_dof = len(mesh.nodes) * dofs_per_node if n_dof is None else n_dof
    ids = [e.id for e in mesh.elements] if element_ids is None else element_ids
    I, J, V = [], [], []
    for eid in ids:
        e = mesh.element_by_id[eid]
        rows = mesh.rows(e)
        ke = element_matrix(e, mesh.coords[rows])
        if ke is None:
            continue
        d = vector_dofs(rows, dofs_per_node) if dofs_per_node > 1 else rows
        I.append(np.repeat(d, len(d)))
        J.append(np.tile(d, len(d)))
        V.append(np.asarray(ke).reshape(-1))
    if not V:
        return sps.csr_matrix((n_dof, n_dof))
    return sps.csr_matrix(
        (np.concatenate(V), (np.concatenate(I), np.concatenate(J))), shape=(n_dof, n_dof)
    )
