"""Ray casting against the coupling boundary.

A ray runs from an anchor point inside the pure MD region through a target
point, ``x(t) = x_a + t (x - x_a)``; the target sits at ``t = 1``. Boundary
hits below 1 lie on the MD side of the target, hits above 1 on the FE side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ArlequinError

T_BAND = 1e-9
T_DEDUP = 1e-12
_PARALLEL_TOL = 1e-12


def point_str(x) -> str:
    return "(" + ", ".join(f"{float(v):.6g}" for v in np.ravel(x)) + ")"


class BadAnchorError(ArlequinError):
    """The ray from the anchor never meets the coupling boundary."""


class RayGrazingError(ArlequinError):
    """The ray runs along a boundary edge or face; perturb the anchor."""


@dataclass(frozen=True)
class Ray:
    anchor: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float)
        x = np.asarray(self.target, dtype=float)
        if a.shape != x.shape:
            raise ValueError("anchor and target dimensions differ")
        if np.allclose(a, x, rtol=0, atol=0):
            raise ValueError("ray target coincides with the anchor")
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "target", x)

    @property
    def direction(self) -> np.ndarray:
        return self.target - self.anchor

    def at(self, t) -> np.ndarray:
        return self.anchor + np.asarray(t, dtype=float)[..., None] * self.direction


@dataclass(frozen=True)
class Hit:
    t: float
    surface: int
    u: float
    v: float | None = None


@dataclass(frozen=True)
class BoundaryPoints:
    x0: np.ndarray
    x1: np.ndarray
    T0: float
    T1: float


def segment_hits(ray: Ray, segments, *, check_grazing=True):
    """Vectorised ray/segment intersection.

    ``segments`` is (s, 2, 2). Returns (t, u, hit_mask) per segment; a hit
    requires t > 0 and 0 <= u <= 1.
    """
    seg = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
    d = ray.direction
    p1, p2 = seg[:, 0], seg[:, 1]
    e = p1 - p2
    rhs = p1 - ray.anchor
    det = d[0] * e[:, 1] - d[1] * e[:, 0]
    scale = np.linalg.norm(d) * np.linalg.norm(e, axis=1)
    parallel = np.abs(det) <= _PARALLEL_TOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (rhs[:, 0] * e[:, 1] - rhs[:, 1] * e[:, 0]) / det
        u = (d[0] * rhs[:, 1] - d[1] * rhs[:, 0]) / det
    hit = ~parallel & (t > 0) & (u >= 0) & (u <= 1)
    if check_grazing and parallel.any():
        _check_collinear_2d(ray, seg[parallel])
    return t, u, hit


def _check_collinear_2d(ray: Ray, seg):
    d = ray.direction
    n = np.linalg.norm(d)
    for p1, p2 in seg:
        off = (p1 - ray.anchor)
        if abs(d[0] * off[1] - d[1] * off[0]) <= _PARALLEL_TOL * n * max(np.linalg.norm(off), n):
            t1 = off @ d / (n * n)
            t2 = (p2 - ray.anchor) @ d / (n * n)
            if max(t1, t2) > 0:
                raise RayGrazingError(f"ray from {point_str(ray.anchor)} runs along boundary segment {point_str(p1)}-{point_str(p2)}")


def triangle_hits(ray: Ray, triangles, *, check_grazing=True):
    """Vectorised ray/triangle intersection; ``triangles`` is (s, 3, 3).

    Returns (t, u, v, hit_mask); a hit requires t > 0, u, v in [0, 1] and
    u + v <= 1.
    """
    tri = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    d = ray.direction
    p1, p2, p3 = tri[:, 0], tri[:, 1], tri[:, 2]
    A = np.empty((len(tri), 3, 3))
    A[:, :, 0] = d
    A[:, :, 1] = p1 - p2
    A[:, :, 2] = p1 - p3
    rhs = p1 - ray.anchor
    det = np.linalg.det(A)
    scale = np.linalg.norm(d) * np.linalg.norm(np.cross(p2 - p1, p3 - p1), axis=1)
    parallel = np.abs(det) <= _PARALLEL_TOL * scale
    sol = np.full((len(tri), 3), np.nan)
    ok = ~parallel
    if ok.any():
        sol[ok] = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
    t, u, v = sol[:, 0], sol[:, 1], sol[:, 2]
    with np.errstate(invalid="ignore"):
        hit = ok & (t > 0) & (u >= 0) & (u <= 1) & (v >= 0) & (v <= 1) & (u + v <= 1)
    if check_grazing and parallel.any():
        _check_coplanar_3d(ray, tri[parallel])
    return t, u, v, hit


def _check_coplanar_3d(ray: Ray, tri):
    for p1, p2, p3 in tri:
        nrm = np.cross(p2 - p1, p3 - p1)
        if abs(nrm @ (ray.anchor - p1)) <= _PARALLEL_TOL * np.linalg.norm(nrm) * max(
            np.linalg.norm(ray.anchor - p1), 1.0
        ):
            raise RayGrazingError(f"ray from {point_str(ray.anchor)} lies in the plane of a boundary triangle")


def intersect_segment(ray: Ray, p1, p2) -> Hit | None:
    t, u, hit = segment_hits(ray, np.array([p1, p2], dtype=float)[None], check_grazing=False)
    return Hit(float(t[0]), 0, float(u[0])) if hit[0] else None


def intersect_triangle(ray: Ray, p1, p2, p3) -> Hit | None:
    t, u, v, hit = triangle_hits(ray, np.array([p1, p2, p3], dtype=float)[None], check_grazing=False)
    return Hit(float(t[0]), 0, float(u[0]), float(v[0])) if hit[0] else None


def point_hits(ray: Ray, points):
    """1D case: boundary objects are points, hit where the ray reaches them."""
    p = np.asarray(points, dtype=float).reshape(-1)
    t = (p - ray.anchor[0]) / ray.direction[0]
    return t, t > 0


def _all_hits(ray: Ray, primitives):
    prim = np.asarray(primitives, dtype=float)
    n = len(prim)
    nan = np.full(n, np.nan)
    if prim.shape[1:] == (1, 1):
        t, hit = point_hits(ray, prim)
        return t, np.zeros(n), nan, hit
    if prim.shape[1:] == (2, 2):
        t, u, hit = segment_hits(ray, prim)
        return t, u, nan, hit
    if prim.shape[1:] == (3, 3):
        return triangle_hits(ray, prim)
    raise ValueError(f"unsupported primitive array shape {prim.shape}")


def raw_hits(ray: Ray, primitives):
    """Per-primitive ray parameter and hit mask, without deduplication."""
    if len(primitives) == 0:
        return np.zeros(0), np.zeros(0, dtype=bool)
    t, _, _, hit = _all_hits(ray, primitives)
    return t, hit


def ray_hits(ray: Ray, primitives) -> list[Hit]:
    """All boundary hits sorted by t, with hits at a shared vertex merged."""
    if len(primitives) == 0:
        return []
    t, u, v, hit = _all_hits(ray, primitives)
    idx = np.flatnonzero(hit)
    idx = idx[np.argsort(t[idx], kind="stable")]
    hits: list[Hit] = []
    for i in idx:
        if hits and abs(t[i] - hits[-1].t) <= T_DEDUP:
            continue
        hits.append(
            Hit(
                float(t[i]),
                int(i),
                float(u[i]),
                None if np.isnan(v[i]) else float(v[i]),
            )
        )
    return hits


def select_boundary_parameters(ts, band=T_BAND) -> tuple[float, float]:
    """T0 = largest t below 1, T1 = smallest t above 1; either falls back to 1."""
    ts = np.asarray(ts, dtype=float)
    below = ts[ts < 1 - band]
    above = ts[ts > 1 + band]
    T0 = float(below.max()) if len(below) else 1.0
    T1 = float(above.min()) if len(above) else 1.0
    return T0, T1


def boundary_points(ray: Ray, primitives) -> BoundaryPoints:
    """MD-side and FE-side boundary points along ``ray``.

    ``primitives`` are boundary points (s, 1, 1) in 1D, segments (s, 2, 2)
    in 2D or triangles (s, 3, 3) in 3D.
    """
    hits = ray_hits(ray, primitives)
    if not hits:
        raise BadAnchorError(f"ray from anchor {point_str(ray.anchor)} through {point_str(ray.target)} meets no boundary")
    T0, T1 = select_boundary_parameters([h.t for h in hits])
    return BoundaryPoints(ray.at(T0), ray.at(T1), T0, T1)
