"""Closed-form inverse iso-parametric mappings and in/out classification.

Every ``*_batch`` function is vectorised over pairs: ``nodes`` has shape
(n, nodes_per_element, dim) and ``points`` (n, dim), so each point may belong
to a different element. The scalar ``inverse_map_*`` wrappers return
:class:`~arlequin.core.IsoCoords`.

Quad4 uses Hua's eight-case solution, hex8 Yuan's third-order series followed
by a Newton correction on the trilinear map.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import (
    HEX8_CORNERS,
    ISO_LEN,
    ArlequinError,
    DegenerateElementError,
    IsoCoords,
    KindMismatchError,
    forward_map,
)

IN_OUT_TOL = 1e-9
DEGENERACY_TOL = 1e-14

# Printed-formula corrections, each confirmed by the forward-map round trip
# (tests/test_inverse_iso.py).
QUAD4_ERRATA = {
    "case1 denominator": ("b1*c1 - b2*c2", "b1*c2 - b2*c1"),
    "case4 xi denominator": ("a1*b2 + b1*c2", "a1*d2 + b1*c2"),
    "case6 xi numerator": ("d2*a_c - c1*a_d", "d2*a_c - c2*a_d"),
    "in/out box": ("0 <= xi, eta <= 1", "-1 <= xi, eta <= 1"),
}
HEX8_ERRATA = {
    "G1[3,2,3]": ("P623", "P124"),
    "G2[2,2,2,3]": ("-2*(P163*P423 + P143*P143)", "-2*(P163*P423 + P143*P124)"),
}

HEX8_REFINE_MAX_ITER = 20
HEX8_REFINE_TOL = 1e-12

#: Number of quad4 evaluations that went through each of Hua's cases (1..8).
QUAD4_CASE_COUNTER: Counter = Counter()


class QuadAmbiguityError(ArlequinError):
    """Both quadratic roots map inside the element (non-convex quad)."""


class HexConvergenceWarning(RuntimeWarning):
    pass


def _scale(nodes: np.ndarray) -> np.ndarray:
    ext = nodes.max(axis=1) - nodes.min(axis=1)
    s = ext.max(axis=1)
    return np.where(s > 0, s, 1.0)


# ---------------------------------------------------------------- bar2 / simplices


def bar2_batch(nodes, points):
    nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
    x = np.asarray(points, dtype=float).reshape(-1)
    X1, X2 = nodes[:, 0], nodes[:, 1]
    length = X2 - X1
    if np.any(np.abs(length) <= DEGENERACY_TOL * np.maximum(np.abs(X1), np.abs(X2)).clip(min=1.0)):
        raise DegenerateElementError("bar2 element with coincident nodes")
    # Signed length so node 1 always sits at xi = -1.
    xi = (2 * x - (X1 + X2)) / length
    return xi[:, None], np.ones(len(xi), dtype=bool)


def tri3_batch(nodes, points):
    nodes = np.asarray(nodes, dtype=float)
    p = np.asarray(points, dtype=float)
    X1, X2, X3 = nodes[:, 0, 0], nodes[:, 1, 0], nodes[:, 2, 0]
    Y1, Y2, Y3 = nodes[:, 0, 1], nodes[:, 1, 1], nodes[:, 2, 1]
    x, y = p[:, 0], p[:, 1]
    den = (Y2 - Y3) * (X1 - X3) - (Y3 - Y1) * (X3 - X2)
    if np.any(np.abs(den) <= DEGENERACY_TOL * _scale(nodes) ** 2):
        raise DegenerateElementError("tri3 element with zero area")
    xi = ((x - X3) * (Y2 - Y3) + (y - Y3) * (X3 - X2)) / den
    eta = ((x - X3) * (Y3 - Y1) + (y - Y3) * (X1 - X3)) / den
    gamma = 1.0 - (xi + eta)
    return np.stack([xi, eta, gamma], axis=1), np.ones(len(xi), dtype=bool)


def tet4_batch(nodes, points):
    nodes = np.asarray(nodes, dtype=float)
    p = np.asarray(points, dtype=float)
    n = len(nodes)
    A = np.concatenate([nodes, np.ones((n, 4, 1))], axis=2)
    detA = np.linalg.det(A)
    if np.any(np.abs(detA) <= DEGENERACY_TOL * _scale(nodes) ** 3):
        raise DegenerateElementError("tet4 element with coplanar nodes")
    prow = np.concatenate([p, np.ones((n, 1))], axis=1)
    out = np.empty((n, 4))
    for k in range(3):
        Ak = A.copy()
        Ak[:, k, :] = prow
        out[:, k] = np.linalg.det(Ak) / detA
    out[:, 3] = 1.0 - out[:, :3].sum(axis=1)
    return out, np.ones(n, dtype=bool)


# ---------------------------------------------------------------- quad4 (Hua)


def quad4_coefficients(nodes, points):
    """Hua's constants (a1, a2, b1, b2, c1, c2, d1, d2); nodes (n,4,2), points (n,2)."""
    nodes = np.asarray(nodes, dtype=float)
    p = np.asarray(points, dtype=float)
    X = nodes[..., 0]
    Y = nodes[..., 1]
    a1 = X[:, 0] - X[:, 1] + X[:, 2] - X[:, 3]
    a2 = Y[:, 0] - Y[:, 1] + Y[:, 2] - Y[:, 3]
    b1 = X[:, 0] - X[:, 1] - X[:, 2] + X[:, 3]
    b2 = Y[:, 0] - Y[:, 1] - Y[:, 2] + Y[:, 3]
    c1 = X[:, 0] + X[:, 1] - X[:, 2] - X[:, 3]
    c2 = Y[:, 0] + Y[:, 1] - Y[:, 2] - Y[:, 3]
    d1 = 4 * p[:, 0] - X.sum(axis=1)
    d2 = 4 * p[:, 1] - Y.sum(axis=1)
    return a1, a2, b1, b2, c1, c2, d1, d2


def quad4_case(a1, a2, b1, b2, c1, c2, scale):
    """Hua case number (1..8) from the zero pattern of the element constants."""
    t1 = DEGENERACY_TOL * scale
    t2 = DEGENERACY_TOL * scale**2
    z_a1 = np.abs(a1) <= t1
    z_a2 = np.abs(a2) <= t1
    z_c1 = np.abs(c1) <= t1
    z_b2 = np.abs(b2) <= t1
    z_ab = np.abs(a2 * b1 - a1 * b2) <= t2
    z_ac = np.abs(a2 * c1 - a1 * c2) <= t2
    return np.select(
        [
            z_a1 & z_a2,
            z_a1 & z_c1,
            z_a1,
            z_a2 & z_b2,
            z_a2,
            z_ab,
            z_ac,
        ],
        [1, 2, 3, 4, 5, 6, 7],
        default=8,
    )


def _quadratic_roots(A, B, C):
    """Real roots of A x^2 + B x + C = 0, cancellation-free.

    Returns (r1, r2, real). Where A vanishes relative to B the single linear
    root is returned twice.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.maximum(np.abs(B), np.abs(C))
        linear = np.abs(A) <= 1e-13 * np.where(mag > 0, mag, 1.0)
        disc = B * B - 4 * A * C
        real = disc >= -1e-12 * B * B
        sq = np.sqrt(np.clip(disc, 0.0, None))
        q = -0.5 * (B + np.where(B >= 0, sq, -sq))
        r1 = np.where(q != 0, C / q, -B / (2 * A))
        r2 = np.where(A != 0, q / A, r1)
        lin = -C / B
        r1 = np.where(linear, lin, r1)
        r2 = np.where(linear, lin, r2)
        # Complex pair: report the real part so the result stays finite.
        re = -B / (2 * A)
        r1 = np.where(real | linear, r1, re)
        r2 = np.where(real | linear, r2, re)
    return r1, r2, real | linear


def _eta_fallback(xi, a1, a2, b1, b2, c1, c2, d1, d2):
    """eta from whichever bilinear equation is better conditioned at this xi."""
    den1 = a1 * xi + c1
    den2 = a2 * xi + c2
    with np.errstate(divide="ignore", invalid="ignore"):
        e1 = (d1 - b1 * xi) / den1
        e2 = (d2 - b2 * xi) / den2
    return np.where(np.abs(den1) >= np.abs(den2), e1, e2)


def _guarded(num, den, fallback, scale_den):
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / den
    return np.where(np.abs(den) > DEGENERACY_TOL * scale_den, val, fallback)


def _box_inf_norm(xi, eta):
    return np.maximum(np.abs(xi), np.abs(eta))


def quad4_batch(nodes, points, *, count_cases=True):
    nodes = np.asarray(nodes, dtype=float)
    points = np.asarray(points, dtype=float)
    n = len(nodes)
    a1, a2, b1, b2, c1, c2, d1, d2 = quad4_coefficients(nodes, points)
    L = _scale(nodes)
    jac_scale = L**2
    # Jacobian at the element centre (times 16).
    detJ = b1 * c2 - b2 * c1
    if np.any(np.abs(detJ) <= DEGENERACY_TOL * jac_scale):
        raise DegenerateElementError("quad4 element with vanishing Jacobian")
    case = quad4_case(a1, a2, b1, b2, c1, c2, L)
    if count_cases:
        QUAD4_CASE_COUNTER.update(case.tolist())

    xi = np.empty(n)
    eta = np.empty(n)
    valid = np.ones(n, dtype=bool)
    ab = a2 * b1 - a1 * b2
    ac = a2 * c1 - a1 * c2
    ad = a2 * d1 - a1 * d2

    def fb(x, m):
        return _eta_fallback(x, a1[m], a2[m], b1[m], b2[m], c1[m], c2[m], d1[m], d2[m])

    m = case == 1
    if m.any():
        den = b1[m] * c2[m] - b2[m] * c1[m]
        xi[m] = (d1[m] * c2[m] - d2[m] * c1[m]) / den
        eta[m] = (b1[m] * d2[m] - b2[m] * d1[m]) / den

    m = case == 2
    if m.any():
        x = d1[m] / b1[m]
        xi[m] = x
        eta[m] = _guarded(b1[m] * d2[m] - b2[m] * d1[m], a2[m] * d1[m] + b1[m] * c2[m], fb(x, m), jac_scale[m])

    m = case == 4
    if m.any():
        e = d2[m] / c2[m]
        eta[m] = e
        num = d1[m] * c2[m] - c1[m] * d2[m]
        den = a1[m] * d2[m] + b1[m] * c2[m]
        with np.errstate(divide="ignore", invalid="ignore"):
            alt = (d1[m] - c1[m] * e) / (a1[m] * e + b1[m])
        xi[m] = _guarded(num, den, alt, jac_scale[m])

    m = case == 6
    if m.any():
        e = ad[m] / ac[m]
        eta[m] = e
        num = d2[m] * ac[m] - c2[m] * ad[m]
        den = b2[m] * ac[m] + a2[m] * ad[m]
        alt_den = a1[m] * e + b1[m]
        with np.errstate(divide="ignore", invalid="ignore"):
            alt = (d1[m] - c1[m] * e) / alt_den
        # When b2 and a2 are both small the closed form cancels; take the x equation instead.
        use_alt = np.abs(alt_den) / L[m] > np.abs(den) / L[m] ** 3
        xi[m] = np.where(use_alt, alt, _guarded(num, den, alt, L[m] ** 3))

    m = case == 7
    if m.any():
        x = ad[m] / ab[m]
        xi[m] = x
        num = d2[m] * ab[m] - b2[m] * ad[m]
        den = c2[m] * ab[m] + a2[m] * ad[m]
        alt_den = np.maximum(np.abs(a1[m] * x + c1[m]), np.abs(a2[m] * x + c2[m]))
        use_alt = alt_den / L[m] > np.abs(den) / L[m] ** 3
        eta[m] = np.where(use_alt, fb(x, m), _guarded(num, den, fb(x, m), L[m] ** 3))

    # Quadratic cases: coefficients of alpha1 xi^2 + alpha2 xi + alpha3 and the eta rule.
    for cid in (3, 5, 8):
        m = case == cid
        if not m.any():
            continue
        if cid == 3:
            A = a2[m] * b1[m]
            B = c2[m] * b1[m] - a2[m] * d1[m] - b2[m] * c1[m]
            C = d2[m] * c1[m] - c2[m] * d1[m]

            def eta_of(x, m=m):
                return _guarded(d1[m] - b1[m] * x, c1[m], fb(x, m), L[m])

        elif cid == 5:
            A = a1[m] * b2[m]
            B = c1[m] * b2[m] - a1[m] * d2[m] - b1[m] * c2[m]
            C = d1[m] * c2[m] - c1[m] * d2[m]

            def eta_of(x, m=m):
                return _guarded(d2[m] - b2[m] * x, c2[m], fb(x, m), L[m])

        else:
            A = a2[m] * ab[m]
            B = c2[m] * ab[m] - a2[m] * ad[m] - b2[m] * ac[m]
            C = d2[m] * ac[m] - c2[m] * ad[m]

            def eta_of(x, m=m):
                return _guarded(ad[m] - ab[m] * x, ac[m], fb(x, m), L[m] ** 2)

        r1, r2, real = _quadratic_roots(A, B, C)
        e1 = eta_of(r1)
        e2 = eta_of(r2)
        lim = 1.0 + IN_OUT_TOL
        ok1 = real & (_box_inf_norm(r1, e1) <= lim)
        ok2 = real & (_box_inf_norm(r2, e2) <= lim)
        same = np.abs(r1 - r2) <= 1e-10 * np.maximum(1.0, np.abs(r1))
        if np.any(ok1 & ok2 & ~same):
            raise QuadAmbiguityError("two admissible roots; quadrilateral is not convex")
        # No admissible root: keep the one nearer the reference square.
        pick1 = ok1 | (~ok2 & (_box_inf_norm(r1, e1) <= _box_inf_norm(r2, e2)))
        xi[m] = np.where(pick1, r1, r2)
        eta[m] = np.where(pick1, e1, e2)
        valid[m] = real

    return np.stack([xi, eta], axis=1), valid


# ---------------------------------------------------------------- hex8 (Yuan)


_XI = HEX8_CORNERS[:, 0]
_ETA = HEX8_CORNERS[:, 1]
_ZETA = HEX8_CORNERS[:, 2]
# Sign vectors for e_1..e_7 in order: xi, eta, zeta, eta*zeta, xi*zeta, xi*eta, xi*eta*zeta.
_HEX_SIGNS = np.stack([_XI, _ETA, _ZETA, _ETA * _ZETA, _XI * _ZETA, _XI * _ETA, _XI * _ETA * _ZETA])


@dataclass(frozen=True)
class HexInverseTables:
    """Per-element constants of the hex8 series; leading axis indexes elements.

    ``e`` is (n, 7, 3) holding e_1..e_7 (rows a_i, b_i, c_i); ``P`` maps a
    1-based index triple to its (n,) array; ``G1``/``G2`` are dense
    (n,3,3,3) / (n,3,3,3,3) symmetric tensors.
    """

    e: np.ndarray
    e123: np.ndarray
    J: np.ndarray
    P: dict
    G1: np.ndarray
    G2: np.ndarray
    center: np.ndarray


def _triple(u, v, w):
    return np.einsum("nd,nd->n", u, np.cross(v, w))


def hex8_tables(nodes) -> HexInverseTables:
    nodes = np.asarray(nodes, dtype=float)
    e = np.einsum("kc,nci->nki", _HEX_SIGNS, nodes) / 8.0
    J = np.stack([e[:, 0], e[:, 1], e[:, 2]], axis=2)
    e123 = _triple(e[:, 0], e[:, 1], e[:, 2])
    if np.any(np.abs(e123) <= DEGENERACY_TOL * _scale(nodes) ** 3):
        raise DegenerateElementError("hex8 element with singular Jacobian")

    cache = {}

    def P(i, j, k):
        key = (i, j, k)
        if key not in cache:
            cache[key] = _triple(e[:, i - 1], e[:, j - 1], e[:, k - 1]) / e123
        return cache[key]

    n = len(nodes)
    G1 = np.zeros((n, 3, 3, 3))

    def sym2(r, i, j, val):
        G1[:, r - 1, i - 1, j - 1] = val
        G1[:, r - 1, j - 1, i - 1] = val

    sym2(1, 1, 2, P(6, 2, 3))
    sym2(1, 1, 3, P(5, 2, 3))
    sym2(1, 2, 3, P(4, 2, 3))
    sym2(2, 1, 2, P(1, 6, 3))
    sym2(2, 1, 3, P(1, 5, 3))
    sym2(2, 2, 3, P(1, 4, 3))
    sym2(3, 1, 2, P(1, 2, 6))
    sym2(3, 1, 3, P(1, 2, 5))
    sym2(3, 2, 3, P(1, 2, 4))  # printed as P623, see HEX8_ERRATA

    G2 = np.zeros((n, 3, 3, 3, 3))

    def sym3(r, i, j, k, val):
        for perm in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
            G2[(slice(None), r - 1) + tuple(p - 1 for p in perm)] = val

    p423, p523, p623, p723 = P(4, 2, 3), P(5, 2, 3), P(6, 2, 3), P(7, 2, 3)
    p143, p153, p163, p173 = P(1, 4, 3), P(1, 5, 3), P(1, 6, 3), P(1, 7, 3)
    p124, p125, p126, p127 = P(1, 2, 4), P(1, 2, 5), P(1, 2, 6), P(1, 2, 7)

    sym3(1, 1, 2, 3, p723 - ((p623 * p143 + p523 * p124) + (p623 * p523 + p423 * p125) + (p523 * p623 + p423 * p163)))
    sym3(2, 1, 2, 3, p173 - ((p163 * p143 + p153 * p124) + (p163 * p523 + p143 * p125) + (p153 * p623 + p143 * p163)))
    sym3(3, 1, 2, 3, p127 - ((p126 * p143 + p125 * p124) + (p126 * p523 + p124 * p125) + (p125 * p623 + p124 * p163)))

    sym3(1, 1, 1, 2, -2 * (p623 * p163 + p523 * p126))
    sym3(1, 1, 1, 3, -2 * (p623 * p153 + p523 * p125))
    sym3(1, 2, 2, 1, -2 * (p623 * p623 + p423 * p126))
    sym3(1, 2, 2, 3, -2 * (p623 * p423 + p423 * p124))
    sym3(1, 3, 3, 1, -2 * (p523 * p523 + p423 * p153))
    sym3(1, 3, 3, 2, -2 * (p523 * p423 + p423 * p143))

    sym3(2, 1, 1, 2, -2 * (p163 * p163 + p153 * p126))
    sym3(2, 1, 1, 3, -2 * (p163 * p153 + p153 * p125))
    sym3(2, 2, 2, 1, -2 * (p163 * p623 + p143 * p126))
    sym3(2, 2, 2, 3, -2 * (p163 * p423 + p143 * p124))  # see HEX8_ERRATA
    sym3(2, 3, 3, 1, -2 * (p153 * p523 + p143 * p153))
    sym3(2, 3, 3, 2, -2 * (p153 * p423 + p143 * p143))

    sym3(3, 1, 1, 2, -2 * (p125 * p126 + p126 * p163))
    sym3(3, 1, 1, 3, -2 * (p153 * p126 + p125 * p125))
    sym3(3, 2, 2, 1, -2 * (p124 * p126 + p126 * p623))
    sym3(3, 2, 2, 3, -2 * (p423 * p126 + p124 * p124))
    sym3(3, 3, 3, 1, -2 * (p523 * p125 + p124 * p153))
    sym3(3, 3, 3, 2, -2 * (p423 * p125 + p124 * p143))

    center = nodes.mean(axis=1)
    return HexInverseTables(e=e, e123=e123, J=J, P=dict(cache), G1=G1, G2=G2, center=center)


def hex8_series(tables: HexInverseTables, points) -> np.ndarray:
    """Third-order series estimate of (xi, eta, zeta)."""
    xp = np.asarray(points, dtype=float) - tables.center
    xb = np.linalg.solve(tables.J, xp[..., None])[..., 0]
    quad = np.einsum("nrij,ni,nj->nr", tables.G1, xb, xb)
    cub = np.einsum("nrijk,ni,nj,nk->nr", tables.G2, xb, xb, xb)
    return xb - 0.5 * quad - cub / 6.0


def _hex8_jacobian(nodes, iso):
    """d x / d iso for the trilinear map; (n,3,3)."""
    c = HEX8_CORNERS
    one = 1.0 + iso[:, None, :] * c  # (n,8,3)
    dN = np.empty((len(iso), 8, 3))
    dN[..., 0] = c[:, 0] * one[..., 1] * one[..., 2] / 8
    dN[..., 1] = c[:, 1] * one[..., 0] * one[..., 2] / 8
    dN[..., 2] = c[:, 2] * one[..., 0] * one[..., 1] / 8
    return np.einsum("nkd,nki->ndi", nodes, dN)


def hex8_refine(nodes, points, iso, max_iter=HEX8_REFINE_MAX_ITER, tol=HEX8_REFINE_TOL):
    """Newton correction of ``iso`` on the trilinear map. Returns (iso, converged)."""
    nodes = np.asarray(nodes, dtype=float)
    points = np.asarray(points, dtype=float)
    iso = np.array(iso, dtype=float)
    tol_abs = tol * np.maximum(1.0, _scale(nodes))
    converged = np.zeros(len(iso), dtype=bool)
    for _ in range(max_iter + 1):
        r = forward_map("hex8", nodes, iso) - points
        res = np.abs(r).max(axis=1)
        converged = res <= tol_abs
        if converged.all():
            break
        act = ~converged
        J = _hex8_jacobian(nodes[act], iso[act])
        try:
            step = np.linalg.solve(J, r[act][..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        iso[act] = np.clip(iso[act] - step, -3.0, 3.0)
    return iso, converged


def hex8_batch(nodes, points, *, refine=True):
    nodes = np.asarray(nodes, dtype=float)
    points = np.asarray(points, dtype=float)
    tables = hex8_tables(nodes)
    iso = hex8_series(tables, points)
    if refine:
        iso, ok = hex8_refine(nodes, points, iso)
        if not ok.all():
            warnings.warn(
                f"hex8 refinement did not converge for {int((~ok).sum())} point(s); status from last iterate",
                HexConvergenceWarning,
                stacklevel=2,
            )
    return iso, np.ones(len(iso), dtype=bool)


_BATCH = {"bar2": bar2_batch, "tri3": tri3_batch, "quad4": quad4_batch, "tet4": tet4_batch, "hex8": hex8_batch}


def inverse_map_batch(kind, nodes, points):
    """Dispatch to the per-kind batch inverse. Returns (iso, valid)."""
    try:
        fn = _BATCH[kind]
    except KeyError:
        raise KindMismatchError(f"unknown element kind {kind!r}") from None
    nodes = np.asarray(nodes, dtype=float)
    points = np.asarray(points, dtype=float)
    if len(nodes) == 0:
        return np.zeros((0, ISO_LEN[kind])), np.zeros(0, dtype=bool)
    return fn(nodes, points)


def status_batch(kind, iso, valid=None, tol=IN_OUT_TOL) -> np.ndarray:
    """Boolean in-mask; boundary (and a ``tol`` band outside it) counts as in."""
    iso = np.asarray(iso, dtype=float)
    if kind in ("tri3", "tet4"):
        inside = np.all((iso >= -tol) & (iso <= 1 + tol), axis=-1)
    elif kind in ("bar2", "quad4", "hex8"):
        inside = np.all(np.abs(iso) <= 1 + tol, axis=-1)
    else:
        raise KindMismatchError(f"unknown element kind {kind!r}")
    if valid is not None:
        inside &= np.asarray(valid, dtype=bool)
    return inside


def in_out_status(iso: IsoCoords) -> str:
    return "in" if bool(status_batch(iso.kind, iso.values, iso.valid)) else "out"


def _scalar(kind, nodes, point, dim):
    nodes = np.asarray(nodes, dtype=float).reshape(1, -1, dim)
    point = np.asarray(point, dtype=float).reshape(1, dim)
    iso, valid = inverse_map_batch(kind, nodes, point)
    return IsoCoords(kind, tuple(float(v) for v in iso[0]), bool(valid[0]))


def inverse_map_bar2(nodes, x) -> IsoCoords:
    return _scalar("bar2", nodes, x, 1)


def inverse_map_tri3(nodes, p) -> IsoCoords:
    return _scalar("tri3", nodes, p, 2)


def inverse_map_quad4(nodes, p) -> IsoCoords:
    return _scalar("quad4", nodes, p, 2)


def inverse_map_tet4(nodes, p) -> IsoCoords:
    return _scalar("tet4", nodes, p, 3)


def inverse_map_hex8(nodes, p, *, refine=True) -> IsoCoords:
    nodes = np.asarray(nodes, dtype=float).reshape(1, 8, 3)
    point = np.asarray(p, dtype=float).reshape(1, 3)
    iso, _ = hex8_batch(nodes, point, refine=refine)
    return IsoCoords("hex8", tuple(float(v) for v in iso[0]))


def inverse_map(kind, nodes, p) -> IsoCoords:
    dim = {"bar2": 1, "tri3": 2, "quad4": 2, "tet4": 3, "hex8": 3}[kind]
    return _scalar(kind, nodes, p, dim)
