"""Random element generators shared by the test modules."""

import numpy as np

from arlequin.core import HEX8_CORNERS, QUAD4_CORNERS

# Zero patterns of (a, b, c) coefficient vectors that force each of Hua's cases.
QUAD4_CASES = (1, 2, 3, 4, 5, 6, 7, 8)


def quad_from_coefficients(center, a, b, c):
    """Corner coordinates of x = center + (b xi + c eta + a xi eta) / 4."""
    corners = QUAD4_CORNERS
    return np.array(
        [center + (b * xi + c * eta + a * xi * eta) / 4.0 for xi, eta in corners]
    )


def _convex(nodes):
    # Bilinear Jacobian is linear in each variable; positive at corners => positive everywhere.
    from arlequin.fem import jacobian_det

    return np.all(jacobian_det("quad4", nodes, QUAD4_CORNERS) > 0)


def random_quad(rng, case=8, scale=1.0):
    """Random convex quad (Hua node ordering) whose constants hit ``case``."""
    while True:
        center = rng.uniform(-5, 5, 2) * scale
        b = rng.uniform(1, 3, 2) * np.array([1, 0.3]) * scale
        c = rng.uniform(1, 3, 2) * np.array([0.3, 1]) * scale
        b = np.array([b[0], rng.uniform(-1, 1) * scale])
        c = np.array([rng.uniform(-1, 1) * scale, c[1]])
        a = rng.uniform(-0.8, 0.8, 2) * scale
        if case == 1:
            a[:] = 0
        elif case == 2:
            a[0] = 0
            c[0] = 0
        elif case == 3:
            a[0] = 0
        elif case == 4:
            a[1] = 0
            b[1] = 0
        elif case == 5:
            a[1] = 0
        elif case == 6:
            a = rng.uniform(0.1, 0.5) * b * rng.choice([-1, 1])
        elif case == 7:
            a = rng.uniform(0.1, 0.5) * c * rng.choice([-1, 1])
        if b[0] * c[1] - b[1] * c[0] <= 0:
            continue
        nodes = quad_from_coefficients(center, a, b, c)
        if _convex(nodes):
            return nodes


def random_tri(rng, dim=2):
    while True:
        nodes = rng.uniform(-3, 3, (3, 2))
        area = 0.5 * np.linalg.det(np.stack([nodes[1] - nodes[0], nodes[2] - nodes[0]]))
        if abs(area) > 0.3:
            return nodes


def random_tet(rng):
    while True:
        nodes = rng.uniform(-3, 3, (4, 3))
        vol = np.linalg.det(nodes[1:] - nodes[0]) / 6
        if abs(vol) > 0.3:
            return nodes


def random_parallelepiped(rng):
    while True:
        A = np.eye(3) * rng.uniform(1, 3, 3) + rng.uniform(-0.5, 0.5, (3, 3))
        if np.linalg.det(A) > 0.5:
            break
    center = rng.uniform(-5, 5, 3)
    return center + HEX8_CORNERS @ A.T


def perturbed_cube(rng, edge=2.0, fraction=0.05):
    """Axis-aligned cube whose corners each move by up to ``fraction`` of the edge."""
    nodes = rng.uniform(-5, 5, 3) + HEX8_CORNERS * edge / 2
    d = rng.normal(size=(8, 3))
    d *= rng.uniform(0, 1, (8, 1)) / np.linalg.norm(d, axis=1, keepdims=True)
    return nodes + fraction * edge * d
