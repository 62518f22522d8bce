"""Lennard-Jones pair potential, harmonic MD stiffness and the matching continuum tensor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from scipy.spatial import cKDTree

from .core import ArlequinError


class ZeroBondError(ArlequinError, ValueError):
    pass


@dataclass(frozen=True)
class PairPotential:
    """phi(r) = eps [ (n/m) (r0/r)^m - (r0/r)^n ], minimum at r0."""

    epsilon: float = 1.0
    n: float = 6.0
    m: float = 12.0
    r0: float = 1.2405

    def __post_init__(self):
        if not self.m > self.n > 0:
            raise ValueError("exponents must satisfy m > n > 0")
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")

    @staticmethod
    def _check(r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("pair distance must be positive")
        return r

    def phi(self, r):
        s = self.r0 / self._check(r)
        return self.epsilon * ((self.n / self.m) * s**self.m - s**self.n)

    def dphi(self, r):
        r = self._check(r)
        s = self.r0 / r
        return self.epsilon * self.n * (s**self.n - s**self.m) / r

    def d2phi(self, r):
        r = self._check(r)
        s = self.r0 / r
        n, m = self.n, self.m
        return self.epsilon * n * ((m + 1) * s**m - (n + 1) * s**n) / r**2


@dataclass(frozen=True)
class LatticeSpec:
    a1: np.ndarray
    a2: np.ndarray
    R: np.ndarray  # (k, 2) representative neighbour vectors
    volume: float  # Wigner-Seitz area V_a

    @classmethod
    def square45(cls, r0: float = 1.2405) -> "LatticeSpec":
        """Square lattice of spacing r0 rotated by 45 degrees."""
        c = r0 / np.sqrt(2.0)
        R = c * np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
        return cls(c * np.array([1.0, -1.0]), c * np.array([1.0, 1.0]), R, r0**2 / 2.0)

    def rotated(self, angle: float) -> "LatticeSpec":
        c, s = np.cos(angle), np.sin(angle)
        Q = np.array([[c, -s], [s, c]])
        return LatticeSpec(Q @ self.a1, Q @ self.a2, self.R @ Q.T, self.volume)


def elastic_tensor4(lattice: LatticeSpec, pot: PairPotential) -> np.ndarray:
    """C_ijkl = 1/(2 V_a) sum_R (phi''/R^2 - phi'/R^3) R_i R_j R_k R_l."""
    R = np.asarray(lattice.R, dtype=float)
    r = np.linalg.norm(R, axis=1)
    w = pot.d2phi(r) / r**2 - pot.dphi(r) / r**3
    return np.einsum("a,ai,aj,ak,al->ijkl", w, R, R, R, R) / (2.0 * lattice.volume)


def elastic_tensor(lattice: LatticeSpec, pot: PairPotential) -> np.ndarray:
    """2D moduli as a 3x3 matrix acting on (e11, e22, 2 e12)."""
    C = elastic_tensor4(lattice, pot)
    idx = [(0, 0), (1, 1), (0, 1)]
    return np.array([[C[i + j] for j in idx] for i in idx])


def neighbor_pairs(positions, r0: float, tol: float = 1e-3) -> np.ndarray:
    """Atom index pairs (i < j) whose distance is r0 within relative ``tol``."""
    pos = np.asarray(positions, dtype=float)
    if len(pos) < 2:
        return np.zeros((0, 2), dtype=int)
    pairs = cKDTree(pos).query_pairs(r0 * (1 + tol), output_type="ndarray")
    d = np.linalg.norm(pos[pairs[:, 0]] - pos[pairs[:, 1]], axis=1)
    pairs = pairs[np.abs(d - r0) <= tol * r0]
    pairs = np.sort(pairs, axis=1)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def pair_energy(positions, pairs, pot: PairPotential, factors=None) -> float:
    pos = np.asarray(positions, dtype=float)
    r = np.linalg.norm(pos[pairs[:, 1]] - pos[pairs[:, 0]], axis=1)
    f = np.ones(len(r)) if factors is None else np.asarray(factors)
    return float(np.sum(f * pot.phi(r)))


def pair_blocks(positions, pairs, pot: PairPotential) -> np.ndarray:
    """(p, d, d) blocks (phi''/R^2 - phi'/R^3) R (x) R + (phi'/R) I."""
    pos = np.asarray(positions, dtype=float)
    R = pos[pairs[:, 1]] - pos[pairs[:, 0]]
    r = np.linalg.norm(R, axis=1)
    if np.any(r == 0):
        raise ZeroBondError("zero-length neighbour vector")
    d = pos.shape[1]
    a = pot.d2phi(r) / r**2 - pot.dphi(r) / r**3
    b = pot.dphi(r) / r
    return a[:, None, None] * np.einsum("pi,pj->pij", R, R) + b[:, None, None] * np.eye(d)


def md_tangent(positions, pairs, pot: PairPotential, factors=None) -> sps.csr_matrix:
    """Hessian of the pair energy, dofs interleaved per atom; pair p weighted by factors[p]."""
    pos = np.asarray(positions, dtype=float)
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    n, d = pos.shape
    B = pair_blocks(pos, pairs, pot)
    if factors is not None:
        B = B * np.asarray(factors, dtype=float)[:, None, None]
    i, j = pairs[:, 0], pairs[:, 1]
    di = i[:, None] * d + np.arange(d)  # (p, d)
    dj = j[:, None] * d + np.arange(d)
    rows, cols, vals = [], [], []
    for r_dofs, c_dofs, sign in ((di, di, 1), (dj, dj, 1), (di, dj, -1), (dj, di, -1)):
        rows.append(np.repeat(r_dofs, d, axis=1).reshape(-1))
        cols.append(np.tile(c_dofs, (1, d)).reshape(-1))
        vals.append(sign * B.reshape(-1))
    K = sps.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n * d, n * d))
    return K.tocsr()
