"""Arlequin-blended FE/MD system, coupling constraints and explicit time integration.

The continuum carries weight α and the lattice 1 - α. Inside the overlap
the two velocity fields are tied by W_u u' = W_q q', enforced every step
through a Lagrange-multiplier projection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .cells import locate_atoms
from .core import ArlequinError, AtomSet, Config, Mesh, shape_values
from .fem import element_gradients, gauss_rule, strain_matrices, vector_dofs
from .lattice import PairPotential, md_tangent
from .topology import CouplingMap

ENERGY_GROWTH_LIMIT = 10.0
RANK_TOL = 1e-12  # smallest admissible squared Cholesky pivot, relative


class InstabilityError(ArlequinError):
    pass


class ConstraintRankError(ArlequinError):
    pass


class StabilityWarning(RuntimeWarning):
    pass


# ---------------------------------------------------------------- scaling


@dataclass
class Weights:
    """Per-entity α used to scale the two models.

    ``element_alpha`` maps a coupling element id to its nodal α; elements
    not listed keep weight 1. ``atom_alpha`` holds α per atom row and
    ``clamp`` marks the entities whose mass factor is clamped.
    """

    element_alpha: dict[int, np.ndarray]
    atom_alpha: np.ndarray
    atom_clamp: np.ndarray
    alpha_min: float = 0.0


def variant_weights(variant: str, mesh: Mesh, atoms: AtomSet, cmap: CouplingMap, nodal_alpha=None, alpha_min=1e-3):
    """Scaling weights for one of the four energy-partition variants.

    ``arlequin_*`` use the supplied nodal α; ``constant_half`` puts 0.5 on
    the whole overlap; ``none`` leaves both models unscaled.
    """
    row_of_atom = {int(a): k for k, a in enumerate(atoms.ids)}
    coupling_rows = np.array([row_of_atom[loc.atom] for loc in cmap.locations], dtype=int)
    clamp = np.zeros(len(atoms), dtype=bool)
    atom_alpha = np.zeros(len(atoms))
    if variant == "none":
        return Weights({}, atom_alpha, clamp, 0.0)
    clamp[coupling_rows] = True
    if variant == "constant_half":
        elem = {e: np.full(len(mesh.element_by_id[e].connectivity), 0.5) for e in cmap.elements}
        atom_alpha[coupling_rows] = 0.5
        return Weights(elem, atom_alpha, clamp, alpha_min)
    if variant not in ("arlequin_direct", "arlequin_temperature"):
        raise ValueError(f"unknown variant {variant!r}")
    if nodal_alpha is None:
        raise ValueError(f"variant {variant} needs a nodal α field")
    elem = {e: np.array([nodal_alpha[n] for n in mesh.element_by_id[e].connectivity]) for e in cmap.elements}
    for loc in cmap.locations:
        e = mesh.element_by_id[loc.element]
        atom_alpha[row_of_atom[loc.atom]] = float(shape_values(e.kind, np.asarray(loc.iso.values)) @ elem[loc.element])
    return Weights(elem, atom_alpha, clamp, alpha_min)


def clamp_alpha(alpha, alpha_min):
    return np.clip(alpha, alpha_min, 1.0 - alpha_min)


def assemble_scaled_fe(mesh: Mesh, D, density: float, element_alpha=None, alpha_min=0.0):
    """Consistent mass and plane stiffness, each Gauss point weighted by α.

    The mass uses α clamped to [alpha_min, 1 - alpha_min] so the lumped
    system never loses a node; the stiffness uses α as is.
    """
    element_alpha = element_alpha or {}
    n = 2 * len(mesh.nodes)
    D = np.asarray(D, dtype=float)
    Im, Jm, Vm, Ik, Jk, Vk = [], [], [], [], [], []
    for e in mesh.elements:
        rows = mesh.rows(e)
        xy = mesh.coords[rows]
        a = element_alpha.get(e.id)
        Nm, _, wm = element_gradients(e.kind, xy, "mass")
        _, dNdx, wk = element_gradients(e.kind, xy)
        fm = np.ones(len(wm)) if a is None else clamp_alpha(Nm @ a, alpha_min)
        if a is None:
            fk = np.ones(len(wk))
        else:
            pts, _ = gauss_rule(e.kind)
            fk = shape_values(e.kind, pts) @ a
        m = density * np.einsum("qi,qj,q->ij", Nm, Nm, wm * fm)
        me = np.kron(m, np.eye(2))
        B = strain_matrices(dNdx)
        ke = np.einsum("qai,ab,qbj,q->ij", B, D, B, wk * fk)
        d = vector_dofs(rows, 2)
        for I, J, V, mat in ((Im, Jm, Vm, me), (Ik, Jk, Vk, ke)):
            I.append(np.repeat(d, len(d)))
            J.append(np.tile(d, len(d)))
            V.append(mat.reshape(-1))

    def build(I, J, V):
        if not V:
            return sps.csr_matrix((n, n))
        return sps.csr_matrix((np.concatenate(V), (np.concatenate(I), np.concatenate(J))), shape=(n, n))

    return build(Im, Jm, Vm), build(Ik, Jk, Vk)


def pair_factors(pairs, atom_alpha) -> np.ndarray:
    a = np.asarray(atom_alpha, dtype=float)
    return (2.0 - a[pairs[:, 0]] - a[pairs[:, 1]]) / 2.0


def assemble_scaled_md(atoms: AtomSet, pot: PairPotential, atom_alpha=None, alpha_min=0.0, clamp=None):
    """Lumped lattice masses (as a dof vector) scaled by 1 - α, and the
    pair stiffness with each bond weighted by (2 - α_i - α_j) / 2."""
    n = len(atoms)
    alpha = np.zeros(n) if atom_alpha is None else np.asarray(atom_alpha, dtype=float)
    if np.any((alpha < 0) | (alpha > 1)):
        raise ValueError("atom α outside [0, 1]")
    mass_alpha = alpha.copy()
    if clamp is not None:
        mass_alpha[clamp] = clamp_alpha(alpha[clamp], alpha_min)
    masses = atoms.masses * (1.0 - mass_alpha)
    K = md_tangent(atoms.positions, atoms.pairs, pot, pair_factors(atoms.pairs, alpha))
    return np.repeat(masses, atoms.dimension), K


# ------------------------------------------------------------ constraints


def lattice_triangles(atoms: AtomSet, keep=None) -> np.ndarray:
    """Two triangles per square cell of the nearest-neighbour graph.

    A cell is a 4-cycle i-j-l-k with perpendicular bonds at i; it is split
    along the diagonal through its lowest atom index. Only cells whose four
    atoms are all flagged in ``keep`` are used.
    """
    pos = atoms.positions
    nbr = [set() for _ in range(len(atoms))]
    for i, j in atoms.pairs:
        nbr[i].add(int(j))
        nbr[j].add(int(i))
    keep = np.ones(len(atoms), dtype=bool) if keep is None else np.asarray(keep, dtype=bool)
    tris = []
    for i in range(len(atoms)):
        if not keep[i]:
            continue
        ns = sorted(n for n in nbr[i] if n > i and keep[n])
        for a in range(len(ns)):
            for b in range(a + 1, len(ns)):
                j, k = ns[a], ns[b]
                u, v = pos[j] - pos[i], pos[k] - pos[i]
                if abs(u @ v) > 1e-6 * (u @ u):
                    continue
                for ell in sorted((nbr[j] & nbr[k]) - {i}):
                    if ell > i and keep[ell]:
                        tris.append((i, j, ell))
                        tris.append((i, ell, k))
    return np.array(tris, dtype=int).reshape(-1, 3)


@dataclass
class Constraints:
    Wu: sps.csr_matrix
    Wq: sps.csr_matrix
    method: str
    rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))  # row labels

    @property
    def n(self) -> int:
        return self.Wu.shape[0]


def _bdm(mesh: Mesh, atoms: AtomSet, cmap: CouplingMap):
    row_of_atom = {int(a): k for k, a in enumerate(atoms.ids)}
    I, J, V, Iq, Jq = [], [], [], [], []
    for c, loc in enumerate(cmap.locations):
        e = mesh.element_by_id[loc.element]
        N = shape_values(e.kind, np.asarray(loc.iso.values))
        rows = mesh.rows(e)
        for d in range(2):
            I.extend([2 * c + d] * len(rows))
            J.extend(2 * rows + d)
            V.extend(N)
            Iq.append(2 * c + d)
            Jq.append(2 * row_of_atom[loc.atom] + d)
    n = 2 * len(cmap.locations)
    Wu = sps.csr_matrix((V, (I, J)), shape=(n, 2 * len(mesh.nodes)))
    Wq = sps.csr_matrix((np.ones(len(Iq)), (Iq, Jq)), shape=(n, 2 * len(atoms)))
    return Wu, Wq


def _wcm(mesh: Mesh, atoms: AtomSet, cmap: CouplingMap):
    """L2 projection over the lattice triangulation of the overlap.

    Both integrals use the triangle centroids as quadrature points, so a
    rigid translation of the lattice maps exactly onto the same translation
    of the FE field.
    """
    row_of_atom = {int(a): k for k, a in enumerate(atoms.ids)}
    loc_by_row = {row_of_atom[loc.atom]: loc for loc in cmap.locations}
    keep = np.zeros(len(atoms), dtype=bool)
    keep[list(loc_by_row)] = True
    tris = lattice_triangles(atoms, keep)
    pos = atoms.positions
    p = pos[tris]
    area = 0.5 * np.abs(
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
    )
    if np.any(area <= 1e-14 * np.max(area, initial=1.0)):
        raise ArlequinError("degenerate lattice triangle")
    centroids = p.mean(axis=1)
    # Iso coordinates of a centroid: average of its vertices' when all three
    # sit in one element, otherwise a direct search.
    elem = np.empty(len(tris), dtype=int)
    iso = [None] * len(tris)
    lost = []
    for t, tri in enumerate(tris):
        locs = [loc_by_row[int(v)] for v in tri]
        if len({l.element for l in locs}) == 1:
            elem[t] = locs[0].element
            iso[t] = np.mean([np.asarray(l.iso.values) for l in locs], axis=0)
        else:
            lost.append(t)
    if lost:
        sub = Mesh(mesh.dimension, mesh.nodes, tuple(mesh.element_by_id[e] for e in cmap.elements))
        found = {
            l.atom: l
            for l in locate_atoms(sub, AtomSet(centroids[lost], np.ones(len(lost)), ids=np.arange(len(lost))))
        }
        for k, t in enumerate(lost):
            if k not in found:
                raise ArlequinError(f"lattice triangle {tuple(tris[t])} centroid outside the overlap")
            elem[t] = found[k].element
            iso[t] = np.asarray(found[k].iso.values)
    Iu, Ju, Vu, Iq, Jq, Vq = [], [], [], [], [], []
    for t, tri in enumerate(tris):
        e = mesh.element_by_id[int(elem[t])]
        N = shape_values(e.kind, iso[t])
        rows = mesh.rows(e)
        for d in range(2):
            Iu.append(np.repeat(2 * rows + d, len(rows)))
            Ju.append(np.tile(2 * rows + d, len(rows)))
            Vu.append(area[t] * np.outer(N, N).reshape(-1))
            Iq.append(np.repeat(2 * rows + d, 3))
            Jq.append(np.tile(2 * tri + d, len(rows)))
            Vq.append(np.repeat(area[t] * N / 3.0, 3))
    nu, nq = 2 * len(mesh.nodes), 2 * len(atoms)
    if not Iu:
        return sps.csr_matrix((0, nu)), sps.csr_matrix((0, nq))
    Wu = sps.csr_matrix((np.concatenate(Vu), (np.concatenate(Iu), np.concatenate(Ju))), shape=(nu, nu))
    Wq = sps.csr_matrix((np.concatenate(Vq), (np.concatenate(Iq), np.concatenate(Jq))), shape=(nu, nq))
    used = np.flatnonzero(np.asarray(abs(Wq).sum(axis=1)).ravel() > 0)
    return Wu[used], Wq[used]


def build_constraints(method: str, mesh: Mesh, atoms: AtomSet, cmap: CouplingMap) -> Constraints:
    if mesh.dimension != 2:
        raise NotImplementedError("coupled dynamics is implemented for 2D meshes")
    if method == "bdm":
        Wu, Wq = _bdm(mesh, atoms, cmap)
    elif method == "wcm":
        Wu, Wq = _wcm(mesh, atoms, cmap)
    else:
        raise ValueError(f"unknown coupling method {method!r}")
    return Constraints(Wu.tocsr(), Wq.tocsr(), method, np.arange(Wu.shape[0]))


# ------------------------------------------------------------ integration


@dataclass
class ScaledSystem:
    Mu: sps.csr_matrix
    Ku: sps.csr_matrix
    Mq: np.ndarray  # diagonal lattice mass per dof
    Kq: sps.csr_matrix
    constraints: Constraints | None
    variant: str = "none"

    @property
    def n_u(self) -> int:
        return self.Mu.shape[0]

    @property
    def n_q(self) -> int:
        return len(self.Mq)


@dataclass
class SimState:
    u: np.ndarray
    vu: np.ndarray
    q: np.ndarray
    vq: np.ndarray
    step: int = 0
    time: float = 0.0


@dataclass(frozen=True)
class EnergyRecord:
    step: int
    time: float
    ke_fe: float
    ke_md: float
    pe_fe: float
    pe_md: float
    ke_md_region: float

    @property
    def ke_total(self) -> float:
        return self.ke_fe + self.ke_md

    @property
    def pe_total(self) -> float:
        return self.pe_fe + self.pe_md

    @property
    def e_total(self) -> float:
        return self.ke_total + self.pe_total

    def row(self) -> list:
        return [
            self.step, self.time, self.ke_fe, self.ke_md, self.pe_fe, self.pe_md,
            self.ke_total, self.pe_total, self.e_total, self.ke_md_region,
        ]


ENERGY_COLUMNS = (
    "step", "time", "ke_fe", "ke_md", "pe_fe", "pe_md", "ke_total", "pe_total", "e_total", "ke_md_region",
)


class Integrator:
    """Velocity-form central difference with velocity-constraint projection.

    Each step: half kick, drift, force update, half kick. Both the half-step
    and the end-of-step velocities are projected onto W_u v_u = W_q v_q, so
    the displacement constraint residual also stays at its initial value.
    """

    def __init__(self, system: ScaledSystem, dt: float):
        self.sys = system
        self.dt = dt
        self._lu = spla.splu(system.Mu.tocsc()) if system.n_u else None
        self._mq_inv = 1.0 / system.Mq if system.n_q else np.zeros(0)
        c = system.constraints
        self._proj = None
        if c is not None and c.n:
            Gu = self._lu.solve(np.asarray(c.Wu.T.todense())) if system.n_u else np.zeros((0, c.n))
            Gq = sps.diags(self._mq_inv) @ c.Wq.T
            S = np.asarray(c.Wu @ Gu + (c.Wq @ Gq).toarray())
            try:
                factor = sla.cho_factor(S)
                piv = np.diag(factor[0]) ** 2
                if piv.min() <= RANK_TOL * piv.max():
                    raise np.linalg.LinAlgError("vanishing Cholesky pivot")
            except np.linalg.LinAlgError as exc:
                rank = np.linalg.matrix_rank(S)
                raise ConstraintRankError(
                    f"multiplier system is singular: rank {rank} of {c.n} constraint rows; "
                    f"redundant rows: {_redundant_rows(S)}"
                ) from exc
            self._proj = (c.Wu, c.Wq, Gu, Gq.tocsr(), factor)

    def accel(self, u, q):
        au = self._lu.solve(-(self.sys.Ku @ u)) if self.sys.n_u else u
        aq = self._mq_inv * -(self.sys.Kq @ q) if self.sys.n_q else q
        return au, aq

    def project(self, vu, vq):
        if self._proj is None:
            return vu, vq
        Wu, Wq, Gu, Gq, factor = self._proj
        lam = sla.cho_solve(factor, Wu @ vu - Wq @ vq)
        return vu - Gu @ lam, vq + Gq @ lam

    def residual(self, vu, vq) -> float:
        if self._proj is None:
            return 0.0
        Wu, Wq = self._proj[:2]
        r = Wu @ vu - Wq @ vq
        return float(np.max(np.abs(r), initial=0.0))

    def step(self, s: SimState, acc) -> tuple[SimState, tuple]:
        h = 0.5 * self.dt
        vu, vq = self.project(s.vu + h * acc[0], s.vq + h * acc[1])
        u, q = s.u + self.dt * vu, s.q + self.dt * vq
        acc = self.accel(u, q)
        vu, vq = self.project(vu + h * acc[0], vq + h * acc[1])
        return SimState(u, vu, q, vq, s.step + 1, (s.step + 1) * self.dt), acc


def _redundant_rows(S, tol=1e-6) -> list[int]:
    _, R, piv = sla.qr(S, pivoting=True)
    d = np.abs(np.diag(R))
    return sorted(int(p) for p in piv[d <= tol * d.max()])


def energies(system: ScaledSystem, s: SimState, md_region=None) -> EnergyRecord:
    ke_fe = 0.5 * s.vu @ (system.Mu @ s.vu) if system.n_u else 0.0
    pe_fe = 0.5 * s.u @ (system.Ku @ s.u) if system.n_u else 0.0
    ke_md = 0.5 * s.vq @ (system.Mq * s.vq) if system.n_q else 0.0
    pe_md = 0.5 * s.q @ (system.Kq @ s.q) if system.n_q else 0.0
    region = 0.0
    if md_region is not None and system.n_q:
        mask = np.repeat(np.asarray(md_region, dtype=bool), 2)
        region = 0.5 * np.sum(system.Mq[mask] * s.vq[mask] ** 2)
    return EnergyRecord(s.step, s.time, float(ke_fe), float(ke_md), float(pe_fe), float(pe_md), float(region))


def stability_limit(system: ScaledSystem) -> float:
    """Critical step 2 / omega_max of each unconstrained subsystem."""
    omegas = []
    # A fixed, non-constant start vector keeps ARPACK deterministic and away
    # from the rigid-translation null space.
    start = lambda n: 1.0 + 0.5 * np.cos(np.arange(n))  # noqa: E731
    if system.n_u:
        lam = spla.eigsh(system.Ku, k=1, M=system.Mu, which="LA", v0=start(system.n_u), tol=1e-4,
                         return_eigenvectors=False)
        omegas.append(np.sqrt(max(lam[0], 0.0)))
    if system.n_q:
        s = sps.diags(1.0 / np.sqrt(system.Mq))
        lam = spla.eigsh(s @ system.Kq @ s, k=1, which="LA", v0=start(system.n_q), tol=1e-4,
                         return_eigenvectors=False)
        omegas.append(np.sqrt(max(lam[0], 0.0)))
    w = max(omegas, default=0.0)
    return float("inf") if w == 0 else 2.0 / w


@dataclass
class Snapshot:
    step: int
    node_ids: np.ndarray
    node_xy: np.ndarray
    node_u: np.ndarray  # (n, 2)
    node_ke: np.ndarray
    atom_ids: np.ndarray
    atom_xy: np.ndarray
    atom_u: np.ndarray
    atom_ke: np.ndarray


@dataclass
class SimResult:
    records: list[EnergyRecord]
    snapshots: dict[int, Snapshot]
    max_constraint_residual: float
    stability_dt: float


def gaussian_displacement(xy, amplitude, sigma, center) -> np.ndarray:
    """Interleaved (u_x, u_y) with u_y = A exp(-|X - c|^2 / sigma^2)."""
    xy = np.asarray(xy, dtype=float)
    out = np.zeros(xy.shape)
    out[:, 1] = amplitude * np.exp(-np.sum((xy - np.asarray(center)) ** 2, axis=1) / sigma**2)
    return out.reshape(-1)


def simulate(
    system: ScaledSystem,
    u0,
    q0,
    dt: float,
    steps: int,
    md_region=None,
    snapshot_steps=(),
    snapshot_fn=None,
    check_stability=True,
) -> SimResult:
    integ = Integrator(system, dt)
    dt_crit = stability_limit(system) if check_stability else float("inf")
    if dt > dt_crit:
        warnings.warn(
            f"dt={dt} exceeds the unconstrained stability estimate {dt_crit:.4g}", StabilityWarning, stacklevel=2
        )
    s = SimState(np.array(u0, dtype=float), np.zeros(system.n_u), np.array(q0, dtype=float), np.zeros(system.n_q))
    e0 = energies(system, s, md_region).e_total
    acc = integ.accel(s.u, s.q)
    records, snaps, worst = [], {}, 0.0
    wanted = set(int(k) for k in snapshot_steps)
    if 0 in wanted and snapshot_fn is not None:
        snaps[0] = snapshot_fn(s)
    for _ in range(steps):
        s, acc = integ.step(s, acc)
        worst = max(worst, integ.residual(s.vu, s.vq))
        rec = energies(system, s, md_region)
        if not np.isfinite(rec.e_total) or abs(rec.e_total) > ENERGY_GROWTH_LIMIT * max(abs(e0), 1e-300):
            raise InstabilityError(
                f"total energy {rec.e_total:.4g} at step {s.step} exceeds {ENERGY_GROWTH_LIMIT}x the initial {e0:.4g}"
            )
        records.append(rec)
        if s.step in wanted and snapshot_fn is not None:
            snaps[s.step] = snapshot_fn(s)
    return SimResult(records, snaps, worst, dt_crit)


def _lumped_density(M, n_dof_per_node=2):
    return np.asarray(M.sum(axis=1)).ravel()[::n_dof_per_node]


def _snapshot_fn(mesh, atoms, system, density):
    node_xy = mesh.coords if mesh is not None else np.zeros((0, 2))
    node_ids = mesh.node_ids if mesh is not None else np.zeros(0, dtype=int)
    if system.n_u:
        m_lump = _lumped_density(system.Mu)
        # Unit-density lumped area per node, so ke_density is energy per area.
        area = np.zeros(len(mesh.nodes))
        for e in mesh.elements:
            N, _, w = element_gradients(e.kind, mesh.element_coords(e), "mass")
            area[mesh.rows(e)] += N.T @ w
    else:
        m_lump = area = np.zeros(0)
    m_atom = system.Mq[::2] if system.n_q else np.zeros(0)
    cell = atoms.masses / density if atoms is not None else np.zeros(0)

    def snap(s: SimState) -> Snapshot:
        vu = s.vu.reshape(-1, 2)
        vq = s.vq.reshape(-1, 2)
        ke_n = 0.5 * m_lump * np.sum(vu**2, axis=1) / np.where(area > 0, area, 1.0) if len(area) else area
        ke_a = 0.5 * m_atom * np.sum(vq**2, axis=1) / cell if len(m_atom) else m_atom
        return Snapshot(
            s.step, node_ids, node_xy, s.u.reshape(-1, 2).copy(), ke_n,
            atoms.ids if atoms is not None else np.zeros(0, int),
            atoms.positions if atoms is not None else np.zeros((0, 2)),
            s.q.reshape(-1, 2).copy(), ke_a,
        )

    return snap


def pure_md_mask(mesh: Mesh, atoms: AtomSet) -> np.ndarray:
    """Atoms lying outside every element of ``mesh``."""
    inside = np.zeros(len(atoms), dtype=bool)
    row = {int(a): k for k, a in enumerate(atoms.ids)}
    for loc in locate_atoms(mesh, atoms):
        inside[row[loc.atom]] = True
    return ~inside


def build_system(mesh, atoms, cmap, weights: Weights, D, density, pot, method, variant) -> ScaledSystem:
    Mu, Ku = assemble_scaled_fe(mesh, D, density, weights.element_alpha, weights.alpha_min)
    Mq, Kq = assemble_scaled_md(atoms, pot, weights.atom_alpha, weights.alpha_min, weights.atom_clamp)
    cons = build_constraints(method, mesh, atoms, cmap) if cmap.elements else None
    return ScaledSystem(Mu, Ku, Mq, Kq, cons, variant)


def run_coupled(
    mesh: Mesh, atoms: AtomSet, cmap: CouplingMap, config: Config, D, pot: PairPotential,
    nodal_alpha=None, variant=None, method=None, center=None,
) -> SimResult:
    variant = variant or config.variant
    method = method or config.coupling_method
    density = config.density_value
    weights = variant_weights(variant, mesh, atoms, cmap, nodal_alpha, config.alpha_min)
    system = build_system(mesh, atoms, cmap, weights, D, density, pot, method, variant)
    c = np.asarray(center if center is not None else config.center)
    u0 = gaussian_displacement(mesh.coords, config.amplitude_value, config.sigma_value, c)
    q0 = gaussian_displacement(atoms.positions, config.amplitude_value, config.sigma_value, c)
    region = pure_md_mask(mesh, atoms)
    return simulate(
        system, u0, q0, config.dt, config.steps, region, config.snapshot_steps,
        _snapshot_fn(mesh, atoms, system, density),
    )


def run_full_md(atoms: AtomSet, config: Config, pot: PairPotential, md_region=None, center=None) -> SimResult:
    Mq, Kq = assemble_scaled_md(atoms, pot)
    system = ScaledSystem(sps.csr_matrix((0, 0)), sps.csr_matrix((0, 0)), Mq, Kq, None, "full_md")
    c = np.asarray(center if center is not None else config.center)
    q0 = gaussian_displacement(atoms.positions, config.amplitude_value, config.sigma_value, c)
    return simulate(
        system, np.zeros(0), q0, config.dt, config.steps, md_region, config.snapshot_steps,
        _snapshot_fn(None, atoms, system, config.density_value),
    )
