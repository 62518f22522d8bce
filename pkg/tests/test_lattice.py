import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arlequin.demo import checkerboard_lattice
from arlequin.lattice import (
    LatticeSpec,
    PairPotential,
    ZeroBondError,
    elastic_tensor,
    elastic_tensor4,
    md_tangent,
    neighbor_pairs,
    pair_energy,
)

POT = PairPotential()
R0 = POT.r0


def test_potential_values():
    assert POT.phi(R0) == pytest.approx(-0.5, abs=1e-15)
    assert POT.dphi(R0) == pytest.approx(0.0, abs=1e-14)
    analytic = POT.epsilon * POT.n * (POT.m - POT.n) / R0**2
    assert POT.d2phi(R0) == pytest.approx(analytic, rel=1e-14)
    assert POT.d2phi(R0) == pytest.approx(23.394, abs=1e-3)
    with pytest.raises(ValueError):
        POT.phi(0.0)
    with pytest.raises(ValueError):
        PairPotential(n=12, m=6)


def test_second_derivative_matches_finite_differences():
    # Fourth-order central stencil.
    h = 1e-3
    f = [POT.phi(R0 + k * h) for k in (-2, -1, 0, 1, 2)]
    fd = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    assert fd == pytest.approx(POT.d2phi(R0), rel=1e-8)


@given(st.floats(0.9, 1.6))
def test_first_derivative_matches_finite_differences(r):
    h = 1e-6
    fd = (POT.phi(r + h) - POT.phi(r - h)) / (2 * h)
    assert fd == pytest.approx(POT.dphi(r), rel=1e-6, abs=1e-8)


def test_pair_along_x():
    K = md_tangent([[0.0, 0.0], [R0, 0.0]], [[0, 1]], POT).toarray()
    np.testing.assert_allclose(K[:2, :2], POT.d2phi(R0) * np.diag([1.0, 0.0]), atol=1e-12)
    np.testing.assert_allclose(K[:2, 2:], -K[:2, :2], atol=1e-12)


def _fd_hessian(x, pairs, h=1e-4):
    n = x.size
    H = np.zeros((n, n))
    f = lambda y: pair_energy(y.reshape(-1, 2), pairs, POT)  # noqa: E731
    for i in range(n):
        for j in range(i, n):
            e = np.zeros(n)
            g = np.zeros(n)
            e[i] = h
            g[j] = h
            H[i, j] = H[j, i] = (f(x + e + g) - f(x + e - g) - f(x - e + g) + f(x - e - g)) / (4 * h * h)
    return H


def test_tangent_matches_finite_difference_hessian(rng):
    pos = checkerboard_lattice((0, 0), 4, 4, R0).positions + rng.uniform(-0.03, 0.03, (8, 2))
    pairs = neighbor_pairs(checkerboard_lattice((0, 0), 4, 4, R0).positions, R0)
    K = md_tangent(pos, pairs, POT).toarray()
    H = _fd_hessian(pos.ravel(), pairs)
    assert np.abs(K - H).max() / np.abs(K).max() < 1e-6


def test_tangent_symmetry_translation_and_psd():
    atoms = checkerboard_lattice((0, 0), 8, 8, R0)
    K = md_tangent(atoms.positions, atoms.pairs, POT).toarray()
    assert np.abs(K - K.T).max() < 1e-12
    for d in range(2):
        t = np.zeros(K.shape[0])
        t[d::2] = 1.0
        assert np.abs(K @ t).max() < 1e-10
    assert np.linalg.eigvalsh(K).min() > -1e-10


def test_zero_bond():
    with pytest.raises(ZeroBondError):
        md_tangent([[0.0, 0.0], [0.0, 0.0]], [[0, 1]], POT)


def test_elastic_tensor_values():
    lat = LatticeSpec.square45(R0)
    assert np.linalg.norm(lat.R, axis=1) == pytest.approx([R0] * 4)
    assert lat.volume == pytest.approx(R0**2 / 2)
    # Summation oracle over the four neighbour vectors.
    C = np.zeros((2, 2, 2, 2))
    for R in lat.R:
        C += POT.d2phi(R0) / R0**2 * np.einsum("i,j,k,l->ijkl", R, R, R, R)
    C /= 2 * lat.volume
    np.testing.assert_allclose(elastic_tensor4(lat, POT), C, atol=1e-12)
    D = elastic_tensor(lat, POT)
    for v in (D[0, 0], D[1, 1], D[0, 1], D[2, 2]):
        assert v == pytest.approx(POT.d2phi(R0), abs=1e-10)
    T = elastic_tensor4(lat, POT)
    for p in ((1, 0, 2, 3), (2, 3, 0, 1), (0, 1, 3, 2)):
        np.testing.assert_allclose(T, T.transpose(p), atol=1e-14)


def test_elastic_tensor_linear_in_epsilon_and_rotation_invariant():
    lat = LatticeSpec.square45(R0)
    D = elastic_tensor(lat, POT)
    np.testing.assert_allclose(elastic_tensor(lat, PairPotential(epsilon=2.0)), 2 * D, rtol=1e-14)
    np.testing.assert_allclose(elastic_tensor(lat.rotated(np.pi / 2), POT), D, atol=1e-12)


def test_elastic_tensor_is_only_semidefinite():
    D = elastic_tensor(LatticeSpec.square45(R0), POT)
    w = np.linalg.eigvalsh(D)
    assert w.min() > -1e-12
    assert np.abs(D @ [1.0, -1.0, 0.0]).max() < 1e-12


def test_neighbor_pairs_on_checkerboard():
    atoms = checkerboard_lattice((0, 0), 6, 6, R0)
    assert len(atoms) == 18
    d = np.linalg.norm(atoms.positions[atoms.pairs[:, 0]] - atoms.positions[atoms.pairs[:, 1]], axis=1)
    assert d == pytest.approx([R0] * len(d))
    assert np.all(atoms.pairs[:, 0] < atoms.pairs[:, 1])
    assert neighbor_pairs(np.zeros((1, 2)), R0).shape == (0, 2)
