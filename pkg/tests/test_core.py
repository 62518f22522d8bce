import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arlequin.core import (
    AtomSet,
    Config,
    IsoCoords,
    KindMismatchError,
    Mesh,
    element_shape_values,
    forward_map,
    shape_values,
    validate_mesh,
)

unit = st.floats(-1, 1, allow_nan=False)
frac = st.floats(0, 1, allow_nan=False)


def simplex(n):
    return st.lists(frac, min_size=n - 1, max_size=n - 1).filter(lambda v: sum(v) <= 1).map(
        lambda v: tuple(v) + (1 - sum(v),)
    )


@given(st.one_of(
    st.tuples(st.just("bar2"), st.tuples(unit)),
    st.tuples(st.just("quad4"), st.tuples(unit, unit)),
    st.tuples(st.just("hex8"), st.tuples(unit, unit, unit)),
    st.tuples(st.just("tri3"), simplex(3)),
    st.tuples(st.just("tet4"), simplex(4)),
))
def test_partition_of_unity(kind_iso):
    kind, iso = kind_iso
    N = shape_values(kind, iso)
    assert N.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(N >= -1e-12)


@pytest.mark.parametrize("kind, corners", [
    ("bar2", [[-1], [1]]),
    ("quad4", [[1, 1], [-1, 1], [-1, -1], [1, -1]]),
    ("tri3", np.eye(3)),
    ("tet4", np.eye(4)),
])
def test_kronecker_at_nodes(kind, corners):
    np.testing.assert_allclose(shape_values(kind, np.asarray(corners, float)), np.eye(len(corners)), atol=1e-15)


def test_quad4_center_values():
    assert element_shape_values("quad4", IsoCoords("quad4", (0.0, 0.0))) == [0.25] * 4


def test_iso_kind_checks():
    with pytest.raises(KindMismatchError):
        IsoCoords("quad4", (0.0,))
    with pytest.raises(KindMismatchError):
        element_shape_values("tri3", IsoCoords("quad4", (0.0, 0.0)))
    with pytest.raises(KindMismatchError):
        shape_values("wedge6", [0.0])


def test_forward_map_affine_tri():
    nodes = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
    np.testing.assert_allclose(forward_map("tri3", nodes, [0.2, 0.3, 0.5]), [0.6, 1.5])


def test_mesh_from_arrays_and_validation():
    mesh = Mesh.from_arrays([[0, 0], [1, 0], [1, 1], [0, 1]], [("quad4", [2, 3, 0, 1])])
    assert validate_mesh(mesh) == []
    np.testing.assert_allclose(mesh.max_element_extent(), [1, 1])
    bad = Mesh.from_arrays([[0, 0], [1, 0], [1, 1]], [("quad4", [0, 1, 2]), ("tet4", [0, 1, 2, 7])])
    diags = validate_mesh(bad)
    assert any("connectivity length" in d for d in diags)
    assert any("missing node ids [7]" in d for d in diags)
    assert any("tet4 in a 2D mesh" in d for d in diags)


def test_atomset_is_read_only():
    atoms = AtomSet(np.zeros((2, 2)), np.ones(2), [[0, 1]])
    with pytest.raises(ValueError):
        atoms.positions[0, 0] = 1.0
    with pytest.raises(ValueError):
        AtomSet(np.zeros((2, 2)), [1.0, -1.0])
    sub = AtomSet(np.arange(6.0).reshape(3, 2), np.ones(3), [[0, 1], [1, 2]]).subset([1, 2])
    assert sub.pairs.tolist() == [[0, 1]]


def test_config_validation():
    assert Config().density_value == pytest.approx(2 / 1.2405**2)
    with pytest.raises(ValueError, match="dt"):
        Config(dt=0)
    with pytest.raises(ValueError, match="variant"):
        Config(variant="half")
    mesh = Mesh.from_arrays([[0, 0], [2, 0], [2, 2], [0, 2]], [("quad4", [2, 3, 0, 1])])
    assert Config(cell_size=(1.0, 1.0)).problems(mesh)


def test_shape_value_examples():
    np.testing.assert_allclose(shape_values("tri3", [1, 0, 0]), [1, 0, 0])
    np.testing.assert_allclose(shape_values("hex8", [0, 0, 0]), [0.125] * 8)


def test_partition_of_unity_bulk(rng):
    for kind, d in (("quad4", 2), ("hex8", 3), ("bar2", 1)):
        N = shape_values(kind, rng.uniform(-1, 1, (10_000, d)))
        assert np.abs(N.sum(axis=1) - 1).max() < 1e-12
    for kind, k in (("tri3", 3), ("tet4", 4)):
        N = shape_values(kind, rng.dirichlet(np.ones(k), 10_000))
        assert np.abs(N.sum(axis=1) - 1).max() < 1e-12


def test_validate_mesh_examples():
    assert validate_mesh(Mesh.from_arrays([[0, 0], [1, 0], [0, 1]], [("tri3", [0, 1, 2])])) == []
    quad = Mesh.from_arrays([[0, 0], [1, 0], [1, 1]], [("quad4", [0, 1, 2, 9])])
    diags = validate_mesh(quad)
    assert len(diags) == 1 and "element 0" in diags[0]
    cube = Mesh.from_arrays(np.eye(3).tolist() * 3, [("hex8", list(range(7)))])
    assert any("connectivity length" in d for d in validate_mesh(cube))
