import json

import numpy as np
import pytest

from arlequin import cli
from arlequin.alpha import SingularHeatSystemError
from arlequin.cells import locate_atoms
from arlequin.core import AtomSet, Config
from arlequin.dynamics import StabilityWarning
from arlequin.demo import square_annulus
from arlequin.io import (
    ParseError,
    config_text,
    parse_config_text,
    parse_coupling_map,
    coupling_map_text,
    read_alpha_csv,
    read_atoms,
    read_energy_csv,
    read_mesh,
    write_atoms,
    write_mesh,
)
from arlequin.topology import build_coupling_map


@pytest.fixture
def annulus_dir(tmp_path):
    assert cli.main(["demo", "--which", "annulus", "--out-dir", str(tmp_path)]) == 0
    return tmp_path


def run(d, *args):
    return cli.main([*args, "--mesh", str(d / "mesh.txt"), "--atoms", str(d / "atoms.txt"),
                     "--config", str(d / "config.txt"), "--out-dir", str(d)])


def set_config(d, **kv):
    lines = [l for l in (d / "config.txt").read_text().splitlines() if l.split("=")[0].strip() not in kv]
    lines += [f"{k} = {v}" for k, v in kv.items()]
    (d / "config.txt").write_text("\n".join(lines) + "\n")


def test_mesh_and_atoms_round_trip(tmp_path):
    pb = square_annulus()
    write_mesh(tmp_path / "m.txt", pb.mesh)
    mesh = read_mesh(tmp_path / "m.txt")
    np.testing.assert_array_equal(mesh.coords, pb.mesh.coords)
    assert [(e.id, e.kind, e.connectivity) for e in mesh.elements] == [
        (e.id, e.kind, e.connectivity) for e in pb.mesh.elements
    ]
    write_atoms(tmp_path / "a.txt", pb.atoms)
    atoms = read_atoms(tmp_path / "a.txt")
    np.testing.assert_array_equal(atoms.positions, pb.atoms.positions)
    np.testing.assert_array_equal(atoms.pairs, pb.atoms.pairs)
    write_atoms(tmp_path / "b.txt", pb.atoms, with_pairs=False)
    r0 = np.sqrt(2) / 4
    np.testing.assert_array_equal(read_atoms(tmp_path / "b.txt", r0).pairs, pb.atoms.pairs)


def test_malformed_files(tmp_path):
    (tmp_path / "m.txt").write_text("dimension 2\nnodes 1\n1 0.0\nelements 0\n")
    with pytest.raises(ParseError):
        read_mesh(tmp_path / "m.txt")
    (tmp_path / "a.txt").write_text("dimension 2\natoms 1\n1 0 0 1\npairs 1\n1 9\n")
    with pytest.raises(ParseError):
        read_atoms(tmp_path / "a.txt")


def test_config_round_trip_and_unknown_keys():
    cfg = Config(anchors=((1.0, 2.0), (3.5, -1.0)), center=(0.1, 0.2), dt=0.02, snapshot_steps=(5, 9),
                 benchmark_search=True)
    assert parse_config_text(config_text(cfg)) == cfg
    with pytest.raises(ParseError, match="unknown key"):
        parse_config_text("solver_tolerance = 1e-9\n")
    with pytest.raises(ParseError):
        parse_config_text("dt = fast\n")


def test_coupling_map_round_trip():
    pb = square_annulus()
    cmap = build_coupling_map(pb.mesh, locate_atoms(pb.mesh, pb.atoms), pb.anchors)
    back = parse_coupling_map(coupling_map_text(cmap))
    assert back.elements == cmap.elements
    assert back.boundary == cmap.boundary
    assert back.sides == cmap.sides
    assert [(l.atom, l.element, l.iso.values) for l in back.locations] == [
        (l.atom, l.element, l.iso.values) for l in cmap.locations
    ]


def test_prep_writes_labelled_alpha(annulus_dir):
    assert run(annulus_dir, "prep", "--method", "both") == 0
    cmap = parse_coupling_map((annulus_dir / "coupling_map.txt").read_text())
    for m in ("direct", "temperature"):
        alpha = read_alpha_csv(annulus_dir / f"alpha_{m}.csv")
        for n, s in cmap.sides.items():
            assert alpha["node"][n] == (0.0 if s == "md_side" else 1.0)
    man = json.loads((annulus_dir / "manifest_prep.json").read_text())
    assert {"coupling_map.txt", "alpha_direct.csv", "alpha_temperature.csv"} <= set(man["outputs"])


def test_manifest_hashes_are_stable(annulus_dir):
    run(annulus_dir, "prep")
    first = json.loads((annulus_dir / "manifest_prep.json").read_text())
    run(annulus_dir, "prep")
    second = json.loads((annulus_dir / "manifest_prep.json").read_text())
    assert first["inputs"] == second["inputs"] and first["outputs"] == second["outputs"]


def test_simulate_compare_chain(annulus_dir, capsys):
    set_config(annulus_dir, steps=20, dt=0.005, snapshot_steps="10")
    assert run(annulus_dir, "prep", "--method", "both") == 0
    for v in ("arlequin_direct", "none"):
        assert run(annulus_dir, "simulate", "--variant", v) == 0
    assert (annulus_dir / "snapshot_arlequin_direct_10.csv").exists()
    a = annulus_dir / "energy_arlequin_direct.csv"
    assert len(read_energy_csv(a)["step"]) == 20
    capsys.readouterr()
    assert cli.main(["compare", str(a), str(a)]) == 0
    out = capsys.readouterr().out
    rows = [l.split() for l in out.splitlines()[1:] if not l.startswith("ke_md_region at")]
    assert rows and all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows)
    assert cli.main(["compare", str(a), str(annulus_dir / "energy_none.csv"), "--step", "20"]) == 0


def test_steps_zero_gives_header_only(annulus_dir):
    set_config(annulus_dir, steps=0)
    run(annulus_dir, "prep")
    assert run(annulus_dir, "simulate", "--variant", "none") == 0
    assert (annulus_dir / "energy_none.csv").read_text().count("\n") == 1


def test_fullmd(annulus_dir):
    set_config(annulus_dir, steps=5)
    assert run(annulus_dir, "fullmd") == 0
    assert len(read_energy_csv(annulus_dir / "energy_full_md.csv")["step"]) == 5


def test_exit_codes(annulus_dir, monkeypatch):
    d = annulus_dir
    # Missing prep artifacts.
    assert run(d, "simulate", "--variant", "none") == 2
    assert cli.main(["prep", "--mesh", str(d / "nope.txt"), "--atoms", str(d / "atoms.txt")]) == 2
    assert cli.main(["frobnicate"]) == 2
    # Mismatched step grids.
    set_config(d, steps=3)
    run(d, "fullmd")
    (d / "short.csv").write_text("\n".join((d / "energy_full_md.csv").read_text().splitlines()[:2]) + "\n")
    assert cli.main(["compare", str(d / "energy_full_md.csv"), str(d / "short.csv")]) == 2
    # Anchor outside the pure MD region.
    set_config(d, anchors="0.5 0.5")
    capture = d / "config.txt"
    assert run(d, "prep") == 3
    assert "0.5" in capture.read_text()


def test_bad_anchor_message_names_anchor(annulus_dir, capsys):
    set_config(annulus_dir, anchors="0.5 0.5")
    assert run(annulus_dir, "prep") == 3
    assert "(0.5, 0.5)" in capsys.readouterr().err


def test_singular_and_unstable_exit_codes(annulus_dir, monkeypatch):
    d = annulus_dir

    def boom(*a, **k):
        raise SingularHeatSystemError("no fe_side node")

    monkeypatch.setattr(cli, "build_alpha_field", boom)
    assert run(d, "prep", "--method", "temperature") == 4
    monkeypatch.undo()
    run(d, "prep")
    set_config(d, dt=5.0, steps=200)
    with pytest.warns(StabilityWarning):
        assert run(d, "simulate", "--variant", "none") == 5


def test_zero_atoms_gives_empty_map(tmp_path, caplog):
    pb = square_annulus()
    write_mesh(tmp_path / "mesh.txt", pb.mesh)
    write_atoms(tmp_path / "atoms.txt", AtomSet(np.zeros((0, 2)), np.zeros(0)))
    (tmp_path / "config.txt").write_text(config_text(Config(anchors=((5.001, 5.002),))))
    assert run(tmp_path, "prep") == 0
    assert parse_coupling_map((tmp_path / "coupling_map.txt").read_text()).elements == ()
    assert "empty" in caplog.text


def test_thread_cap(annulus_dir, monkeypatch):
    monkeypatch.setenv("ARLEQUIN_THREADS", "1")
    assert run(annulus_dir, "prep") == 0
