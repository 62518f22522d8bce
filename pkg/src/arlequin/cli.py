"""Command-line driver: prep, simulate, fullmd, compare and demo."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
import warnings
from contextlib import contextmanager, nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .alpha import SingularHeatSystemError, build_alpha_field
from .cells import build_grid, locate_atoms, locate_atoms_brute_force
from .core import ArlequinError, Config
from .dynamics import InstabilityError, pure_md_mask, run_coupled, run_full_md
from .io import (
    ParseError,
    config_text,
    read_alpha_csv,
    read_atoms,
    read_config,
    read_coupling_map,
    read_energy_csv,
    read_mesh,
    sha256,
    write_alpha_csv,
    write_atoms,
    write_coupling_map,
    write_energy_csv,
    write_mesh,
    write_snapshot_csv,
)
from .lattice import LatticeSpec, PairPotential, elastic_tensor
from .raytrace import BadAnchorError, RayGrazingError
from .topology import build_coupling_map

log = logging.getLogger("arlequin")

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_ANCHOR, EXIT_SINGULAR, EXIT_UNSTABLE = 0, 1, 2, 3, 4, 5

VARIANT_ALPHA = {"arlequin_direct": "direct", "arlequin_temperature": "temperature"}


class Manifest:
    def __init__(self, command: str, cfg: Config | None):
        self.data = {
            "command": command,
            "version": __version__,
            "config": config_text(cfg).splitlines() if cfg else [],
            "inputs": {},
            "outputs": {},
            "timings": {},
        }

    def input(self, path):
        if path:
            self.data["inputs"][str(path)] = sha256(path)

    def output(self, path):
        self.data["outputs"][Path(path).name] = sha256(path)

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        yield
        self.data["timings"][name] = time.perf_counter() - t0

    def write(self, out_dir: Path, name: str):
        path = out_dir / name
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        return path


def _thread_limit():
    n = os.environ.get("ARLEQUIN_THREADS")
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def _need(path, what):
    if path is None:
        raise ParseError(f"missing --{what}")
    if not Path(path).is_file():
        raise ParseError(f"{what} file not found: {path}")
    return path


def _load_config(args) -> Config:
    cfg = read_config(_need(args.config, "config")) if args.config else Config()
    if getattr(args, "snapshot_steps", None):
        cfg = dataclasses.replace(cfg, snapshot_steps=tuple(int(s) for s in args.snapshot_steps.split(",")))
    return cfg


def _out_dir(args) -> Path:
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _material(cfg: Config):
    pot = PairPotential(cfg.epsilon, cfg.n_exp, cfg.m_exp, cfg.r0)
    return pot, elastic_tensor(LatticeSpec.square45(cfg.r0), pot)


def cmd_prep(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    man = Manifest("prep", cfg)
    with man.phase("read"):
        mesh = read_mesh(_need(args.mesh, "mesh"))
        atoms = read_atoms(_need(args.atoms, "atoms"), cfg.r0, cfg.neighbor_tol)
    man.input(args.mesh)
    man.input(args.atoms)
    man.input(args.config)
    problems = cfg.problems(mesh)
    if problems:
        raise ParseError("; ".join(problems))
    if len(atoms) == 0:
        log.warning("atom file is empty; the coupling map will be empty")
    with man.phase("locate"):
        grid = build_grid(mesh, atoms, cfg.cell_size) if len(atoms) else None
        locations = locate_atoms(mesh, atoms, grid) if len(atoms) else []
    if cfg.benchmark_search and len(atoms):
        with man.phase("locate_brute_force"):
            brute = locate_atoms_brute_force(mesh, atoms)
        t = man.data["timings"]
        man.data["search_speedup"] = t["locate_brute_force"] / max(t["locate"], 1e-12)
        man.data["search_matches_brute_force"] = [(l.atom, l.element) for l in locations] == [
            (l.atom, l.element) for l in brute
        ]
    anchors = np.array(cfg.anchors, dtype=float) if cfg.anchors else None
    with man.phase("topology"):
        cmap = build_coupling_map(mesh, locations, anchors)
    write_coupling_map(out / "coupling_map.txt", cmap)
    man.output(out / "coupling_map.txt")
    man.data["coupling_elements"] = len(cmap.elements)
    man.data["coupling_atoms"] = len(cmap.locations)
    methods = ["direct", "temperature"] if args.method == "both" else [args.method or cfg.alpha_method]
    if cmap.elements and anchors is None:
        log.warning("no anchors configured; skipping the α field")
    elif cmap.elements:
        for m in methods:
            with man.phase(f"alpha_{m}"):
                field = build_alpha_field(m, mesh, cmap, anchors, cfg.solver_tol)
            path = out / f"alpha_{m}.csv"
            write_alpha_csv(path, field, mesh, cmap, atoms)
            man.output(path)
    man.write(out, "manifest_prep.json")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    variant = args.variant or cfg.variant
    method = args.method or cfg.coupling_method
    cfg = dataclasses.replace(cfg, variant=variant, coupling_method=method)
    man = Manifest("simulate", cfg)
    mesh = read_mesh(_need(args.mesh, "mesh"))
    atoms = read_atoms(_need(args.atoms, "atoms"), cfg.r0, cfg.neighbor_tol)
    cmap_path = _need(out / "coupling_map.txt", "prep artifact coupling_map")
    for p in (args.mesh, args.atoms, args.config, cmap_path):
        man.input(p)
    cmap = read_coupling_map(cmap_path)
    nodal = None
    if variant in VARIANT_ALPHA:
        apath = _need(out / f"alpha_{VARIANT_ALPHA[variant]}.csv", "prep artifact alpha")
        man.input(apath)
        nodal = read_alpha_csv(apath)["node"]
    if cfg.center is None:
        raise ParseError("config needs 'center' for the initial displacement")
    pot, D = _material(cfg)
    with man.phase("simulate"):
        res = run_coupled(mesh, atoms, cmap, cfg, D, pot, nodal)
    _write_results(out, variant, res, man)
    man.data["max_constraint_residual"] = res.max_constraint_residual
    man.data["stability_dt"] = res.stability_dt
    man.write(out, f"manifest_simulate_{variant}.json")
    return EXIT_OK


def _write_results(out, tag, res, man):
    path = out / f"energy_{tag}.csv"
    write_energy_csv(path, res.records)
    man.output(path)
    for step, snap in sorted(res.snapshots.items()):
        p = out / f"snapshot_{tag}_{step}.csv"
        write_snapshot_csv(p, snap)
        man.output(p)


def cmd_fullmd(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    man = Manifest("fullmd", cfg)
    atoms = read_atoms(_need(args.atoms, "atoms"), cfg.r0, cfg.neighbor_tol)
    man.input(args.atoms)
    man.input(args.config)
    region = None
    if args.mesh:
        mesh = read_mesh(_need(args.mesh, "mesh"))
        man.input(args.mesh)
        region = pure_md_mask(mesh, atoms)
    if cfg.center is None:
        raise ParseError("config needs 'center' for the initial displacement")
    pot, _ = _material(cfg)
    with man.phase("simulate"):
        res = run_full_md(atoms, cfg, pot, region)
    _write_results(out, "full_md", res, man)
    man.write(out, "manifest_fullmd.json")
    return EXIT_OK


def compare_metrics(a: dict, b: dict, step=None) -> dict:
    if len(a["step"]) != len(b["step"]) or not np.array_equal(a["step"], b["step"]):
        raise ParseError("energy files have different step grids")
    out = {}
    for col in a:
        if col in ("step", "time"):
            continue
        d = a[col] - b[col]
        out[col] = (float(np.sqrt(np.mean(d**2))) if len(d) else 0.0, float(np.max(np.abs(d), initial=0.0)))
    if len(a["step"]):
        k = len(a["step"]) - 1 if step is None else int(np.searchsorted(a["step"], step))
        if k >= len(a["step"]) or a["step"][k] != (step if step is not None else a["step"][k]):
            raise ParseError(f"step {step} not in energy files")
        out["reflection"] = (float(a["ke_md_region"][k]), float(b["ke_md_region"][k]), int(a["step"][k]))
    return out


def cmd_compare(args) -> int:
    a = read_energy_csv(_need(args.a, "a"))
    b = read_energy_csv(_need(args.b, "b"))
    m = compare_metrics(a, b, args.step)
    print(f"{'column':<14}{'rms':>24}{'max':>24}")
    for col, val in m.items():
        if col != "reflection":
            print(f"{col:<14}{val[0]:>24.17g}{val[1]:>24.17g}")
    if "reflection" in m:
        ra, rb, s = m["reflection"]
        print(f"ke_md_region at step {s}: A={ra:.17g} B={rb:.17g}")
    return EXIT_OK


def cmd_demo(args) -> int:
    from .demo import wave_demo, square_annulus

    out = _out_dir(args)
    pb = wave_demo() if args.which == "wave" else square_annulus()
    write_mesh(out / "mesh.txt", pb.mesh)
    write_atoms(out / "atoms.txt", pb.atoms)
    write_atoms(out / "reference_atoms.txt", pb.reference_atoms)
    r0 = round(float(np.linalg.norm(pb.atoms.pair_vectors[0])), 12)
    cfg = Config(
        anchors=tuple(tuple(map(float, a)) for a in pb.anchors),
        center=tuple(map(float, pb.center)),
        r0=r0,
    )
    (out / "config.txt").write_text(config_text(cfg))
    print(f"wrote {out}/mesh.txt, atoms.txt, reference_atoms.txt, config.txt")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arlequin", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mesh=True, atoms=True):
        if mesh:
            sp.add_argument("--mesh")
        if atoms:
            sp.add_argument("--atoms")
        sp.add_argument("--config")
        sp.add_argument("--out-dir", default=".")

    sp = sub.add_parser("prep", help="locate atoms, extract the overlap and build α")
    common(sp)
    sp.add_argument("--method", choices=["direct", "temperature", "both"])
    sp.set_defaults(func=cmd_prep)

    sp = sub.add_parser("simulate", help="run the coupled model on prep artifacts in --out-dir")
    common(sp)
    sp.add_argument("--variant", choices=["arlequin_direct", "arlequin_temperature", "none", "constant_half"])
    sp.add_argument("--method", choices=["wcm", "bdm"])
    sp.add_argument("--snapshot-steps")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fullmd", help="run the all-atom reference")
    common(sp)
    sp.add_argument("--snapshot-steps")
    sp.set_defaults(func=cmd_fullmd)

    sp = sub.add_parser("compare", help="compare two energy CSV files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--step", type=int)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("demo", help="write demo inputs")
    sp.add_argument("--which", choices=["wave", "annulus"], default="wave")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        with _thread_limit(), warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BadAnchorError, RayGrazingError) as exc:
        print(f"error: bad anchor: {exc}", file=sys.stderr)
        return EXIT_ANCHOR
    except SingularHeatSystemError as exc:
        print(f"error: singular heat system: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except InstabilityError as exc:
        print(f"error: unstable integration: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ArlequinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
