"""Plain-text formats: meshes, atoms, config, coupling maps and CSV outputs.

Mesh file::

    dimension 2
    nodes 4
    1 0.0 0.0
    ...
    elements 1
    1 quad4 1 2 3 4

Atom file (the ``pairs`` block is optional; without it pairs are found by
distance)::

    dimension 2
    atoms 2
    1 0.0 0.0 1.0        # id, coordinates, mass
    2 1.2405 0.0 1.0
    pairs 1
    1 2                  # atom ids
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
from pathlib import Path

import numpy as np

from .alpha import AlphaField
from .core import KINDS, AtomSet, Config, ElementLocation, IsoCoords, Mesh, forward_map
from .dynamics import ENERGY_COLUMNS, EnergyRecord, Snapshot
from .fem import gauss_rule
from .topology import CouplingMap, SurfaceObject


class ParseError(ValueError):
    pass


def fmt(x) -> str:
    """Float text that round-trips exactly."""
    return format(float(x), ".17g")


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _lines(path):
    """Non-empty lines with comments stripped, as (line number, tokens)."""
    with open(path) as f:
        for k, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield k, line.split()


class _Reader:
    def __init__(self, path):
        self.path = str(path)
        self.it = iter(list(_lines(path)))

    def next(self, what):
        try:
            return next(self.it)
        except StopIteration:
            raise ParseError(f"{self.path}: unexpected end of file, expected {what}") from None

    def header(self, key):
        k, tok = self.next(f"'{key}'")
        if tok[0] != key or len(tok) != 2:
            raise ParseError(f"{self.path}:{k}: expected '{key} <value>'")
        try:
            return int(tok[1])
        except ValueError:
            raise ParseError(f"{self.path}:{k}: '{key}' needs an integer") from None

    def optional_header(self, key):
        try:
            k, tok = next(self.it)
        except StopIteration:
            return None
        if tok[0] != key or len(tok) != 2:
            raise ParseError(f"{self.path}:{k}: expected '{key} <count>' or end of file")
        return int(tok[1])

    def rows(self, n, what):
        for _ in range(n):
            yield self.next(what)


# ------------------------------------------------------------------ meshes


def write_mesh(path, mesh: Mesh):
    with open(path, "w") as f:
        f.write(f"dimension {mesh.dimension}\nnodes {len(mesh.nodes)}\n")
        for n in mesh.nodes:
            f.write(" ".join([str(n.id), *map(fmt, n.coords)]) + "\n")
        f.write(f"elements {len(mesh.elements)}\n")
        for e in mesh.elements:
            f.write(" ".join([str(e.id), e.kind, *map(str, e.connectivity)]) + "\n")


def read_mesh(path) -> Mesh:
    r = _Reader(path)
    dim = r.header("dimension")
    ids, coords = [], []
    for k, tok in r.rows(r.header("nodes"), "node row"):
        if len(tok) != dim + 1:
            raise ParseError(f"{path}:{k}: node row needs id and {dim} coordinates")
        try:
            ids.append(int(tok[0]))
            coords.append([float(t) for t in tok[1:]])
        except ValueError:
            raise ParseError(f"{path}:{k}: malformed node row") from None
    eids, elems = [], []
    for k, tok in r.rows(r.header("elements"), "element row"):
        if len(tok) < 3 or tok[1] not in KINDS:
            raise ParseError(f"{path}:{k}: element row needs id, kind ({'|'.join(KINDS)}) and nodes")
        try:
            eids.append(int(tok[0]))
            elems.append((tok[1], [int(t) for t in tok[2:]]))
        except ValueError:
            raise ParseError(f"{path}:{k}: malformed element row") from None
    if len(set(ids)) != len(ids) or len(set(eids)) != len(eids):
        raise ParseError(f"{path}: duplicate node or element id")
    coords = np.array(coords, dtype=float).reshape(-1, dim)
    return Mesh.from_arrays(coords, elems, node_ids=ids, element_ids=eids)


# ------------------------------------------------------------------- atoms


def write_atoms(path, atoms: AtomSet, with_pairs=True):
    with open(path, "w") as f:
        f.write(f"dimension {atoms.dimension}\natoms {len(atoms)}\n")
        for i, x, m in zip(atoms.ids, atoms.positions, atoms.masses):
            f.write(" ".join([str(int(i)), *map(fmt, x), fmt(m)]) + "\n")
        if with_pairs:
            f.write(f"pairs {len(atoms.pairs)}\n")
            for a, b in atoms.pairs:
                f.write(f"{int(atoms.ids[a])} {int(atoms.ids[b])}\n")


def read_atoms(path, r0=None, tol=1e-3) -> AtomSet:
    """Read atoms; without a pairs block, pairs at distance ``r0`` are built."""
    from .lattice import neighbor_pairs

    r = _Reader(path)
    dim = r.header("dimension")
    ids, pos, mass = [], [], []
    for k, tok in r.rows(r.header("atoms"), "atom row"):
        if len(tok) != dim + 2:
            raise ParseError(f"{path}:{k}: atom row needs id, {dim} coordinates and mass")
        try:
            ids.append(int(tok[0]))
            pos.append([float(t) for t in tok[1 : dim + 1]])
            mass.append(float(tok[-1]))
        except ValueError:
            raise ParseError(f"{path}:{k}: malformed atom row") from None
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: duplicate atom id")
    pos = np.array(pos, dtype=float).reshape(-1, dim)
    n_pairs = r.optional_header("pairs")
    if n_pairs is not None:
        row = {a: k for k, a in enumerate(ids)}
        pairs = []
        for k, tok in r.rows(n_pairs, "pair row"):
            try:
                a, b = sorted((row[int(tok[0])], row[int(tok[1])]))
            except (KeyError, ValueError, IndexError):
                raise ParseError(f"{path}:{k}: pair row must name two known atom ids") from None
            pairs.append((a, b))
        pairs = np.array(pairs, dtype=int).reshape(-1, 2)
    elif r0 is not None:
        pairs = neighbor_pairs(pos, r0, tol)
    else:
        pairs = np.zeros((0, 2), dtype=int)
    try:
        return AtomSet(pos, np.array(mass), pairs, np.array(ids, dtype=int))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


# ------------------------------------------------------------------ config


def _floats(text):
    return tuple(float(t) for t in text.replace(",", " ").split())


_PARSERS = {
    "cell_size": _floats,
    "anchors": lambda s: tuple(_floats(a) for a in s.split(";") if a.strip()),
    "center": _floats,
    "snapshot_steps": lambda s: tuple(int(t) for t in s.replace(",", " ").split()),
    "benchmark_search": lambda s: {"true": True, "false": False, "1": True, "0": False}[s.lower()],
}


def parse_config_text(text: str, source="<config>") -> Config:
    fields = {f.name: f for f in dataclasses.fields(Config)}
    values = {}
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{k}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in fields:
            raise ParseError(f"{source}:{k}: unknown key {key!r}")
        try:
            if key in _PARSERS:
                values[key] = _PARSERS[key](val)
            elif fields[key].type in ("int",):
                values[key] = int(val)
            elif "float" in str(fields[key].type):
                values[key] = float(val)
            else:
                values[key] = val
        except (ValueError, KeyError):
            raise ParseError(f"{source}:{k}: bad value for {key}: {val!r}") from None
    try:
        return Config(**values)
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None


def read_config(path) -> Config:
    return parse_config_text(Path(path).read_text(), str(path))


def config_text(cfg: Config) -> str:
    out = []
    for f in dataclasses.fields(Config):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if f.name == "anchors":
            if not v:
                continue
            v = "; ".join(" ".join(fmt(c) for c in a) for a in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, tuple):
            v = " ".join(fmt(c) if isinstance(c, float) else str(c) for c in v)
        elif isinstance(v, float):
            v = fmt(v)
        out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------ coupling map


def coupling_map_text(cmap: CouplingMap) -> str:
    out = ["[coupling_elements]"]
    out += [str(e) for e in cmap.elements]
    out.append("[atom_locations]")
    for loc in cmap.locations:
        out.append(" ".join([str(loc.atom), str(loc.element), loc.iso.kind, *map(fmt, loc.iso.values)]))
    out.append("[boundary]")
    for s in cmap.boundary:
        sides = ",".join(cmap.sides.get(n, "-") for n in s.nodes)
        out.append(f"{s.owner} {','.join(map(str, s.nodes))} {sides}")
    return "\n".join(out) + "\n"


def parse_coupling_map(text: str, source="<coupling map>") -> CouplingMap:
    section, elements, locations, boundary, sides = None, [], [], [], {}
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("["):
            section = line
            continue
        tok = line.split()
        try:
            if section == "[coupling_elements]":
                elements.extend(int(t) for t in tok)
            elif section == "[atom_locations]":
                iso = IsoCoords(tok[2], tuple(float(t) for t in tok[3:]))
                locations.append(ElementLocation(int(tok[0]), int(tok[1]), iso, "in"))
            elif section == "[boundary]":
                nodes = tuple(int(t) for t in tok[1].split(","))
                boundary.append(SurfaceObject(tuple(sorted(nodes)), int(tok[0]), nodes))
                for n, s in zip(nodes, tok[2].split(",")):
                    if s != "-":
                        sides[n] = s
            else:
                raise ParseError(f"{source}:{k}: data outside a section")
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{source}:{k}: {exc}") from None
    return CouplingMap(tuple(elements), locations, boundary, sides)


def write_coupling_map(path, cmap: CouplingMap):
    Path(path).write_text(coupling_map_text(cmap))


def read_coupling_map(path) -> CouplingMap:
    return parse_coupling_map(Path(path).read_text(), str(path))


# ------------------------------------------------------------------- CSV


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def write_alpha_csv(path, field: AlphaField, mesh: Mesh, cmap: CouplingMap, atoms: AtomSet):
    dim = mesh.dimension
    axes = ["x", "y", "z"][:dim]
    rows = []
    for nid in sorted(field.nodal):
        rows.append(["node", nid, *mesh.coords[mesh.node_row[nid]], field.nodal[nid]])
    for eid in cmap.elements:
        e = mesh.element_by_id[eid]
        pts, _ = gauss_rule(e.kind)
        xy = forward_map(e.kind, mesh.element_coords(e), pts)
        for g in range(len(pts)):
            rows.append(["gauss", f"{eid}:{g}", *xy[g], field.gauss[(eid, g)]])
    pos = {int(a): atoms.positions[k] for k, a in enumerate(atoms.ids)}
    for aid in sorted(field.atoms):
        rows.append(["atom", aid, *pos[aid], field.atoms[aid]])
    _write_csv(path, ["entity_type", "entity_id", *axes, "alpha"], rows)


def read_alpha_csv(path) -> dict[str, dict]:
    """Alpha values grouped by entity type; gauss keys are (element, index)."""
    out = {"node": {}, "gauss": {}, "atom": {}}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            kind, ident = row["entity_type"], row["entity_id"]
            key = tuple(map(int, ident.split(":"))) if kind == "gauss" else int(ident)
            out[kind][key] = float(row["alpha"])
    return out


def write_energy_csv(path, records: list[EnergyRecord]):
    _write_csv(path, ENERGY_COLUMNS, (r.row() for r in records))


def read_energy_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    if tuple(header) != ENERGY_COLUMNS:
        raise ParseError(f"{path}: unexpected energy CSV header")
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {h: arr[:, k] for k, h in enumerate(header)}


def write_snapshot_csv(path, snap: Snapshot):
    rows = []
    for i, x, u, ke in zip(snap.node_ids, snap.node_xy, snap.node_u, snap.node_ke):
        rows.append(["node", int(i), *x, *u, ke])
    for i, x, u, ke in zip(snap.atom_ids, snap.atom_xy, snap.atom_u, snap.atom_ke):
        rows.append(["atom", int(i), *x, *u, ke])
    _write_csv(path, ["entity_type", "id", "x", "y", "u_x", "u_y", "ke_density"], rows)
