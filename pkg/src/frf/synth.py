"""Synthetic test meshes: planar grids, disks, tubes, and the holed-sphere cavity.

The cavity generator cuts six caps out of a UV sphere, producing a surface with
the same topology as a clipped atrial body: one large rim (the valve boundary)
plus five interior holes (four vein ostia and the appendage). It also derives a
canonical seed set, so end-to-end runs are fully reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MeshError
from .mesh import TriMesh, boundary_loops

HOLE_LABELS = ("LIPV", "LSPV", "RIPV", "RSPV", "LAA")

# (longitude deg, latitude deg, cap angular radius deg) for the five holes,
# plus the valve cutoff latitude and the rim seed longitudes.
_DEFAULT_LAYOUT = {
    "RSPV": (45.0, 45.0, 9.0),
    "RIPV": (45.0, 15.0, 8.0),
    "LSPV": (135.0, 45.0, 9.0),
    "LIPV": (135.0, 15.0, 8.0),
    "LAA": (190.0, 52.0, 10.0),
    "MV_LAT": -55.0,
    "MV_LON": (345.0, 80.0, 170.0, 260.0),
}


def grid_mesh(nx: int, ny: int, spacing: float = 1.0) -> TriMesh:
    """Planar triangulated grid of (nx+1) x (ny+1) vertices in the z=0 plane."""
    xs = np.arange(nx + 1) * spacing
    ys = np.arange(ny + 1) * spacing
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])

    def vid(i, j):
        return i * (ny + 1) + j

    faces = []
    for i in range(nx):
        for j in range(ny):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return TriMesh(vertices=verts, faces=np.asarray(faces))


def disk_mesh(n_rings: int = 4, n_seg: int = 12, radius: float = 1.0) -> TriMesh:
    """Planar disk: a center vertex, n_rings concentric rings, CCW faces."""
    verts = [(0.0, 0.0, 0.0)]
    for r in range(1, n_rings + 1):
        rad = radius * r / n_rings
        for s in range(n_seg):
            ang = 2 * math.pi * s / n_seg
            verts.append((rad * math.cos(ang), rad * math.sin(ang), 0.0))

    def vid(r, s):
        return 1 + (r - 1) * n_seg + (s % n_seg)

    faces = []
    for s in range(n_seg):
        faces.append((0, vid(1, s), vid(1, s + 1)))
    for r in range(1, n_rings):
        for s in range(n_seg):
            a, b = vid(r, s), vid(r, s + 1)
            c, d = vid(r + 1, s), vid(r + 1, s + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    return TriMesh(vertices=np.asarray(verts), faces=np.asarray(faces))


def tube_mesh(n_seg: int = 12, n_rows: int = 4, radius: float = 1.0,
              height: float = 2.0) -> TriMesh:
    """Open cylinder with two boundary loops."""
    verts = []
    for r in range(n_rows + 1):
        z = height * r / n_rows
        for s in range(n_seg):
            ang = 2 * math.pi * s / n_seg
            verts.append((radius * math.cos(ang), radius * math.sin(ang), z))

    def vid(r, s):
        return r * n_seg + (s % n_seg)

    faces = []
    for r in range(n_rows):
        for s in range(n_seg):
            a, b = vid(r, s), vid(r, s + 1)
            c, d = vid(r + 1, s), vid(r + 1, s + 1)
            faces.append((a, b, d))
            faces.append((a, d, c))
    return TriMesh(vertices=np.asarray(verts), faces=np.asarray(faces))


def sphere_mesh(n_lat: int = 16, n_lon: int = 24, radius: float = 1.0) -> TriMesh:
    """Closed UV sphere with triangle fans at both poles, outward oriented."""
    theta = np.pi * np.arange(1, n_lat)[:, None] / n_lat
    phi = 2 * np.pi * np.arange(n_lon)[None, :] / n_lon
    band = np.stack([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta) * np.ones_like(phi)], axis=-1).reshape(-1, 3)
    verts = np.concatenate([[[0.0, 0.0, 1.0]], band, [[0.0, 0.0, -1.0]]]) * radius
    south = len(verts) - 1

    j = np.arange(n_lon)
    jn = (j + 1) % n_lon

    def vid(i, jj):
        return 1 + (i - 1) * n_lon + jj

    cap_n = np.column_stack([np.zeros(n_lon, dtype=np.int64), vid(1, j), vid(1, jn)])
    rows = []
    for i in range(1, n_lat - 1):
        a, b = vid(i, j), vid(i, jn)
        c, d = vid(i + 1, j), vid(i + 1, jn)
        rows.append(np.column_stack([a, c, d]))
        rows.append(np.column_stack([a, d, b]))
    cap_s = np.column_stack([np.full(n_lon, south, dtype=np.int64),
                             vid(n_lat - 1, jn), vid(n_lat - 1, j)])
    faces = np.concatenate([cap_n] + rows + [cap_s])
    return TriMesh(vertices=verts, faces=faces)


def _lonlat_dir(lon_deg: float, lat_deg: float) -> np.ndarray:
    lon = math.radians(lon_deg)
    lat = math.radians(lat_deg)
    return np.array([math.cos(lat) * math.cos(lon),
                     math.cos(lat) * math.sin(lon),
                     math.sin(lat)])


@dataclass(frozen=True)
class CavityFixture:
    """Holed-sphere cavity plus the canonical seed set and hole metadata."""

    mesh: TriMesh
    seeds: dict            # {"LIPV": int, ..., "MV": [i1, i2, i3, i4]}
    rings: dict            # label -> tuple of ring vertex indices (unordered loop order)
    layout: dict


def make_cavity(n_lat: int = 40, n_lon: int = 60, radius: float = 30.0,
                layout: dict | None = None) -> CavityFixture:
    """Cut six holes out of a sphere and derive a reproducible seed set.

    Faces whose all three vertices fall inside a cap are dropped, unreferenced
    vertices removed, and seeds snapped to ring vertices: each hole seed to the
    ring vertex facing away from that hole's path targets, the four rim seeds
    to the requested longitudes.
    """
    lay = dict(_DEFAULT_LAYOUT)
    if layout:
        lay.update(layout)
    base = sphere_mesh(n_lat=n_lat, n_lon=n_lon, radius=radius)
    v = np.array(base.vertices)
    unit = v / np.linalg.norm(v, axis=1, keepdims=True)

    inside = np.zeros(len(v), dtype=bool)
    hole_dirs = {}
    for label in HOLE_LABELS:
        lon, lat, cap = lay[label]
        d = _lonlat_dir(lon, lat)
        hole_dirs[label] = d
        inside |= unit @ d > math.cos(math.radians(cap))
    mv_cut = math.sin(math.radians(lay["MV_LAT"]))
    inside |= unit[:, 2] < mv_cut

    f = base.faces
    keep = ~(inside[f[:, 0]] | inside[f[:, 1]] | inside[f[:, 2]])
    faces = f[keep]
    used = np.unique(faces)
    remap = -np.ones(len(v), dtype=np.int64)
    remap[used] = np.arange(len(used))
    mesh = TriMesh(vertices=v[used], faces=remap[faces])

    loops = boundary_loops(mesh)
    if len(loops) != 6:
        raise MeshError(f"cavity generator produced {len(loops)} loops, expected 6")

    unit2 = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    rings = {}
    remaining = list(loops)
    # the valve rim is the longest loop; holes matched by direction
    remaining.sort(key=len, reverse=True)
    rings["MV"] = tuple(remaining[0].ring)
    for loop in remaining[1:]:
        center = unit2[list(loop.ring)].mean(axis=0)
        center /= np.linalg.norm(center)
        label = max(HOLE_LABELS, key=lambda L: float(center @ hole_dirs[L]))
        if label in rings:
            raise MeshError(f"two loops matched hole {label}")
        rings[label] = tuple(loop.ring)

    # targets of the paths incident to each hole, used to aim the seed away
    target_dirs = {
        "RSPV": ["RIPV", "LSPV", "MV1"],
        "RIPV": ["RSPV", "LIPV", "MV2"],
        "LIPV": ["RIPV", "LSPV", "MV3"],
        "LSPV": ["LIPV", "RSPV", "LAA"],
        "LAA": ["LSPV", "MV4"],
    }
    mv_lons = lay["MV_LON"]
    named_dirs = dict(hole_dirs)
    for k, lon in enumerate(mv_lons, start=1):
        named_dirs[f"MV{k}"] = _lonlat_dir(lon, lay["MV_LAT"])

    # hole seeds snap to the cover vertex with the densest chord fan, the
    # closest analogue of "the centre of the closed ostium" when covers add
    # no vertices; a deterministic re-seed sweep then replaces any seed whose
    # incident paths collide, the automated version of the interactive
    # place-seeds-and-retry loop
    from .mesh import close_hole

    closed = mesh
    hole_cover_faces = {}
    for label in HOLE_LABELS:
        before = closed.n_faces
        closed = close_hole(closed, rings[label])
        hole_cover_faces[label] = np.arange(before, closed.n_faces)

    nv = closed.n_vertices
    f = closed.faces
    de = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    keys = np.where(de[:, 0] < de[:, 1],
                    de[:, 0] * nv + de[:, 1], de[:, 1] * nv + de[:, 0])
    is_cover = np.zeros(len(f), dtype=bool)
    is_cover[list(closed.cover_faces)] = True
    cover_edge = np.repeat(is_cover, 3)
    uniq, inv = np.unique(keys, return_inverse=True)
    total = np.bincount(inv)
    in_cover = np.bincount(inv, weights=cover_edge).astype(np.int64)
    chords = uniq[(in_cover > 0) & (in_cover == total)]
    chord_degree = np.zeros(nv, dtype=np.int64)
    np.add.at(chord_degree, chords // nv, 1)
    np.add.at(chord_degree, chords % nv, 1)

    mv_ring = list(rings["MV"])
    mv_seeds = []
    for lon in mv_lons:
        d = _lonlat_dir(lon, lay["MV_LAT"])
        scores = unit2[mv_ring] @ d
        mv_seeds.append(int(mv_ring[int(np.argmax(scores))]))
    if len(set(mv_seeds)) != 4:
        raise MeshError("rim seeds collide; raise resolution")
    pos = [mv_ring.index(s) for s in mv_seeds]
    shift = pos.index(min(pos))
    if pos[shift:] + pos[:shift] != sorted(pos):
        raise MeshError("rim seed longitudes oppose the rim loop orientation")

    candidates = {label: sorted(rings[label],
                                key=lambda vtx: (-int(chord_degree[vtx]), vtx))
                  for label in HOLE_LABELS}
    seeds = _sweep_hole_seeds(closed, hole_cover_faces, candidates, mv_seeds, mv_ring)
    seeds["MV"] = mv_seeds
    return CavityFixture(mesh=mesh, seeds=seeds, rings=rings, layout=lay)


def _sweep_hole_seeds(closed, hole_cover_faces, candidates, mv_seeds, mv_ring):
    """Pick a seed per hole such that its incident paths land on distinct
    intersection points and stay disjoint elsewhere; advance to the next
    candidate and re-sweep when they do not."""
    from .division import (HOLE_PATHS, MV_LABELS, PATH_ENDPOINTS,
                           _dijkstra_chain, _edge_graph, _hole_ring_keys,
                           _ring_edge_keys, _trim_index)

    n = closed.n_vertices
    ring_keys, cover_only = _ring_edge_keys(closed, n)
    indptr, indices, weights = _edge_graph(closed)
    hole_verts = {label: set(int(x) for x in closed.faces[fcs].ravel())
                  for label, fcs in hole_cover_faces.items()}
    absorb = {label: cover_only | _hole_ring_keys(closed, hole_cover_faces[label],
                                                  ring_keys, n)
              for label in hole_cover_faces}
    rim_blocked = np.zeros(n, dtype=bool)
    rim_blocked[mv_ring] = True

    seeds = {label: candidates[label][0] for label in candidates}
    pos = {label: 0 for label in candidates}
    cache: dict = {}

    def endpoint(lab):
        if lab in MV_LABELS:
            return mv_seeds[MV_LABELS.index(lab)]
        return seeds[lab]

    def chain_for(name):
        ea, eb = PATH_ENDPOINTS[name]
        va, vb = endpoint(ea), endpoint(eb)
        key = (name, va, vb)
        if key not in cache:
            blocked = rim_blocked.copy()
            for lab in hole_verts:
                if lab not in (ea, eb):
                    blocked[list(hole_verts[lab])] = True
            if eb in MV_LABELS:
                blocked[vb] = False
            cache[key] = _dijkstra_chain(indptr, indices, weights, va, vb, blocked)[0]
        return cache[key]

    def trimmed(name):
        ea, eb = PATH_ENDPOINTS[name]
        chain = chain_for(name)
        i0 = _trim_index(chain, absorb[ea], n) if ea in absorb else 0
        rev = chain[::-1]
        j0 = _trim_index(rev, absorb[eb], n) if eb in absorb else 0
        return chain[i0: len(chain) - j0]

    def hole_ok(label):
        ips = []
        chains = []
        for name in HOLE_PATHS[label]:
            sub = trimmed(name)
            if PATH_ENDPOINTS[name][0] != label:
                sub = sub[::-1]
            if len(sub) < 2 or sub[0] not in hole_verts[label]:
                return False
            ips.append(sub[0])
            chains.append(set(sub))
        if len(set(ips)) != len(ips):
            return False
        for a in range(len(chains)):
            for b in range(a + 1, len(chains)):
                if chains[a] & chains[b]:
                    return False
        return True

    for _ in range(8):
        changed = False
        for label in sorted(candidates):
            while not hole_ok(label):
                pos[label] += 1
                if pos[label] >= len(candidates[label]):
                    raise MeshError(
                        f"no valid seed found for {label}; raise resolution"
                    )
                seeds[label] = candidates[label][pos[label]]
                changed = True
        if not changed:
            return seeds
    raise MeshError("seed selection did not converge; raise resolution")
