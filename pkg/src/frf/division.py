"""Seed-driven division of the closed cavity into five regions.

Nine geodesic paths connect the seeds: four around the vein block (s1..s4),
four down to the rim (s5, s6, s7, s9) and one to the appendage (s8). Flood
fill bounded by path and ring edges labels the faces R1..R5, and the points
where paths meet the hole rings become the intersection points that drive the
boundary constraint layout.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DivisionError
from .mesh import TriMesh, boundary_loops

HOLE_LABELS = ("LIPV", "LSPV", "RIPV", "RSPV", "LAA")
MV_LABELS = ("MV1", "MV2", "MV3", "MV4")

PATH_ENDPOINTS = {
    "s1": ("RSPV", "RIPV"),
    "s2": ("RIPV", "LIPV"),
    "s3": ("LIPV", "LSPV"),
    "s4": ("LSPV", "RSPV"),
    "s5": ("RSPV", "MV1"),
    "s6": ("RIPV", "MV2"),
    "s7": ("LIPV", "MV3"),
    "s8": ("LSPV", "LAA"),
    "s9": ("LAA", "MV4"),
}
PATH_NAMES = tuple(sorted(PATH_ENDPOINTS))

# paths incident to each hole; the first one fixes IP1
HOLE_PATHS = {
    "RSPV": ("s1", "s4", "s5"),
    "RIPV": ("s1", "s2", "s6"),
    "LIPV": ("s2", "s3", "s7"),
    "LSPV": ("s3", "s4", "s8"),
    "LAA": ("s8", "s9"),
}

REGION_NAMES = {1: "R1", 2: "R2", 3: "R3", 4: "R4", 5: "R5"}


@dataclass(frozen=True)
class SeedSet:
    """The nine labeled seed vertices: five hole centers, four rim points."""

    holes: dict            # label -> vertex index
    mv: tuple              # (MV1, MV2, MV3, MV4)

    def __post_init__(self):
        holes = {k: int(v) for k, v in self.holes.items()}
        if set(holes) != set(HOLE_LABELS):
            raise DivisionError(f"hole seeds must be exactly {HOLE_LABELS}")
        mv = tuple(int(v) for v in self.mv)
        if len(mv) != 4:
            raise DivisionError("exactly 4 rim seeds required")
        allseeds = list(holes.values()) + list(mv)
        if len(set(allseeds)) != 9:
            raise DivisionError("the 9 seed vertices must be distinct")
        object.__setattr__(self, "holes", holes)
        object.__setattr__(self, "mv", mv)

    def endpoint_vertex(self, name: str) -> int:
        if name in self.holes:
            return self.holes[name]
        return self.mv[MV_LABELS.index(name)]

    def to_json(self) -> str:
        payload = dict(sorted(self.holes.items()))
        payload["MV"] = list(self.mv)
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SeedSet":
        data = json.loads(text)
        mv = data.pop("MV")
        return cls(holes=data, mv=tuple(mv))


@dataclass(frozen=True)
class DivisionResult:
    """Paths s1..s9, per-face region codes 1..5, and per-hole intersection points."""

    paths: dict              # name -> tuple of vertex indices
    region_label: np.ndarray  # (M,) int8 codes, 1..5
    intersection_points: dict  # hole label -> ring-ordered vertices, IP1 first
    ip_paths: dict           # hole label -> path names matching the IPs
    rings: dict              # hole label -> ring vertices in cavity orientation

    def region_faces(self, code: int) -> np.ndarray:
        return np.nonzero(self.region_label == code)[0]


@dataclass(frozen=True)
class SubcontourSplit:
    """Ring split by intersection points; positions index into ring, IP1 at 0."""

    hole: str
    ring: tuple              # ring vertices rotated so IP1 sits at position 0
    ip_positions: tuple      # strictly increasing, first is 0
    ip_paths: tuple          # path names owning each intersection point

    def __post_init__(self):
        pos = tuple(int(p) for p in self.ip_positions)
        n = len(self.ring)
        if not pos or pos[0] != 0:
            raise DivisionError("IP1 must sit at ring position 0")
        if any(b <= a for a, b in zip(pos, pos[1:])) or pos[-1] >= n:
            raise DivisionError("intersection positions must increase along the ring")
        lengths = self.lengths_from(pos, n)
        if any(L < 1 for L in lengths):
            raise DivisionError("every sub-contour needs at least 1 point")
        object.__setattr__(self, "ip_positions", pos)

    @staticmethod
    def lengths_from(pos, n):
        ext = list(pos) + [n]
        return tuple(ext[k + 1] - ext[k] for k in range(len(pos)))

    @property
    def lengths(self) -> tuple:
        return self.lengths_from(self.ip_positions, len(self.ring))

    @property
    def ip_vertices(self) -> tuple:
        return tuple(self.ring[p] for p in self.ip_positions)


def _edge_graph(mesh: TriMesh, banned_keys: set | None = None):
    edges, lengths = mesh.edge_lengths()
    n = mesh.n_vertices
    if banned_keys:
        keys = edges[:, 0] * n + edges[:, 1]
        keep = ~np.isin(keys, np.fromiter(banned_keys, dtype=np.int64))
        edges, lengths = edges[keep], lengths[keep]
    i = np.concatenate([edges[:, 0], edges[:, 1]])
    j = np.concatenate([edges[:, 1], edges[:, 0]])
    w = np.concatenate([lengths, lengths])
    g = coo_matrix((w, (i, j)), shape=(n, n)).tocsr()
    return g.indptr, g.indices, g.data


def _dijkstra_chain(indptr, indices, weights, src: int, dst: int, blocked=None):
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    if blocked is not None:
        if blocked[src] or blocked[dst]:
            raise DivisionError("path endpoint is blocked")
        done[blocked] = True  # treat blocked vertices as absent
        done[src] = False
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == dst:
            break
        for ii in range(indptr[u], indptr[u + 1]):
            v = int(indices[ii])
            if done[v]:
                continue
            nd = d + weights[ii]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u
    if pred[dst] < 0 and dst != src:
        raise DivisionError(f"vertices {src} and {dst} are not connected")
    chain = [dst]
    while chain[-1] != src:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    return tuple(chain), float(dist[dst])


def snap_to_cover(mesh: TriMesh, face_index: int) -> int:
    """Turn a click on a closed-hole cover face into a reproducible seed: the
    cover vertex nearest that cover's centroid."""
    if face_index not in set(mesh.cover_faces):
        raise DivisionError(f"face {face_index} is not a hole cover face")
    for faces, verts in _cover_components(mesh):
        if face_index in set(int(x) for x in faces):
            ids = sorted(verts)
            pts = mesh.vertices[ids]
            centroid = pts.mean(axis=0)
            d = np.linalg.norm(pts - centroid, axis=1)
            return int(ids[int(np.argmin(d))])
    raise DivisionError(f"face {face_index} belongs to no cover component")


def geodesic_path(mesh: TriMesh, a: int, b: int) -> tuple:
    """Shortest edge-graph path from a to b; ties go to the lowest predecessor."""
    if a == b:
        raise DivisionError("path endpoints must differ")
    n = mesh.n_vertices
    if not (0 <= a < n and 0 <= b < n):
        raise DivisionError("path endpoint out of range")
    indptr, indices, weights = _edge_graph(mesh)
    chain, _ = _dijkstra_chain(indptr, indices, weights, a, b)
    return chain


def _cover_components(mesh: TriMesh):
    """Group cover faces into per-hole components; return (comp faces, comp verts)."""
    covers = np.asarray(mesh.cover_faces, dtype=np.int64)
    if not len(covers):
        raise DivisionError("mesh has no hole covers; close the holes first")
    f = mesh.faces[covers]
    key = {}
    adj_i, adj_j = [], []
    for local, tri in enumerate(f):
        a, b, c = (int(x) for x in tri)
        for u, w in ((a, b), (b, c), (c, a)):
            k = (u, w) if u < w else (w, u)
            if k in key:
                adj_i.append(key[k])
                adj_j.append(local)
            else:
                key[k] = local
    g = coo_matrix((np.ones(len(adj_i)), (adj_i, adj_j)), shape=(len(f), len(f)))
    ncomp, lab = connected_components(g, directed=False)
    comps = []
    for c in range(ncomp):
        faces = covers[lab == c]
        verts = set(int(x) for x in mesh.faces[faces].ravel())
        comps.append((faces, verts))
    return comps


def _ring_edge_keys(mesh: TriMesh, n: int):
    """Undirected edge keys of all ring edges (cover face edges shared with cavity)."""
    cover_set = set(mesh.cover_faces)
    f = mesh.faces
    count_cover: dict = {}
    count_total: dict = {}
    for fi in range(len(f)):
        a, b, c = (int(x) for x in f[fi])
        for u, w in ((a, b), (b, c), (c, a)):
            k = (u * n + w) if u < w else (w * n + u)
            count_total[k] = count_total.get(k, 0) + 1
            if fi in cover_set:
                count_cover[k] = count_cover.get(k, 0) + 1
    ring = set()
    cover_only = set()
    for k, c in count_cover.items():
        if count_total[k] > c:
            ring.add(k)
        else:
            cover_only.add(k)
    return ring, cover_only


def _hole_ring_keys(mesh: TriMesh, cover_faces_arr, ring_keys: set, n: int) -> set:
    keys = set()
    f = mesh.faces
    for fi in cover_faces_arr:
        a, b, c = (int(x) for x in f[int(fi)])
        for u, w in ((a, b), (b, c), (c, a)):
            k = (u * n + w) if u < w else (w * n + u)
            if k in ring_keys:
                keys.add(k)
    return keys


def _hole_rings(mesh: TriMesh, seeds: SeedSet):
    """Map hole labels to (cover faces, ring vertex set) via the seed membership."""
    comps = _cover_components(mesh)
    if len(comps) != 5:
        raise DivisionError(f"expected 5 closed holes, found {len(comps)} covers")
    out = {}
    for label in HOLE_LABELS:
        s = seeds.holes[label]
        hit = [c for c in comps if s in c[1]]
        if len(hit) != 1:
            raise DivisionError(f"seed for {label} does not sit on a closed cover")
        out[label] = hit[0]
    seen = set()
    for label, (faces, _) in out.items():
        k = int(faces[0])
        if k in seen:
            raise DivisionError("two hole seeds share one cover")
        seen.add(k)
    return out


def divide(mesh: TriMesh, seeds: SeedSet) -> DivisionResult:
    """Divide the closed cavity into regions R1..R5 along the nine seed paths."""
    n = mesh.n_vertices
    holes = _hole_rings(mesh, seeds)
    loops = boundary_loops(mesh)
    if len(loops) != 1:
        raise DivisionError(
            f"closed cavity must have exactly 1 boundary loop (the rim), found {len(loops)}"
        )
    mv_ring = list(loops[0].ring)
    for k, s in enumerate(seeds.mv):
        if s not in mv_ring:
            raise DivisionError(f"rim seed MV{k + 1} is not on the rim loop")
    pos = [mv_ring.index(s) for s in seeds.mv]
    shift = pos.index(min(pos))
    cyc = pos[shift:] + pos[:shift]
    if cyc != sorted(pos):
        raise DivisionError("rim seeds must appear in order MV1..MV4 along the rim loop")

    # a path may only touch the boundary elements it ends on: everything else
    # (rim vertices, rings and covers of foreign holes) is off limits, since
    # regional constraints must meet boundary constraints only at intersection
    # points
    indptr, indices, weights = _edge_graph(mesh)
    rim_blocked = np.zeros(n, dtype=bool)
    rim_blocked[mv_ring] = True
    paths = {}
    for name in PATH_NAMES:
        ea, eb = PATH_ENDPOINTS[name]
        blocked = rim_blocked.copy()
        for label in HOLE_LABELS:
            if label not in (ea, eb):
                blocked[list(holes[label][1])] = True
        a = seeds.endpoint_vertex(ea)
        b = seeds.endpoint_vertex(eb)
        if eb in MV_LABELS:
            blocked[b] = False
        chain, _ = _dijkstra_chain(indptr, indices, weights, a, b, blocked)
        paths[name] = chain

    _check_crossings(paths, seeds, holes)
    region = _label_regions(mesh, paths, mv_ring, holes, n)
    ips, ip_paths, rings = _intersection_points(mesh, paths, holes, n)
    return DivisionResult(paths=paths, region_label=region,
                          intersection_points=ips, ip_paths=ip_paths, rings=rings)


def _check_crossings(paths: dict, seeds: SeedSet, holes: dict):
    """Two paths may share only their common seed or vertices on a shared cover."""
    owner: dict = {}
    seed_verts = set(seeds.holes.values()) | set(seeds.mv)
    for name in sorted(paths):
        labels = PATH_ENDPOINTS[name]
        shared_rings = set()
        for lab in labels:
            if lab in holes:
                shared_rings |= {lab}
        for vtx in paths[name]:
            vtx = int(vtx)
            if vtx not in owner:
                owner[vtx] = (name, shared_rings)
                continue
            other, other_rings = owner[vtx]
            if other == name:
                continue
            if vtx in seed_verts:
                continue
            both = shared_rings & other_rings
            on_shared_cover = any(vtx in holes[lab][1] for lab in both)
            if not on_shared_cover:
                raise DivisionError(
                    f"paths {other} and {name} cross at vertex {vtx}; re-seed",
                    vertex=vtx,
                )


def _label_regions(mesh: TriMesh, paths: dict, mv_ring: list, holes: dict, n: int):
    ring_keys, cover_only = _ring_edge_keys(mesh, n)
    barrier = set(ring_keys)
    path_of_edge: dict = {}
    for name, chain in paths.items():
        for a, b in zip(chain, chain[1:]):
            k = (a * n + b) if a < b else (b * n + a)
            barrier.add(k)
            # only open-cavity segments define the region adjacency signature;
            # cover chords and ring runs vanish once the covers are removed
            if k not in ring_keys and k not in cover_only:
                path_of_edge[k] = name

    f = mesh.faces
    m = len(f)
    cover_faces = set(mesh.cover_faces)
    edge_face: dict = {}
    pairs = []
    pair_keys = []
    for fi in range(m):
        a, b, c = (int(x) for x in f[fi])
        for u, w in ((a, b), (b, c), (c, a)):
            k = (u * n + w) if u < w else (w * n + u)
            if k in edge_face:
                pairs.append((edge_face[k], fi))
                pair_keys.append(k)
            else:
                edge_face[k] = fi

    open_pairs = [(p, k) for p, k in zip(pairs, pair_keys) if k not in barrier]
    if open_pairs:
        i = [p[0][0] for p in open_pairs]
        j = [p[0][1] for p in open_pairs]
        g = coo_matrix((np.ones(len(i)), (i, j)), shape=(m, m))
        ncomp, comp = connected_components(g, directed=False)
    else:
        comp = np.arange(m)
        ncomp = m

    cavity_comps = sorted(set(int(comp[fi]) for fi in range(m) if fi not in cover_faces))
    if len(cavity_comps) != 5:
        raise DivisionError(
            f"flood fill produced {len(cavity_comps)} cavity regions, expected 5; re-seed"
        )

    # which components touch which paths (via faces flanking path edges)
    touches: dict = {c: set() for c in cavity_comps}
    for (fa, fb), k in zip(pairs, pair_keys):
        name = path_of_edge.get(k)
        if name is None:
            continue
        for fi in (fa, fb):
            if fi in cover_faces:
                continue
            touches[int(comp[fi])].add(name)

    ring_like = {"s1", "s2", "s3", "s4"}
    candidates = [c for c in cavity_comps if ring_like <= touches[c]]
    inner = [c for c in candidates if not (touches[c] - ring_like)]
    if len(inner) != 1:
        raise DivisionError("could not identify the inter-vein region; re-seed")
    r5 = inner[0]
    code = {}
    for region_code, key in ((1, "s1"), (2, "s2"), (3, "s3"), (4, "s4")):
        cands = [c for c in cavity_comps if c != r5 and key in touches[c]]
        if len(cands) != 1:
            raise DivisionError(
                f"could not identify region R{region_code} from path {key}; re-seed"
            )
        code[cands[0]] = region_code
    code[r5] = 5

    labels = np.zeros(m, dtype=np.int8)
    for fi in range(m):
        if fi in cover_faces:
            continue
        labels[fi] = code[int(comp[fi])]

    # cover fragments inherit a label across their ring edges by majority vote;
    # a fragment may legitimately border two regions when the separating path
    # runs along the ring there, and ring edges are valid region boundaries
    votes: dict = {}
    for (fa, fb), k in zip(pairs, pair_keys):
        if k not in ring_keys:
            continue
        ca, cb = fa in cover_faces, fb in cover_faces
        if ca == cb:
            continue
        cov, cav = (fa, fb) if ca else (fb, fa)
        frag = int(comp[cov])
        lab = code[int(comp[cav])]
        votes.setdefault(frag, {}).setdefault(lab, 0)
        votes[frag][lab] += 1
    for fi in cover_faces:
        frag_votes = votes.get(int(comp[fi]))
        if not frag_votes:
            raise DivisionError("cover fragment with no cavity neighbour; re-seed")
        labels[fi] = min(frag_votes, key=lambda lab: (-frag_votes[lab], lab))
    return labels


def _ordered_hole_ring(mesh: TriMesh, cover_faces_arr) -> list:
    """Ring of a closed hole, ordered as the cavity would traverse it once opened."""
    cover_set = set(int(x) for x in cover_faces_arr)
    f = mesh.faces
    cover_edges = set()
    for fi in cover_set:
        a, b, c = (int(x) for x in f[fi])
        for u, w in ((a, b), (b, c), (c, a)):
            cover_edges.add((u, w) if u < w else (w, u))
    nxt: dict = {}
    all_covers = set(mesh.cover_faces)
    for fi in range(len(f)):
        if fi in all_covers:
            continue
        a, b, c = (int(x) for x in f[fi])
        for u, w in ((a, b), (b, c), (c, a)):
            k = (u, w) if u < w else (w, u)
            if k in cover_edges:
                if u in nxt:
                    raise DivisionError(f"non-manifold ring vertex {u}")
                nxt[u] = w
    if not nxt:
        raise DivisionError("hole cover has no cavity neighbours")
    start = min(nxt)
    ring = [start]
    cur = nxt[start]
    while cur != start:
        ring.append(cur)
        cur = nxt[cur]
    if len(ring) != len(nxt):
        raise DivisionError("hole ring is not a single cycle")
    return ring


def _intersection_points(mesh: TriMesh, paths: dict, holes: dict, n: int):
    """Ring-ordered intersection points per hole, the first path's IP fixed first."""
    ring_keys, cover_only = _ring_edge_keys(mesh, n)
    ips: dict = {}
    ip_paths: dict = {}
    rings: dict = {}
    for label, (faces, verts) in holes.items():
        ring = _ordered_hole_ring(mesh, faces)
        absorb = cover_only | _hole_ring_keys(mesh, faces, ring_keys, n)
        found = []
        for name in HOLE_PATHS[label]:
            chain = paths[name]
            if PATH_ENDPOINTS[name][0] != label:
                chain = chain[::-1]
            ip = _trim_index(chain, absorb, n)
            vtx = int(chain[ip])
            if vtx not in ring:
                raise DivisionError(
                    f"path {name} never reaches the {label} ring", vertex=vtx
                )
            found.append((name, vtx))
        if len({v for _, v in found}) != len(found):
            raise DivisionError(f"paths meet the {label} ring at a shared vertex; re-seed")
        # rotate the ring so the first path's intersection point sits at 0,
        # then order the remaining points by ring position
        k = ring.index(found[0][1])
        ring = ring[k:] + ring[:k]
        found.sort(key=lambda nv: ring.index(nv[1]))
        rings[label] = tuple(ring)
        ips[label] = tuple(v for _, v in found)
        ip_paths[label] = tuple(name for name, _ in found)
    return ips, ip_paths, rings


def _trim_index(chain, cover_only_keys: set, n: int) -> int:
    """Index of the first chain vertex whose outgoing edge leaves the cover."""
    for i in range(len(chain) - 1):
        a, b = int(chain[i]), int(chain[i + 1])
        k = (a * n + b) if a < b else (b * n + a)
        if k not in cover_only_keys:
            return i
    return len(chain) - 1


@dataclass(frozen=True)
class ProjectionResult:
    """Opened cavity plus everything needed to build constraints."""

    mesh: TriMesh
    splits: dict            # hole label -> SubcontourSplit
    mv_ring: tuple          # rim vertices rotated so MV1 sits at position 0
    mv_positions: tuple     # rim positions of MV1..MV4
    paths: dict             # path name -> trimmed vertex chain (IP to IP)
    boundary_idx: np.ndarray
    regional_idx: np.ndarray


def project_and_open(mesh: TriMesh, division: DivisionResult,
                     seeds: SeedSet) -> ProjectionResult:
    """Remove the hole covers and project the paths onto the opened cavity."""
    if not mesh.cover_faces:
        raise DivisionError("mesh has no tagged cover faces")
    n = mesh.n_vertices
    cover_set = set(mesh.cover_faces)
    keep = np.asarray([fi for fi in range(mesh.n_faces) if fi not in cover_set])
    opened = TriMesh(vertices=mesh.vertices, faces=mesh.faces[keep],
                     channels=dict(mesh.channels), vertex_ids=mesh.vertex_ids)

    ring_keys, cover_only = _ring_edge_keys(mesh, n)
    holes = _hole_rings(mesh, seeds)
    absorb = {label: cover_only | _hole_ring_keys(mesh, holes[label][0], ring_keys, n)
              for label in HOLE_LABELS}
    trimmed: dict = {}
    for name, chain in division.paths.items():
        ea, eb = PATH_ENDPOINTS[name]
        i0 = _trim_index(chain, absorb[ea], n) if ea in absorb else 0
        rev = chain[::-1]
        j0 = _trim_index(rev, absorb[eb], n) if eb in absorb else 0
        sub = chain[i0 : len(chain) - j0]
        if len(sub) < 2:
            raise DivisionError(f"path {name} vanished when removing covers")
        for a, b in zip(sub, sub[1:]):
            k = (a * n + b) if a < b else (b * n + a)
            if k in cover_only:
                raise DivisionError(f"path {name} re-enters a cover mid-way; re-seed")
        trimmed[name] = tuple(int(x) for x in sub)

    loops = boundary_loops(opened)
    if len(loops) != 6:
        raise DivisionError(f"opened cavity has {len(loops)} loops, expected 6")
    loop_sets = [set(loop.ring) for loop in loops]

    splits = {}
    for label in HOLE_LABELS:
        ring = list(division.rings[label])
        if set(ring) not in loop_sets:
            raise DivisionError(f"{label} ring does not match a boundary loop")
        positions = tuple(ring.index(v) for v in division.intersection_points[label])
        splits[label] = SubcontourSplit(hole=label, ring=tuple(ring),
                                        ip_positions=positions,
                                        ip_paths=division.ip_paths[label])

    mv_verts = set()
    for label in HOLE_LABELS:
        mv_verts |= set(splits[label].ring)
    mv_loop = None
    for loop in loops:
        if not (set(loop.ring) & mv_verts):
            mv_loop = list(loop.ring)
            break
    if mv_loop is None:
        raise DivisionError("could not identify the rim loop after opening")
    k = mv_loop.index(seeds.mv[0])
    mv_loop = mv_loop[k:] + mv_loop[:k]
    mv_positions = tuple(mv_loop.index(s) for s in seeds.mv)
    if list(mv_positions) != sorted(mv_positions):
        raise DivisionError("rim seeds do not follow the rim loop orientation")

    boundary = np.concatenate([np.asarray(splits[L].ring) for L in HOLE_LABELS]
                              + [np.asarray(mv_loop)])
    regional = np.unique(np.concatenate([np.asarray(c) for c in trimmed.values()]))
    bset = set(int(x) for x in boundary)
    ipset = set()
    for label in HOLE_LABELS:
        ipset |= set(splits[label].ip_vertices)
    ipset |= set(seeds.mv)
    overlap = set(int(x) for x in regional) & bset
    if overlap != ipset:
        extra = sorted(overlap - ipset)[:10]
        missing = sorted(ipset - overlap)[:10]
        raise DivisionError(
            f"paths touch rings away from intersection points (extra={extra}, "
            f"missing={missing}); re-seed"
        )
    return ProjectionResult(mesh=opened, splits=splits, mv_ring=tuple(mv_loop),
                            mv_positions=mv_positions, paths=trimmed,
                            boundary_idx=np.unique(boundary), regional_idx=regional)


def proportional_lengths(n: int, parts: int) -> tuple:
    """Split n ring points into near-equal integer parts, remainder to the first."""
    q, r = divmod(n, parts)
    return tuple(q + (1 if k < r else 0) for k in range(parts))


def recompute_subcontours(split: SubcontourSplit) -> SubcontourSplit:
    """Move the non-fixed intersection points halfway toward proportional spacing.

    IP1 stays put; every other IP shifts floor((proportional - real)/2) ring
    positions along the ring orientation, measured from its original position.
    """
    n = len(split.ring)
    parts = len(split.ip_positions)
    if n < 2 * parts:
        raise DivisionError(f"ring of {n} points is too short for {parts} sub-contours")
    lengths = split.lengths
    prop = proportional_lengths(n, parts)
    new_pos = [0]
    for k in range(1, parts):
        shift = math.floor((prop[k - 1] - lengths[k - 1]) / 2)
        new_pos.append(split.ip_positions[k] + shift)
    for a, b in zip(new_pos, new_pos[1:]):
        if b - a < 1:
            raise DivisionError(
                f"displacement would empty a sub-contour on {split.hole}"
            )
    if n - new_pos[-1] < 1:
        raise DivisionError(f"displacement would empty a sub-contour on {split.hole}")
    return replace(split, ip_positions=tuple(new_pos))
