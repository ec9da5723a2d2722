import math

import numpy as np
import pytest

from frf import synth
from frf.errors import MeshError
from frf.mesh import (BoundaryLoop, TriMesh, boundary_loops, close_hole,
                      cotangent_laplacian, load_mesh, modify_laplacian,
                      orient_consistently, save_mesh, subdivide_midpoint)

from scipy.sparse.linalg import spsolve


def write(path, text):
    path.write_text(text)
    return path


class TestIO:
    def test_single_triangle_obj(self, tmp_path):
        p = write(tmp_path / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        mesh = load_mesh(p)
        assert mesh.n_vertices == 3
        assert mesh.n_faces == 1

    def test_vtk_point_data_becomes_channel(self, tmp_path):
        text = "\n".join([
            "# vtk DataFile Version 3.0", "t", "ASCII", "DATASET POLYDATA",
            "POINTS 3 double", "0 0 0", "1 0 0", "0 1 0",
            "POLYGONS 1 4", "3 0 1 2",
            "POINT_DATA 3", "FIELD channels 1",
            "intensity 1 3 double", "0.5", "1.5", "2.5",
        ])
        mesh = load_mesh(write(tmp_path / "m.vtk", text))
        assert "intensity" in mesh.channels
        assert len(mesh.channels["intensity"]) == mesh.n_vertices
        assert mesh.channels["intensity"][2] == 2.5

    def test_quad_face_rejected(self, tmp_path):
        p = write(tmp_path / "quad.obj",
                  "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(MeshError, match="non-triangular"):
            load_mesh(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MeshError, match="not found"):
            load_mesh(tmp_path / "nope.obj")

    @pytest.mark.parametrize("fmt", ["obj", "vtk"])
    def test_round_trip_bit_exact(self, tmp_path, fmt):
        rng = np.random.default_rng(7)
        base = synth.disk_mesh(3, 11)
        verts = np.array(base.vertices) + rng.normal(0, 0.1, (base.n_vertices, 3))
        mesh = TriMesh(vertices=verts, faces=base.faces,
                       channels={"signal": rng.normal(size=base.n_vertices)})
        path = tmp_path / f"m.{fmt}"
        save_mesh(mesh, path)
        back = load_mesh(path)
        assert np.array_equal(back.vertices, mesh.vertices)
        assert np.array_equal(back.faces, mesh.faces)
        assert np.array_equal(back.channels["signal"], mesh.channels["signal"])
        assert np.array_equal(back.vertex_ids, mesh.vertex_ids)

    def test_non_manifold_reported_with_edges(self):
        verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0.5]],
                         dtype=float)
        faces = np.array([[0, 1, 2], [0, 1, 3], [0, 1, 4]])
        with pytest.raises(MeshError, match=r"non-manifold.*\(0, 1\)"):
            TriMesh(vertices=verts, faces=faces)


class TestBoundaryLoops:
    def test_closed_sphere_has_none(self):
        assert boundary_loops(synth.sphere_mesh(8, 12)) == []

    def test_disk_has_one_covering_rim(self):
        disk = synth.disk_mesh(3, 10)
        loops = boundary_loops(disk)
        assert len(loops) == 1
        rim_expected = set(range(disk.n_vertices - 10, disk.n_vertices))
        assert set(loops[0].ring) == rim_expected

    def test_tube_has_two(self):
        assert len(boundary_loops(synth.tube_mesh(10, 3))) == 2

    def test_loop_follows_face_orientation(self):
        disk = synth.disk_mesh(2, 8)
        ring = boundary_loops(disk)[0].ring
        # rim edges must appear in a face with the same direction
        directed = set()
        for tri in disk.faces:
            a, b, c = (int(x) for x in tri)
            directed |= {(a, b), (b, c), (c, a)}
        for u, v in zip(ring, ring[1:] + ring[:1]):
            assert (u, v) in directed


class TestCloseHole:
    def test_triangle_hole_single_face(self):
        tube = synth.tube_mesh(3, 1)
        loop = boundary_loops(tube)[0]
        closed = close_hole(tube, loop)
        assert closed.n_faces == tube.n_faces + 1
        assert len(closed.cover_faces) == 1

    def test_existing_geometry_untouched(self):
        disk = synth.disk_mesh(2, 9)
        loop = boundary_loops(disk)[0]
        closed = close_hole(disk, loop)
        assert np.array_equal(closed.vertices, disk.vertices)
        assert np.array_equal(closed.faces[: disk.n_faces], disk.faces)

    @staticmethod
    def _grid_with_quad_hole():
        """Planar 4x4 grid with the central cell removed: a convex quad hole.

        One hole corner is nudged in-plane so the two diagonals differ and the
        shorter one is unambiguous.
        """
        grid = synth.grid_mesh(3, 3)
        verts = np.array(grid.vertices)

        def vid(i, j):
            return i * 4 + j

        hole_cell = (1, 1)
        corners = [vid(1, 1), vid(2, 1), vid(2, 2), vid(1, 2)]
        verts[vid(1, 1)] += np.array([-0.3, -0.2, 0.0])  # keeps the quad convex
        keep = []
        for fi, tri in enumerate(grid.faces):
            a = set(int(x) for x in tri)
            if a <= set(corners):
                continue
            keep.append(fi)
        mesh = TriMesh(vertices=verts, faces=grid.faces[keep])
        return mesh, corners

    def test_planar_quad_uses_shorter_diagonal(self):
        mesh, corners = self._grid_with_quad_hole()
        loop = [lp for lp in boundary_loops(mesh) if set(lp.ring) == set(corners)][0]
        closed = close_hole(mesh, loop)
        cover = [tuple(sorted(int(x) for x in t))
                 for t in closed.faces[list(closed.cover_faces)]]
        assert len(cover) == 2
        v = mesh.vertices
        diag_a = (corners[0], corners[2])
        diag_b = (corners[1], corners[3])
        short = min((diag_a, diag_b),
                    key=lambda d: np.linalg.norm(v[d[0]] - v[d[1]]))
        assert all(set(short) <= set(tri) for tri in cover)

    def test_quad_matches_enumeration_oracle(self):
        mesh, corners = self._grid_with_quad_hole()
        loop = [lp for lp in boundary_loops(mesh) if set(lp.ring) == set(corners)][0]
        closed = close_hole(mesh, loop)
        cover = {tuple(sorted(int(x) for x in t))
                 for t in closed.faces[list(closed.cover_faces)]}
        assert cover == _enumerate_best_cover(mesh, loop.ring)

    def test_octagon_matches_catalan_oracle(self):
        rng = np.random.default_rng(3)
        tube = synth.tube_mesh(8, 2, radius=1.0, height=1.5)
        verts = np.array(tube.vertices)
        verts[:8, 2] += rng.normal(0, 0.25, 8)  # non-planar bottom ring
        mesh = TriMesh(vertices=verts, faces=tube.faces)
        loop = [lp for lp in boundary_loops(mesh) if set(lp.ring) == set(range(8))][0]
        closed = close_hole(mesh, loop)
        cover = {tuple(sorted(t)) for t in closed.faces[list(closed.cover_faces)].tolist()}
        assert len(cover) == 6
        best = _enumerate_best_cover(mesh, loop.ring)
        assert cover == best

    def test_short_loop_rejected(self):
        disk = synth.disk_mesh(2, 8)
        with pytest.raises(MeshError, match="close a loop"):
            close_hole(disk, BoundaryLoop(ring=(0, 1)))


def _enumerate_best_cover(mesh, ring):
    """Exhaustive minimal-weight triangulation over all Catalan covers.

    Global weight of one complete cover: (max dihedral over all adjacent face
    pairs including the surrounding mesh at boundary edges, total area, total
    internal chord length), compared lexicographically.
    """
    v = mesh.vertices
    poly = (ring[0],) + tuple(ring[:0:-1])
    m = len(poly)
    face_normal = {}
    for tri in mesh.faces:
        a, b, c = (int(x) for x in tri)
        n = np.cross(v[b] - v[a], v[c] - v[a])
        n = n / np.linalg.norm(n)
        for e in ((a, b), (b, c), (c, a)):
            face_normal[e] = n

    def tri_normal(t):
        i, k, j = t
        n = np.cross(v[poly[k]] - v[poly[i]], v[poly[j]] - v[poly[i]])
        norm = np.linalg.norm(n)
        return n / norm if norm > 0 else None

    def angle(n1, n2):
        if n1 is None or n2 is None:
            return math.pi
        return math.acos(float(np.clip(np.dot(n1, n2), -1, 1)))

    def enumerate_tris(i, j):
        if j <= i + 1:
            yield []
            return
        for k in range(i + 1, j):
            for left in enumerate_tris(i, k):
                for right in enumerate_tris(k, j):
                    yield [(i, k, j)] + left + right

    best = None
    best_faces = None
    for tris in enumerate_tris(0, m - 1):
        area = sum(0.5 * np.linalg.norm(
            np.cross(v[poly[k]] - v[poly[i]], v[poly[j]] - v[poly[i]]))
            for i, k, j in tris)
        owner: dict = {}
        for t in tris:
            i, k, j = t
            for e in ((i, k), (k, j), (i, j)):
                owner.setdefault(e, []).append(t)
        maxd = 0.0
        chord = 0.0
        for (a, b), owners in owner.items():
            n1 = tri_normal(owners[0])
            is_boundary = (b == a + 1) or (a, b) == (0, m - 1)
            if len(owners) == 2:
                maxd = max(maxd, angle(n1, tri_normal(owners[1])))
            elif is_boundary:
                # the mesh face runs the edge opposite to the polygon cycle
                if (a, b) == (0, m - 1):
                    key = (poly[0], poly[m - 1])
                else:
                    key = (poly[b], poly[a])
                maxd = max(maxd, angle(n1, face_normal[key]))
            if not is_boundary:
                chord += float(np.linalg.norm(v[poly[a]] - v[poly[b]]))
        weight = (maxd, area, chord)
        if best is None or weight < best:
            best = weight
            best_faces = {tuple(sorted((poly[i], poly[k], poly[j])))
                          for i, k, j in tris}
    return best_faces


class TestCotangentLaplacian:
    def test_unit_square_closed_form(self):
        verts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
        faces = np.array([[0, 1, 2], [0, 2, 3]])
        L = cotangent_laplacian(TriMesh(vertices=verts, faces=faces)).matrix.toarray()
        assert L[0, 2] == 0.0  # diagonal edge, two right angles
        assert L[0, 1] == 0.5
        assert L[1, 2] == 0.5
        assert L[2, 3] == 0.5
        assert L[3, 0] == 0.5

    def test_hexagon_fan_closed_form(self):
        verts = [(0.0, 0.0, 0.0)] + [
            (math.cos(k * math.pi / 3), math.sin(k * math.pi / 3), 0.0)
            for k in range(6)
        ]
        faces = [(0, 1 + k, 1 + (k + 1) % 6) for k in range(6)]
        L = cotangent_laplacian(
            TriMesh(vertices=np.asarray(verts), faces=np.asarray(faces))
        ).matrix.toarray()
        for k in range(6):
            assert L[0, 1 + k] == pytest.approx(1 / math.sqrt(3), abs=1e-15)

    def test_interior_row_sums_vanish(self, cavity):
        L = cotangent_laplacian(cavity.mesh).matrix
        sums = np.asarray(L.sum(axis=1)).ravel()
        assert np.abs(sums).max() <= 1e-10

    def test_symmetry(self):
        mesh = synth.disk_mesh(4, 12)
        L = cotangent_laplacian(mesh).matrix
        assert abs(L - L.T).max() <= 1e-14

    def test_harmonic_reproduces_linear_functions(self):
        rng = np.random.default_rng(11)
        disk = synth.disk_mesh(6, 20)
        verts = np.array(disk.vertices)
        verts[:, :2] += rng.normal(0, 0.004, (disk.n_vertices, 2))
        mesh = TriMesh(vertices=verts, faces=disk.faces)
        a, b, c = 0.7, -1.3, 0.25
        z = a * verts[:, 0] + b * verts[:, 1] + c
        rim = list(boundary_loops(mesh)[0].ring)
        L = modify_laplacian(cotangent_laplacian(mesh), rim)
        rhs = np.zeros(mesh.n_vertices)
        rhs[rim] = z[rim]
        sol = spsolve(L.matrix.tocsc(), rhs)
        assert np.abs(sol - z).max() <= 1e-8


class TestModifyLaplacian:
    def test_all_rows_identity(self):
        mesh = synth.disk_mesh(2, 8)
        L = modify_laplacian(cotangent_laplacian(mesh), range(mesh.n_vertices))
        assert np.allclose(L.matrix.toarray(), np.eye(mesh.n_vertices))

    def test_empty_set_unchanged(self):
        mesh = synth.disk_mesh(2, 8)
        L0 = cotangent_laplacian(mesh)
        L1 = modify_laplacian(L0, [])
        assert abs(L0.matrix - L1.matrix).max() == 0

    def test_single_row(self):
        mesh = synth.disk_mesh(2, 8)
        L = modify_laplacian(cotangent_laplacian(mesh), [3]).matrix.toarray()
        row = np.zeros(mesh.n_vertices)
        row[3] = 1.0
        assert np.array_equal(L[3], row)

    def test_idempotent(self):
        mesh = synth.disk_mesh(3, 9)
        idx = [0, 5, 7]
        L1 = modify_laplacian(cotangent_laplacian(mesh), idx)
        L2 = modify_laplacian(L1, idx)
        assert abs(L1.matrix - L2.matrix).max() == 0
        assert L1.identity_rows == L2.identity_rows


class TestOrientation:
    def test_repair_reports_flips(self):
        disk = synth.disk_mesh(3, 10)
        faces = np.array(disk.faces)
        flipped_idx = [1, 4, 9]
        faces[flipped_idx] = faces[flipped_idx][:, ::-1]
        broken = TriMesh(vertices=disk.vertices, faces=faces)
        repaired, flips = orient_consistently(broken)
        assert flips == len(flipped_idx)
        directed = [tuple(e) for tri in repaired.faces
                    for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))]
        assert len(directed) == len(set(directed))

    def test_already_consistent_zero_flips(self):
        disk = synth.disk_mesh(3, 10)
        _, flips = orient_consistently(disk)
        assert flips == 0


class TestSubdivision:
    def test_midpoint_quadruples_faces(self):
        disk = synth.disk_mesh(2, 8)
        fine = subdivide_midpoint(disk)
        assert fine.n_faces == 4 * disk.n_faces
        assert np.array_equal(fine.vertices[: disk.n_vertices], disk.vertices)
