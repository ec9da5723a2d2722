"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS lines and the
measured runtime in the log.
"""

import json
import math
import time

import numpy as np
import pytest

from frf import synth
from frf.distortion import (area_ratio, isotropy_ratio, jacobian,
                            per_face_metrics)
from frf.division import (HOLE_LABELS, SubcontourSplit, proportional_lengths,
                          recompute_subcontours)
from frf.errors import DivisionError
from frf.flatten import flatten_pipeline, refine_boundary, solve_constrained
from frf.mesh import (TriMesh, cotangent_laplacian, modify_laplacian,
                      save_mesh)
from frf.template import build_template
from frf.transfer import Parcellation2D, lift_to_3d, map_parcellation
from frf.flatten import FlatMesh

from tests.test_distortion import _finite_difference_jacobian
from tests.test_flatten import dense_kkt_solution, disk_constraints


def report(name, detail):
    print(f"[ACCEPTANCE] {name}: PASS ({detail})")


@pytest.fixture(scope="module")
def big_run(big_cavity, big_seeds):
    template = build_template("population")
    t0 = time.perf_counter()
    flat, rep = flatten_pipeline(big_cavity.mesh, big_seeds, template)
    elapsed = time.perf_counter() - t0
    return {"flat": flat, "report": rep, "elapsed": elapsed,
            "template": template}


class TestAcceptance:
    def test_runtime_under_ten_seconds(self, big_cavity, big_run):
        elapsed = big_run["elapsed"]
        n_faces = big_cavity.mesh.n_faces
        assert n_faces >= 45_000
        assert elapsed <= 10.0
        report("runtime", f"{n_faces} triangles flattened in {elapsed:.2f} s, "
               "budget 10 s")

    def test_hard_constraints_both_coordinates(self, big_cavity, big_seeds,
                                               big_run):
        # re-run the constrained solve alone on the big fixture and check the
        # equality constraints at 1e-9
        from frf.division import divide, project_and_open
        from frf.flatten import label_boundary_loops
        from frf.mesh import SparseLaplacian, close_hole, cotangent_laplacian_arrays
        from frf.template import target_coordinates

        labelled = label_boundary_loops(big_cavity.mesh, big_seeds)
        closed = big_cavity.mesh
        for label in HOLE_LABELS:
            closed = close_hole(closed, labelled[label])
        division = divide(closed, big_seeds)
        projection = project_and_open(closed, division, big_seeds)
        splits = {h: recompute_subcontours(projection.splits[h])
                  for h in HOLE_LABELS}
        cs = target_coordinates(big_run["template"], projection, splits)
        lap = modify_laplacian(
            SparseLaplacian(matrix=cotangent_laplacian_arrays(
                projection.mesh.vertices, projection.mesh.faces)),
            cs.boundary_idx)
        xy, _ = solve_constrained(lap, cs, w=1000.0)
        err = np.abs(xy[cs.regional_idx] - cs.regional_xy)
        assert err[:, 0].max() <= 1e-9
        assert err[:, 1].max() <= 1e-9
        report("hard-constraints",
               f"max equality violation {err.max():.2e} <= 1e-9")

    def test_boundary_exactness_after_refinement(self, big_run):
        rep = big_run["report"]
        assert rep.boundary_dev_after <= 1e-9
        assert rep.boundary_dev_after < rep.boundary_dev_before
        report("boundary-exactness",
               f"{rep.boundary_dev_before:.2e} -> {rep.boundary_dev_after:.2e}")

    def test_identity_fixed_point(self):
        mesh = synth.disk_mesh(6, 18)
        lap, cs = disk_constraints(mesh, n_regional=10)
        xy0, _ = solve_constrained(lap, cs, w=1000.0)
        err0 = np.abs(xy0 - mesh.vertices[:, :2]).max()
        xy1 = refine_boundary(xy0, mesh.faces, cs.boundary_idx, cs.boundary_xy)
        err1 = np.abs(xy1 - mesh.vertices[:, :2]).max()
        assert err0 <= 1e-8 and err1 <= 1e-8
        report("identity-fixed-point", f"solve {err0:.2e}, refine {err1:.2e}")

    def test_dense_oracle_equivalence(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        runs = 0
        for trial in range(20):
            n_rings = int(rng.integers(4, 9))
            n_seg = int(rng.integers(10, 22))
            base = synth.disk_mesh(n_rings, n_seg)
            assert base.n_vertices <= 500
            verts = np.array(base.vertices)
            verts[:, :2] += rng.normal(0, 0.003, (base.n_vertices, 2))
            mesh = TriMesh(vertices=verts, faces=base.faces)
            targets = rng.normal(size=(mesh.n_vertices, 2))
            n_reg = int(rng.integers(3, 14))
            lap, cs = disk_constraints(mesh, n_regional=n_reg, rng=rng,
                                       targets=targets)
            out, _ = solve_constrained(lap, cs, w=1000.0)
            dense = dense_kkt_solution(mesh, lap, cs, 1000.0)
            worst = max(worst, float(np.abs(out - dense).max()))
            runs += 1
        assert runs >= 20
        assert worst <= 1e-7
        report("dense-oracle", f"{runs} random meshes, worst diff {worst:.2e}")

    def test_laplacian_analytics(self, cavity):
        verts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
        faces = np.array([[0, 1, 2], [0, 2, 3]])
        L = cotangent_laplacian(TriMesh(vertices=verts, faces=faces)).matrix.toarray()
        assert L[0, 2] == 0.0 and L[0, 1] == 0.5 and L[1, 2] == 0.5
        hexv = [(0.0, 0.0, 0.0)] + [
            (math.cos(k * math.pi / 3), math.sin(k * math.pi / 3), 0.0)
            for k in range(6)
        ]
        hexf = [(0, 1 + k, 1 + (k + 1) % 6) for k in range(6)]
        Lh = cotangent_laplacian(
            TriMesh(vertices=np.asarray(hexv), faces=np.asarray(hexf))
        ).matrix.toarray()
        hex_err = max(abs(Lh[0, 1 + k] - 1 / math.sqrt(3)) for k in range(6))
        assert hex_err <= 1e-15
        rowsum = np.abs(np.asarray(
            cotangent_laplacian(cavity.mesh).matrix.sum(axis=1)).ravel()).max()
        assert rowsum <= 1e-10
        report("laplacian-analytics",
               f"square exact, hexagon within {hex_err:.1e}, row sums {rowsum:.1e}")

    def test_distortion_oracles(self, big_cavity, big_run, cavity, flat_result):
        rng = np.random.default_rng(77)
        worst = 0.0
        for _ in range(100):
            tri3d = rng.normal(size=(3, 3))
            tri2d = rng.normal(size=(3, 2))
            if np.linalg.norm(np.cross(tri3d[1] - tri3d[0],
                                       tri3d[2] - tri3d[0])) < 1e-2:
                tri3d[2] += np.array([0.0, 1.0, 0.0])
            J = jacobian(tri3d, tri2d)
            fd = _finite_difference_jacobian(tri3d, tri2d)
            worst = max(worst, float(np.abs(J - fd).max()))
        assert worst <= 1e-6

        shear = isotropy_ratio(np.array([[1.0, 1.0], [0.0, 1.0]]))
        expected = (math.sqrt(5) - 1) ** 2 / 4
        assert abs(shear - expected) <= 1e-12

        means = []
        for mesh, flat in ((big_cavity.mesh, big_run["flat"]),
                           (cavity.mesh, flat_result[0])):
            alpha = area_ratio(mesh, flat)
            a3 = mesh.face_areas()
            mean = float((alpha * a3 / a3.sum()).sum())
            assert abs(mean - 1.0) <= 1e-9
            means.append(mean)
        report("distortion-oracles",
               f"FD worst {worst:.2e}, shear |err| <= 1e-12, "
               f"weighted means {means[0]:.12f}, {means[1]:.12f}")

    def test_subcontour_rule_exhaustive(self):
        checked = 0
        errors = 0
        for n in range(6, 31):
            prop = proportional_lengths(n, 3)
            for l1 in range(1, n - 1):
                for l2 in range(1, n - l1):
                    l3 = n - l1 - l2
                    if l3 < 1:
                        continue
                    ring = tuple(range(n))
                    split = SubcontourSplit(hole="RSPV", ring=ring,
                                            ip_positions=(0, l1, l1 + l2),
                                            ip_paths=("s1", "s5", "s4"))
                    d2 = math.floor((prop[0] - l1) / 2)
                    d3 = math.floor((prop[1] - l2) / 2)
                    p2, p3 = l1 + d2, l1 + l2 + d3
                    try:
                        out = recompute_subcontours(split)
                    except DivisionError:
                        errors += 1
                        assert p2 < 1 or p3 - p2 < 1 or n - p3 < 1
                        continue
                    checked += 1
                    assert out.ip_positions == (0, p2, p3)
                    assert out.ip_positions[0] == 0
                    assert sum(out.lengths) == n
                    assert min(out.lengths) >= 1
                    assert out.ring == ring
        report("subcontour-rule",
               f"{checked} compositions verified, {errors} correctly rejected")

    def test_template_ratios(self):
        spec = build_template("population")
        holes = spec.holes
        base = holes["LIPV"].radius
        ratios = (holes["LSPV"].radius / base, holes["RIPV"].radius / base,
                  holes["RSPV"].radius / base, holes["LAA"].radius / base)
        for got, want in zip(ratios, (1.1, 1.1, 1.35, 1.35)):
            assert abs(got - want) <= 1e-14
        left = math.dist(holes["LSPV"].center, holes["LIPV"].center)
        right = math.dist(holes["RSPV"].center, holes["RIPV"].center)
        assert abs(right / left - 1.1) <= 1e-14
        report("template-ratios",
               f"radii {tuple(round(r, 10) for r in ratios)}, carina {right / left:.12f}")

    def test_no_information_loss(self, big_cavity, big_seeds, big_run):
        rng = np.random.default_rng(31337)
        signal = rng.normal(size=big_cavity.mesh.n_vertices)
        mesh = big_cavity.mesh.with_channel("signal", signal)
        flat, _ = flatten_pipeline(mesh, big_seeds, big_run["template"])
        assert np.array_equal(flat.faces, mesh.faces)
        assert np.array_equal(flat.vertex_ids, mesh.vertex_ids)
        assert np.array_equal(flat.channels["signal"], signal)
        lifted = lift_to_3d(flat, flat.channels["signal"], mesh)
        assert np.array_equal(lifted, signal)
        report("no-information-loss",
               "faces, ids and channels identical; 3D->2D->3D bit-exact")

    def test_transfer_oracles(self, flat_result):
        flat = flat_result[0]
        assert flat.n_vertices <= 2000
        rng = np.random.default_rng(5150)
        codes = rng.integers(0, 4, flat.n_vertices)
        codes[:4] = np.arange(4)
        parc = Parcellation2D(codes=codes,
                              legend={k: f"z{k}" for k in range(4)},
                              template_hash=flat.template_hash)
        target = FlatMesh(xy=flat.xy + rng.normal(0, 1e-3, flat.xy.shape),
                          faces=flat.faces, template_hash=flat.template_hash)
        got = map_parcellation(flat, parc, target)
        worst_checked = 0
        for i, q in enumerate(target.xy):
            d2 = ((flat.xy - q) ** 2).sum(axis=1)
            best = float(d2.min())
            expect = codes[int(np.nonzero(d2 == best)[0][0])]
            assert got[i] == expect
            worst_checked += 1
        report("transfer-oracles",
               f"nearest-scan agreement on {worst_checked} vertices")

    def test_determinism_byte_identical(self, cavity, seeds, tmp_path):
        from click.testing import CliRunner

        from frf.cli import main

        mesh_path = tmp_path / "cavity.vtk"
        save_mesh(cavity.mesh, mesh_path)
        seeds_path = tmp_path / "seeds.json"
        seeds_path.write_text(seeds.to_json())
        blobs = []
        for run in ("one", "two"):
            out = tmp_path / run
            res = CliRunner().invoke(main, [
                "flatten", "--mesh", str(mesh_path), "--seeds", str(seeds_path),
                "--out", str(out), "--metrics",
            ], catch_exceptions=False)
            assert res.exit_code == 0
            blobs.append(tuple((out / name).read_bytes() for name in
                               ("flat.vtk", "solve_report.json",
                                "distortion_report.json", "distortion.csv")))
        assert blobs[0] == blobs[1]
        report("determinism", "flat mesh, report and metrics byte-identical")
