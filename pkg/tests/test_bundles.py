"""Connections: construction, flatness, gauge moves, monodromy, flat sections."""

import numpy as np
import pytest

from torsionlab import bundles, laplacian, meshes, surfaces
from torsionlab.errors import BadCuts, NonUnitaryGauge, NotAClosedWalk


def test_trivial_connection():
    mesh = meshes.discretize(surfaces.rectangle(1, 1), 2)
    conn = bundles.trivial_connection(mesh, 2)
    assert all(np.allclose(t, np.eye(2)) for t in conn.transports)
    ok, worst = bundles.flat_check(conn)
    assert ok and worst < 1e-15


def test_trivial_rank2_spectrum_doubles():
    mesh = meshes.discretize(surfaces.cylinder(3, 1), 2)
    s1 = np.linalg.eigvalsh(laplacian.assemble(bundles.trivial_connection(mesh, 1)))
    s2 = np.linalg.eigvalsh(laplacian.assemble(bundles.trivial_connection(mesh, 2)))
    assert np.allclose(np.sort(np.concatenate([s1, s1])), np.sort(s2), atol=1e-10)


def test_torus_u1_monodromy():
    mesh = meshes.discretize(surfaces.torus(1, 1), 3)
    alpha, beta = 0.9, -2.2
    rep = bundles.HolonomyRepresentation(
        1, [np.array([[np.exp(1j * alpha)]]), np.array([[np.exp(1j * beta)]])])
    conn = bundles.connection_from_holonomy(mesh, rep)
    loop_h = bundles.generator_loop(mesh, 0)
    loop_v = bundles.generator_loop(mesh, 1)
    assert abs(bundles.cycle_monodromy(conn, loop_h)[0, 0] - np.exp(1j * alpha)) < 1e-12
    assert abs(bundles.cycle_monodromy(conn, loop_v)[0, 0] - np.exp(1j * beta)) < 1e-12


def test_cylinder_rank2_monodromy_trace():
    mesh = meshes.discretize(surfaces.cylinder(3, 1), 1)
    rng = np.random.default_rng(5)
    w = bundles.random_su2(rng)
    rep = bundles.HolonomyRepresentation(2, [w])
    conn = bundles.connection_from_holonomy(mesh, rep)
    loop = bundles.generator_loop(mesh, 0)
    m = bundles.cycle_monodromy(conn, loop)
    assert abs(np.trace(m) - np.trace(w)) < 1e-12


def test_flat_check_random_su2_torus():
    rng = np.random.default_rng(17)
    surf = surfaces.torus(2, 2)
    mesh = meshes.discretize(surf, 2)
    rep = bundles.random_flat_representation(surf, 2, rng)
    conn = bundles.connection_from_holonomy(mesh, rep)
    ok, worst = bundles.flat_check(conn)
    assert ok and worst < 1e-10
    assert len(mesh.faces()) == 16


def test_noncommuting_torus_rejected():
    rng = np.random.default_rng(3)
    surf = surfaces.torus(1, 1)
    mesh = meshes.discretize(surf, 2)
    w1, w2 = bundles.random_su2(rng), bundles.random_su2(rng)
    assert np.max(np.abs(w1 @ w2 - w2 @ w1)) > 1e-3   # generic pair
    rep = bundles.HolonomyRepresentation(2, [w1, w2])
    with pytest.raises(BadCuts):
        bundles.connection_from_holonomy(mesh, rep)


def test_gauge_invariance():
    rng = np.random.default_rng(23)
    surf = surfaces.torus(2, 2)
    mesh = meshes.discretize(surf, 2)
    rep = bundles.random_flat_representation(surf, 2, rng)
    conn = bundles.connection_from_holonomy(mesh, rep)
    base = np.linalg.eigvalsh(laplacian.assemble(conn))
    loop = bundles.generator_loop(mesh, 0)
    base_tr = np.trace(bundles.cycle_monodromy(conn, loop))
    worst = 0.0
    for _ in range(20):
        u = [bundles.random_unitary(rng, 2) for _ in range(mesh.n_vertices)]
        conn2 = bundles.gauge_transform(conn, u)
        worst = max(worst, float(np.max(np.abs(
            np.linalg.eigvalsh(laplacian.assemble(conn2)) - base))))
        assert abs(np.trace(bundles.cycle_monodromy(conn2, loop)) - base_tr) < 1e-10
    assert worst < 1e-10


def test_gauge_of_trivial_matches_untwisted():
    rng = np.random.default_rng(29)
    mesh = meshes.discretize(surfaces.rectangle(2, 1), 2)
    conn = bundles.trivial_connection(mesh, 1)
    base = np.linalg.eigvalsh(laplacian.assemble(conn))
    u = [bundles.random_unitary(rng, 1) for _ in range(mesh.n_vertices)]
    twisted = np.linalg.eigvalsh(laplacian.assemble(bundles.gauge_transform(conn, u)))
    assert np.max(np.abs(base - twisted)) < 1e-12


def test_identity_gauge_is_identity():
    mesh = meshes.discretize(surfaces.cylinder(3, 1), 1)
    rep = bundles.HolonomyRepresentation(1, [np.array([[np.exp(0.7j)]])])
    conn = bundles.connection_from_holonomy(mesh, rep)
    same = bundles.gauge_transform(conn, [np.eye(1)] * mesh.n_vertices)
    for t1, t2 in zip(conn.transports, same.transports):
        assert np.allclose(t1, t2, atol=1e-15)


def test_gauge_rejects_nonunitary():
    mesh = meshes.discretize(surfaces.rectangle(1, 1), 2)
    conn = bundles.trivial_connection(mesh, 1)
    bad = [np.array([[2.0]])] * mesh.n_vertices
    with pytest.raises(NonUnitaryGauge):
        bundles.gauge_transform(conn, bad)


def test_homotopic_loops_equal_traces():
    # two horizontal torus loops on different rows are freely homotopic
    rng = np.random.default_rng(31)
    surf = surfaces.torus(2, 2)
    mesh = meshes.discretize(surf, 2)
    rep = bundles.random_flat_representation(surf, 2, rng)
    conn = bundles.connection_from_holonomy(mesh, rep)
    by_slot = {}
    for idx, e in enumerate(mesh.edges):
        by_slot[e.slot_u] = (idx, +1)
        by_slot[e.slot_v] = (idx, -1)
    from torsionlab.complexes import E as SIDE_E
    rows = []
    for gj in (0, 1, 3):
        tile_j, j = divmod(gj, 2)
        cyc = []
        for gi in range(4):
            tile_i, i = divmod(gi, 2)
            cyc.append(by_slot[(((tile_i, tile_j), i, j), SIDE_E)])
        rows.append(bundles.cycle_monodromy(conn, cyc))
    assert abs(np.trace(rows[0]) - np.trace(rows[1])) < 1e-12
    assert abs(np.trace(rows[0]) - np.trace(rows[2])) < 1e-12


def test_face_cycles_flat_and_reversal():
    rng = np.random.default_rng(37)
    surf = surfaces.cylinder(3, 2)
    mesh = meshes.discretize(surf, 2)
    rep = bundles.random_flat_representation(surf, 2, rng)
    conn = bundles.connection_from_holonomy(mesh, rep)
    face = mesh.faces()[0]
    assert np.allclose(bundles.cycle_monodromy(conn, face), np.eye(2), atol=1e-12)
    loop = bundles.generator_loop(mesh, 0)
    w = bundles.cycle_monodromy(conn, loop)
    rev = [(i, -d) for i, d in reversed(loop)]
    assert np.allclose(bundles.cycle_monodromy(conn, rev), w.conj().T, atol=1e-12)


def test_not_a_closed_walk():
    mesh = meshes.discretize(surfaces.rectangle(2, 1), 1)
    conn = bundles.trivial_connection(mesh, 1)
    with pytest.raises(NotAClosedWalk):
        bundles.cycle_monodromy(conn, [(0, +1)])
    with pytest.raises(NotAClosedWalk):
        bundles.cycle_monodromy(conn, [])


def test_flat_sections_dim():
    eye_rep = bundles.HolonomyRepresentation(2, [np.eye(2), np.eye(2)])
    assert bundles.flat_sections_dim(eye_rep) == 2
    rep = bundles.HolonomyRepresentation(2, [np.diag([1j, -1j])])
    assert bundles.flat_sections_dim(rep) == 0
    rep = bundles.HolonomyRepresentation(2, [np.diag([1.0, np.exp(1j)])])
    assert bundles.flat_sections_dim(rep) == 1
    for alpha, expect in ((0.0, 1), (1.3, 0)):
        rep = bundles.HolonomyRepresentation(1, [np.array([[np.exp(1j * alpha)]])])
        assert bundles.flat_sections_dim(rep) == expect
    # no generators: every section is flat
    assert bundles.flat_sections_dim(bundles.HolonomyRepresentation(3, [])) == 3


@pytest.mark.parametrize("rank", [1, 2])
@pytest.mark.parametrize("surfname,n", [("torus", 2), ("torus", 3), ("torus", 4),
                                        ("cylinder", 2), ("cylinder", 3),
                                        ("cylinder", 4)])
def test_kernel_dim_equals_flat_sections(surfname, n, rank):
    rng = np.random.default_rng(41 + n + rank)
    surf = surfaces.torus(1, 1) if surfname == "torus" else surfaces.cylinder(2, 1)
    mesh = meshes.discretize(surf, n)
    rep = bundles.random_flat_representation(surf, rank, rng)
    conn = bundles.connection_from_holonomy(mesh, rep)
    expected = bundles.flat_sections_dim(rep)
    spec = laplacian.spectrum(laplacian.assemble(conn), expected_kernel_dim=expected)
    assert spec.kernel_dim == expected


def test_representation_json_round_trip():
    rng = np.random.default_rng(43)
    rep = bundles.HolonomyRepresentation(2, [bundles.random_su2(rng)])
    again = bundles.HolonomyRepresentation.from_json(rep.to_json())
    assert np.allclose(rep.generators[0], again.generators[0])


def test_random_su2_is_special_unitary():
    rng = np.random.default_rng(47)
    for _ in range(10):
        w = bundles.random_su2(rng)
        assert abs(np.linalg.det(w) - 1) < 1e-12
        assert np.allclose(w.conj().T @ w, np.eye(2), atol=1e-12)


def test_bad_cuts_on_boundary():
    mesh = meshes.discretize(surfaces.rectangle(2, 1), 1)
    rep = bundles.HolonomyRepresentation(1, [np.array([[1j]])])
    with pytest.raises(BadCuts):
        bundles.connection_from_holonomy(mesh, rep, cuts=[{((0, 0), 2): 1}])
