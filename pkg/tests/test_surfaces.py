"""Surface constructors, angle data, Gauss-Bonnet, rescaling, JSON specs."""

import math

import numpy as np
import pytest

from torsionlab import surfaces
from torsionlab.errors import InvalidGluing, UnknownPoint, UnsupportedAngle

HALF_PI = math.pi / 2


MODEL_DATA = [
    # surface, area, perimeter, cone angles (units pi/2), corner angles (units pi/2)
    (surfaces.rectangle(4, 4), 16, 16, [], [1] * 4),
    (surfaces.rectangle(1, 2), 2, 6, [], [1] * 4),
    (surfaces.torus(1, 1), 1, 0, [], []),
    (surfaces.torus(2, 3), 6, 0, [], []),
    (surfaces.cylinder(3, 1), 3, 6, [], []),
    (surfaces.cylinder(2, 4), 8, 4, [], []),
    (surfaces.cone_model(1), 8, 8, [2], [1] * 2),
    (surfaces.cone_model(3), 24, 24, [6], [1] * 6),
    (surfaces.cone_model(4), 32, 32, [8], [1] * 8),
    (surfaces.cone_model(5), 40, 40, [10], [1] * 10),
    (surfaces.cone_model(6), 48, 48, [12], [1] * 12),
    (surfaces.lshape(), 12, 16, [], [1] * 5 + [3]),
    (surfaces.slit(), 16, 20, [], [1] * 6 + [4]),
    (surfaces.angle_model(5), 20, 24, [], [1] * 7 + [5]),
    (surfaces.angle_model(6), 24, 28, [], [1] * 8 + [6]),
]


@pytest.mark.parametrize("surf,area,perim,cones,corners", MODEL_DATA,
                         ids=[m[0].name for m in MODEL_DATA])
def test_model_counts(surf, area, perim, cones, corners):
    s = surfaces.geometry_summary(surf)
    assert s.area == area
    assert s.perimeter == perim
    assert sorted(round(a / HALF_PI) for a in s.cone_angles) == sorted(cones)
    assert s.corner_angles_over_half_pi() == sorted(corners)
    assert s.right_angle_count + len(s.nonright_angle_multiset) == len(s.corner_angles)
    assert (s.perimeter == 0) == (len(surf.boundary_sides) == 0)


@pytest.mark.parametrize("surf", [m[0] for m in MODEL_DATA],
                         ids=[m[0].name for m in MODEL_DATA])
def test_gauss_bonnet(surf):
    assert surfaces.gauss_bonnet_defect(surf) == 0


def test_euler_characteristics():
    assert surfaces.geometry_summary(surfaces.rectangle(3, 2)).euler_char == 1
    assert surfaces.geometry_summary(surfaces.torus(2, 2)).euler_char == 0
    assert surfaces.geometry_summary(surfaces.cylinder(3, 2)).euler_char == 0
    assert surfaces.geometry_summary(surfaces.lshape()).euler_char == 1
    assert surfaces.geometry_summary(surfaces.cone_model(4)).euler_char == 1


def test_lshape_gauss_bonnet_by_hand():
    # five right corners and one 3 pi/2 corner: 5 (pi/2) - pi/2 = 2 pi chi
    s = surfaces.geometry_summary(surfaces.lshape())
    total = sum(math.pi - a for a in s.corner_angles)
    assert abs(total - 2 * math.pi * s.euler_char) < 1e-12


def test_cone_model_rejects_2pi():
    with pytest.raises(UnsupportedAngle):
        surfaces.cone_model(2)
    with pytest.raises(UnsupportedAngle):
        surfaces.angle_model(2)


def test_rescale_counts_and_composition():
    base = surfaces.rectangle(1, 1)
    s2 = surfaces.geometry_summary(surfaces.rescale(base, 2))
    assert s2.area == 4 and s2.perimeter == 8
    assert s2.corner_angles_over_half_pi() == [1, 1, 1, 1]
    t3 = surfaces.geometry_summary(surfaces.rescale(surfaces.torus(1, 1), 3))
    assert t3.area == 9 and t3.perimeter == 0
    # composition: tile counts and angle data of rescale(rescale(s,2),3) match rescale(s,6)
    a = surfaces.rescale(surfaces.rescale(surfaces.lshape(), 2), 3)
    b = surfaces.rescale(surfaces.lshape(), 6)
    sa, sb = surfaces.geometry_summary(a), surfaces.geometry_summary(b)
    assert (sa.area, sa.perimeter) == (sb.area, sb.perimeter)
    assert sa.corner_angles_over_half_pi() == sb.corner_angles_over_half_pi()


def test_rescale_preserves_angles():
    for surf in (surfaces.cone_model(1), surfaces.slit()):
        s1 = surfaces.geometry_summary(surf)
        s2 = surfaces.geometry_summary(surfaces.rescale(surf, 2))
        assert s2.area == 4 * s1.area
        assert s2.perimeter == 2 * s1.perimeter
        assert s2.cone_angles == s1.cone_angles
        assert s2.corner_angles == s1.corner_angles


def test_raw_gluing_validation():
    # pairing must be an involution: one-sided entries are rejected at build
    with pytest.raises(InvalidGluing):
        surfaces.build_surface({"kind": "raw", "tiles": [0, 1],
                                "pairings": [[[0, "E"], [1, "W"], "translation"],
                                             [[0, "E"], [1, "E"], "translation"]]})
    # translation must join opposite side labels
    with pytest.raises(InvalidGluing):
        surfaces.from_raw([0, 1], [((0, "E"), (1, "E"), "translation")])
    # half-turn must join equal side labels
    with pytest.raises(InvalidGluing):
        surfaces.from_raw([0, 1], [((0, "E"), (1, "W"), "half-turn")])
    # a side glued to itself is a fixed point of the involution
    with pytest.raises(InvalidGluing):
        surfaces.from_raw([0], [((0, "E"), (0, "E"), "half-turn")])


def test_raw_cylinder_round_trip():
    spec = {"kind": "raw", "tiles": [0, 1, 2],
            "pairings": [[[0, "E"], [1, "W"], "translation"],
                         [[1, "E"], [2, "W"], "translation"],
                         [[2, "E"], [0, "W"], "translation"]]}
    surf = surfaces.build_surface(spec)
    s = surfaces.geometry_summary(surf)
    assert s.area == 3 and s.perimeter == 6 and not s.cone_angles


def test_raw_half_turn_fold():
    # a 2x1 strip folded onto itself along the bottom: one cone of angle pi
    spec = {"kind": "raw", "tiles": [0, 1],
            "pairings": [[[0, "E"], [1, "W"], "translation"],
                         [[0, "S"], [1, "S"], "half-turn"]]}
    surf = surfaces.build_surface(spec)
    s = surfaces.geometry_summary(surf)
    assert s.area == 2 and s.perimeter == 4
    assert [round(a / HALF_PI) for a in s.cone_angles] == [2]
    assert s.corner_angles_over_half_pi() == [1, 1]


def _random_valid_gluing(rng, n_tiles):
    """Random fixed-point-free partial matching of side slots with legal kinds."""
    tiles = list(range(n_tiles))
    horiz = [(t, s) for t in tiles for s in ("E", "W")]
    vert = [(t, s) for t in tiles for s in ("N", "S")]
    pairings = []
    for group in (horiz, vert):
        rng.shuffle(group)
        k = len(group) // 2
        n_pairs = rng.integers(0, k + 1)
        used = set()
        for a, b in zip(group[:n_pairs], group[n_pairs:2 * n_pairs]):
            if a[1] == b[1]:
                kind = "half-turn"
            else:
                kind = "translation"
            pairings.append(((a[0], a[1]), (b[0], b[1]), kind))
    return tiles, pairings


def test_random_gluings_gauss_bonnet():
    rng = np.random.default_rng(2718)
    accepted = 0
    for _ in range(60):
        tiles, pairings = _random_valid_gluing(rng, int(rng.integers(1, 7)))
        try:
            surf = surfaces.from_raw(tiles, pairings)
        except InvalidGluing:
            continue
        accepted += 1
        assert surfaces.gauss_bonnet_defect(surf) == 0
    assert accepted >= 20


def test_build_surface_json_kinds():
    assert surfaces.build_surface({"kind": "rectangle", "a": 2, "b": 3}).tiles
    assert surfaces.build_surface('{"kind": "torus", "a": 1, "b": 1}').kind == "torus"
    assert surfaces.build_surface({"kind": "lshape"}).name == "lshape"
    assert surfaces.build_surface({"kind": "slit"}).name == "slit"
    assert surfaces.build_surface({"kind": "cone", "k": 4}).params["k"] == 4
    assert surfaces.build_surface({"kind": "angle", "k": 5}).params["k"] == 5
    with pytest.raises(InvalidGluing):
        surfaces.build_surface({"kind": "rectangle", "a": 0, "b": 2})
    with pytest.raises(InvalidGluing):
        surfaces.build_surface({"kind": "nonsense"})


def test_spec_round_trip():
    for surf in (surfaces.rectangle(2, 3), surfaces.lshape(), surfaces.cone_model(3)):
        spec = surfaces.surface_to_spec(surf)
        again = surfaces.build_surface(spec)
        s1, s2 = surfaces.geometry_summary(surf), surfaces.geometry_summary(again)
        assert (s1.area, s1.perimeter, s1.cone_angles, s1.corner_angles) == \
               (s2.area, s2.perimeter, s2.cone_angles, s2.corner_angles)


def test_singular_point_lookup():
    surf = surfaces.lshape()
    pts = surf.singular_points()
    assert len(pts) == 6
    with pytest.raises(UnknownPoint):
        surf.singular_point("cone:99")
