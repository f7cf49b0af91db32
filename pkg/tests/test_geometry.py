import math

import numpy as np
import pytest

from bmx.errors import BadParameters, NotNearBoundary, PointOutsideDomain
from bmx.geometry import (Annulus, BoundaryLabel, Disk, HalfPlane,
                          HalfStripComplement, KoebeSlit, ParabolaComplement,
                          Rectangle, SpiralPair, Strip, Wedge,
                          check_delta_starlike, classify_exit, contains,
                          dist_to_boundary, sample_interior)
from bmx.rng import RngStream

ALL_DOMAINS = [
    Rectangle(1, 1),
    Rectangle(2, 1),
    Annulus(1, math.e),
    Wedge(math.pi / 2),
    Wedge(2 * math.pi),
    HalfPlane("north"),
    HalfPlane("west"),
    Strip(-1, 1),
    HalfStripComplement(1.0),
    ParabolaComplement(),
    KoebeSlit(),
    Disk(0.5 + 0.5j, 2.0),
    SpiralPair("U"),
    SpiralPair("complement"),
]


def test_containment_examples():
    assert contains(Rectangle(1, 1), 0j)
    assert contains(Annulus(1, math.e), 2 + 0j)
    assert not contains(KoebeSlit(), -1 + 0j)      # on the slit
    assert contains(KoebeSlit(), -1 + 0.5j)
    assert not contains(Wedge(math.pi / 2), -1 + 0j)
    assert contains(Wedge(2 * math.pi), 1j)
    assert not contains(Wedge(2 * math.pi), -2 + 0j)


def test_boundary_points_not_contained():
    assert not contains(Rectangle(1, 1), 1 + 0.5j)
    assert not contains(Annulus(1, 2), 1 + 0j)
    assert not contains(Disk(0j, 1), 1 + 0j)
    assert not contains(Strip(-1, 1), 2 + 1j)


def test_distance_examples():
    assert dist_to_boundary(Disk(0j, 1), 0j) == 1.0
    assert dist_to_boundary(Rectangle(2, 1), 0j) == 1.0
    assert dist_to_boundary(Annulus(1, 4), 2 + 0j) == 1.0
    assert dist_to_boundary(HalfPlane("north"), 3 + 2j) == 2.0
    assert math.isclose(dist_to_boundary(Wedge(math.pi / 2), 1 + 0j),
                        math.sin(math.pi / 4))
    assert math.isclose(dist_to_boundary(KoebeSlit(), 1 + 0j), 1.25)


def test_distance_raises_outside():
    with pytest.raises(PointOutsideDomain):
        dist_to_boundary(Rectangle(1, 1), 2 + 0j)


def test_interior_disk_fits():
    # The inscribed disk of radius dist(z) about any interior point stays in
    # the domain; probe its rim just inside.
    gen = RngStream(42).generator()
    angles = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    for d in ALL_DOMAINS:
        pts = sample_interior(d, gen, 40)
        r = d.boundary_distance(pts)
        assert np.all(r > 0)
        rim = pts[:, None] + 0.999 * r[:, None] * np.exp(1j * angles)[None, :]
        assert np.all(d.contains(rim)), f"inscribed disk escapes {d}"


def test_projection_lands_on_boundary():
    gen = RngStream(7).generator()
    for d in ALL_DOMAINS:
        pts = sample_interior(d, gen, 25)
        proj = d.project(pts)
        assert np.all(d.boundary_distance(proj) < 1e-7), f"bad projection {d}"


def test_classify_rectangle_sides():
    r = Rectangle(1, 1)
    assert classify_exit(r, 1 + 0.3j, 1e-6) == BoundaryLabel.S1
    assert classify_exit(r, 0.3 - 1j, 1e-6) == BoundaryLabel.S2
    assert classify_exit(r, -1 + 0.3j, 1e-6) == BoundaryLabel.S3
    assert classify_exit(r, 0.3 + 1j, 1e-6) == BoundaryLabel.S4
    # Corner ties break by enumeration order.
    assert classify_exit(r, 1 + 1j, 1e-6) == BoundaryLabel.S1


def test_classify_annulus_and_spiral():
    a = Annulus(1, 2)
    z = 1.0000003 * np.exp(0.7j)
    assert classify_exit(a, complex(z), 1e-5) == BoundaryLabel.ANNULUS_INNER
    assert classify_exit(a, 2.0 * np.exp(0.7j), 1e-5) == BoundaryLabel.ANNULUS_OUTER

    sp = SpiralPair("U")
    t = 5.0
    on_gamma1 = t * np.exp(1j * t)
    assert classify_exit(sp, complex(on_gamma1), 1e-6) == BoundaryLabel.GAMMA1
    assert classify_exit(sp, complex(-on_gamma1), 1e-6) == BoundaryLabel.GAMMA2


def test_classify_halfplane_halflines():
    hp = HalfPlane("north")
    assert classify_exit(hp, 2.0 + 0j, 1e-9) == BoundaryLabel.HALFLINE_RIGHT
    assert classify_exit(hp, -2.0 + 0j, 1e-9) == BoundaryLabel.HALFLINE_LEFT


def test_classify_requires_proximity():
    with pytest.raises(NotNearBoundary):
        classify_exit(Rectangle(1, 1), 0j, 1e-6)


def test_classify_deterministic_near_boundary():
    gen = RngStream(3).generator()
    r = Rectangle(2, 1)
    pts = sample_interior(r, gen, 50)
    proj = r.project(pts)
    lab1 = r.label_codes(proj)
    lab2 = r.label_codes(proj)
    assert np.array_equal(lab1, lab2)


def test_spiral_distance_bound_far_out():
    # Any point at radius >= 2*pi sits within pi of one of the arms.
    sp = SpiralPair("U")
    gen = RngStream(11).generator()
    r = gen.uniform(2 * math.pi, 40, 200)
    th = gen.uniform(-math.pi, math.pi, 200)
    z = r * np.exp(1j * th)
    assert np.all(sp.boundary_distance(z) < math.pi)


def test_spiral_membership_phase():
    sp_u = SpiralPair("U")
    sp_c = SpiralPair("complement")
    gen = RngStream(12).generator()
    z = gen.uniform(-20, 20, 500) + 1j * gen.uniform(-20, 20, 500)
    in_u = sp_u.contains(z)
    in_c = sp_c.contains(z)
    assert not np.any(in_u & in_c)
    assert np.all(in_u | in_c)          # the arms have measure zero


def test_parabola_distance_matches_brute_force():
    pc = ParabolaComplement()
    ss = np.linspace(-60, 60, 1_200_001)
    curve = (1 - ss ** 2 / 4) + 1j * ss
    for z in [2 + 0j, 3 + 2.5j, 1.5 - 4j, 10 + 1j]:
        brute = float(np.min(np.abs(z - curve)))
        assert math.isclose(dist_to_boundary(pc, z), brute, rel_tol=1e-6)


def test_halfstrip_complement_distances():
    hs = HalfStripComplement(1.0)
    assert dist_to_boundary(hs, 1 + 0j) == 1.0          # to the end segment
    assert dist_to_boundary(hs, -3 + 2j) == 1.0         # to the top ray
    # diagonal to the corner (0, 1)
    assert math.isclose(dist_to_boundary(hs, 1 + 2j), math.sqrt(2),
                        rel_tol=1e-12)


def test_wedge_crossing_fractions():
    w = Wedge(math.pi / 2)
    # Segment crossing the upper edge ray y = x (x > 0).
    s = w.first_boundary_crossing(np.array([2 + 0j]), np.array([2 + 4j]))[0]
    assert math.isclose(s, 0.5, rel_tol=1e-12)
    # Segment staying inside has no crossing.
    s = w.first_boundary_crossing(np.array([2 + 0j]), np.array([3 + 0.5j]))[0]
    assert s == math.inf


def test_koebe_crossing_only_on_slit():
    k = KoebeSlit()
    s = k.first_boundary_crossing(np.array([-1 + 1j]), np.array([-1 - 1j]))[0]
    assert math.isclose(s, 0.5, rel_tol=1e-12)
    # Crossing Im = 0 right of the slit tip is not a boundary crossing.
    s = k.first_boundary_crossing(np.array([1 + 1j]), np.array([1 - 1j]))[0]
    assert s == math.inf


def test_delta_starlike_verdicts():
    assert check_delta_starlike(Strip(-1, 1), 40, RngStream(1)).passed
    assert check_delta_starlike(HalfPlane("north"), 40, RngStream(2)).passed
    # exp-preimages of starlike domains: the fundamental strip of the slit
    # plane and the left half-plane (preimage of the punctured disk).
    assert check_delta_starlike(Strip(-math.pi, math.pi), 40, RngStream(3)).passed
    assert check_delta_starlike(HalfPlane("west"), 40, RngStream(4)).passed

    v = check_delta_starlike(Wedge(math.pi / 2), 40, RngStream(5))
    assert not v.passed
    assert v.witness is not None and v.exit_point is not None
    # The witness's leftward ray really does leave the wedge.
    assert not contains(Wedge(math.pi / 2), v.exit_point)
    assert v.exit_point.imag == v.witness.imag
    assert v.exit_point.real < v.witness.real


def test_constructor_validation():
    with pytest.raises(BadParameters):
        Rectangle(-1, 1)
    with pytest.raises(BadParameters):
        Annulus(2, 1)
    with pytest.raises(BadParameters):
        Wedge(0)
    with pytest.raises(BadParameters):
        Wedge(2 * math.pi + 0.1)
    with pytest.raises(BadParameters):
        Strip(1, -1)
    with pytest.raises(BadParameters):
        HalfPlane("up")
    with pytest.raises(BadParameters):
        Disk(0j, 0.0)
    with pytest.raises(BadParameters):
        SpiralPair("left")
