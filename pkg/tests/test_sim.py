import math

import numpy as np
import pytest
from scipy.stats import chisquare, ks_2samp

from bmx.errors import BadStart, MaxStepsExceeded, PointOutsideDomain
from bmx.geometry import (Annulus, BoundaryLabel, Disk, HalfPlane, KoebeSlit,
                          Rectangle, Strip, Wedge)
from bmx.maps import Exp, Linear, PowerInt
from bmx.rng import RngStream
from bmx.sim import (EmConfig, WosConfig, em_exit, em_exit_batch, pushforward,
                     sample_disk_exit, sample_disk_exit_batch,
                     sample_halfplane_exit, sample_halfplane_exit_batch,
                     wos_exit, wos_exit_batch)


def cauchy_cdf(x, a, b):
    return 0.5 + math.atan((x - a) / b) / math.pi


# ---------------------------------------------------------------------------
# Exact kernels
# ---------------------------------------------------------------------------

def test_halfplane_exit_symmetry():
    gen = RngStream(101).generator()
    b = sample_halfplane_exit_batch(1j, gen, 100_000)
    x = b.exit_point.real
    assert abs(np.median(x)) < 0.02
    p = np.mean(x > 0)
    assert abs(p - 0.5) < 3 * math.sqrt(0.25 / len(x))


def test_halfplane_exit_cauchy_tail():
    # Oracle: P(Re > 0 | start -1+i) from the Cauchy(-1, 1) CDF.
    target = 1.0 - cauchy_cdf(0.0, -1.0, 1.0)
    assert math.isclose(target, 0.25)
    gen = RngStream(102).generator()
    b = sample_halfplane_exit_batch(-1 + 1j, gen, 100_000)
    p = np.mean(b.exit_point.real > 0)
    assert abs(p - target) < 3 * math.sqrt(target * (1 - target) / len(b))


def test_halfplane_labels_and_badstart():
    rec = sample_halfplane_exit(2 + 1j, RngStream(4))
    assert rec.label in (BoundaryLabel.HALFLINE_LEFT,
                         BoundaryLabel.HALFLINE_RIGHT)
    assert rec.exit_time is None
    with pytest.raises(BadStart):
        sample_halfplane_exit(1 - 1j, RngStream(4))


def test_disk_exit_angle_uniform():
    gen = RngStream(103).generator()
    b = sample_disk_exit_batch(0j, 1.0, gen, 100_000)
    theta = np.mod(np.angle(b.exit_point), 2 * math.pi)
    counts, _ = np.histogram(theta, bins=36, range=(0, 2 * math.pi))
    assert chisquare(counts).pvalue > 0.001


def test_disk_exit_times_mean_and_scaling():
    gen = RngStream(104).generator()
    b1 = sample_disk_exit_batch(0j, 1.0, gen, 100_000, with_time=True)
    assert abs(b1.exit_time.mean() - 0.5) < 0.01
    b2 = sample_disk_exit_batch(0j, 2.0, gen, 100_000, with_time=True)
    assert abs(b2.exit_time.mean() - 2.0) < 0.04


def test_brownian_scaling_in_distribution():
    gen = RngStream(105).generator()
    t1 = sample_disk_exit_batch(0j, 1.0, gen, 50_000, with_time=True).exit_time
    t2 = sample_disk_exit_batch(0j, 2.0, gen, 50_000, with_time=True).exit_time
    assert ks_2samp(t1, t2 / 4.0).pvalue > 0.01


def test_scalar_record_shape():
    rec = sample_disk_exit(1 + 1j, 0.5, RngStream(9), with_time=True)
    assert math.isclose(abs(rec.exit_point - (1 + 1j)), 0.5)
    assert rec.exit_time > 0


# ---------------------------------------------------------------------------
# Walk on spheres
# ---------------------------------------------------------------------------

def test_wos_annulus_log_hitting_law():
    # P(inner) = ln(R/|z|)/ln(R/r); the two circles of the annulus.
    ann = Annulus(1.0, math.e ** 2)
    gen = RngStream(106).generator()
    for start, target in [(math.e, 0.5), (math.e ** 1.5, 0.25)]:
        b = wos_exit_batch(ann, np.full(100_000, start, dtype=complex), gen)
        p = np.mean(b.label == int(BoundaryLabel.ANNULUS_INNER))
        se = math.sqrt(target * (1 - target) / len(b))
        assert abs(p - target) < 3 * se


def test_wos_square_symmetry():
    gen = RngStream(107).generator()
    b = wos_exit_batch(Rectangle(1, 1), np.zeros(100_000, dtype=complex), gen)
    for side in range(4):
        p = np.mean(b.label == side)
        assert abs(p - 0.25) < 3 * math.sqrt(0.25 * 0.75 / len(b))


def test_wos_exit_time_matches_disk_formula():
    # E[tau] from z in a disk of radius R is (R^2 - |z|^2)/2.
    gen = RngStream(108).generator()
    d = Disk(0j, 1.0)
    b = wos_exit_batch(d, np.zeros(50_000, dtype=complex), gen,
                       WosConfig(with_time=True))
    assert abs(np.mean(b.exit_time) - 0.5) < 0.01
    b = wos_exit_batch(d, np.full(50_000, 0.5 + 0j), gen,
                       WosConfig(with_time=True))
    assert abs(np.mean(b.exit_time) - (1 - 0.25) / 2) < 0.01


def test_wos_exit_point_on_boundary():
    gen = RngStream(109).generator()
    d = Rectangle(2, 1)
    b = wos_exit_batch(d, np.zeros(2000, dtype=complex), gen)
    assert np.all(d.boundary_distance(b.exit_point) < 1e-9)


def test_wos_scalar_and_max_steps():
    rec = wos_exit(Disk(0j, 1.0), 0j, WosConfig(), RngStream(10))
    assert rec.status == "ok"
    assert rec.eps > 0
    with pytest.raises(MaxStepsExceeded):
        wos_exit(Rectangle(1, 1), 0j, WosConfig(max_steps=1, eps=1e-12),
                 RngStream(10))
    with pytest.raises(PointOutsideDomain):
        wos_exit(Disk(0j, 1.0), 2 + 0j, WosConfig(), RngStream(10))


def test_wos_reproducible():
    a = wos_exit_batch(Annulus(1, 4), np.full(500, 2 + 0j),
                       RngStream(55, 3).generator(), WosConfig(with_time=True))
    b = wos_exit_batch(Annulus(1, 4), np.full(500, 2 + 0j),
                       RngStream(55, 3).generator(), WosConfig(with_time=True))
    assert np.array_equal(a.exit_point, b.exit_point)
    assert np.array_equal(a.exit_time, b.exit_time)
    assert np.array_equal(a.steps, b.steps)


# ---------------------------------------------------------------------------
# Euler-Maruyama
# ---------------------------------------------------------------------------

def test_em_disk_mean_exit_time():
    gen = RngStream(110).generator()
    b = em_exit_batch(Disk(0j, 1.0), np.zeros(50_000, dtype=complex), gen)
    assert b.n_excluded == 0
    assert abs(np.mean(b.exit_time) - 0.5) < 0.01


def test_em_halfplane_exits_match_exact_sampler():
    # Two-sample KS against the exact Cauchy sampler at the 1e-3 level.
    n = 10_000
    gen = RngStream(111).generator()
    em = em_exit_batch(HalfPlane("north"), np.full(n, 1j), gen)
    exact = sample_halfplane_exit_batch(1j, gen, n)
    d = ks_2samp(em.exit_point.real, exact.exit_point.real).statistic
    crit = 1.9495 * math.sqrt(2.0 / n)
    assert d < crit


def test_em_rectangle_sides_match_wos():
    n = 50_000
    gen = RngStream(112).generator()
    r = Rectangle(2, 1)
    em = em_exit_batch(r, np.zeros(n, dtype=complex), gen)
    wos = wos_exit_batch(r, np.zeros(n, dtype=complex), gen)
    for side in range(4):
        pe = np.mean(em.label == side)
        pw = np.mean(wos.label == side)
        joint = math.sqrt(pe * (1 - pe) / n + pw * (1 - pw) / n)
        assert abs(pe - pw) <= 3 * joint


def test_em_crossing_detection_on_slits():
    # The slit boundaries have measure zero; exits must still register.
    gen = RngStream(113).generator()
    k = KoebeSlit()
    b = em_exit_batch(k, np.full(3000, 1 + 0j), gen,
                      EmConfig(max_steps=200_000))
    assert b.n_excluded == 0
    exits = b.exit_point
    assert np.all(exits.real <= -0.25 + 1e-9)
    assert np.all(np.abs(exits.imag) < 1e-9)


def test_em_scalar_path_sample():
    path = em_exit(Disk(0j, 1.0), 0j, EmConfig(keep_path=True, dt_max=0.01),
                   RngStream(21))
    assert path.times[0] == 0.0
    assert np.all(np.diff(path.times) > 0)
    assert path.points[0] == 0j
    assert math.isclose(abs(path.terminal.exit_point), 1.0, rel_tol=1e-6)
    # Increment variance tracks the step sizes: |inc|^2/(2 dt) averages 1.
    dt = np.diff(path.times)[:-1]
    inc = np.diff(path.points)[:-1]
    norm = np.abs(inc) ** 2 / (2 * dt)
    assert abs(np.mean(norm) - 1.0) < 4.0 / math.sqrt(len(norm))


def test_em_reproducible():
    cfg = EmConfig()
    a = em_exit_batch(Rectangle(1, 1), np.zeros(400, dtype=complex),
                      RngStream(66, 1).generator(), cfg)
    b = em_exit_batch(Rectangle(1, 1), np.zeros(400, dtype=complex),
                      RngStream(66, 1).generator(), cfg)
    assert np.array_equal(a.exit_point, b.exit_point)
    assert np.array_equal(a.exit_time, b.exit_time)


def test_em_absorbing_line():
    gen = RngStream(114).generator()
    batch, hit = em_exit_batch(Strip(-1, 1), np.full(5000, -2.0 + 0j), gen,
                               absorb_line_re=0.0)
    assert hit.any() and not hit.all()
    on_line = batch.exit_point[hit]
    assert np.allclose(on_line.real, 0.0)
    off_line = batch.exit_point[~hit & batch.ok]
    assert np.all(off_line.real < 0)
    assert np.all(np.abs(np.abs(off_line.imag) - 1) < 1e-6)


# ---------------------------------------------------------------------------
# Pushforward
# ---------------------------------------------------------------------------

def test_pushforward_linear_rescales_time_exactly():
    path = em_exit(Disk(0j, 1.0), 0j, EmConfig(keep_path=True, dt_max=0.02),
                   RngStream(22))
    c = 3 - 4j
    mapped = pushforward(Linear(c), path, image=Disk(0j, 5.0))
    assert np.allclose(mapped.times, abs(c) ** 2 * path.times, rtol=1e-12)
    assert np.allclose(mapped.points, c * path.points)
    assert math.isclose(abs(mapped.terminal.exit_point), 5.0, rel_tol=1e-6)


def test_pushforward_square_map_poisson_kernel():
    # z -> z^2 sends exits of the unit disk from 0.5 to exits from 0.25;
    # the mapped angle law must match the Poisson kernel at 0.25.
    n = 50_000
    gen = RngStream(115).generator()
    b = wos_exit_batch(Disk(0j, 1.0), np.full(n, 0.5 + 0j), gen)
    mapped = PowerInt(2).evaluate(b.exit_point)
    theta = np.angle(mapped)
    bins = np.linspace(-math.pi, math.pi, 25)
    counts, _ = np.histogram(theta, bins=bins)
    rho = 0.25
    centers = (bins[:-1] + bins[1:]) / 2
    dens = (1 - rho ** 2) / (2 * math.pi * (1 - 2 * rho * np.cos(centers)
                                            + rho ** 2))
    expected = dens * (bins[1] - bins[0]) * n
    expected *= counts.sum() / expected.sum()
    assert chisquare(counts, expected).pvalue > 0.001


def test_pushforward_exp_maps_strip_boundary_to_rays():
    s = Strip(-1.0, 1.0)
    path = em_exit(s, 0j, EmConfig(keep_path=True, dt_max=0.05), RngStream(23))
    mapped = pushforward(Exp(), path)
    w = mapped.terminal.exit_point
    assert math.isclose(abs(abs(np.angle(w)) - 1.0), 0.0, abs_tol=1e-6)
    assert np.all(np.diff(mapped.times) >= 0)
