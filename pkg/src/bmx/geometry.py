"""Plane domains and their geometric predicates.

Every domain is an immutable dataclass exposing vectorized primitives:

* ``contains(z)``           membership in the open set,
* ``boundary_distance(z)``  unsigned Euclidean distance to the boundary set
                            (defined everywhere, not just inside),
* ``project(z)``            nearest boundary point,
* ``label_codes(z)``        integer code of the nearest boundary region.

``z`` may be a python complex or any complex ndarray; results have matching
shape.  Domains are open: points exactly on the boundary are not contained.
Module-level wrappers (:func:`contains`, :func:`dist_to_boundary`,
:func:`classify_exit`) provide the scalar, error-raising API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import BadParameters, NotNearBoundary, PointOutsideDomain

# Unbounded boundary pieces are clipped at this abscissa for distance queries
# and ray marches; nothing simulated ever gets near it.
FAR_CLIP = 1e6


class BoundaryLabel(IntEnum):
    """Boundary-region tags.  Enumeration order breaks classification ties."""

    S1 = 0              # rectangle right side
    S2 = 1              # rectangle bottom side (clockwise from S1)
    S3 = 2              # rectangle left side
    S4 = 3              # rectangle top side
    ANNULUS_INNER = 4
    ANNULUS_OUTER = 5
    HALFLINE_LEFT = 6   # boundary half-line with negative line coordinate
    HALFLINE_RIGHT = 7
    GAMMA1 = 8          # spiral arm t -> t e^{it}
    GAMMA2 = 9          # spiral arm t -> t e^{i(t-pi)}
    GENERIC = 10


def _asarr(z):
    return np.asarray(z, dtype=complex)


def _ray_distance(z, phi):
    """Distance from z to the ray {t e^{i phi} : t >= 0}."""
    w = _asarr(z) * np.exp(-1j * phi)
    return np.where(w.real >= 0.0, np.abs(w.imag), np.abs(w))


def _ray_project(z, phi):
    w = _asarr(z) * np.exp(-1j * phi)
    t = np.maximum(w.real, 0.0)
    return t * np.exp(1j * phi)


def _segment_project(z, p, q):
    """Nearest point on segment [p, q] to z; p, q broadcast against z."""
    z = _asarr(z)
    d = np.asarray(q) - np.asarray(p)
    denom = np.abs(d) ** 2
    t = ((z - p) * np.conj(d)).real / np.where(denom == 0.0, 1.0, denom)
    t = np.clip(np.where(denom == 0.0, 0.0, t), 0.0, 1.0)
    return p + t * d


def _segment_distance(z, p, q):
    return np.abs(_asarr(z) - _segment_project(z, p, q))


class Domain:
    """Base class; concrete domains implement the vectorized primitives."""

    def contains(self, z):
        raise NotImplementedError

    def boundary_distance(self, z):
        raise NotImplementedError

    def project(self, z):
        raise NotImplementedError

    def label_codes(self, z):
        z = _asarr(z)
        return np.full(z.shape, int(BoundaryLabel.GENERIC), dtype=np.int64)

    def first_boundary_crossing(self, z0, z1):
        """Fraction s in [0, 1] where the segment z0 -> z1 first crosses a
        boundary piece that endpoint containment cannot see (slits, rays);
        inf where there is none.  Domains with fat complements keep the
        default: crossings there are caught by the endpoint test."""
        z0 = _asarr(z0)
        return np.full(z0.shape, np.inf)

    def probe_box(self):
        """(xmin, xmax, ymin, ymax) window overlapping the domain interior."""
        raise NotImplementedError


def _line_crossing_fraction(y0, y1):
    """s where the segment of ordinates y0 -> y1 crosses 0, inf if no strict
    sign change."""
    cross = y0 * y1 < 0
    denom = np.where(cross, y0 - y1, 1.0)
    return np.where(cross, y0 / denom, np.inf)


@dataclass(frozen=True)
class Rectangle(Domain):
    """Open rectangle (-a, a) x (-b, b)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise BadParameters("rectangle half-sides must be positive")

    def contains(self, z):
        z = _asarr(z)
        return (np.abs(z.real) < self.a) & (np.abs(z.imag) < self.b)

    def boundary_distance(self, z):
        z = _asarr(z)
        qx = np.abs(z.real) - self.a
        qy = np.abs(z.imag) - self.b
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return np.abs(outside + inside)

    def _side_distances(self, z):
        z = _asarr(z)
        x, y = z.real, z.imag
        over_y = np.maximum(np.abs(y) - self.b, 0.0)
        over_x = np.maximum(np.abs(x) - self.a, 0.0)
        d1 = np.hypot(x - self.a, over_y)
        d2 = np.hypot(over_x, y + self.b)
        d3 = np.hypot(x + self.a, over_y)
        d4 = np.hypot(over_x, y - self.b)
        return np.stack([d1, d2, d3, d4])

    def label_codes(self, z):
        return np.argmin(self._side_distances(z), axis=0).astype(np.int64)

    def project(self, z):
        z = _asarr(z)
        side = self.label_codes(z)
        x = np.clip(z.real, -self.a, self.a)
        y = np.clip(z.imag, -self.b, self.b)
        px = np.where(side == 0, self.a, np.where(side == 2, -self.a, x))
        py = np.where(side == 1, -self.b, np.where(side == 3, self.b, y))
        return px + 1j * py

    def probe_box(self):
        return (-self.a, self.a, -self.b, self.b)


@dataclass(frozen=True)
class Annulus(Domain):
    """Open annulus r < |z| < R."""

    r: float
    R: float

    def __post_init__(self):
        if not (0 < self.r < self.R):
            raise BadParameters("annulus needs 0 < r < R")

    def contains(self, z):
        rho = np.abs(_asarr(z))
        return (rho > self.r) & (rho < self.R)

    def boundary_distance(self, z):
        rho = np.abs(_asarr(z))
        return np.minimum(np.abs(rho - self.r), np.abs(rho - self.R))

    def label_codes(self, z):
        rho = np.abs(_asarr(z))
        inner = np.abs(rho - self.r) <= np.abs(rho - self.R)
        return np.where(inner, int(BoundaryLabel.ANNULUS_INNER),
                        int(BoundaryLabel.ANNULUS_OUTER)).astype(np.int64)

    def project(self, z):
        z = _asarr(z)
        rho = np.abs(z)
        direction = np.where(rho > 0, z / np.where(rho == 0, 1.0, rho), 1.0)
        target = np.where(self.label_codes(z) == int(BoundaryLabel.ANNULUS_INNER),
                          self.r, self.R)
        return direction * target

    def probe_box(self):
        return (-self.R, self.R, -self.R, self.R)


@dataclass(frozen=True)
class Wedge(Domain):
    """Open wedge {-theta/2 < Arg z < theta/2}, bisected by the positive real
    axis.  theta = 2*pi gives the plane slit along the negative real axis."""

    theta: float

    def __post_init__(self):
        if not (0 < self.theta <= 2 * math.pi):
            raise BadParameters("wedge aperture must lie in (0, 2*pi]")

    def contains(self, z):
        z = _asarr(z)
        return (z != 0) & (np.abs(np.angle(z)) < self.theta / 2)

    def boundary_distance(self, z):
        half = self.theta / 2
        d = _ray_distance(z, half)
        if self.theta < 2 * math.pi:
            d = np.minimum(d, _ray_distance(z, -half))
        return d

    def project(self, z):
        half = self.theta / 2
        d_up = _ray_distance(z, half)
        d_dn = _ray_distance(z, -half)
        up = _ray_project(z, half)
        dn = _ray_project(z, -half)
        if self.theta == 2 * math.pi:
            return up
        return np.where(d_up <= d_dn, up, dn)

    def first_boundary_crossing(self, z0, z1):
        z0, z1 = _asarr(z0), _asarr(z1)
        half = self.theta / 2
        phis = [half] if self.theta == 2 * math.pi else [half, -half]
        best = np.full(z0.shape, np.inf)
        for phi in phis:
            w0 = z0 * np.exp(-1j * phi)
            w1 = z1 * np.exp(-1j * phi)
            s = _line_crossing_fraction(w0.imag, w1.imag)
            xc = w0.real + np.where(np.isfinite(s), s, 0.0) * (w1.real - w0.real)
            s = np.where(xc >= 0.0, s, np.inf)
            best = np.minimum(best, s)
        return best

    def probe_box(self):
        return (-4.0, 8.0, -8.0, 8.0)


@dataclass(frozen=True)
class HalfPlane(Domain):
    """Open half-plane whose boundary passes through the origin.

    ``direction`` is the inward normal: "north" is {Im z > 0}, "east" is
    {Re z > 0}, and so on.  The boundary line splits at the origin into
    HALFLINE_LEFT / HALFLINE_RIGHT (positive line coordinate is "right";
    the line coordinate is Re z for horizontal boundaries, Im z for
    vertical ones).
    """

    direction: str = "north"

    _NORMALS = {"north": 1j, "south": -1j, "east": 1 + 0j, "west": -1 + 0j}

    def __post_init__(self):
        if self.direction not in self._NORMALS:
            raise BadParameters(f"unknown half-plane direction {self.direction!r}")

    @property
    def normal(self):
        return self._NORMALS[self.direction]

    def _inward(self, z):
        z = _asarr(z)
        return (z * np.conj(self.normal)).real

    def _line_coord(self, z):
        z = _asarr(z)
        if self.direction in ("north", "south"):
            return z.real
        return z.imag

    def contains(self, z):
        return self._inward(z) > 0

    def boundary_distance(self, z):
        return np.abs(self._inward(z))

    def project(self, z):
        z = _asarr(z)
        return z - self._inward(z) * self.normal

    def label_codes(self, z):
        t = self._line_coord(z)
        return np.where(t > 0, int(BoundaryLabel.HALFLINE_RIGHT),
                        int(BoundaryLabel.HALFLINE_LEFT)).astype(np.int64)

    def first_boundary_crossing(self, z0, z1):
        return _line_crossing_fraction(self._inward(z0), self._inward(z1))

    def probe_box(self):
        n = self.normal
        cx, cy = 5 * n.real, 5 * n.imag
        return (cx - 5, cx + 5, cy - 5, cy + 5)


@dataclass(frozen=True)
class Strip(Domain):
    """Open horizontal strip lo < Im z < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise BadParameters("strip needs lo < hi")

    def contains(self, z):
        y = _asarr(z).imag
        return (y > self.lo) & (y < self.hi)

    def boundary_distance(self, z):
        y = _asarr(z).imag
        return np.minimum(np.abs(y - self.lo), np.abs(y - self.hi))

    def project(self, z):
        z = _asarr(z)
        y = z.imag
        target = np.where(np.abs(y - self.lo) <= np.abs(y - self.hi),
                          self.lo, self.hi)
        return z.real + 1j * target

    def first_boundary_crossing(self, z0, z1):
        y0, y1 = _asarr(z0).imag, _asarr(z1).imag
        return np.minimum(
            _line_crossing_fraction(y0 - self.lo, y1 - self.lo),
            _line_crossing_fraction(self.hi - y0, self.hi - y1))

    def probe_box(self):
        return (-10.0, 10.0, self.lo, self.hi)


@dataclass(frozen=True)
class HalfStripComplement(Domain):
    """Complement of the closed half-strip {Re z <= x0, |Im z| <= a}."""

    a: float
    x0: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise BadParameters("half-strip half-height must be positive")

    def contains(self, z):
        z = _asarr(z)
        return (z.real > self.x0) | (np.abs(z.imag) > self.a)

    def _piece_distances(self, z):
        z = _asarr(z)
        x, y = z.real, z.imag
        over = np.maximum(x - self.x0, 0.0)
        d_top = np.hypot(over, y - self.a)
        d_bot = np.hypot(over, y + self.a)
        d_end = np.hypot(x - self.x0, np.maximum(np.abs(y) - self.a, 0.0))
        return d_top, d_bot, d_end

    def boundary_distance(self, z):
        d_top, d_bot, d_end = self._piece_distances(z)
        return np.minimum(np.minimum(d_top, d_bot), d_end)

    def project(self, z):
        z = _asarr(z)
        x, y = z.real, z.imag
        d_top, d_bot, d_end = self._piece_distances(z)
        px_ray = np.minimum(x, self.x0)
        p_top = px_ray + 1j * self.a
        p_bot = px_ray - 1j * self.a
        p_end = self.x0 + 1j * np.clip(y, -self.a, self.a)
        best = np.argmin(np.stack([d_top, d_bot, d_end]), axis=0)
        return np.choose(best, [p_top, p_bot, p_end])

    def probe_box(self):
        return (self.x0 - 4, self.x0 + 8, -self.a - 5, self.a + 5)


def _depressed_cubic_real_roots(p, q):
    """Real roots of s^3 + p s + q = 0, vectorized; returns (3, n) with NaN
    padding where fewer than three real roots exist."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    disc = -4.0 * p**3 - 27.0 * q**2
    roots = np.full((3,) + p.shape, np.nan)

    three = disc > 0
    if np.any(three):
        pt, qt = p[three], q[three]
        m = np.sqrt(-pt / 3.0)
        arg = np.clip(3.0 * qt / (pt * m) / 2.0, -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        for k in range(3):
            roots[k][three] = 2.0 * m * np.cos(phi - 2.0 * math.pi * k / 3.0)

    one = ~three
    if np.any(one):
        po, qo = p[one], q[one]
        half_q = qo / 2.0
        rad = np.sqrt(np.maximum(half_q**2 + (po / 3.0) ** 3, 0.0))
        u = np.cbrt(-half_q + rad)
        v = np.cbrt(-half_q - rad)
        roots[0][one] = u + v

    return roots


@dataclass(frozen=True)
class ParabolaComplement(Domain):
    """Region {x > 1 - y^2/4} to the right of the parabola x = 1 - y^2/4."""

    def contains(self, z):
        z = _asarr(z)
        return z.real > 1.0 - z.imag**2 / 4.0

    def _nearest_parameter(self, z):
        # Critical points of |z - (1 - s^2/4 + i s)|^2 solve
        # s^3 + 4(x+1)s - 8y = 0.
        z = np.atleast_1d(_asarr(z))
        s = _depressed_cubic_real_roots(4.0 * (z.real + 1.0), -8.0 * z.imag)
        px = 1.0 - s**2 / 4.0
        d2 = (z.real - px) ** 2 + (z.imag - s) ** 2
        d2 = np.where(np.isnan(s), np.inf, d2)
        k = np.argmin(d2, axis=0)
        return np.take_along_axis(s, k[None], axis=0)[0]

    def boundary_distance(self, z):
        z = _asarr(z)
        s = self._nearest_parameter(z).reshape(z.shape)
        return np.hypot(z.real - (1.0 - s**2 / 4.0), z.imag - s)

    def project(self, z):
        z = _asarr(z)
        s = self._nearest_parameter(z).reshape(z.shape)
        return (1.0 - s**2 / 4.0) + 1j * s

    def probe_box(self):
        return (-4.0, 8.0, -8.0, 8.0)


@dataclass(frozen=True)
class KoebeSlit(Domain):
    """The slit plane C \\ (-inf, -1/4]."""

    def contains(self, z):
        z = _asarr(z)
        on_slit = (z.imag == 0.0) & (z.real <= -0.25)
        return ~on_slit

    def boundary_distance(self, z):
        z = _asarr(z)
        return np.where(z.real <= -0.25, np.abs(z.imag),
                        np.hypot(z.real + 0.25, z.imag))

    def project(self, z):
        z = _asarr(z)
        return np.where(z.real <= -0.25, z.real + 0.0j,
                        np.complex128(-0.25))

    def first_boundary_crossing(self, z0, z1):
        z0, z1 = _asarr(z0), _asarr(z1)
        s = _line_crossing_fraction(z0.imag, z1.imag)
        xc = z0.real + np.where(np.isfinite(s), s, 0.0) * (z1.real - z0.real)
        return np.where(xc <= -0.25, s, np.inf)

    def probe_box(self):
        return (-10.0, 10.0, -10.0, 10.0)


@dataclass(frozen=True)
class Disk(Domain):
    """Open disk of given center and radius."""

    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise BadParameters("disk radius must be positive")

    def contains(self, z):
        return np.abs(_asarr(z) - self.center) < self.radius

    def boundary_distance(self, z):
        return np.abs(np.abs(_asarr(z) - self.center) - self.radius)

    def project(self, z):
        z = _asarr(z)
        w = z - self.center
        rho = np.abs(w)
        direction = np.where(rho > 0, w / np.where(rho == 0, 1.0, rho), 1.0)
        return self.center + self.radius * direction

    def probe_box(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class SpiralPair(Domain):
    """One of the two components of the plane split by the interleaved
    Archimedean arms gamma1 = {t e^{it}} and gamma2 = {t e^{i(t-pi)}}.

    A point r e^{i theta} lies in U iff (theta - r) mod 2pi is in (0, pi);
    the other component is the complement side.  Both arms pass through 0.
    """

    side: str = "U"
    scan_step: float = 0.05

    def __post_init__(self):
        if self.side not in ("U", "complement"):
            raise BadParameters("spiral side must be 'U' or 'complement'")

    def contains(self, z):
        z = _asarr(z)
        phase = np.mod(np.angle(z) - np.abs(z), 2 * math.pi)
        if self.side == "U":
            inside = (phase > 0) & (phase < math.pi)
        else:
            inside = phase > math.pi
        return (z != 0) & inside

    def _arm_nearest(self, z):
        """(distance, parameter) of the nearest point on gamma1, vectorized.

        Coarse scan over the window |z| +- 2pi brackets the minimizer
        (successive arms are pi apart in radius, so the dips of the distance
        along t are ~2pi apart and the scan cannot skip the global one),
        then golden-section refines the bracket to width 1e-10.
        """
        z = np.atleast_1d(_asarr(z))
        r = np.abs(z)
        lo = np.maximum(r - 2 * math.pi, 0.0)
        span = (r + 2 * math.pi) - lo
        m = max(3, int(np.ceil(span.max() / self.scan_step)))
        best_d2 = np.full(z.shape, np.inf)
        best_t = np.zeros(z.shape)
        # Chunk the scan grid to bound memory on large batches.
        grid = np.linspace(0.0, 1.0, m)
        for piece in np.array_split(grid, max(1, m * z.size // 4_000_000 + 1)):
            t = lo[..., None] + span[..., None] * piece
            d2 = np.abs(z[..., None] - t * np.exp(1j * t)) ** 2
            k = np.argmin(d2, axis=-1)
            dmin = np.take_along_axis(d2, k[..., None], axis=-1)[..., 0]
            tmin = np.take_along_axis(t, k[..., None], axis=-1)[..., 0]
            better = dmin < best_d2
            best_d2 = np.where(better, dmin, best_d2)
            best_t = np.where(better, tmin, best_t)

        step = span / (m - 1)
        a = np.maximum(best_t - step, 0.0)
        b = best_t + step
        gr = (math.sqrt(5.0) - 1.0) / 2.0

        def f(t):
            return np.abs(z - t * np.exp(1j * t)) ** 2

        c = b - gr * (b - a)
        d = a + gr * (b - a)
        fc, fd = f(c), f(d)
        while np.max(b - a) > 1e-10:
            take_c = fc < fd
            b = np.where(take_c, d, b)
            a = np.where(take_c, a, c)
            c_new = b - gr * (b - a)
            d_new = a + gr * (b - a)
            # One endpoint of the new pair inherits an already-known value;
            # only the other needs a fresh evaluation.
            x_new = np.where(take_c, c_new, d_new)
            f_new = f(x_new)
            fc, fd = (np.where(take_c, f_new, fd),
                      np.where(take_c, fc, f_new))
            c, d = c_new, d_new
        t_star = (a + b) / 2.0
        return np.sqrt(f(t_star)), t_star

    def boundary_distance(self, z):
        z = _asarr(z)
        scalar = z.ndim == 0
        d1, _ = self._arm_nearest(z)
        d2, _ = self._arm_nearest(-z)
        d = np.minimum(d1, d2)
        return d[0] if scalar else d.reshape(z.shape)

    def project(self, z):
        z = _asarr(z)
        scalar = z.ndim == 0
        d1, t1 = self._arm_nearest(z)
        d2, t2 = self._arm_nearest(-z)
        p1 = t1 * np.exp(1j * t1)
        p2 = -t2 * np.exp(1j * t2)
        p = np.where(d1 <= d2, p1, p2)
        return p[0] if scalar else p.reshape(z.shape)

    def label_codes(self, z):
        z = _asarr(z)
        scalar = z.ndim == 0
        d1, _ = self._arm_nearest(z)
        d2, _ = self._arm_nearest(-z)
        lab = np.where(d1 <= d2, int(BoundaryLabel.GAMMA1),
                       int(BoundaryLabel.GAMMA2)).astype(np.int64)
        return lab[0] if scalar else lab.reshape(z.shape)

    def probe_box(self):
        return (-20.0, 20.0, -20.0, 20.0)


# ---------------------------------------------------------------------------
# Module-level operations (scalar, error-raising API)
# ---------------------------------------------------------------------------

def contains(domain: Domain, z) -> bool:
    """True iff z lies in the open set."""
    out = domain.contains(_asarr(z))
    return bool(out) if np.ndim(out) == 0 else out


def dist_to_boundary(domain: Domain, z) -> float:
    """Distance from an interior point to the boundary.

    Raises PointOutsideDomain when z is not in the open set.
    """
    z = _asarr(z)
    inside = domain.contains(z)
    if not np.all(inside):
        raise PointOutsideDomain(f"point {z} is not inside {domain}")
    d = domain.boundary_distance(z)
    return float(d) if d.ndim == 0 else d


def classify_exit(domain: Domain, z, tol: float) -> BoundaryLabel:
    """Label of the boundary region nearest to z (must be within tol)."""
    z = _asarr(z)
    d = domain.boundary_distance(z)
    if np.any(d > tol):
        raise NotNearBoundary(f"point {z} is {d} from the boundary (tol {tol})")
    codes = domain.label_codes(z)
    if np.ndim(codes) == 0 or codes.shape == ():
        return BoundaryLabel(int(codes))
    return np.vectorize(BoundaryLabel)(codes)


def sample_interior(domain: Domain, gen: np.random.Generator, n: int = 1,
                    max_tries: int = 10_000) -> np.ndarray:
    """Uniform rejection samples from domain intersected with its probe box."""
    xmin, xmax, ymin, ymax = domain.probe_box()
    out = np.empty(n, dtype=complex)
    got = 0
    for _ in range(max_tries):
        m = max(2 * (n - got), 16)
        cand = (gen.uniform(xmin, xmax, m) + 1j * gen.uniform(ymin, ymax, m))
        cand = cand[domain.contains(cand)]
        take = min(len(cand), n - got)
        out[got:got + take] = cand[:take]
        got += take
        if got == n:
            return out
    raise RuntimeError(f"interior sampling failed for {domain}")


@dataclass(frozen=True)
class StarlikeVerdict:
    """Outcome of the probabilistic leftward-ray check."""

    passed: bool
    witness: complex | None = None
    exit_point: complex | None = None
    probes: int = 0

    def __bool__(self):
        return self.passed


def check_delta_starlike(domain: Domain, probes: int, rng) -> StarlikeVerdict:
    """Check that each sampled interior point's leftward horizontal ray stays
    inside the domain.

    The ray is probed at geometrically spaced abscissae (factor 2, from 1e-3
    down to Re = -1e6) so unbounded rays terminate; pass means no
    counterexample was found.
    """
    gen = rng.generator() if hasattr(rng, "generator") else rng
    pts = sample_interior(domain, gen, probes)
    offsets = [1e-3]
    while offsets[-1] < 2 * FAR_CLIP:
        offsets.append(offsets[-1] * 2.0)
    offsets = np.array(offsets)
    for z in pts:
        xs = z.real - offsets
        xs = xs[xs >= -FAR_CLIP]
        ray = xs + 1j * z.imag
        ok = domain.contains(ray)
        if not np.all(ok):
            bad = ray[~ok][0]
            return StarlikeVerdict(False, witness=complex(z),
                                   exit_point=complex(bad), probes=probes)
    return StarlikeVerdict(True, probes=probes)
