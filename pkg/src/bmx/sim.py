"""Stochastic kernels: exact exit samplers, walk-on-spheres, adaptive
Euler-Maruyama, reflection coupling, and analytic-map pushforward.

All kernels exist in two forms: a scalar operation returning one
:class:`ExitRecord` (or :class:`PathSample`), and a vectorized ``*_batch``
form used by the estimators, which advances a whole block of paths per numpy
sweep.  Randomness always comes from an :class:`~bmx.rng.RngStream` (scalar
form) or a generator derived from one (batch form), so identical
``(seed, stream_id, config)`` reproduce identical records bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disk_time import sample_unit_disk_time
from .errors import BadStart, MaxStepsExceeded, PointOutsideDomain
from .geometry import BoundaryLabel, Domain, HalfPlane, _asarr
from .maps import AnalyticMap
from .rng import RngStream

METHOD_EXACT_HALFPLANE = "exact_halfplane"
METHOD_EXACT_DISK = "exact_disk"
METHOD_WOS = "wos"
METHOD_EM = "em"

STATUS_OK = "ok"
STATUS_MAX_STEPS = "max_steps"

_LABEL_NONE = -1


@dataclass(frozen=True)
class WosConfig:
    """Walk-on-spheres controls.

    ``eps`` and ``r_cap`` default per path to 1e-6*(1+|start|) and
    64*(1+|start|); planar Brownian motion exits almost surely but heavy
    tails make the step cap a real event that is reported, never dropped.
    """

    eps: float | None = None
    r_cap: float | None = None
    max_steps: int = 1_000_000
    with_time: bool = False


@dataclass(frozen=True)
class EmConfig:
    """Adaptive Euler-Maruyama controls: dt = min(dt_max, c * dist^2).

    The quadratic rule keeps the per-step escape-without-detection
    probability at the e^{-2/c} level and makes the step count logarithmic
    in the exit scale; cap dt_max only when a time-resolved path is needed.
    """

    dt_max: float = math.inf
    c: float = 0.1
    max_steps: int = 1_000_000
    boundary_tol: float = 1e-9
    keep_path: bool = False


@dataclass(frozen=True)
class ExitRecord:
    """One simulated exit event."""

    exit_point: complex
    exit_time: float | None      # None when the kernel does not track time
    label: BoundaryLabel
    steps: int
    method: str
    eps: float = 0.0
    status: str = STATUS_OK


@dataclass
class ExitBatch:
    """Struct-of-arrays form of many exit records.

    ``ok`` is False where the path hit the step cap; such paths carry NaN
    exit data and must be excluded (and counted) by consumers.
    """

    exit_point: np.ndarray
    exit_time: np.ndarray | None
    label: np.ndarray
    steps: np.ndarray
    ok: np.ndarray
    method: str
    eps: float = 0.0

    def __len__(self):
        return len(self.exit_point)

    @property
    def n_excluded(self) -> int:
        return int(np.sum(~self.ok))

    def record(self, i: int) -> ExitRecord:
        ok = bool(self.ok[i])
        return ExitRecord(
            exit_point=complex(self.exit_point[i]),
            exit_time=None if self.exit_time is None else float(self.exit_time[i]),
            label=BoundaryLabel(int(self.label[i])) if ok else BoundaryLabel.GENERIC,
            steps=int(self.steps[i]),
            method=self.method,
            eps=self.eps,
            status=STATUS_OK if ok else STATUS_MAX_STEPS,
        )

    def records(self) -> list[ExitRecord]:
        return [self.record(i) for i in range(len(self))]


@dataclass
class PathSample:
    """A discretely sampled trajectory plus its terminal exit record."""

    times: np.ndarray
    points: np.ndarray
    terminal: ExitRecord


# ---------------------------------------------------------------------------
# Exact kernels
# ---------------------------------------------------------------------------

def sample_halfplane_exit_batch(start: complex, gen: np.random.Generator,
                                n: int) -> ExitBatch:
    """Exits of the upper half-plane from ``start``: Cauchy(Re, Im) on R."""
    a, b = start.real, start.imag
    if not b > 0:
        raise BadStart("half-plane sampler needs Im(start) > 0")
    x = a + b * gen.standard_cauchy(n)
    pts = x.astype(complex)
    labels = HalfPlane("north").label_codes(pts)
    return ExitBatch(
        exit_point=pts, exit_time=None, label=labels,
        steps=np.ones(n, dtype=np.int64), ok=np.ones(n, dtype=bool),
        method=METHOD_EXACT_HALFPLANE)


def sample_halfplane_exit(start: complex, rng: RngStream) -> ExitRecord:
    return sample_halfplane_exit_batch(complex(start), rng.generator(), 1).record(0)


def sample_disk_exit_batch(center: complex, radius: float,
                           gen: np.random.Generator, n: int,
                           with_time: bool = False) -> ExitBatch:
    """Uniform exits of a disk; optional exact exit times radius^2 * T1."""
    theta = gen.uniform(0.0, 2 * math.pi, n)
    pts = center + radius * np.exp(1j * theta)
    times = radius ** 2 * sample_unit_disk_time(gen, n) if with_time else None
    return ExitBatch(
        exit_point=pts, exit_time=times,
        label=np.full(n, int(BoundaryLabel.GENERIC), dtype=np.int64),
        steps=np.ones(n, dtype=np.int64), ok=np.ones(n, dtype=bool),
        method=METHOD_EXACT_DISK)


def sample_disk_exit(center: complex, radius: float, rng: RngStream,
                     with_time: bool = False) -> ExitRecord:
    return sample_disk_exit_batch(complex(center), radius, rng.generator(), 1,
                                  with_time).record(0)


# ---------------------------------------------------------------------------
# Walk on spheres
# ---------------------------------------------------------------------------

def wos_exit_batch(domain: Domain, starts, gen: np.random.Generator,
                   cfg: WosConfig = WosConfig()) -> ExitBatch:
    """Walk-on-spheres exits for a block of paths.

    Jumps to a uniform point of the largest inscribed disk (radius capped at
    r_cap) until the path enters the eps shell, then projects onto the
    boundary.  With ``with_time`` each jump adds radius^2 times an exact
    unit-disk exit time, so the accumulated exit time is exact in law up to
    the final shell.
    """
    starts = np.atleast_1d(_asarr(starts))
    n = starts.size
    if not np.all(domain.contains(starts)):
        raise PointOutsideDomain("walk-on-spheres start outside the domain")

    scale = 1.0 + np.abs(starts)
    eps = np.full(n, cfg.eps) if cfg.eps is not None else 1e-6 * scale
    r_cap = np.full(n, cfg.r_cap) if cfg.r_cap is not None else 64.0 * scale

    z = starts.astype(complex).copy()
    steps = np.zeros(n, dtype=np.int64)
    times = np.zeros(n) if cfg.with_time else None
    exit_pt = np.full(n, np.nan, dtype=complex)
    labels = np.full(n, _LABEL_NONE, dtype=np.int64)
    ok = np.zeros(n, dtype=bool)

    alive = np.arange(n)
    while alive.size:
        za = z[alive]
        d = domain.boundary_distance(za)
        shell = d < eps[alive]
        if np.any(shell):
            idx = alive[shell]
            p = domain.project(za[shell])
            exit_pt[idx] = p
            labels[idx] = domain.label_codes(p)
            ok[idx] = True
            alive = alive[~shell]
            za = za[~shell]
            if alive.size == 0:
                break
            d = d[~shell]
        r = np.minimum(d, r_cap[alive])
        theta = gen.uniform(0.0, 2 * math.pi, alive.size)
        z[alive] = za + r * np.exp(1j * theta)
        if cfg.with_time:
            times[alive] += r ** 2 * sample_unit_disk_time(gen, alive.size)
        steps[alive] += 1
        overrun = steps[alive] >= cfg.max_steps
        if np.any(overrun):
            alive = alive[~overrun]

    if times is not None:
        times = np.where(ok, times, np.nan)
    return ExitBatch(exit_point=exit_pt, exit_time=times, label=labels,
                     steps=steps, ok=ok, method=METHOD_WOS,
                     eps=float(np.max(eps)))


def wos_exit(domain: Domain, start: complex, cfg: WosConfig,
             rng: RngStream) -> ExitRecord:
    """Single walk-on-spheres exit; raises MaxStepsExceeded if capped."""
    batch = wos_exit_batch(domain, [complex(start)], rng.generator(), cfg)
    rec = batch.record(0)
    if rec.status == STATUS_MAX_STEPS:
        raise MaxStepsExceeded(f"walk did not exit within {cfg.max_steps} steps")
    return rec


# ---------------------------------------------------------------------------
# Euler-Maruyama
# ---------------------------------------------------------------------------

def _bisect_first_violation(z0, z1, violates, tol):
    """Vectorized bisection for the first point of [z0, z1] where
    ``violates`` holds; z0 must not violate, z1 must.  Returns (s, z_at_s)
    on the violating side, within ``tol`` of the flip."""
    step = np.abs(z1 - z0)
    iters = int(np.clip(np.ceil(np.log2(max(step.max() / tol, 2.0))), 8, 64))
    s_lo = np.zeros(z0.shape)
    s_hi = np.ones(z0.shape)
    for _ in range(iters):
        mid = 0.5 * (s_lo + s_hi)
        bad = violates(z0 + (z1 - z0) * mid)
        s_hi = np.where(bad, mid, s_hi)
        s_lo = np.where(bad, s_lo, mid)
    return s_hi, z0 + (z1 - z0) * s_hi


def _first_domain_exit(domain: Domain, z0, z1, tol):
    """Fraction of the first boundary crossing along each segment z0 -> z1,
    inf where the segment stays inside.  Exact for slit/ray boundary pieces
    via the domain's own crossing rule; otherwise bisection on containment
    when the far endpoint has left the domain."""
    s = domain.first_boundary_crossing(z0, z1).copy()
    out = ~domain.contains(z1)
    if np.any(out):
        sb, _ = _bisect_first_violation(z0[out], z1[out],
                                        lambda p: ~domain.contains(p), tol)
        s[out] = np.minimum(s[out], sb)
    return s


def em_exit_batch(domain: Domain, starts, gen: np.random.Generator,
                  cfg: EmConfig = EmConfig(),
                  absorb_line_re: float | None = None):
    """Adaptive Euler-Maruyama exits for a block of paths.

    Gaussian increments with dt = min(dt_max, c * dist^2); boundary
    crossings are located along the step segment (exactly for slit and ray
    pieces, by bisection to ``boundary_tol`` otherwise) and the exit time is
    interpolated linearly.  With ``absorb_line_re`` the vertical line
    {Re z = r} also absorbs and the earlier of the two crossings wins;
    returns (batch, hit_line) in that case, line exits carrying the line
    point and a GENERIC label.
    """
    starts = np.atleast_1d(_asarr(starts))
    n = starts.size
    if not np.all(domain.contains(starts)):
        raise PointOutsideDomain("Euler-Maruyama start outside the domain")
    line = absorb_line_re
    if line is not None and not np.all(starts.real < line):
        raise BadStart("absorbing line must lie right of every start")

    z = starts.astype(complex).copy()
    t = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    exit_pt = np.full(n, np.nan, dtype=complex)
    exit_t = np.full(n, np.nan)
    labels = np.full(n, _LABEL_NONE, dtype=np.int64)
    ok = np.zeros(n, dtype=bool)
    hit_line = np.zeros(n, dtype=bool)

    alive = np.arange(n)
    while alive.size:
        za = z[alive]
        d = domain.boundary_distance(za)
        if line is not None:
            d = np.minimum(d, np.abs(za.real - line))
        # Relative floor keeps the clock strictly increasing during
        # near-boundary crawls at float resolution.
        dt = np.clip(cfg.c * d * d, 1e-18, cfg.dt_max)
        dt = np.maximum(dt, 4e-16 * t[alive])
        g = gen.standard_normal((2, alive.size))
        z1 = za + np.sqrt(dt) * (g[0] + 1j * g[1])

        s_dom = _first_domain_exit(domain, za, z1, cfg.boundary_tol)
        if line is not None:
            dx = z1.real - za.real
            s_line = np.where(z1.real >= line,
                              (line - za.real) / np.where(dx == 0, 1.0, dx),
                              np.inf)
        else:
            s_line = np.full(alive.size, np.inf)

        dom_exit = s_dom <= s_line
        dom_exit &= np.isfinite(s_dom)
        if np.any(dom_exit):
            idx = alive[dom_exit]
            p = domain.project(za[dom_exit]
                               + (z1 - za)[dom_exit] * s_dom[dom_exit])
            exit_pt[idx] = p
            labels[idx] = domain.label_codes(p)
            exit_t[idx] = t[idx] + s_dom[dom_exit] * dt[dom_exit]
            ok[idx] = True
        line_exit = s_line < s_dom
        if np.any(line_exit):
            idx = alive[line_exit]
            zc = za[line_exit] + (z1 - za)[line_exit] * s_line[line_exit]
            exit_pt[idx] = line + 1j * zc.imag
            labels[idx] = int(BoundaryLabel.GENERIC)
            exit_t[idx] = t[idx] + s_line[line_exit] * dt[line_exit]
            ok[idx] = True
            hit_line[idx] = True

        t[alive] += dt
        steps[alive] += 1
        z[alive] = z1
        finished = dom_exit | line_exit
        keep = ~finished & (steps[alive] < cfg.max_steps)
        alive = alive[keep]

    exit_t = np.where(ok, exit_t, np.nan)
    batch = ExitBatch(exit_point=exit_pt, exit_time=exit_t, label=labels,
                      steps=steps, ok=ok, method=METHOD_EM)
    if line is not None:
        return batch, hit_line
    return batch


def em_exit(domain: Domain, start: complex, cfg: EmConfig,
            rng: RngStream):
    """Single Euler-Maruyama path; an ExitRecord, or a PathSample when
    ``cfg.keep_path`` is set.  Raises MaxStepsExceeded if capped."""
    gen = rng.generator()
    if not cfg.keep_path:
        rec = em_exit_batch(domain, [complex(start)], gen, cfg).record(0)
        if rec.status == STATUS_MAX_STEPS:
            raise MaxStepsExceeded(f"no exit within {cfg.max_steps} steps")
        return rec

    z = complex(start)
    if not domain.contains(np.complex128(z)):
        raise PointOutsideDomain("Euler-Maruyama start outside the domain")
    times = [0.0]
    points = [z]
    t = 0.0
    for step in range(cfg.max_steps):
        d = float(domain.boundary_distance(np.complex128(z)))
        dt = float(np.clip(cfg.c * d * d, 1e-18, cfg.dt_max))
        dt = max(dt, 4e-16 * t)
        g = gen.standard_normal(2)
        z1 = z + math.sqrt(dt) * complex(g[0], g[1])
        s = _first_domain_exit(domain, np.array([z]), np.array([z1]),
                               cfg.boundary_tol)[0]
        if np.isfinite(s):
            p = complex(domain.project(np.complex128(z + (z1 - z) * s)))
            t_exit = t + float(s) * dt
            times.append(t_exit)
            points.append(p)
            rec = ExitRecord(
                exit_point=p, exit_time=t_exit,
                label=BoundaryLabel(int(domain.label_codes(np.complex128(p)))),
                steps=step + 1, method=METHOD_EM)
            return PathSample(times=np.array(times), points=np.array(points),
                              terminal=rec)
        t += dt
        z = z1
        times.append(t)
        points.append(z)
    raise MaxStepsExceeded(f"no exit within {cfg.max_steps} steps")


# ---------------------------------------------------------------------------
# Pushforward under an analytic map
# ---------------------------------------------------------------------------

def pushforward(m: AnalyticMap, path: PathSample,
                image: Domain | None = None) -> PathSample:
    """Image of a sampled path under an analytic map, with the exit clock
    rescaled by the accumulated squared derivative (trapezoid rule).

    The terminal record is remapped and, when ``image`` is given, relabeled
    there; evaluation errors surface if the path touches a cut or pole.
    """
    pts = m.evaluate(path.points)
    speed = np.abs(m.derivative(path.points)) ** 2
    dt = np.diff(path.times)
    sigma = np.concatenate([[0.0], np.cumsum(dt * 0.5 * (speed[:-1] + speed[1:]))])
    new_exit = complex(pts[-1])
    if image is not None:
        label = BoundaryLabel(int(image.label_codes(np.complex128(new_exit))))
    else:
        label = BoundaryLabel.GENERIC
    old = path.terminal
    rec = ExitRecord(exit_point=new_exit, exit_time=float(sigma[-1]),
                     label=label, steps=old.steps, method=old.method,
                     eps=old.eps, status=old.status)
    return PathSample(times=sigma, points=pts, terminal=rec)


# ---------------------------------------------------------------------------
# Reflection coupling across a vertical line
# ---------------------------------------------------------------------------

def _reflect(z, split_re):
    return 2.0 * split_re - np.conj(z)


def reflected_coupling_batch(domain: Domain, start: complex, split_re: float,
                             gen: np.random.Generator, n: int,
                             cfg: EmConfig = EmConfig()):
    """Coupled pairs (B, B_hat): identical until the first hit of the line
    {Re z = split_re} inside the domain, mirror images across it afterward.

    Both copies ride one underlying Euler-Maruyama path, so all randomness is
    shared.  Within a crossing step, events are ordered by their position
    along the segment: a line hit counts only if it precedes the domain exit,
    and the mirror copy's remainder of the step is reflected from the hit
    point on.  Returns (batch, batch_hat, hit_line, t_hit).
    """
    start = complex(start)
    if not (domain.contains(np.complex128(start)) and start.real < split_re):
        raise BadStart("coupling needs an interior start left of the line")

    z = np.full(n, start, dtype=complex)       # the underlying Brownian path
    t = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)
    t_hit = np.full(n, np.nan)

    def arrays():
        return (np.full(n, np.nan, dtype=complex), np.full(n, np.nan),
                np.full(n, _LABEL_NONE, dtype=np.int64), np.zeros(n, dtype=bool))

    pt_b, t_b, lab_b, ok_b = arrays()
    pt_h, t_h, lab_h, ok_h = arrays()

    def record(pt, tt, lab, okk, idx, points, times):
        p = domain.project(points)
        pt[idx] = p
        lab[idx] = domain.label_codes(p)
        tt[idx] = times
        okk[idx] = True

    alive = np.arange(n)                       # paths with either copy alive
    while alive.size:
        m = alive.size
        za = z[alive]
        pre = ~hit[alive]
        ha = np.where(pre, za, _reflect(za, split_re))
        d_b = np.where(ok_b[alive], np.inf, domain.boundary_distance(za))
        d_h = np.where(ok_h[alive], np.inf, domain.boundary_distance(ha))
        d = np.minimum(d_b, d_h)
        d = np.where(pre, np.minimum(d, np.abs(za.real - split_re)), d)
        dt = np.clip(cfg.c * d * d, 1e-18, cfg.dt_max)
        dt = np.maximum(dt, 4e-16 * t[alive])
        g = gen.standard_normal((2, m))
        z1 = za + np.sqrt(dt) * (g[0] + 1j * g[1])

        # Positions along [za, z1] of the two possible events.
        s_dom = _first_domain_exit(domain, za, z1, cfg.boundary_tol)
        dx = z1.real - za.real
        s_line = np.where(pre & (z1.real >= split_re),
                          (split_re - za.real) / np.where(dx == 0, 1.0, dx),
                          np.inf)

        # B exits whenever the underlying path leaves the domain.
        b_exit = np.isfinite(s_dom) & ~ok_b[alive]
        if np.any(b_exit):
            pts = za[b_exit] + (z1 - za)[b_exit] * s_dom[b_exit]
            record(pt_b, t_b, lab_b, ok_b, alive[b_exit], pts,
                   t[alive][b_exit] + s_dom[b_exit] * dt[b_exit])

        newhit = s_line < s_dom

        # Mirror copy before any line hit is B itself.
        h_with_b = pre & ~newhit & b_exit & ~ok_h[alive]
        if np.any(h_with_b):
            idx = alive[h_with_b]
            pt_h[idx] = pt_b[idx]
            lab_h[idx] = lab_b[idx]
            t_h[idx] = t_b[idx]
            ok_h[idx] = True

        # Line hit inside the domain: mirror copy reflects from here on,
        # including the remainder of this very step.
        if np.any(newhit):
            idx = alive[newhit]
            hit[idx] = True
            t_hit[idx] = t[alive][newhit] + s_line[newhit] * dt[newhit]
            z_l = za[newhit] + (z1 - za)[newhit] * s_line[newhit]
            tail_end = _reflect(z1[newhit], split_re)
            s2 = _first_domain_exit(domain, z_l, tail_end, cfg.boundary_tol)
            tail_out = np.isfinite(s2)
            if np.any(tail_out):
                pts = z_l[tail_out] + (tail_end - z_l)[tail_out] * s2[tail_out]
                frac = s_line[newhit][tail_out]
                record(pt_h, t_h, lab_h, ok_h, idx[tail_out], pts,
                       t[alive][newhit][tail_out]
                       + (frac + s2[tail_out] * (1.0 - frac)) * dt[newhit][tail_out])

        # Mirror copy after an earlier line hit follows the reflected segment.
        h1 = _reflect(z1, split_re)
        s_h = _first_domain_exit(domain, ha, h1, cfg.boundary_tol)
        h_exit = ~pre & ~ok_h[alive] & np.isfinite(s_h)
        if np.any(h_exit):
            pts = ha[h_exit] + (h1 - ha)[h_exit] * s_h[h_exit]
            record(pt_h, t_h, lab_h, ok_h, alive[h_exit], pts,
                   t[alive][h_exit] + s_h[h_exit] * dt[h_exit])

        t[alive] += dt
        steps[alive] += 1
        z[alive] = z1
        done = (ok_b[alive] & ok_h[alive]) | (steps[alive] >= cfg.max_steps)
        alive = alive[~done]

    def make(pt, tt, lab, okk):
        return ExitBatch(exit_point=pt, exit_time=np.where(okk, tt, np.nan),
                         label=lab, steps=steps, ok=okk, method=METHOD_EM)

    return make(pt_b, t_b, lab_b, ok_b), make(pt_h, t_h, lab_h, ok_h), hit, t_hit


def reflected_coupling(domain: Domain, start: complex, split_re: float,
                       cfg: EmConfig, rng: RngStream):
    """One coupled pair of exit records (B first, mirror copy second)."""
    b, h, hit, t_hit = reflected_coupling_batch(
        domain, start, split_re, rng.generator(), 1, cfg)
    rb, rh = b.record(0), h.record(0)
    if STATUS_MAX_STEPS in (rb.status, rh.status):
        raise MaxStepsExceeded(f"coupled pair not resolved in {cfg.max_steps} steps")
    return rb, rh
