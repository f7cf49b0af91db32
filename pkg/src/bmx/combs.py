"""Iterated half-strip restriction domains and their complements.

The construction starts from the half-strip W0 = {Re z < 0, |Im z| < a[0]}
and its open complement V0.  Each iteration k >= 1 carves a new pair out of
three restricting lines Re z = b[k], Im z = +-a[k]:

* odd k  (b[k] pushed left):   V_k = {Re z > b[k], |Im z| < a[k]} \\ cl(W_{k-1})
* even k (b[k] pushed right):  W_k = {Re z < b[k], |Im z| < a[k]} \\ cl(V_{k-1})

and the partner domain is the open complement of the closure.  V_k and W_k
share their boundary, a single rectilinear curve through infinity, which is
stored explicitly as a polyline (unbounded ends clipped at +-1e6) for exact
distance queries.  The sequences satisfy V_1 c V_3 c V_5 ... and
W_2 c W_4 ... by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadParameters
from .geometry import (FAR_CLIP, Domain, _asarr, _segment_distance,
                       _segment_project)


def default_offsets(n: int) -> list[float]:
    """Fallback cut abscissae b[k] = (-1)^k 4^k, k = 1..n."""
    return [(-1.0) ** k * 4.0 ** k for k in range(1, n + 1)]


def _validate(n: int, a, b) -> None:
    a = list(a)
    b = list(b)
    if len(a) != n + 1 or len(b) != n:
        raise BadParameters(f"need n+1 heights and n offsets for n={n}")
    if a[0] != 1.0:
        raise BadParameters("base half-height a[0] must be 1")
    for k in range(n):
        if a[k + 1] < a[k] + 1.0:
            raise BadParameters("heights must increase by at least 1")
    min_x, max_x = 0.0, 0.0
    for k in range(1, n + 1):
        bk = b[k - 1]
        if k % 2 == 1:
            if bk >= min_x:
                raise BadParameters(
                    f"odd offset b[{k}]={bk} must lie left of {min_x}")
            min_x = bk
        else:
            if bk <= max_x:
                raise BadParameters(
                    f"even offset b[{k}]={bk} must lie right of {max_x}")
            max_x = bk


def _membership(z, n, a, b, want_v):
    """Open membership in V_n or W_n, vectorized over z."""
    z = _asarr(z)
    x, y = z.real, np.abs(z.imag)
    in_w = (x < 0) & (y < a[0])
    in_clw = (x <= 0) & (y <= a[0])
    in_v = ~in_clw
    in_clv = ~in_w
    for k in range(1, n + 1):
        bk = b[k - 1]
        if k % 2 == 1:
            in_v = (x > bk) & (y < a[k]) & ~in_clw
            in_clv = (x >= bk) & (y <= a[k]) & ~in_w
            in_w, in_clw = ~in_clv, ~in_v
        else:
            in_w = (x < bk) & (y < a[k]) & ~in_clv
            in_clw = (x <= bk) & (y <= a[k]) & ~in_v
            in_v, in_clv = ~in_clw, ~in_w
    return in_v if want_v else in_w


def boundary_polyline(n: int, a, b) -> np.ndarray:
    """Vertices of the shared boundary of (V_n, W_n), ends clipped at +-1e6."""
    pts = [(-FAR_CLIP, a[0]), (0.0, a[0]), (0.0, -a[0]), (-FAR_CLIP, -a[0])]
    for k in range(1, n + 1):
        bk = b[k - 1]
        end = FAR_CLIP if k % 2 == 1 else -FAR_CLIP
        inner = [(bk, pts[0][1])] + pts[1:-1] + [(bk, pts[-1][1])]
        pts = [(end, a[k]), (bk, a[k])] + inner + [(bk, -a[k]), (end, -a[k])]
    return np.array([px + 1j * py for px, py in pts])


@lru_cache(maxsize=None)
def _polyline_cached(n: int, a: tuple, b: tuple) -> np.ndarray:
    return boundary_polyline(n, a, b)


@dataclass(frozen=True)
class CombDomain(Domain):
    """One side of the iterated construction; ``side`` is "V" or "W"."""

    n: int
    a: tuple
    b: tuple
    side: str = "V"

    def __post_init__(self):
        if self.side not in ("V", "W"):
            raise BadParameters("comb side must be 'V' or 'W'")
        _validate(self.n, self.a, self.b)

    @property
    def polyline(self) -> np.ndarray:
        return _polyline_cached(self.n, self.a, self.b)

    @property
    def _segments(self):
        p = self.polyline
        return p[:-1], p[1:]

    def contains(self, z):
        return _membership(z, self.n, self.a, self.b, self.side == "V")

    def boundary_distance(self, z):
        z = _asarr(z)
        p, q = self._segments
        d = _segment_distance(z[..., None], p, q)
        return np.min(d, axis=-1)

    def project(self, z):
        z = _asarr(z)
        p, q = self._segments
        d = _segment_distance(z[..., None], p, q)
        k = np.argmin(d, axis=-1)
        feet = _segment_project(z, p[k], q[k])
        return feet

    def probe_box(self):
        xs = [0.0] + list(self.b)
        ys = self.a[-1]
        pad = 2.0 + ys
        return (min(xs) - pad, max(xs) + pad, -ys - pad, ys + pad)


def build_comb(n: int, a, b=None) -> tuple[CombDomain, CombDomain]:
    """The complementary pair (V_n, W_n) after n restriction iterations.

    ``a`` holds n+1 increasing half-heights (a[0] must be 1, steps >= 1);
    ``b`` holds the n cut abscissae, alternating left (negative, odd k) and
    right (positive, even k) strictly beyond all previous cuts.  When ``b``
    is omitted the default schedule (-1)^k 4^k is used.
    """
    if b is None:
        b = default_offsets(n)
    a = tuple(float(v) for v in a)
    b = tuple(float(v) for v in b)
    return (CombDomain(n, a, b, "V"), CombDomain(n, a, b, "W"))
