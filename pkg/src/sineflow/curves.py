"""Curve generators: the topologist's sine curve, nested approximation
families, translating solitons (grim reapers) and shrinking circles.

The sine curve is the closure of ``y = sin(1/x)`` near ``x = 0``,
compactified by the vertical segment ``V = {0} x [-1, 1]`` and a smooth arc
joining the loose ends. Finite representations truncate the graph at a
configurable abscissa; the truncation jump is placed at a graph maximum so
the closing edge runs along ``y = 1`` and stays clear of everything else.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline
import shapely
from shapely.geometry import Polygon, box
from shapely.geometry.polygon import orient

from .errors import (
    ConstructionError,
    DomainError,
    EmptyCurve,
    Extinct,
    InvalidInput,
    OutOfHypothesis,
    ResolutionError,
)
from .geom_core import TAU_GEO, Point2, Polyline

__all__ = [
    "TSCSpec",
    "ApproxSpec",
    "GrimReaperSpec",
    "ApproxFamily",
    "generate_tsc",
    "generate_inner_approx",
    "generate_outer_approx",
    "build_family",
    "sample_sine_graph",
    "eval_grim_reaper",
    "grim_reaper_slope",
    "sample_grim_reaper",
    "grim_reaper_crossing_certificate",
    "sample_circle",
    "omega_graph_count",
    "top_extremum_at_or_below",
]

#: x-coordinates 2/((4k+1) pi) are abscissae of graph maxima (sin(1/x) = 1)
def top_extremum_at_or_below(x: float) -> float:
    """Largest abscissa of the form 2/((4k+1) pi) that is <= x."""
    if x <= 0:
        raise InvalidInput("abscissa must be positive")
    k = max(0, math.ceil((2.0 / (math.pi * x) - 1.0) / 4.0))
    return 2.0 / ((4 * k + 1) * math.pi)


# default control points of the connecting arc for beta = 1; the arc leaves
# (0,-1) with slope -6, dips below y = -1 across the whole oscillation zone,
# swings around to the right of x = beta and comes back up to the graph end.
_DEFAULT_ARC_CTRL = (
    (0.0, -1.0),
    (0.02, -1.12),
    (0.127, -1.35),
    (0.5, -1.75),
    (1.1, -1.6),
    (1.35, -0.2),
    (1.0, math.sin(1.0)),
)


@dataclass(frozen=True)
class TSCSpec:
    """Parameters of the generated topologist's sine curve.

    beta      right endpoint of the sine-graph domain, in (0, 1]
    arc_ctrl  control points of the quintic connecting arc, ordered from
              (0, -1) to (beta, sin(1/beta))
    n_graph   vertex budget for the graph portion
    x_min     truncation cutoff; snapped down to a graph maximum
    """

    beta: float = 1.0
    arc_ctrl: tuple = ()
    n_graph: int = 600_000
    x_min: float = 2.0 / (41.0 * math.pi)

    def __post_init__(self):
        if not 0 < self.beta <= 1.0:
            raise InvalidInput("beta must lie in (0, 1]")
        if not 0 < self.x_min < self.beta:
            raise InvalidInput("x_min must lie in (0, beta)")
        if not self.arc_ctrl:
            ctrl = tuple(
                (x * self.beta, y) for x, y in _DEFAULT_ARC_CTRL[:-1]
            ) + ((self.beta, math.sin(1.0 / self.beta)),)
            object.__setattr__(self, "arc_ctrl", ctrl)
        a0 = self.arc_ctrl[0]
        a1 = self.arc_ctrl[-1]
        if math.hypot(a0[0], a0[1] + 1.0) > TAU_GEO:
            raise InvalidInput("arc must start at (0, -1)")
        if math.hypot(a1[0] - self.beta, a1[1] - math.sin(1.0 / self.beta)) > TAU_GEO:
            raise InvalidInput("arc must end at (beta, sin(1/beta))")

    @property
    def x_min_snapped(self) -> float:
        return top_extremum_at_or_below(self.x_min)


@dataclass(frozen=True)
class ApproxSpec:
    """Scale rules for the nested approximation family.

    delta(n)  inward/outward offset distance, default 2^-n / 8
    a(n)      graph truncation abscissa, default 2/((4n+1) pi) (a maximum)
    rho(n)    cap corner fillet radius, default delta(n)/4
    omega     target bound on vertical-line crossings of the inner curves
    """

    omega: int = 4
    delta_base: float = 0.125
    a_coeff: float = 2.0
    rho_ratio: float = 0.25

    def __post_init__(self):
        if self.omega < 2:
            raise InvalidInput("omega must be at least 2")
        if not 0 < self.rho_ratio < 0.5:
            raise InvalidInput("rho must stay below delta/2")
        if self.delta_base <= 0 or self.a_coeff <= 0:
            raise InvalidInput("scale rules must be positive")

    def delta(self, n: int) -> float:
        return self.delta_base * 2.0 ** (-n)

    def a(self, n: int) -> float:
        return self.a_coeff / ((4 * n + 1) * math.pi)

    def rho(self, n: int) -> float:
        return self.rho_ratio * self.delta(n)


@dataclass(frozen=True)
class GrimReaperSpec:
    """Translating soliton u(x, t) = -(1/c) ln(sec(cx)) + 3 + lam - c t.

    The graph translates downward with speed ``c`` on the strip
    |x| < pi/(2c); ``lam`` shifts the family vertically.
    """

    c: float
    lam: float = 0.0

    def __post_init__(self):
        if self.c <= 0:
            raise InvalidInput("speed parameter c must be positive")

    @property
    def half_width(self) -> float:
        return math.pi / (2.0 * self.c)


@dataclass(frozen=True)
class ApproxFamily:
    """Nested inner and outer approximations of the sine curve."""

    inner: tuple
    outer: tuple
    spec: ApproxSpec
    tsc: TSCSpec

    @property
    def n_max(self) -> int:
        return len(self.inner)


# ---------------------------------------------------------------------------
# sine graph sampling
# ---------------------------------------------------------------------------


def _graph_w_step(tol: float, x_hi: float) -> float:
    # chord error of one step is dw^2 (1 + 2x)/8 <= tol
    return math.sqrt(8.0 * tol / (1.0 + 2.0 * x_hi))


def _sine_graph_points(x_lo: float, x_hi: float, tol: float, budget: int | None = None) -> np.ndarray:
    """Graph of sin(1/x) on [x_lo, x_hi], ordered by increasing x.

    Vertices are uniform in w = 1/x, which grades the density like the local
    slope and keeps the chord deviation from the analytic graph below tol.
    """
    if not 0 < x_lo < x_hi:
        raise InvalidInput("need 0 < x_lo < x_hi")
    w_lo, w_hi = 1.0 / x_hi, 1.0 / x_lo
    dw = _graph_w_step(tol, x_hi)
    n = int(math.ceil((w_hi - w_lo) / dw))
    if budget is not None and n + 1 > budget:
        raise ResolutionError(
            f"graph needs {n + 1} vertices to reach chord error {tol:g}, budget is {budget}"
        )
    w = np.linspace(w_lo, w_hi, n + 1)
    x = 1.0 / w[::-1]
    x[0], x[-1] = x_lo, x_hi
    return np.column_stack([x, np.sin(1.0 / x)])


def sample_sine_graph(x_lo: float, x_hi: float, tol: float = 1e-8) -> Polyline:
    """Open polyline tracing y = sin(1/x) on [x_lo, x_hi]."""
    return Polyline(_sine_graph_points(x_lo, x_hi, tol), closed=False)


# ---------------------------------------------------------------------------
# connecting arc
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def _arc_points_cached(ctrl: tuple, tol: float) -> np.ndarray:
    pts = np.asarray(ctrl, dtype=float)
    chord = np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))))
    d0 = pts[1] - pts[0]
    d1 = pts[-1] - pts[-2]
    d0 = d0 / np.hypot(*d0)
    d1 = d1 / np.hypot(*d1)
    spl = make_interp_spline(
        chord,
        pts,
        k=5,
        bc_type=([(1, d0), (2, np.zeros(2))], [(1, d1), (2, np.zeros(2))]),
    )
    # uniform parameter sampling dense enough for the chord error target
    t_probe = np.linspace(chord[0], chord[-1], 2001)
    acc = np.hypot(*spl.derivative(2)(t_probe).T).max()
    dt = math.sqrt(8.0 * tol / max(acc, 1e-12))
    n = int(math.ceil((chord[-1] - chord[0]) / dt))
    t = np.linspace(chord[0], chord[-1], max(n, 64) + 1)
    out = spl(t)
    out[0], out[-1] = pts[0], pts[-1]
    return out


def _arc_points(tsc: TSCSpec, tol: float) -> np.ndarray:
    return _arc_points_cached(tuple(map(tuple, tsc.arc_ctrl)), float(tol))


# ---------------------------------------------------------------------------
# the sine curve and its ring
# ---------------------------------------------------------------------------


def _tsc_ring(tsc: TSCSpec, graph_tol: float, x_cut: float, budget: int | None = None) -> np.ndarray:
    """Counterclockwise closed ring of the truncated sine curve.

    Traversal: V top to bottom, connecting arc, graph from beta back to
    x_cut, then the closing jump along y ~ 1 back to the top of V.
    """
    graph = _sine_graph_points(x_cut, tsc.beta, graph_tol, budget)
    arc = _arc_points(tsc, min(graph_tol, 1e-8))
    parts = [
        np.array([[0.0, 1.0], [0.0, -1.0]]),
        arc[1:],              # (0,-1) ... (beta, sin(1/beta))
        graph[::-1][1:],      # graph back down to (x_cut, ~1)
    ]
    ring = np.vstack(parts)
    # drop consecutive duplicates introduced by exact endpoint stitching
    keep = np.concatenate(([True], np.hypot(*np.diff(ring, axis=0).T) > 0))
    return ring[keep]


@functools.lru_cache(maxsize=4)
def _generate_tsc_cached(tsc: TSCSpec) -> Polyline:
    ring = _tsc_ring(tsc, graph_tol=10.0 * TAU_GEO, x_cut=tsc.x_min_snapped, budget=tsc.n_graph)
    return Polyline(ring, closed=True).checked()


def generate_tsc(spec: TSCSpec) -> Polyline:
    """Closed polyline tracing the truncated topologist's sine curve.

    The graph is sampled with chord error below 10 * TAU_GEO; the vertical
    segment {0} x [-1, 1] appears with exact endpoints. The truncation jump
    at ``x_min_snapped`` runs along y = 1 (the cutoff sits at a graph
    maximum) and is the documented finite-representation artifact.
    """
    return _generate_tsc_cached(spec)


# ---------------------------------------------------------------------------
# offset approximations
# ---------------------------------------------------------------------------


def _quad_segs(delta: float) -> int:
    # arc chord error delta * dphi^2 / 8 <= delta^2 / 2  =>  dphi = 2 sqrt(delta)
    return max(16, int(math.ceil(math.pi / (4.0 * math.sqrt(delta)))) + 1)


def _largest_polygon(geom, delta: float):
    if geom.is_empty:
        raise ConstructionError("offset collapsed to the empty set; decrease delta")
    if geom.geom_type == "Polygon":
        return geom
    parts = sorted(geom.geoms, key=lambda g: g.area, reverse=True)
    if len(parts) > 1 and parts[1].area > (4.0 * delta) ** 2:
        raise ConstructionError("offset split the region; decrease delta")
    return parts[0]


def _ring_coords_ccw(poly: Polygon) -> np.ndarray:
    ring = np.asarray(orient(poly, 1.0).exterior.coords)[:-1]
    keep = np.concatenate(([True], np.hypot(*np.diff(ring, axis=0).T) > 0))
    ring = ring[keep]
    if np.hypot(*(ring[0] - ring[-1])) == 0:
        ring = ring[:-1]
    return ring


def _point_before(ring: np.ndarray, k: int, s: float):
    """Point at arclength s before vertex k. Returns (point, q) with the
    point on edge (q, q+1); q is the last vertex kept before it."""
    n = len(ring)
    remaining = s
    idx = k
    for _ in range(n):
        prv = (idx - 1) % n
        edge = ring[prv] - ring[idx]
        el = math.hypot(*edge)
        if remaining <= el:
            return ring[idx] + (remaining / el) * edge, prv
        remaining -= el
        idx = prv
    raise ConstructionError("fillet walk exhausted the ring")


def _point_after(ring: np.ndarray, k: int, s: float):
    """Point at arclength s after vertex k. Returns (point, r) with the
    point on edge (r, r+1); r+1 is the first vertex kept after it."""
    n = len(ring)
    remaining = s
    idx = k
    for _ in range(n):
        nxt = (idx + 1) % n
        edge = ring[nxt] - ring[idx]
        el = math.hypot(*edge)
        if remaining <= el:
            return ring[idx] + (remaining / el) * edge, idx
        remaining -= el
        idx = nxt
    raise ConstructionError("fillet walk exhausted the ring")


def _fillet_corners(ring: np.ndarray, corner_idx: list[int], rho: float) -> np.ndarray:
    """Round the listed ring corners with quadratic-Bezier fillets.

    The fillet replaces the boundary within arclength ``rho`` of each corner;
    apex curvature is ~1.4/rho, adequate for mesh-scale smoothness.
    """
    n = len(ring)
    t_bez = np.linspace(0.0, 1.0, 12)[1:-1][:, None]
    drop = np.zeros(n, dtype=bool)
    inserts: dict[int, np.ndarray] = {}
    for k in corner_idx:
        a, q = _point_before(ring, k, rho)
        b, r = _point_after(ring, k, rho)
        c = ring[k]
        arcpts = (1 - t_bez) ** 2 * a + 2 * t_bez * (1 - t_bez) * c + t_bez**2 * b
        seg = np.vstack([a, arcpts, b])
        # drop the replaced vertices (q, r] going forward, cyclically
        j = (q + 1) % n
        while True:
            drop[j] = True
            if j == r:
                break
            j = (j + 1) % n
        if q in inserts:
            raise ConstructionError("fillet regions overlap; decrease rho")
        inserts[q] = seg
    out = []
    for pos in range(n):
        if not drop[pos]:
            out.append(ring[pos])
        if pos in inserts:
            out.append(inserts[pos])
    stacked = np.vstack([np.atleast_2d(p) for p in out])
    keep = np.concatenate(([True], np.hypot(*np.diff(stacked, axis=0).T) > 1e-15))
    return stacked[keep]


def generate_inner_approx(tsc: TSCSpec, spec: ApproxSpec, n: int) -> Polyline:
    """Closed curve strictly inside the sine-curve region.

    Construction: erode the region bounded by the graph truncated at
    ``a(n)``, the arc and V by ``delta(n)`` (trimmed offset via polygon
    buffering), then cut at the vertical line x = a(n) + delta(n) and round
    the two cap corners with radius ``rho(n)``.
    """
    if n < 1:
        raise InvalidInput("family index must be >= 1")
    d, a, rho = spec.delta(n), spec.a(n), spec.rho(n)
    a = top_extremum_at_or_below(a * (1.0 + 1e-12))
    tol = min(1e-6, 0.25 * d * d)
    ring = _tsc_ring(tsc, tol, x_cut=a)
    poly = Polygon(ring)
    if not poly.is_valid:
        raise ConstructionError("base ring is not a simple polygon")
    eroded = _largest_polygon(poly.buffer(-d, quad_segs=_quad_segs(d)), d)
    x_cap = a + d
    bounds = poly.bounds
    clip = box(x_cap, bounds[1] - 1.0, bounds[2] + 1.0, bounds[3] + 1.0)
    clipped = _largest_polygon(eroded.intersection(clip), d)
    out = _ring_coords_ccw(clipped)
    cap = np.flatnonzero(np.abs(out[:, 0] - x_cap) <= 1e-9 * max(1.0, x_cap))
    if len(cap) < 2:
        raise ConstructionError("cap segment not found after clipping")
    # cap vertices form one cyclic run; its extremes are the two corners
    gaps = np.flatnonzero(np.diff(cap) > 1)
    if len(gaps) == 0:
        corners = [int(cap[0]), int(cap[-1])]
    elif len(gaps) == 1 and cap[0] == 0 and cap[-1] == len(out) - 1:
        corners = [int(cap[gaps[0] + 1]), int(cap[gaps[0]])]
    else:
        raise ConstructionError("clip line cut the region more than once; decrease delta")
    out = _fillet_corners(out, corners, rho)
    return Polyline(out, closed=True).checked()


def generate_outer_approx(tsc: TSCSpec, spec: ApproxSpec, n: int) -> Polyline:
    """Closed curve strictly outside the closed sine-curve region.

    The outward ``delta(n)`` offset of the full truncated curve; no cap is
    needed. Interior holes created when the offset pinches oscillation gaps
    are dropped (the exterior ring is returned).
    """
    if n < 1:
        raise InvalidInput("family index must be >= 1")
    d = spec.delta(n)
    tol = min(1e-6, 0.25 * d * d)
    ring = _tsc_ring(tsc, tol, x_cut=tsc.x_min_snapped)
    poly = Polygon(ring)
    if not poly.is_valid:
        raise ConstructionError("base ring is not a simple polygon")
    grown = _largest_polygon(poly.buffer(d, quad_segs=_quad_segs(d)), d)
    out = _ring_coords_ccw(grown)
    return Polyline(out, closed=True).checked()


def build_family(tsc: TSCSpec, spec: ApproxSpec, n_max: int) -> ApproxFamily:
    """Generate inner and outer approximations for n = 1 .. n_max."""
    inner = tuple(generate_inner_approx(tsc, spec, n) for n in range(1, n_max + 1))
    outer = tuple(generate_outer_approx(tsc, spec, n) for n in range(1, n_max + 1))
    return ApproxFamily(inner=inner, outer=outer, spec=spec, tsc=tsc)


# ---------------------------------------------------------------------------
# grim reaper
# ---------------------------------------------------------------------------


def eval_grim_reaper(spec: GrimReaperSpec, x, t: float = 0.0):
    """Height of the translating graph at abscissa x and time t."""
    if t < 0:
        raise InvalidInput("time must be nonnegative")
    x_arr = np.asarray(x, dtype=float)
    if (np.abs(x_arr) >= spec.half_width - TAU_GEO).any():
        raise DomainError(f"|x| must stay below pi/(2c) = {spec.half_width:.6g}")
    val = np.log(np.cos(spec.c * x_arr)) / spec.c + 3.0 + spec.lam - spec.c * t
    return float(val) if np.isscalar(x) or x_arr.ndim == 0 else val


def grim_reaper_slope(spec: GrimReaperSpec, x):
    """Spatial slope u'(x) = -tan(cx) of the translating graph."""
    x_arr = np.asarray(x, dtype=float)
    if (np.abs(x_arr) >= spec.half_width - TAU_GEO).any():
        raise DomainError("x outside the open strip")
    val = -np.tan(spec.c * x_arr)
    return float(val) if np.isscalar(x) or x_arr.ndim == 0 else val


def sample_grim_reaper(spec: GrimReaperSpec, t: float, y_floor: float, h: float) -> Polyline:
    """Open polyline of the grim reaper graph at time t, above ``y_floor``.

    Vertices are uniform in arclength with spacing <= h, symmetric about
    x = 0, with the apex vertex included exactly.
    """
    if h <= 0:
        raise InvalidInput("spacing must be positive")
    apex = 3.0 + spec.lam - spec.c * t
    drop = apex - y_floor
    if drop <= 0:
        raise EmptyCurve(f"y_floor {y_floor!r} is above the apex {apex!r}")
    c = spec.c
    # u(x_b) = y_floor  =>  cos(c x_b) = exp(-c drop)
    x_b = math.acos(math.exp(-c * drop)) / c
    # arclength from apex: s(x) = asinh(tan(cx))/c; inverse x(s) = atan(sinh(cs))/c
    S = math.asinh(math.tan(c * x_b)) / c
    n = max(1, math.ceil(S / h))
    k = np.arange(-n, n + 1)
    s = (S / n) * k
    x = np.arctan(np.sinh(c * s)) / c
    x[n] = 0.0
    y = np.log(np.cos(c * x)) / c + apex
    return Polyline(np.column_stack([x, y]), closed=False, embedded_checked=True)


@dataclass(frozen=True)
class CrossingCertificate:
    """Closed-form slope comparison for reaper/sine-graph crossings.

    The reaper at t = 0 spans the band -1 <= y <= 1 exactly over
    [x1, x2]; ``passes`` records that its slope there dominates the
    largest sine-graph slope. ``window_inside_graph`` records whether
    [x1, x2] lands inside the graph domain (0, 1]; the single-crossing
    conclusion needs that as well, and it fails for c below ~pi/2.
    """

    x1: float
    x2: float
    min_slope: float
    max_gamma_slope: float
    passes: bool
    window_inside_graph: bool


def grim_reaper_crossing_certificate(spec: GrimReaperSpec) -> CrossingCertificate:
    """Certificate that the reaper crosses y = sin(1/x) steeply.

    Requires c > 1 and 0 <= lam <= 6. Verifies the closed forms
    u(x1) = 1 and u(x2) = -1 to 1e-9 as a self-check.
    """
    c, lam = spec.c, spec.lam
    if c <= 1.0:
        raise OutOfHypothesis("certificate requires c > 1")
    if not 0.0 <= lam <= 6.0:
        raise OutOfHypothesis("certificate requires 0 <= lam <= 6")
    e1 = math.exp((-2.0 - lam) * c)
    e2 = math.exp((-4.0 - lam) * c)
    x1 = math.acos(e1) / c
    x2 = math.acos(e2) / c
    u1 = eval_grim_reaper(spec, x1)
    u2 = eval_grim_reaper(spec, x2)
    if abs(u1 - 1.0) > 1e-9 or abs(u2 + 1.0) > 1e-9:
        raise ConstructionError("closed-form band endpoints failed verification")
    min_slope = math.sqrt(1.0 - e1 * e1) / e1  # tan(arccos(e1))
    max_gamma_slope = (c / math.acos(e1)) ** 2  # 1/x1^2
    return CrossingCertificate(
        x1=x1,
        x2=x2,
        min_slope=min_slope,
        max_gamma_slope=max_gamma_slope,
        passes=min_slope > max_gamma_slope,
        window_inside_graph=x2 <= 1.0,
    )


# ---------------------------------------------------------------------------
# circles and crossing-count profiles
# ---------------------------------------------------------------------------


def sample_circle(r0: float, t: float, n_vertices: int) -> Polyline:
    """Regular polygon on the shrinking circle of initial radius r0.

    The radius law sqrt(r0^2 - 2t) follows from the constant-rate area loss
    of embedded curves.
    """
    if r0 <= 0:
        raise InvalidInput("radius must be positive")
    if n_vertices < 3:
        raise InvalidInput("need at least 3 vertices")
    if 2.0 * t >= r0 * r0:
        raise Extinct(r0 * r0 / 2.0, None)
    r = math.sqrt(r0 * r0 - 2.0 * t)
    th = np.linspace(0.0, 2.0 * math.pi, n_vertices, endpoint=False)
    return Polyline(np.column_stack([r * np.cos(th), r * np.sin(th)]), closed=True, embedded_checked=True)


def omega_graph_count(p: Polyline) -> int:
    """Maximum number of transversal crossings with any vertical line.

    Swept over the gaps between distinct vertex abscissae; vertical edges
    are degenerate and contribute a single crossing at their abscissa.
    """
    P, Q = p.edge_starts_ends()
    x0, x1 = P[:, 0], Q[:, 0]
    vert = x0 == x1
    lo = np.minimum(x0[~vert], x1[~vert])
    hi = np.maximum(x0[~vert], x1[~vert])
    best = 0
    if len(lo):
        events = np.unique(np.concatenate([lo, hi]))
        if len(events) >= 2:
            mids = 0.5 * (events[:-1] + events[1:])
            lo_s = np.sort(lo)
            hi_s = np.sort(hi)
            active = np.searchsorted(lo_s, mids) - np.searchsorted(hi_s, mids)
            if len(active):
                best = int(active.max())
    if vert.any():
        lo_s = np.sort(lo) if len(lo) else np.empty(0)
        hi_s = np.sort(hi) if len(lo) else np.empty(0)
        for xv in np.unique(x0[vert]):
            strad = 0
            if len(lo_s):
                strad = int(np.searchsorted(lo_s, xv, side="left") - np.searchsorted(hi_s, xv, side="right"))
            n_vert_here = int((x0[vert] == xv).sum())
            best = max(best, strad + n_vert_here)
    return best
