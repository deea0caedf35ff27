"""Planar geometry primitives: polylines, lengths, areas, distances, clipping.

All operations are pure; ``Polyline`` instances are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _spatial
from .errors import EmbeddednessViolation, InvalidInput, OnBoundary

#: absolute geometric tolerance (plane units) for incidence decisions
TAU_GEO = 1e-9


class Point2(NamedTuple):
    """A point of the plane."""

    x: float
    y: float


class Ball(NamedTuple):
    """Closed disk with positive radius."""

    center: Point2
    radius: float


@dataclass(frozen=True)
class LineSpec:
    """An (infinite) line through ``base`` with unit ``direction``."""

    base: Point2
    direction: Point2

    def __post_init__(self):
        n = math.hypot(self.direction[0], self.direction[1])
        if abs(n - 1.0) > 1e-12:
            raise InvalidInput(f"line direction must be unit length, got norm {n!r}")

    @classmethod
    def from_angle(cls, base, angle: float) -> "LineSpec":
        return cls(Point2(*base), Point2(math.cos(angle), math.sin(angle)))

    @classmethod
    def through(cls, p, q) -> "LineSpec":
        d = (q[0] - p[0], q[1] - p[1])
        n = math.hypot(*d)
        if n == 0:
            raise InvalidInput("cannot define a line through two equal points")
        return cls(Point2(*p), Point2(d[0] / n, d[1] / n))

    @property
    def normal(self) -> Point2:
        return Point2(-self.direction[1], self.direction[0])

    def signed_distance(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        nx, ny = self.normal
        return (pts[..., 0] - self.base[0]) * nx + (pts[..., 1] - self.base[1]) * ny


@dataclass(frozen=True)
class Polyline:
    """Ordered planar vertex chain, open or closed.

    For closed curves the closing edge joins the final to the first vertex
    (the first vertex is not repeated). Consecutive vertices must be
    distinct. ``embedded_checked`` records that a self-intersection test has
    been run on this exact vertex set.
    """

    vertices: np.ndarray
    closed: bool = False
    embedded_checked: bool = field(default=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidInput("vertices must be an (n, 2) array")
        if self.closed and len(v) > 2 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 2:
            raise InvalidInput("a polyline needs at least 2 vertices")
        if not np.isfinite(v).all():
            raise InvalidInput("vertex coordinates must be finite")
        d = np.diff(v, axis=0)
        if (np.hypot(d[:, 0], d[:, 1]) == 0).any():
            raise InvalidInput("consecutive vertices must be distinct")
        if self.closed and np.hypot(*(v[0] - v[-1])) == 0:
            raise InvalidInput("closing edge has zero length")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    # -- basic accessors ---------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable, closed: bool = False, **kw) -> "Polyline":
        return cls(np.asarray(list(points), dtype=float), closed=closed, **kw)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge_starts_ends(self):
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def edge_lengths(self) -> np.ndarray:
        p, q = self.edge_starts_ends()
        return np.hypot(*(q - p).T)

    def is_embedded(self) -> bool:
        return not _self_intersects(self)

    def checked(self) -> "Polyline":
        """Return a copy flagged embedded-checked (raises if not embedded)."""
        if not self.is_embedded():
            raise EmbeddednessViolation("polyline intersects itself")
        return Polyline(self.vertices, self.closed, embedded_checked=True)


# ---------------------------------------------------------------------------
# lengths, areas
# ---------------------------------------------------------------------------


def polyline_length(p: Polyline) -> float:
    """Total Euclidean length, including the closing edge of closed curves."""
    return float(p.edge_lengths().sum())


def signed_area(p: Polyline) -> float:
    """Shoelace area; positive for counterclockwise closed curves."""
    if not p.closed:
        raise InvalidInput("signed_area requires a closed polyline")
    v = p.vertices
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def enclosed_area(p: Polyline) -> float:
    """Area enclosed by a closed embedded polyline (orientation-independent)."""
    if not p.closed:
        raise InvalidInput("enclosed_area requires a closed polyline")
    if not p.embedded_checked and _self_intersects(p):
        raise EmbeddednessViolation("enclosed_area requires an embedded polyline")
    return abs(signed_area(p))


# ---------------------------------------------------------------------------
# self-intersection
# ---------------------------------------------------------------------------


def _self_intersects(p: Polyline) -> bool:
    P, Q = p.edge_starts_ends()
    m = len(P)
    lens = np.hypot(*(Q - P).T)
    cell = 2.0 * max(float(np.median(lens)), 1e-300)
    pairs = _spatial.candidate_pairs_self(P, Q, cell)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        if p.closed:
            adjacent = ((j - i) % m == 1) | ((i - j) % m == 1)
        else:
            adjacent = np.abs(i - j) == 1
        i, j = i[~adjacent], j[~adjacent]
        if len(i):
            A0, A1, B0, B1 = P[i], Q[i], P[j], Q[j]
            if _spatial.proper_intersections(A0, A1, B0, B1).any():
                return True
            # non-adjacent touching (vertex-on-edge, collinear overlap)
            if _spatial.segments_touch(A0, A1, B0, B1, 0.0).any():
                return True
    # adjacent fold-back: next edge doubling back over the previous one
    d = Q - P
    if p.closed:
        d2 = np.roll(d, -1, axis=0)
        cross = d[:, 0] * d2[:, 1] - d[:, 1] * d2[:, 0]
        dot = (d * d2).sum(axis=1)
    else:
        cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
        dot = (d[:-1] * d[1:]).sum(axis=1)
    return bool(((cross == 0) & (dot < 0)).any())


# ---------------------------------------------------------------------------
# sampling and distances
# ---------------------------------------------------------------------------


def sample_points(p: Polyline, spacing: float) -> np.ndarray:
    """Points on the trace at most ``spacing`` apart, including all vertices."""
    if spacing <= 0:
        raise InvalidInput("spacing must be positive")
    P, Q = p.edge_starts_ends()
    lens = np.hypot(*(Q - P).T)
    n = np.maximum(1, np.ceil(lens / spacing).astype(np.int64))
    total = int(n.sum())
    if total > 20_000_000:
        raise InvalidInput("sampling would generate too many points; increase spacing")
    owner = np.repeat(np.arange(len(P)), n)
    offs = np.concatenate(([0], np.cumsum(n)))
    local = np.arange(total) - np.repeat(offs[:-1], n)
    t = local / n[owner]
    pts = P[owner] + t[:, None] * (Q[owner] - P[owner])
    if not p.closed:
        pts = np.vstack([pts, p.vertices[-1]])
    return pts


def distance_to_polyline(points: np.ndarray, p: Polyline) -> np.ndarray:
    """Exact minimum distance from each query point to the trace of ``p``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    P, Q = p.edge_starts_ends()
    m = len(P)
    out = np.full(len(pts), np.inf)
    if m * len(pts) <= 5_000_000:
        # direct chunked evaluation
        for lo in range(0, len(pts), 256):
            chunk = pts[lo : lo + 256]
            d = chunk[:, None, :] - P[None, :, :]
            e = Q - P
            den = (e * e).sum(axis=1)
            t = np.clip((d * e[None, :, :]).sum(axis=2) / den[None, :], 0.0, 1.0)
            proj = P[None, :, :] + t[:, :, None] * e[None, :, :]
            dist = np.hypot(*(chunk[:, None, :] - proj).transpose(2, 0, 1))
            out[lo : lo + 256] = dist.min(axis=1)
        return out
    # large case: vertex KD-tree prefilter, then exact on candidate segments
    tree = cKDTree(p.vertices)
    d_vert, _ = tree.query(pts, workers=-1)
    max_edge = float(p.edge_lengths().max())
    radii = d_vert + 0.5 * max_edge + 1e-12
    neigh = tree.query_ball_point(pts, radii, workers=-1)
    nv = p.n_vertices
    for k, cand in enumerate(neigh):
        cand = np.asarray(cand, dtype=np.int64)
        segs = np.unique(np.concatenate([cand, cand - 1]))
        if p.closed:
            segs = segs % nv
        else:
            segs = segs[(segs >= 0) & (segs < m)]
        A, B = P[segs], Q[segs]
        e = B - A
        den = (e * e).sum(axis=1)
        den[den == 0] = 1.0
        t = np.clip(((pts[k] - A) * e).sum(axis=1) / den, 0.0, 1.0)
        proj = A + t[:, None] * e
        out[k] = np.hypot(*(pts[k] - proj).T).min()
    return out


def hausdorff_distance(a: Polyline, b: Polyline, max_err: float | None = None) -> float:
    """Symmetric Hausdorff distance between the traces of two polylines.

    Computed as the exact Hausdorff distance between dense on-trace sample
    sets; the sampling error is at most half the sample spacing, and the
    default spacing guarantees an error below the longest edge. Pass
    ``max_err`` for a tighter answer. The sampled value is a true metric,
    so symmetry and the triangle inequality hold to rounding error.
    """
    if max_err is None:
        spacing = max(float(a.edge_lengths().max()), float(b.edge_lengths().max()))
    else:
        if max_err <= 0:
            raise InvalidInput("max_err must be positive")
        spacing = 2.0 * max_err
    sa = sample_points(a, spacing)
    sb = sample_points(b, spacing)
    d_ab = cKDTree(sb).query(sa, workers=-1)[0].max()
    d_ba = cKDTree(sa).query(sb, workers=-1)[0].max()
    return float(max(d_ab, d_ba))


def min_distance_between(a: Polyline, b: Polyline) -> float:
    """Exact minimum distance between two polyline traces."""
    Pa, Qa = a.edge_starts_ends()
    Pb, Qb = b.edge_starts_ends()
    lens = np.concatenate([a.edge_lengths(), b.edge_lengths()])
    cell = 4.0 * max(float(np.median(lens)), 1e-300)
    best = np.inf
    # coarse pass: vertex tree bound, then exact pass over near pairs
    d0 = cKDTree(b.vertices).query(a.vertices, workers=-1)[0].min()
    best = min(best, float(d0))
    pairs = _spatial.candidate_pairs_between(Pa, Qa, Pb, Qb, cell)
    if len(pairs):
        d = _spatial._segment_pair_distance(Pa[pairs[:, 0]], Qa[pairs[:, 0]], Pb[pairs[:, 1]], Qb[pairs[:, 1]])
        best = min(best, float(d.min()))
        return best
    # no near pairs: fall back to exact distance via per-vertex queries
    da = distance_to_polyline(a.vertices, b).min()
    db = distance_to_polyline(b.vertices, a).min()
    return float(min(best, da, db))


# ---------------------------------------------------------------------------
# clipping to a ball
# ---------------------------------------------------------------------------


def _edge_ball_interval(p0, p1, c, r):
    """Sub-interval of [0, 1] of the edge inside the closed ball, or None.

    Tangent grazes (discriminant within tolerance of zero) count as no
    intersection: a single touch point has zero length.
    """
    d = p1 - p0
    f = p0 - c
    A = float(d @ d)
    B = 2.0 * float(f @ d)
    C = float(f @ f) - r * r
    if A == 0:
        return None
    disc = B * B - 4 * A * C
    if disc <= TAU_GEO * A * r * r:
        return None
    s = math.sqrt(disc)
    t0 = (-B - s) / (2 * A)
    t1 = (-B + s) / (2 * A)
    lo, hi = max(t0, 0.0), min(t1, 1.0)
    if hi <= lo:
        return None
    return lo, hi


def restrict_to_ball(p: Polyline, ball: Ball) -> list[Polyline]:
    """Maximal sub-polylines of ``p`` inside the closed ball.

    Edges are clipped exactly at the circle. Returns the input itself when a
    closed curve lies entirely inside.
    """
    if ball.radius <= 0:
        raise InvalidInput("ball radius must be positive")
    c = np.asarray(ball.center, dtype=float)
    r = float(ball.radius)
    P, Q = p.edge_starts_ends()
    pieces: list[np.ndarray] = []
    current: list[np.ndarray] = []

    inside = np.hypot(*(p.vertices - c).T) <= r + TAU_GEO
    if inside.all():
        if p.closed:
            return [p]
        return [Polyline(p.vertices, closed=False)]

    for i in range(len(P)):
        iv = _edge_ball_interval(P[i], Q[i], c, r)
        if iv is None:
            if current:
                pieces.append(np.array(current))
                current = []
            continue
        lo, hi = iv
        a = P[i] if lo == 0.0 else P[i] + lo * (Q[i] - P[i])
        b = Q[i] if hi == 1.0 else P[i] + hi * (Q[i] - P[i])
        if not current:
            current = [a, b]
        else:
            if np.hypot(*(current[-1] - a)) > TAU_GEO:
                pieces.append(np.array(current))
                current = [a, b]
            else:
                current.append(b)
        if hi < 1.0:
            pieces.append(np.array(current))
            current = []
    if current:
        pieces.append(np.array(current))
    # a closed curve may wrap: merge last piece into first
    if p.closed and len(pieces) >= 2:
        if np.hypot(*(pieces[-1][-1] - pieces[0][0])) <= TAU_GEO:
            pieces[0] = np.vstack([pieces[-1], pieces[0][1:]])
            pieces.pop()
    out = []
    for arr in pieces:
        keep = np.concatenate(([True], np.hypot(*np.diff(arr, axis=0).T) > 0))
        arr = arr[keep]
        if len(arr) >= 2:
            out.append(Polyline(arr, closed=False))
    return out


# ---------------------------------------------------------------------------
# arclength resampling
# ---------------------------------------------------------------------------


def resample_by_arclength(p: Polyline, h: float) -> Polyline:
    """Resample at uniform arclength spacing close to ``h``.

    Output vertices lie on the input trace; spacing is length/round(length/h),
    which stays within [h/2, 2h]. Endpoints of open curves are preserved.
    """
    if h <= 0:
        raise InvalidInput("spacing must be positive")
    L = polyline_length(p)
    if h >= L:
        raise InvalidInput(f"spacing {h!r} must be smaller than curve length {L!r}")
    seg_lens = p.edge_lengths()
    cum = np.concatenate(([0.0], np.cumsum(seg_lens)))
    if p.closed:
        n = max(3, round(L / h))
        s = np.arange(n) * (L / n)
    else:
        n = max(1, round(L / h))
        s = np.arange(n + 1) * (L / n)
        s[-1] = L
    idx = np.minimum(np.searchsorted(cum, s, side="right") - 1, len(seg_lens) - 1)
    t = (s - cum[idx]) / seg_lens[idx]
    P, Q = p.edge_starts_ends()
    pts = P[idx] + t[:, None] * (Q[idx] - P[idx])
    if not p.closed:
        pts[0] = p.vertices[0]
        pts[-1] = p.vertices[-1]
    return Polyline(pts, closed=p.closed)


# ---------------------------------------------------------------------------
# point-in-region
# ---------------------------------------------------------------------------


def point_in_region(p: Polyline, q) -> bool:
    """Even-odd containment test for a closed embedded polyline.

    Raises :class:`OnBoundary` when ``q`` is within ``TAU_GEO`` of the trace,
    so boundary points are never silently classified.
    """
    if not p.closed:
        raise InvalidInput("point_in_region requires a closed polyline")
    q = np.asarray(q, dtype=float)
    if float(distance_to_polyline(q[None, :], p)[0]) <= TAU_GEO:
        raise OnBoundary(f"query point {tuple(q)} lies on the curve")
    v = p.vertices
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    straddle = (y0 > q[1]) != (y1 > q[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (q[1] - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (q[0] < xint)
    return bool(hits.sum() % 2 == 1)


def winding_number(p: Polyline, q) -> int:
    """Signed winding number via summed angle increments (test oracle)."""
    v = p.vertices - np.asarray(q, dtype=float)
    ang = np.arctan2(v[:, 1], v[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]) if p.closed else ang)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return int(round(float(d.sum()) / (2 * np.pi)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def polyline_to_json(p: Polyline) -> dict:
    return {"closed": p.closed, "vertices": p.vertices.tolist()}


def polyline_from_json(obj: dict) -> Polyline:
    return Polyline(np.asarray(obj["vertices"], dtype=float), closed=bool(obj["closed"]))


def write_polyline_csv(p: Polyline, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(dumps_polyline_csv(p))


def dumps_polyline_csv(p: Polyline) -> str:
    buf = io.StringIO()
    buf.write(f"# closed={'true' if p.closed else 'false'}\n")
    buf.write("x,y\n")
    for x, y in p.vertices:
        buf.write(f"{x:.17g},{y:.17g}\n")
    return buf.getvalue()


def read_polyline_csv(path) -> Polyline:
    closed = False
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "closed=" in line:
                    closed = line.split("closed=")[1].strip().lower() == "true"
                continue
            if line.lower().startswith("x,"):
                continue
            a, b = line.split(",")
            rows.append((float(a), float(b)))
    return Polyline(np.asarray(rows, dtype=float), closed=closed)


def write_polyline_json(p: Polyline, path) -> None:
    with open(path, "w") as fh:
        json.dump(polyline_to_json(p), fh)


def read_polyline_json(path) -> Polyline:
    with open(path) as fh:
        return polyline_from_json(json.load(fh))
