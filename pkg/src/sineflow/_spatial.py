"""Grid-hash acceleration for segment intersection queries.

Segments are registered into square cells; long segments are chunked so a
chunk never spans more than a 2x2 cell block. Candidate pairs are generated
per cell and tested exactly afterwards.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "segment_grid_cells",
    "candidate_pairs_self",
    "candidate_pairs_between",
    "proper_intersections",
    "segments_touch",
]


def _chunk_segments(P: np.ndarray, Q: np.ndarray, cell: float):
    """Split segments into sub-chords of length <= cell.

    Returns (A, B, owner) where A->B are chunk endpoints and owner maps each
    chunk back to its segment index.
    """
    lens = np.hypot(*(Q - P).T)
    n_chunks = np.maximum(1, np.ceil(lens / cell).astype(np.int64))
    owner = np.repeat(np.arange(len(P)), n_chunks)
    # local chunk index within each segment
    offs = np.concatenate(([0], np.cumsum(n_chunks)))
    local = np.arange(offs[-1]) - np.repeat(offs[:-1], n_chunks)
    t0 = local / n_chunks[owner]
    t1 = (local + 1) / n_chunks[owner]
    A = P[owner] + t0[:, None] * (Q[owner] - P[owner])
    B = P[owner] + t1[:, None] * (Q[owner] - P[owner])
    return A, B, owner


def segment_grid_cells(P: np.ndarray, Q: np.ndarray, cell: float):
    """Map segments to grid cells. Returns (cells, owner) int64 arrays.

    A segment appears once per cell its chunks' bounding boxes overlap.
    """
    A, B, owner = _chunk_segments(P, Q, cell)
    inv = 1.0 / cell
    ax = np.floor(A[:, 0] * inv).astype(np.int64)
    ay = np.floor(A[:, 1] * inv).astype(np.int64)
    bx = np.floor(B[:, 0] * inv).astype(np.int64)
    by = np.floor(B[:, 1] * inv).astype(np.int64)
    lox, hix = np.minimum(ax, bx), np.maximum(ax, bx)
    loy, hiy = np.minimum(ay, by), np.maximum(ay, by)
    # chunk length <= cell, so the bbox spans at most 2 cells per axis
    cells = []
    owners = []
    for dx in (0, 1):
        for dy in (0, 1):
            cx = np.where(dx == 0, lox, hix)
            cy = np.where(dy == 0, loy, hiy)
            cells.append(np.stack([cx, cy], axis=1))
            owners.append(owner)
    cells = np.concatenate(cells)
    owners = np.concatenate(owners)
    # deduplicate (cell, owner) rows
    key = np.stack([cells[:, 0], cells[:, 1], owners], axis=1)
    key = np.unique(key, axis=0)
    return key[:, :2], key[:, 2]


def _pairs_within_groups(order_vals: np.ndarray, payload: np.ndarray):
    """All unordered payload pairs sharing the same order_vals key.

    order_vals must be sorted (lexicographically collapsed to one int key).
    """
    n = len(order_vals)
    if n == 0:
        return np.empty((0, 2), dtype=np.int64)
    starts = np.flatnonzero(np.concatenate(([True], order_vals[1:] != order_vals[:-1])))
    ends = np.concatenate((starts[1:], [n]))
    sizes = ends - starts
    big = sizes >= 2
    if not big.any():
        return np.empty((0, 2), dtype=np.int64)
    out_i = []
    out_j = []
    for s, e in zip(starts[big], ends[big]):
        grp = payload[s:e]
        g = len(grp)
        ii, jj = np.triu_indices(g, k=1)
        out_i.append(grp[ii])
        out_j.append(grp[jj])
    return np.stack([np.concatenate(out_i), np.concatenate(out_j)], axis=1)


def _cell_key(cells: np.ndarray) -> np.ndarray:
    # pack 2D cell coords into one int64 key (coords are small in practice)
    return cells[:, 0] * np.int64(0x9E3779B1) + cells[:, 1]


def candidate_pairs_self(P: np.ndarray, Q: np.ndarray, cell: float) -> np.ndarray:
    """Candidate index pairs (i < j) of possibly intersecting segments."""
    cells, owner = segment_grid_cells(P, Q, cell)
    key = _cell_key(cells)
    srt = np.argsort(key, kind="stable")
    pairs = _pairs_within_groups(key[srt], owner[srt])
    if len(pairs) == 0:
        return pairs
    pairs = np.sort(pairs, axis=1)
    return np.unique(pairs, axis=0)


def candidate_pairs_between(Pa, Qa, Pb, Qb, cell: float) -> np.ndarray:
    """Candidate (i, j) pairs between segment set a and segment set b."""
    ca, oa = segment_grid_cells(Pa, Qa, cell)
    cb, ob = segment_grid_cells(Pb, Qb, cell)
    ka = _cell_key(ca)
    kb = _cell_key(cb)
    # group b by cell, then for each a-entry expand matching b range
    srt_b = np.argsort(kb, kind="stable")
    kb_s, ob_s = kb[srt_b], ob[srt_b]
    lo = np.searchsorted(kb_s, ka, side="left")
    hi = np.searchsorted(kb_s, ka, side="right")
    counts = hi - lo
    if counts.sum() == 0:
        return np.empty((0, 2), dtype=np.int64)
    ai = np.repeat(oa, counts)
    offs = np.concatenate(([0], np.cumsum(counts)))
    idx = np.arange(offs[-1]) - np.repeat(offs[:-1], counts) + np.repeat(lo, counts)
    bj = ob_s[idx]
    pairs = np.stack([ai, bj], axis=1)
    return np.unique(pairs, axis=0)


def _orient(P, Q, R):
    return (Q[:, 0] - P[:, 0]) * (R[:, 1] - P[:, 1]) - (Q[:, 1] - P[:, 1]) * (R[:, 0] - P[:, 0])


def proper_intersections(A0, A1, B0, B1):
    """Boolean mask of proper (transversal, interior) segment crossings."""
    o1 = _orient(A0, A1, B0)
    o2 = _orient(A0, A1, B1)
    o3 = _orient(B0, B1, A0)
    o4 = _orient(B0, B1, A1)
    return (o1 * o2 < 0) & (o3 * o4 < 0)


def segments_touch(A0, A1, B0, B1, tol: float):
    """Mask of segment pairs within distance tol of each other.

    Used for contact detection (tangency / endpoint grazing) after the
    proper-crossing test; exact pairwise segment distance.
    """
    d = _segment_pair_distance(A0, A1, B0, B1)
    return d <= tol


def _clamp01(t):
    return np.clip(t, 0.0, 1.0)


def _point_seg_dist(P, A, B):
    d = B - A
    den = (d * d).sum(axis=-1)
    den = np.where(den == 0, 1.0, den)
    t = _clamp01(((P - A) * d).sum(axis=-1) / den)
    proj = A + t[..., None] * d
    return np.hypot(*(P - proj).T) if P.ndim == 2 else np.linalg.norm(P - proj, axis=-1)


def _segment_pair_distance(A0, A1, B0, B1):
    """Exact distance between segment pairs (vectorized, rowwise)."""
    cross = proper_intersections(A0, A1, B0, B1)
    d = np.minimum.reduce(
        [
            _point_seg_dist(A0, B0, B1),
            _point_seg_dist(A1, B0, B1),
            _point_seg_dist(B0, A0, A1),
            _point_seg_dist(B1, A0, A1),
        ]
    )
    return np.where(cross, 0.0, d)
