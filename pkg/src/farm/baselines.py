"""Cost-matrix aligners used for comparison: DTW, DDTW and an AMSS-style aligner.

All paths are lists of 1-based ``(ref_idx, qry_idx)`` pairs. DTW and DDTW
index samples; the AMSS-style aligner indexes slopes (deltas), like the
forward aligner.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .exceptions import InvalidInputError
from .signal import _as_series

__all__ = [
    "accumulated_cost_matrix",
    "dtw",
    "ddtw",
    "derivative_estimate",
    "amss_similarity",
    "amss_align",
    "PathDivergence",
    "compare_paths",
]


@njit(cache=True)
def _accumulate(dist):
    n, m = dist.shape
    acc = np.empty((n, m))
    acc[0, 0] = dist[0, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + dist[0, j]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + dist[i, 0]
        for j in range(1, m):
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = dist[i, j] + best
    return acc


def _backtrack(acc):
    i, j = acc.shape[0] - 1, acc.shape[1] - 1
    path = [(i + 1, j + 1)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, up, left = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            if diag <= up and diag <= left:
                i, j = i - 1, j - 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        path.append((i + 1, j + 1))
    path.reverse()
    return path


def accumulated_cost_matrix(ref_features, qry_features):
    """DTW accumulated cost over absolute feature differences.

    Cell ``(0, 0)`` holds the bare distance; every other cell adds the
    cheapest of its diagonal, upper and left neighbours.
    """
    a = np.asarray(ref_features, dtype=float)
    b = np.asarray(qry_features, dtype=float)
    return _accumulate(np.abs(a[:, None] - b[None, :]))


def _features(series, name, min_length):
    values = np.asarray(series.values if hasattr(series, "values") else series, dtype=float)
    if values.ndim != 1 or values.size < min_length:
        raise InvalidInputError(f"{name} needs at least {min_length} samples")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return values


def dtw(ref, qry):
    """Classic dynamic time warping over absolute value differences.

    Returns
    -------
    cost : float
    path : list of (int, int)
        1-based sample matches from ``(1, 1)`` to ``(len(ref), len(qry))``;
        ties during backtracking prefer the diagonal.

    Examples
    --------
    >>> dtw([0, 0], [5, 5])[0]
    10.0
    """
    a = _features(ref, "ref", 1)
    b = _features(qry, "qry", 1)
    acc = accumulated_cost_matrix(a, b)
    return float(acc[-1, -1]), _backtrack(acc)


def derivative_estimate(values):
    """Three-point slope estimate, edges copied from the nearest interior point.

    ``d[i] = ((x[i] - x[i-1]) + (x[i+1] - x[i-1]) / 2) / 2``
    """
    x = _features(values, "series", 3)
    d = np.empty_like(x)
    d[1:-1] = ((x[1:-1] - x[:-2]) + (x[2:] - x[:-2]) / 2.0) / 2.0
    d[0], d[-1] = d[1], d[-2]
    return d


def ddtw(ref, qry):
    """DTW on :func:`derivative_estimate` features; series need >= 3 samples."""
    da = derivative_estimate(_features(ref, "ref", 3))
    db = derivative_estimate(_features(qry, "qry", 3))
    acc = accumulated_cost_matrix(da, db)
    return float(acc[-1, -1]), _backtrack(acc)


def amss_similarity(delta_ref, delta_qry):
    """Cosine of the angle between ``(1, delta_ref)`` and ``(1, delta_qry)``, floored at 0."""
    a = np.asarray(delta_ref, dtype=float)
    b = np.asarray(delta_qry, dtype=float)
    cos = (1.0 + a * b) / (np.hypot(1.0, a) * np.hypot(1.0, b))
    return np.clip(cos, 0.0, 1.0)


# (move, intermediate cell) pairs, both as offsets back from the target cell.
# Symmetric weighting: a diagonal step counts its cell twice, a skip counts the
# intermediate cell twice and the target once, so every path from the first
# to the last cell carries the same total weight n + m.
_AMSS_MOVES = (((1, 1), None), ((1, 2), (0, 1)), ((2, 1), (1, 0)))


def amss_align(ref, qry):
    """AMSS-style alignment maximizing accumulated cosine similarity of slopes.

    Slopes are compared by :func:`amss_similarity`. A cell is reached by a
    diagonal step or by a skip of two along one axis, which also collects
    the similarity of the cell one step back (``(i, j-1)`` or ``(i-1, j)``).
    Weights follow the symmetric slope-constrained pattern so that the
    total weight of any path is ``n + m``; without it detours would win just
    by visiting more cells. The path runs from slope ``(1, 1)`` to
    ``(len(ref) - 1, len(qry) - 1)`` and backtracking prefers the diagonal
    on ties. It lists the end cell of each move, so skips show up as
    ``(+2, +1)``/``(+1, +2)`` jumps.

    Returns
    -------
    similarity : float
        Accumulated weighted similarity divided by ``n + m``, in [0, 1].
    path : list of (int, int)
        1-based slope matches.
    """
    a = np.diff(_features(ref, "ref", 2))
    b = np.diff(_features(qry, "qry", 2))
    n, m = a.size, b.size
    sim = amss_similarity(a[:, None], b[None, :])
    acc = np.full((n, m), -np.inf)
    acc[0, 0] = 2.0 * sim[0, 0]

    def candidates(i, j):
        for (di, dj), mid in _AMSS_MOVES:
            if i - di < 0 or j - dj < 0 or acc[i - di, j - dj] == -np.inf:
                continue
            if mid is None:
                yield acc[i - di, j - dj] + 2.0 * sim[i, j], (di, dj)
            else:
                yield (acc[i - di, j - dj] + 2.0 * sim[i - mid[0], j - mid[1]]
                       + sim[i, j]), (di, dj)

    for i in range(n):
        for j in range(m):
            if i or j:
                acc[i, j] = max((g for g, _ in candidates(i, j)), default=-np.inf)
    if not np.isfinite(acc[-1, -1]):
        raise InvalidInputError(
            f"end cell ({n}, {m}) is unreachable: slope counts must satisfy "
            "len <= 2 * other_len - 1"
        )
    i, j = n - 1, m - 1
    path = [(n, m)]
    while (i, j) != (0, 0):
        best, move = -np.inf, None
        for gain, mv in candidates(i, j):
            if gain > best:
                best, move = gain, mv
        i, j = i - move[0], j - move[1]
        path.append((i + 1, j + 1))
    path.reverse()
    return float(acc[-1, -1] / (n + m)), path


@dataclass
class PathDivergence:
    """Deviation between two paths and, optionally, a ground truth.

    ``total``/``mean``/``max`` summarize ``|q_a - q_b|`` over the reference
    indices both paths visit (query indices averaged per reference index).
    ``truth_deviation_a``/``_b`` are the mean ``|q - q_true|`` of each path
    over reference indices that have a ground-truth match.
    """

    total: float
    mean: float
    max: float
    common: int
    truth_deviation_a: Optional[float] = None
    truth_deviation_b: Optional[float] = None

    def to_dict(self):
        return dict(self.__dict__)


def _by_ref(path):
    groups = {}
    for r, q in path:
        groups.setdefault(int(r), []).append(int(q))
    return {r: sum(qs) / len(qs) for r, qs in groups.items()}


def _truth_deviation(path_map, truth_map):
    common = sorted(set(path_map) & set(truth_map))
    if not common:
        return None
    return float(np.mean([abs(path_map[r] - truth_map[r]) for r in common]))


def compare_paths(path_a, path_b, ground_truth=None):
    """Compare two warp paths over the same pair.

    Parameters
    ----------
    path_a, path_b : sequence of (int, int)
        1-based matches in the same index space.
    ground_truth : sequence of (int, int), optional
        True ``(ref_idx, qry_idx)`` correspondences.

    Returns
    -------
    PathDivergence

    Examples
    --------
    >>> compare_paths([(1, 1), (2, 2), (3, 3)], [(1, 1), (3, 2)]).total
    1.0
    """
    lens_a = (getattr(path_a, "ref_len", None), getattr(path_a, "qry_len", None))
    lens_b = (getattr(path_b, "ref_len", None), getattr(path_b, "qry_len", None))
    if None not in lens_a and None not in lens_b and lens_a != lens_b:
        raise InvalidInputError(f"paths cover different pairs: {lens_a} vs {lens_b}")
    path_a = [tuple(s) for s in getattr(path_a, "steps", path_a)]
    path_b = [tuple(s) for s in getattr(path_b, "steps", path_b)]
    if not path_a or not path_b:
        raise InvalidInputError("paths must be nonempty")
    if path_a[0] != path_b[0]:
        raise InvalidInputError("paths start at different cells; not over the same pair")
    ma, mb = _by_ref(path_a), _by_ref(path_b)
    common = sorted(set(ma) & set(mb))
    diffs = [abs(ma[r] - mb[r]) for r in common]
    truth_a = truth_b = None
    if ground_truth is not None:
        tm = _by_ref(ground_truth)
        truth_a, truth_b = _truth_deviation(ma, tm), _truth_deviation(mb, tm)
    return PathDivergence(
        total=float(sum(diffs)),
        mean=float(np.mean(diffs)) if diffs else 0.0,
        max=float(max(diffs)) if diffs else 0.0,
        common=len(common),
        truth_deviation_a=truth_a,
        truth_deviation_b=truth_b,
    )


def delta_path_to_sample_path(path):
    """Map a 1-based slope path to sample matches (end sample of each slope)."""
    steps = [tuple(s) for s in getattr(path, "steps", path)]
    return [(1, 1)] + [(r + 1, q + 1) for r, q in steps]


def pair_from_index_path(ref, qry, path):
    """Aligned arrays by reading ``ref``/``qry`` at each 1-based path cell.

    Returns ``(ref_values, qry_values, ref_repeated, qry_repeated)`` where the
    masks flag samples that repeat the previous cell's sample.
    """
    ref, qry = _as_series(ref), _as_series(qry)
    idx = np.asarray(path, dtype=int) - 1
    if idx.min() < 0 or idx[:, 0].max() >= len(ref) or idx[:, 1].max() >= len(qry):
        raise InvalidInputError("path indices outside the series")
    r, q = idx[:, 0], idx[:, 1]
    rep_r = np.concatenate([[False], r[1:] == r[:-1]])
    rep_q = np.concatenate([[False], q[1:] == q[:-1]])
    return ref.values[r], qry.values[q], rep_r, rep_q
