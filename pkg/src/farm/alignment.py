"""Greedy forward alignment of two slope series and insertion-only de-warping."""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .distance import DistanceParams, _distance_unchecked
from .exceptions import InvalidInputError
from .signal import DeltaSeries, TimeSeries, _as_series, to_deltas

__all__ = [
    "WarpPath",
    "AlignedPair",
    "align",
    "apply_warp",
    "path_to_matrix_trace",
    "MatrixTrace",
]

ALLOWED_MOVES = frozenset({(1, 1), (2, 1), (1, 2)})


@dataclass(frozen=True)
class WarpPath:
    """Sequence of 1-based ``(ref_idx, qry_idx)`` delta matches.

    ``ref_len`` and ``qry_len`` are the lengths of the delta series the path
    was computed on; ``evaluations`` counts distance computations.
    """

    steps: Tuple[Tuple[int, int], ...]
    ref_len: int
    qry_len: int
    evaluations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((int(r), int(q)) for r, q in self.steps))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def moves(self):
        return [(r1 - r0, q1 - q0)
                for (r0, q0), (r1, q1) in zip(self.steps, self.steps[1:])]

    def check(self):
        """Raise :class:`InvalidInputError` unless every path invariant holds."""
        if not self.steps or self.steps[0] != (1, 1):
            raise InvalidInputError("path must start at (1, 1)")
        bad = [m for m in self.moves if m not in ALLOWED_MOVES]
        if bad:
            raise InvalidInputError(f"path contains disallowed moves {bad[:3]}")
        r, q = self.steps[-1]
        if r > self.ref_len or q > self.qry_len:
            raise InvalidInputError("path indices exceed delta lengths")
        if any(q > r for r, q in self.steps):
            raise InvalidInputError("path violates qry_idx <= ref_idx")
        return self

    def to_dict(self):
        return {
            "ref_len": self.ref_len,
            "qry_len": self.qry_len,
            "steps": [list(s) for s in self.steps],
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(steps=tuple(tuple(s) for s in data["steps"]),
                   ref_len=int(data["ref_len"]), qry_len=int(data["qry_len"]),
                   evaluations=int(data.get("evaluations", 0)))


def _as_deltas(x):
    if isinstance(x, DeltaSeries):
        return x
    if isinstance(x, TimeSeries):
        return to_deltas(x)
    arr = np.asarray(x, dtype=float)
    return DeltaSeries(arr, source_length=arr.size + 1)


def align(ref_deltas, qry_deltas, params=None, search_depth=2):
    """Greedy forward warp path between two slope series.

    Starting from ``(1, 1)``, each iteration evaluates the distance of the
    admissible cells among ``(y+1, x+1)``, ``(y+2, x+1)`` and ``(y+1, x+2)``
    and moves to the cheapest one. Ties go to the diagonal, then to the
    reference skip. A cell is admissible when it lies inside both series and
    keeps the query index at or below the reference index. The loop stops
    as soon as either series is exhausted.

    Parameters
    ----------
    ref_deltas, qry_deltas : DeltaSeries or array-like
        Slope series; the reference must be at least as long as the query.
    params : DistanceParams, optional
    search_depth : int, default 2
        Farthest index offset considered per move. Only 2 is supported.

    Returns
    -------
    WarpPath
    """
    if search_depth != 2:
        raise InvalidInputError("only search_depth=2 is implemented")
    ref = _as_deltas(ref_deltas).deltas.tolist()
    qry = _as_deltas(qry_deltas).deltas.tolist()
    n, m = len(ref), len(qry)
    if m > n:
        raise InvalidInputError(
            f"query has more deltas ({m}) than the reference ({n})"
        )
    scale = (params or DistanceParams()).exp_scale
    dist = _distance_unchecked

    # 0-based cursor; stored steps are 1-based
    y = x = 0
    steps = [(1, 1)]
    evaluations = 0
    while y < n - 1 and x < m - 1:
        best = dist(ref[y + 1], qry[x + 1], scale)
        ny, nx = y + 1, x + 1
        evaluations += 1
        if y + 2 < n:
            d = dist(ref[y + 2], qry[x + 1], scale)
            evaluations += 1
            if d < best:
                best, ny, nx = d, y + 2, x + 1
        if x + 2 < m and x + 2 <= y + 1:
            d = dist(ref[y + 1], qry[x + 2], scale)
            evaluations += 1
            if d < best:
                best, ny, nx = d, y + 1, x + 2
        y, x = ny, nx
        steps.append((y + 1, x + 1))
    return WarpPath(tuple(steps), ref_len=n, qry_len=m, evaluations=evaluations)


@dataclass(frozen=True, eq=False)
class AlignedPair:
    """Two equal-length series produced by :func:`apply_warp`.

    ``inserted_ref``/``inserted_qry`` flag interpolated samples.
    ``trimmed_tail`` lists ``(series_id, count)`` for samples beyond the last
    matched step that were left out.
    """

    ref_aligned: TimeSeries
    qry_aligned: TimeSeries
    inserted_ref: np.ndarray
    inserted_qry: np.ndarray
    trimmed_tail: Tuple[Tuple[str, int], ...] = ()
    source_index_ref: np.ndarray = field(default=None, repr=False)
    source_index_qry: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.ref_aligned) != len(self.qry_aligned):
            raise InvalidInputError("aligned series differ in length")
        for name in ("inserted_ref", "inserted_qry"):
            mask = np.asarray(getattr(self, name), dtype=bool)
            if mask.shape != (len(self.ref_aligned),):
                raise InvalidInputError(f"{name} has the wrong shape")
            mask.setflags(write=False)
            object.__setattr__(self, name, mask)

    def __len__(self):
        return len(self.ref_aligned)

    def stripped(self):
        """Aligned series with the inserted samples removed."""
        return (self.ref_aligned.values[~self.inserted_ref],
                self.qry_aligned.values[~self.inserted_qry])


def apply_warp(ref, qry, path):
    """Stretch ``ref`` and ``qry`` along ``path`` so matched slopes line up.

    A diagonal move copies one sample of each series. A reference skip
    ``(+2, +1)`` spreads one query slope over two reference slopes by
    inserting the midpoint of the two query samples; ``(+1, +2)`` does the
    same for the reference. No sample is ever removed, but samples past the
    last step are left out and reported in ``trimmed_tail``.
    """
    ref, qry = _as_series(ref), _as_series(qry)
    if path.ref_len != len(ref) - 1 or path.qry_len != len(qry) - 1:
        raise InvalidInputError(
            f"path was built for {path.ref_len}/{path.qry_len} deltas, series have "
            f"{len(ref) - 1}/{len(qry) - 1}"
        )
    if not path.steps or path.steps[0] != (1, 1):
        raise InvalidInputError("path must start at (1, 1)")
    rv, qv = ref.values, qry.values

    # first step matches delta 1 of each: samples 0 and 1
    r_out, q_out = [rv[0], rv[1]], [qv[0], qv[1]]
    r_ins, q_ins = [False, False], [False, False]
    r_src, q_src = [0.0, 1.0], [0.0, 1.0]
    for (r0, q0), (r1, q1) in zip(path.steps, path.steps[1:]):
        dr, dq = r1 - r0, q1 - q0
        if (dr, dq) not in ALLOWED_MOVES:
            raise InvalidInputError(f"unsupported move {(dr, dq)} at step {(r1, q1)}")
        if r1 > path.ref_len or q1 > path.qry_len:
            raise InvalidInputError(f"step {(r1, q1)} exceeds the series")
        # sample positions (0-based) equal the 1-based delta index of the end sample
        if dr == 2:
            r_out += [rv[r0 + 1], rv[r1]]
            r_ins += [False, False]
            r_src += [r0 + 1.0, float(r1)]
            q_out += [0.5 * (qv[q0] + qv[q1]), qv[q1]]
            q_ins += [True, False]
            q_src += [q0 + 0.5, float(q1)]
        elif dq == 2:
            q_out += [qv[q0 + 1], qv[q1]]
            q_ins += [False, False]
            q_src += [q0 + 1.0, float(q1)]
            r_out += [0.5 * (rv[r0] + rv[r1]), rv[r1]]
            r_ins += [True, False]
            r_src += [r0 + 0.5, float(r1)]
        else:
            r_out.append(rv[r1])
            q_out.append(qv[q1])
            r_ins.append(False)
            q_ins.append(False)
            r_src.append(float(r1))
            q_src.append(float(q1))

    last_r, last_q = path.steps[-1]
    tail = []
    if len(ref) - 1 - last_r:
        tail.append(("ref", len(ref) - 1 - last_r))
    if len(qry) - 1 - last_q:
        tail.append(("qry", len(qry) - 1 - last_q))
    return AlignedPair(
        TimeSeries(r_out, name=ref.name), TimeSeries(q_out, name=qry.name),
        np.array(r_ins), np.array(q_ins), tuple(tail),
        source_index_ref=np.array(r_src), source_index_qry=np.array(q_src),
    )


@dataclass(frozen=True)
class MatrixTrace:
    """Plot-ready path coordinates plus the ``qry == ref`` bounding line."""

    points: List[Tuple[int, int]]
    diagonal: Tuple[Tuple[int, int], Tuple[int, int]]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def in_lower_triangle(self):
        return all(q <= r for r, q in self.points)


def path_to_matrix_trace(path: WarpPath) -> MatrixTrace:
    """Coordinates of ``path`` for a warping-matrix plot."""
    end = max(path.ref_len, path.qry_len)
    return MatrixTrace(points=list(path.steps), diagonal=((1, 1), (end, end)))

