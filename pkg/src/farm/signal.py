"""Series containers, delta features and the synthetic signal corpus.

Samples are assumed to be taken at a constant interval of one unit, so the
slope of a segment is simply the difference of two consecutive values.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ._validation import check_finite_scalar, check_int, check_values
from .exceptions import InvalidInputError

__all__ = [
    "TimeSeries",
    "DeltaSeries",
    "WarpSpec",
    "WarpedPair",
    "to_deltas",
    "gen_base_signal",
    "gen_sec4_pair",
    "apply_warp_spec",
    "random_warp_spec",
    "gen_warped_family",
    "correspondence_to_delta_truth",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Immutable, finite, equally spaced samples.

    Parameters
    ----------
    values : array-like of float
        At least two finite samples.
    name : str, optional
        Identifier used in reports and rankings.
    """

    values: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "values", check_values(self.values, min_length=2))

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values.tolist())

    def __getitem__(self, item):
        return self.values[item]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"TimeSeries(name={self.name!r}, n={len(self)})"

    def with_name(self, name):
        return TimeSeries(self.values, name=name)


@dataclass(frozen=True, eq=False)
class DeltaSeries:
    """Consecutive differences of a :class:`TimeSeries`."""

    deltas: np.ndarray
    source_length: int

    def __post_init__(self):
        deltas = check_values(self.deltas, name="deltas", min_length=1)
        if deltas.size != self.source_length - 1:
            raise InvalidInputError(
                f"expected {self.source_length - 1} deltas, got {deltas.size}"
            )
        object.__setattr__(self, "deltas", deltas)

    def __len__(self):
        return self.deltas.size

    def reconstruct(self, first_value):
        """Cumulative sum of the deltas starting at ``first_value``."""
        first_value = check_finite_scalar(first_value, "first_value")
        values = np.empty(self.source_length)
        values[0] = first_value
        np.cumsum(self.deltas, out=values[1:])
        values[1:] += first_value
        return TimeSeries(values)


def _as_series(series, name=None):
    if isinstance(series, TimeSeries):
        return series
    return TimeSeries(series, name=name)


def to_deltas(series):
    """Return the differences ``values[i + 1] - values[i]`` of ``series``.

    >>> to_deltas([0, 1, 3, 2]).deltas.tolist()
    [1.0, 2.0, -1.0]
    """
    series = _as_series(series)
    return DeltaSeries(np.diff(series.values), source_length=len(series))


_SLOPE_RANGE = (0.5, 2.0)


def gen_base_signal(length, seed=0):
    """Random piecewise-linear signal with rising, falling and flat segments.

    The result is a pure function of ``(length, seed)``.

    Parameters
    ----------
    length : int
        Number of samples, at least 8.
    seed : int
        Seed of the generator.

    Returns
    -------
    TimeSeries
    """
    length = check_int(length, "length", minimum=8)
    seed = check_int(seed, "seed", minimum=0)
    rng = np.random.default_rng(seed)
    n_deltas = length - 1
    n_segments = int(rng.integers(3, min(6, n_deltas // 2) + 1))

    kinds = [str(k) for k in rng.permutation(["rise", "flat", "fall"])]
    kinds += [str(k) for k in rng.choice(["rise", "flat", "fall"], n_segments - 3)]
    # a floor per segment and a multinomial split of the rest; uniform cut
    # points too often leave one segment covering most of the series
    floor = max(1, n_deltas // (2 * n_segments))
    seg_lengths = floor + rng.multinomial(n_deltas - floor * n_segments,
                                          [1.0 / n_segments] * n_segments)

    deltas = []
    for kind, n in zip(kinds, seg_lengths):
        slope = round(float(rng.uniform(*_SLOPE_RANGE)), 3)
        if kind == "flat":
            slope = 0.0
        elif kind == "fall":
            slope = -slope
        deltas.extend([slope] * int(n))
    start = round(float(rng.uniform(-1.0, 1.0)), 3)
    values = start + np.concatenate([[0.0], np.cumsum(deltas)])
    return TimeSeries(values, name=f"base-{seed}")


# Reference: dip during the rise (sample 4), dip after the peak (sample 9)
# followed by an overshoot (sample 10). Query: same rise-fall shape two
# samples earlier, with a hold at samples 6-7. Positions are 1-based.
_SEC4_REF = (0.0, 0.0, 1.0, 0.5, 2.0, 3.0, 4.0, 5.0, 3.0, 4.5, 3.0, 2.0, 1.0, 0.0)
_SEC4_QRY = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0)


def gen_sec4_pair():
    """Fixed reference/query pair with valleys, an overshoot and a plateau.

    The reference has local minima at samples 4 and 9 and a spike at
    sample 10 (1-based). The query rises and falls like the reference but
    leads it in time and holds its value over samples 6 and 7.

    Returns
    -------
    ref, qry : TimeSeries
    """
    return TimeSeries(_SEC4_REF, name="sec4-ref"), TimeSeries(_SEC4_QRY, name="sec4-qry")


_DISTORTIONS = ("plateau", "valley", "overshoot")


@dataclass(frozen=True)
class WarpSpec:
    """Description of a ground-truth warp applied to a source series.

    ``insertions`` holds ``(position, count)`` pairs: ``count`` linearly
    interpolated samples are placed between samples ``position - 1`` and
    ``position`` (0-based). ``distortions`` holds ``(kind, position,
    magnitude)`` triples: a ``plateau`` repeats sample ``position`` once,
    shifted by ``magnitude``; a ``valley``/``overshoot`` lowers/raises the
    sample by ``magnitude``. ``noise`` is the standard deviation of optional
    Gaussian noise added to every output sample.
    """

    insertions: Tuple[Tuple[int, int], ...] = ()
    distortions: Tuple[Tuple[str, int, float], ...] = ()
    noise: float = 0.0

    def __post_init__(self):
        ins = tuple((check_int(p, "position"), check_int(c, "count", 1))
                    for p, c in self.insertions)
        dis = []
        for kind, pos, mag in self.distortions:
            if kind not in _DISTORTIONS:
                raise InvalidInputError(f"unknown distortion kind {kind!r}")
            mag = check_finite_scalar(mag, "magnitude")
            if kind != "plateau" and mag < 0:
                raise InvalidInputError(f"{kind} magnitude must be >= 0")
            dis.append((kind, check_int(pos, "position"), mag))
        for label, positions in (("insertion", [p for p, _ in ins]),
                                 ("distortion", [p for _, p, _ in dis])):
            if any(b <= a for a, b in zip(positions, positions[1:])):
                raise InvalidInputError(f"{label} positions must be strictly increasing")
        noise = check_finite_scalar(self.noise, "noise")
        if noise < 0:
            raise InvalidInputError("noise must be >= 0")
        object.__setattr__(self, "insertions", ins)
        object.__setattr__(self, "distortions", tuple(dis))
        object.__setattr__(self, "noise", noise)

    def validate_for(self, n):
        for pos, _ in self.insertions:
            if not 1 <= pos <= n - 1:
                raise InvalidInputError(
                    f"insertion position {pos} outside [1, {n - 1}] for a series of {n}"
                )
        for kind, pos, _ in self.distortions:
            if not 0 <= pos <= n - 1:
                raise InvalidInputError(
                    f"{kind} position {pos} outside [0, {n - 1}] for a series of {n}"
                )

    def to_dict(self):
        return {
            "insertions": [list(i) for i in self.insertions],
            "distortions": [list(d) for d in self.distortions],
            "noise": self.noise,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            insertions=tuple(tuple(i) for i in data.get("insertions", ())),
            distortions=tuple(tuple(d) for d in data.get("distortions", ())),
            noise=data.get("noise", 0.0),
        )


def apply_warp_spec(series, spec, seed=0):
    """Apply ``spec`` to ``series``.

    Returns
    -------
    warped : TimeSeries
    correspondence : ndarray of float
        For each output sample, its (0-based, possibly fractional) position
        in the source series. Interpolated samples get fractional positions.
    """
    series = _as_series(series)
    v = series.values
    n = len(series)
    spec.validate_for(n)
    inserts = dict(spec.insertions)
    distort = {pos: (kind, mag) for kind, pos, mag in spec.distortions}

    out, corr = [], []
    for i in range(n):
        count = inserts.get(i, 0)
        for t in range(1, count + 1):
            frac = t / (count + 1)
            out.append(v[i - 1] + frac * (v[i] - v[i - 1]))
            corr.append(i - 1 + frac)
        value = v[i]
        kind, mag = distort.get(i, (None, 0.0))
        if kind == "valley":
            value -= mag
        elif kind == "overshoot":
            value += mag
        out.append(value)
        corr.append(float(i))
        if kind == "plateau":
            out.append(v[i] + mag)
            corr.append(float(i))

    out = np.asarray(out)
    if spec.noise > 0:
        out = out + np.random.default_rng(seed).normal(0.0, spec.noise, out.size)
    return TimeSeries(out, name=series.name), np.asarray(corr)


def random_warp_spec(length, rng, max_insertions=3, max_count=2, noise=0.0):
    """Draw a spec with 1..``max_insertions`` stretches for a series of ``length``."""
    k = int(rng.integers(1, max_insertions + 1))
    positions = np.sort(rng.choice(np.arange(1, length), size=min(k, length - 1),
                                   replace=False))
    counts = rng.integers(1, max_count + 1, size=positions.size)
    return WarpSpec(insertions=tuple((int(p), int(c)) for p, c in zip(positions, counts)),
                    noise=noise)


class WarpedPair(NamedTuple):
    ref: TimeSeries
    qry: TimeSeries
    correspondence: np.ndarray
    spec: WarpSpec


def gen_warped_family(count, length=24, seed=0, noise=0.0):
    """Pairs of (warped reference, leading source query) with ground truth.

    Each source is a :func:`gen_base_signal` draw; the reference is the same
    signal stretched by random interpolated insertions, so every source
    feature appears at the same or a later index in the reference.
    """
    count = check_int(count, "count", minimum=0)
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(count):
        sub_seed = int(rng.integers(0, 2**31 - 1))
        base = gen_base_signal(length, sub_seed)
        spec = random_warp_spec(length, np.random.default_rng(sub_seed), noise=noise)
        warped, corr = apply_warp_spec(base, spec, seed=sub_seed)
        pairs.append(WarpedPair(warped.with_name(f"pair-{i:03d}-ref"),
                                base.with_name(f"pair-{i:03d}-qry"), corr, spec))
    return pairs


def correspondence_to_delta_truth(correspondence: Sequence[float]):
    """Ground-truth ``(ref_idx, qry_idx)`` delta matches, 1-based.

    Reference delta ``j`` (between output samples ``j - 1`` and ``j``) maps to
    source delta ``s + 1`` when its endpoints are the original consecutive
    source samples ``s`` and ``s + 1``. Deltas touching inserted samples have
    no ground truth and are omitted.
    """
    corr = np.asarray(correspondence, dtype=float)
    truth = []
    for j in range(1, corr.size):
        a, b = corr[j - 1], corr[j]
        if a.is_integer() and b.is_integer() and b == a + 1:
            truth.append((j, int(b)))
    return truth
