"""Windowed correlation and global relevance of an exogenous series."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._validation import check_finite_scalar, check_int
from .alignment import AlignedPair, WarpPath, align, apply_warp
from .distance import DistanceParams
from .exceptions import FarmError, InvalidInputError, UndefinedResultError
from .signal import TimeSeries, _as_series, to_deltas

__all__ = [
    "RelevanceParams",
    "RelevanceReport",
    "RankEntry",
    "Ranking",
    "pearson",
    "local_relevance",
    "global_relevance",
    "farm_relevance",
    "rank_exogenous",
]

GLOBAL_FORMS = ("rms_ratio", "mean_ratio")
_FORM_ALIASES = {"rms": "rms_ratio", "mean": "mean_ratio"}


def normalize_global_form(form):
    form = _FORM_ALIASES.get(form, form)
    if form not in GLOBAL_FORMS:
        raise InvalidInputError(
            f"global_form must be one of {GLOBAL_FORMS} (or 'rms'/'mean'), got {form!r}"
        )
    return form


@dataclass(frozen=True)
class RelevanceParams:
    """Parameters of the relevance computation.

    Parameters
    ----------
    window : int, default 5
        Odd window length (samples) of the local correlations.
    global_form : {"rms_ratio", "mean_ratio"}, default "rms_ratio"
        Aggregate of the local coefficients placed over the full-series
        correlation: their root mean square, or their plain mean.
    denom_epsilon : float, default 1e-6
        Smallest magnitude allowed for the full-series correlation in the
        denominator; smaller values are clamped with their sign kept.
    """

    window: int = 5
    global_form: str = "rms_ratio"
    denom_epsilon: float = 1e-6

    def __post_init__(self):
        window = check_int(self.window, "window", minimum=3)
        if window % 2 == 0:
            raise InvalidInputError(f"window must be odd, got {window}")
        eps = check_finite_scalar(self.denom_epsilon, "denom_epsilon")
        if eps <= 0:
            raise InvalidInputError(f"denom_epsilon must be > 0, got {eps}")
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "global_form", normalize_global_form(self.global_form))
        object.__setattr__(self, "denom_epsilon", eps)


def pearson(a, b):
    """Pearson correlation of two equal-length vectors, NaN if either is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidInputError("pearson needs equal-length inputs")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return math.nan
    da, db = a - a.mean(), b - b.mean()
    r = float(np.dot(da, db) / (np.linalg.norm(da) * np.linalg.norm(db)))
    return min(1.0, max(-1.0, r))


def _window_correlations(ref, qry, window):
    rw = sliding_window_view(ref, window)
    qw = sliding_window_view(qry, window)
    degenerate = (np.ptp(rw, axis=1) == 0) | (np.ptp(qw, axis=1) == 0)
    rc = rw - rw.mean(axis=1, keepdims=True)
    qc = qw - qw.mean(axis=1, keepdims=True)
    num = np.einsum("ij,ij->i", rc, qc)
    den = np.linalg.norm(rc, axis=1) * np.linalg.norm(qc, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.clip(num / den, -1.0, 1.0)
    coef[degenerate] = np.nan
    return coef


def _pair_arrays(pair):
    if isinstance(pair, AlignedPair):
        return pair.ref_aligned.values, pair.qry_aligned.values
    ref, qry = pair
    ref, qry = np.asarray(ref, dtype=float), np.asarray(qry, dtype=float)
    if ref.shape != qry.shape or ref.ndim != 1:
        raise InvalidInputError("aligned series must be 1-D and of equal length")
    return ref, qry


def local_relevance(pair, params=None):
    """Pearson correlation of every full window over the aligned pair.

    Parameters
    ----------
    pair : AlignedPair or (array, array)
    params : RelevanceParams, optional

    Returns
    -------
    centers : ndarray of int
        0-based center index of each window.
    coefficients : ndarray of float
        Correlation per window; NaN where either slice is constant.
    """
    params = params or RelevanceParams()
    ref, qry = _pair_arrays(pair)
    w = params.window
    if ref.size < w:
        raise InvalidInputError(f"aligned length {ref.size} is shorter than window {w}")
    half = (w - 1) // 2
    centers = np.arange(half, ref.size - half)
    return centers, _window_correlations(ref, qry, w)


def _denominator(full_cor, eps):
    sign = -1.0 if full_cor < 0 else 1.0
    clamped = abs(full_cor) < eps
    return sign * max(abs(full_cor), eps), clamped


def _aggregate(local, form):
    local = np.asarray(local, dtype=float)
    defined = local[~np.isnan(local)]
    if defined.size == 0:
        raise UndefinedResultError("no defined local coefficient to aggregate")
    if form == "rms_ratio":
        return math.sqrt(float(np.mean(defined ** 2)))
    return float(np.mean(defined))


def _global(local, full_cor, params):
    if math.isnan(full_cor):
        raise UndefinedResultError("full-series correlation is undefined (constant series)")
    numerator = _aggregate(local, params.global_form)
    denom, clamped = _denominator(full_cor, params.denom_epsilon)
    return numerator / denom, clamped


def global_relevance(local, pair, params=None):
    """Aggregate of the defined local coefficients over the full correlation.

    With ``global_form="rms_ratio"`` the numerator is the root mean square
    of the defined coefficients, with ``"mean_ratio"`` their mean. The
    full-series correlation is clamped away from zero by ``denom_epsilon``
    keeping its sign, so a negative full correlation yields a negative
    value.

    Examples
    --------
    >>> pair = ([0.0, 1.0, 2.0, 1.0, 3.0], [0.0, 1.0, 2.5, 0.5, 3.0])
    >>> global_relevance([1.0, -1.0], pair) > 0
    True
    """
    params = params or RelevanceParams()
    ref, qry = _pair_arrays(pair)
    return _global(local, pearson(ref, qry), params)[0]


@dataclass
class RelevanceReport:
    """Local and global relevance of a query series against a reference.

    ``centers`` are 0-based indices into the aligned series; undefined
    local coefficients are NaN.
    """

    centers: np.ndarray
    local: np.ndarray
    global_value: float
    full_correlation: float
    degenerate_windows: int
    denominator_clamped: bool
    window: int
    global_form: str
    path: Optional[WarpPath] = field(default=None, repr=False)
    pair: Optional[AlignedPair] = field(default=None, repr=False)
    name: Optional[str] = None

    def local_entries(self):
        return [(int(c), None if math.isnan(v) else float(v))
                for c, v in zip(self.centers, self.local)]

    def to_dict(self):
        return {
            "name": self.name,
            "global": self.global_value,
            "global_form": self.global_form,
            "full_correlation": self.full_correlation,
            "window": self.window,
            "denominator_clamped": self.denominator_clamped,
            "degenerate_windows": self.degenerate_windows,
            # 1-based centers in serialized form
            "local": [{"center": c + 1, "coefficient": v} for c, v in self.local_entries()],
            "path": None if self.path is None else self.path.to_dict(),
            "trimmed_tail": None if self.pair is None else
            [list(t) for t in self.pair.trimmed_tail],
        }

    @classmethod
    def from_dict(cls, data):
        local = data["local"]
        path = data.get("path")
        return cls(
            centers=np.array([e["center"] - 1 for e in local], dtype=int),
            local=np.array([math.nan if e["coefficient"] is None else e["coefficient"]
                            for e in local], dtype=float),
            global_value=data["global"],
            full_correlation=data["full_correlation"],
            degenerate_windows=data["degenerate_windows"],
            denominator_clamped=data["denominator_clamped"],
            window=data["window"],
            global_form=data["global_form"],
            path=None if path is None else WarpPath.from_dict(path),
            name=data.get("name"),
        )


def relevance_of_pair(pair, params=None, path=None, name=None):
    """Relevance report of an already aligned pair."""
    params = params or RelevanceParams()
    centers, local = local_relevance(pair, params)
    ref, qry = _pair_arrays(pair)
    full = pearson(ref, qry)
    value, clamped = _global(local, full, params)
    return RelevanceReport(
        centers=centers, local=local, global_value=value, full_correlation=full,
        degenerate_windows=int(np.count_nonzero(np.isnan(local))),
        denominator_clamped=clamped, window=params.window,
        global_form=params.global_form, path=path,
        pair=pair if isinstance(pair, AlignedPair) else None, name=name,
    )


def farm_relevance(ref, qry, dparams=None, rparams=None):
    """Align ``qry`` to ``ref`` and quantify its relevance.

    Runs :func:`to_deltas`, :func:`~farm.alignment.align`,
    :func:`~farm.alignment.apply_warp`, :func:`local_relevance` and
    :func:`global_relevance` in sequence.

    Parameters
    ----------
    ref : TimeSeries or array-like
        Target series.
    qry : TimeSeries or array-like
        Candidate series, leading the target and not longer than it.
    dparams : DistanceParams, optional
    rparams : RelevanceParams, optional

    Returns
    -------
    RelevanceReport
    """
    ref, qry = _as_series(ref), _as_series(qry)
    rparams = rparams or RelevanceParams()
    if len(qry) > len(ref):
        raise InvalidInputError(
            f"query ({len(qry)} samples) is longer than the reference ({len(ref)})"
        )
    if len(qry) < rparams.window + 1:
        raise InvalidInputError(
            f"query needs at least window + 1 = {rparams.window + 1} samples"
        )
    path = align(to_deltas(ref), to_deltas(qry), dparams)
    pair = apply_warp(ref, qry, path)
    return relevance_of_pair(pair, rparams, path=path, name=qry.name)


@dataclass
class RankEntry:
    name: str
    global_value: float
    full_correlation: float
    report: RelevanceReport = field(repr=False)


@dataclass
class Ranking:
    """Candidates sorted by descending global relevance, plus failures."""

    entries: List[RankEntry]
    errors: List[tuple] = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def names(self):
        return [e.name for e in self.entries]


def _sort_key(entry):
    value = entry.global_value
    return (-value if not math.isnan(value) else math.inf, entry.name)


def rank_exogenous(target, candidates, dparams=None, rparams=None, max_workers=None):
    """Rank candidate series by their global relevance to ``target``.

    Candidates that fail (bad length, undefined correlation, ...) are
    recorded in :attr:`Ranking.errors` as ``(name, message)`` and skipped.
    Ties are broken by name, so the order does not depend on evaluation
    order when ``max_workers`` > 1.
    """
    target = _as_series(target)
    named = []
    for i, c in enumerate(candidates):
        c = _as_series(c)
        named.append(c if c.name is not None else c.with_name(f"candidate-{i}"))

    def evaluate(candidate):
        try:
            return candidate, farm_relevance(target, candidate, dparams, rparams), None
        except FarmError as exc:
            return candidate, None, str(exc)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(evaluate, named))
    else:
        results = [evaluate(c) for c in named]

    entries, errors = [], []
    for candidate, report, error in results:
        if report is None:
            errors.append((candidate.name, error))
        else:
            entries.append(RankEntry(candidate.name, report.global_value,
                                     report.full_correlation, report))
    entries.sort(key=_sort_key)
    return Ranking(entries, errors)
