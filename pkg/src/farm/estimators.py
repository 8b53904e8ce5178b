"""scikit-learn compatible wrappers.

:class:`ForwardAligner` learns the warp between a leading series and a
target and replays it on other series of the same length.
:class:`FarmRelevanceSelector` scores the columns of ``X`` (candidate
exogenous series) against ``y`` (the target) and keeps the most relevant.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .alignment import WarpPath, align, apply_warp
from .distance import DistanceParams
from .exceptions import FarmError, InvalidInputError
from .relevance import RelevanceParams, farm_relevance
from .signal import TimeSeries, to_deltas

__all__ = ["ForwardAligner", "FarmRelevanceSelector"]


def _column(x, name):
    arr = check_array(np.asarray(x, dtype=float).reshape(-1, 1), ensure_min_samples=2,
                      input_name=name)
    return arr.ravel()


class ForwardAligner(TransformerMixin, BaseEstimator):
    """Greedy forward alignment as a transformer.

    Parameters
    ----------
    exp_scale : float, default 5.0
        Multiplier of the opposite-sign exponent.

    Attributes
    ----------
    path_ : WarpPath
    aligned_ : AlignedPair
        ``y`` and ``X`` stretched along ``path_``.
    n_samples_in_ : int
        Length of the query series seen in :meth:`fit`.
    """

    def __init__(self, exp_scale=5.0):
        self.exp_scale = exp_scale

    def fit(self, X, y):
        """Align query ``X`` (1-D) to reference ``y`` (at least as long)."""
        qry = _column(X, "X")
        ref = _column(y, "y")
        params = DistanceParams(self.exp_scale)
        self.path_ = align(to_deltas(ref), to_deltas(qry), params)
        self.aligned_ = apply_warp(TimeSeries(ref), TimeSeries(qry), self.path_)
        self.ref_length_ = ref.size
        self.n_samples_in_ = qry.size
        return self

    def transform(self, X):
        """Stretch ``X`` like the fitted query.

        ``X`` is a 1-D series or a 2-D array whose columns each have the
        fitted query length.
        """
        check_is_fitted(self, "path_")
        X = np.asarray(X, dtype=float)
        one_d = X.ndim == 1
        X = check_array(X.reshape(-1, 1) if one_d else X)
        if X.shape[0] != self.n_samples_in_:
            raise InvalidInputError(
                f"X has {X.shape[0]} samples, the fitted query had {self.n_samples_in_}"
            )
        dummy_ref = np.zeros(self.ref_length_)
        cols = [apply_warp(TimeSeries(dummy_ref), TimeSeries(col), self.path_)
                .qry_aligned.values for col in X.T]
        out = np.column_stack(cols)
        return out.ravel() if one_d else out

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).aligned_.qry_aligned.values.copy()


class FarmRelevanceSelector(SelectorMixin, BaseEstimator):
    """Keep the ``k`` columns of ``X`` with the highest global relevance to ``y``.

    Each column is treated as a candidate exogenous series, forward-aligned
    to the target ``y`` and scored with the global relevance. Columns that
    cannot be scored (constant, too short) get a NaN score and are never
    selected.

    Parameters
    ----------
    k : int or "all", default 1
    window : int, default 5
    global_form : {"rms_ratio", "mean_ratio"}, default "rms_ratio"
    denom_epsilon : float, default 1e-6
    exp_scale : float, default 5.0

    Attributes
    ----------
    scores_ : ndarray of shape (n_features,)
    full_correlations_ : ndarray of shape (n_features,)
    reports_ : list of RelevanceReport or None
    """

    def __init__(self, k=1, window=5, global_form="rms_ratio", denom_epsilon=1e-6,
                 exp_scale=5.0):
        self.k = k
        self.window = window
        self.global_form = global_form
        self.denom_epsilon = denom_epsilon
        self.exp_scale = exp_scale

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        dparams = DistanceParams(self.exp_scale)
        rparams = RelevanceParams(self.window, self.global_form, self.denom_epsilon)
        if self.k != "all" and not (isinstance(self.k, int) and 0 <= self.k <= X.shape[1]):
            raise InvalidInputError(f"k must be 'all' or in [0, {X.shape[1]}], got {self.k}")
        target = TimeSeries(y, name="target")
        scores, fulls, reports = [], [], []
        for j in range(X.shape[1]):
            try:
                rep = farm_relevance(target, TimeSeries(X[:, j], name=str(j)),
                                     dparams, rparams)
            except FarmError:
                rep = None
            reports.append(rep)
            scores.append(math.nan if rep is None else rep.global_value)
            fulls.append(math.nan if rep is None else rep.full_correlation)
        self.scores_ = np.asarray(scores)
        self.full_correlations_ = np.asarray(fulls)
        self.reports_ = reports
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "scores_")
        scores = np.where(np.isnan(self.scores_), -np.inf, self.scores_)
        mask = np.zeros(scores.size, dtype=bool)
        k = scores.size if self.k == "all" else self.k
        if k:
            order = np.argsort(-scores, kind="stable")[:k]
            mask[order] = True
        mask &= ~np.isnan(self.scores_)
        return mask
