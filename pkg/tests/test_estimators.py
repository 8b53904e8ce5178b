import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import FunctionTransformer

from farm.alignment import align, apply_warp
from farm.estimators import FarmRelevanceSelector, ForwardAligner
from farm.exceptions import InvalidInputError
from farm.signal import gen_sec4_pair, to_deltas


def test_aligner_params_and_clone():
    est = ForwardAligner(exp_scale=3.0)
    assert est.get_params() == {"exp_scale": 3.0}
    assert clone(est).set_params(exp_scale=2.0).exp_scale == 2.0


def test_aligner_matches_functional_core():
    ref, qry = gen_sec4_pair()
    est = ForwardAligner().fit(qry.values, ref.values)
    path = align(to_deltas(ref), to_deltas(qry))
    assert est.path_ == path
    expected = apply_warp(ref, qry, path).qry_aligned.values
    np.testing.assert_array_equal(est.transform(qry.values), expected)
    np.testing.assert_array_equal(ForwardAligner().fit_transform(qry.values, ref.values),
                                  expected)


def test_aligner_transforms_columns():
    ref, qry = gen_sec4_pair()
    est = ForwardAligner().fit(qry.values, ref.values)
    X = np.column_stack([qry.values, 2 * qry.values])
    out = est.transform(X)
    np.testing.assert_allclose(out[:, 1], 2 * out[:, 0])
    with pytest.raises(InvalidInputError):
        est.transform(np.arange(5.0))


def test_selector_picks_target_shaped_column():
    ref, qry = gen_sec4_pair()
    y = ref.values
    X = np.column_stack([
        np.r_[qry.values, np.zeros(2)],     # warped relative, zero padded
        np.ones(len(y)),                    # constant: undefined score
        y,                                  # exact copy
    ])
    sel = FarmRelevanceSelector(k=1).fit(X, y)
    assert np.isnan(sel.scores_[1])
    assert sel.scores_[2] == pytest.approx(1.0)
    support = sel.get_support()
    assert support.sum() == 1 and not support[1]
    assert support.nonzero()[0][0] == np.nanargmax(sel.scores_)
    assert sel.transform(X).shape == (len(y), 1)
    all_sel = FarmRelevanceSelector(k="all").fit(X, y)
    assert all_sel.get_support().tolist() == [True, False, True]


def test_selector_in_pipeline():
    rng = np.random.default_rng(4)
    y = np.cumsum(rng.normal(size=30))
    X = np.column_stack([y + 0.01 * rng.normal(size=30), rng.normal(size=30), y])
    pipe = Pipeline([("id", FunctionTransformer()),
                     ("sel", FarmRelevanceSelector(k=2, window=3))])
    out = pipe.fit(X, y).transform(X)
    assert out.shape == (30, 2)
    assert clone(pipe).get_params()["sel__window"] == 3


def test_selector_bad_k():
    y = np.arange(10.0)
    with pytest.raises(InvalidInputError):
        FarmRelevanceSelector(k=5).fit(np.column_stack([y, y]), y)
