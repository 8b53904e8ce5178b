import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from farm.exceptions import InvalidInputError
from farm.signal import (DeltaSeries, TimeSeries, WarpSpec, apply_warp_spec,
                         correspondence_to_delta_truth, gen_base_signal, gen_sec4_pair,
                         gen_warped_family, to_deltas)


@pytest.mark.parametrize("values, expected", [
    ([0, 1, 3, 2], [1, 2, -1]),
    ([5, 5, 5], [0, 0]),
    ([0, 1], [1]),
])
def test_to_deltas_examples(values, expected):
    d = to_deltas(values)
    assert d.deltas.tolist() == expected
    assert len(d) == len(values) - 1 == d.source_length - 1


@pytest.mark.parametrize("bad", [[1.0], [], [0.0, np.nan, 1.0], [np.inf, 0.0]])
def test_time_series_rejects_short_or_nonfinite(bad):
    with pytest.raises(InvalidInputError):
        TimeSeries(bad)


def test_time_series_is_read_only():
    s = TimeSeries([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        s.values[0] = 7.0


def test_delta_series_length_invariant():
    with pytest.raises(InvalidInputError):
        DeltaSeries([1.0, 2.0], source_length=4)


def test_reconstruct_round_trip_1000_series(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        values = rng.normal(0, 10 ** rng.uniform(-3, 3), n)
        back = to_deltas(values).reconstruct(values[0]).values
        np.testing.assert_allclose(back, values, rtol=1e-12,
                                   atol=1e-12 * np.max(np.abs(values)))


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
@settings(max_examples=200, deadline=None)
def test_reconstruct_property(values):
    back = to_deltas(values).reconstruct(values[0]).values
    np.testing.assert_allclose(back, values, rtol=1e-12, atol=1e-12 * max(map(abs, values)) + 1e-300)


def test_gen_base_signal_deterministic_and_seeded():
    a, b = gen_base_signal(12, 1), gen_base_signal(12, 1)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, gen_base_signal(12, 2).values)


def test_gen_base_signal_golden(golden):
    s = gen_base_signal(8, 0)
    assert s.values.tolist() == golden["gen_base_signal_len8_seed0"]
    assert np.any(to_deltas(s).deltas == 0)


@pytest.mark.parametrize("seed", range(25))
def test_gen_base_signal_has_rise_fall_flat(seed):
    d = to_deltas(gen_base_signal(8 + seed, seed)).deltas
    assert (d > 0).any() and (d < 0).any() and (d == 0).any()


def test_gen_base_signal_rejects_short():
    with pytest.raises(InvalidInputError):
        gen_base_signal(7, 0)


def test_sec4_pair_features():
    ref, qry = gen_sec4_pair()
    r = dict(enumerate(ref.values.tolist(), start=1))
    q = dict(enumerate(qry.values.tolist(), start=1))
    assert r[4] < r[3] and r[4] < r[5]
    assert r[9] < r[8] and r[9] < r[10]
    assert r[10] > r[9] and r[10] > r[11]
    assert q[6] == q[7]
    assert len(ref) >= len(qry)
    # query leads: its peak comes no later than the reference peak
    assert np.argmax(qry.values) <= np.argmax(ref.values)


def test_apply_warp_spec_identity():
    s = TimeSeries([0.0, 1.0, 3.0, 2.0])
    out, corr = apply_warp_spec(s, WarpSpec())
    assert out == s
    assert corr.tolist() == [0, 1, 2, 3]


def test_apply_warp_spec_insertion_length_and_values():
    s = TimeSeries([0.0, 1.0, 4.0, 7.0, 2.0])
    out, corr = apply_warp_spec(s, WarpSpec(insertions=((3, 2),)))
    assert len(out) == len(s) + 2
    # two samples spread evenly between 4 and 7
    np.testing.assert_allclose(out.values, [0, 1, 4, 5, 6, 7, 2])
    np.testing.assert_allclose(corr, [0, 1, 2, 2 + 1 / 3, 2 + 2 / 3, 3, 4])


def test_apply_warp_spec_plateau_golden(golden):
    case = golden["apply_warp_spec_plateau"]
    spec = WarpSpec(distortions=(("plateau", case["position"], 0.0),))
    out, corr = apply_warp_spec(case["source"], spec)
    assert out.values.tolist() == case["expected"]
    assert corr.tolist() == case["correspondence"]


def test_apply_warp_spec_valley_and_overshoot():
    spec = WarpSpec(distortions=(("valley", 1, 2.0), ("overshoot", 3, 1.5)))
    out, _ = apply_warp_spec([0.0, 1.0, 2.0, 3.0], spec)
    assert out.values.tolist() == [0.0, -1.0, 2.0, 4.5]


@pytest.mark.parametrize("spec", [
    WarpSpec(insertions=((0, 1),)),
    WarpSpec(insertions=((4, 1),)),
    WarpSpec(distortions=(("valley", 4, 1.0),)),
])
def test_apply_warp_spec_out_of_range(spec):
    with pytest.raises(InvalidInputError):
        apply_warp_spec([0.0, 1.0, 2.0, 3.0], spec)


def test_warp_spec_positions_must_increase():
    with pytest.raises(InvalidInputError):
        WarpSpec(insertions=((3, 1), (2, 1)))
    with pytest.raises(InvalidInputError):
        WarpSpec(distortions=(("bump", 1, 0.0),))


def test_warp_spec_noise_uses_seed():
    spec = WarpSpec(insertions=((2, 1),), noise=0.1)
    a, _ = apply_warp_spec([0.0, 1.0, 2.0, 3.0], spec, seed=3)
    b, _ = apply_warp_spec([0.0, 1.0, 2.0, 3.0], spec, seed=3)
    c, _ = apply_warp_spec([0.0, 1.0, 2.0, 3.0], spec, seed=4)
    assert a == b and a != c


def test_delta_truth_skips_inserted():
    # source 0..3, one sample inserted before source sample 2
    corr = [0.0, 1.0, 1.5, 2.0, 3.0]
    assert correspondence_to_delta_truth(corr) == [(1, 1), (4, 3)]


def test_warped_family_is_pure():
    a = gen_warped_family(4, 20, seed=9)
    b = gen_warped_family(4, 20, seed=9)
    for x, y in zip(a, b):
        assert x.ref == y.ref and x.qry == y.qry and x.spec == y.spec
        assert len(x.ref) > len(x.qry)
