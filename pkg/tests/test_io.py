import json
import math
import os

import numpy as np
import pytest

from farm import io as fio
from farm.alignment import align, apply_warp, path_to_matrix_trace
from farm.distance import DistanceParams, transfer_crossover_scan
from farm.exceptions import FarmIOError, InvalidInputError, ParseError
from farm.relevance import farm_relevance, rank_exogenous
from farm.signal import TimeSeries, gen_sec4_pair, to_deltas


@pytest.fixture
def sec4():
    ref, qry = gen_sec4_pair()
    path = align(to_deltas(ref), to_deltas(qry))
    return ref, qry, path


def test_series_round_trip(tmp_path, rng):
    s = TimeSeries(rng.normal(size=50))
    fio.write_series_csv(tmp_path / "s.csv", s)
    back = fio.read_series_csv(tmp_path / "s.csv")
    np.testing.assert_array_equal(back.values, s.values)
    assert back.name == "s"


def test_series_value_only_header(tmp_path):
    (tmp_path / "v.csv").write_text("value\n1\n2.5\n\n-3\n")
    assert fio.read_series_csv(tmp_path / "v.csv").values.tolist() == [1.0, 2.5, -3.0]


@pytest.mark.parametrize("text, row", [
    ("value\n1\nabc\n", 3),
    ("index,value\n1,1\n2,2\n3\n", 4),
    ("index,value\n1,1\nx,2\n", 3),
    ("value\n1\nnan\n", 3),
    ("time,val\n1,2\n", 1),
])
def test_parse_errors_name_the_row(tmp_path, text, row):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with pytest.raises(ParseError) as info:
        fio.read_series_csv(f)
    assert info.value.row == row
    assert f"row {row}" in str(info.value)


def test_parse_error_empty_and_missing(tmp_path):
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(ParseError):
        fio.read_series_csv(tmp_path / "e.csv")
    with pytest.raises(FarmIOError):
        fio.read_series_csv(tmp_path / "missing.csv")


def test_path_json_and_csv_round_trip(tmp_path, sec4):
    _, _, path = sec4
    fio.write_path_json(tmp_path / "p.json", path)
    assert fio.read_path_json(tmp_path / "p.json") == path
    fio.write_path_csv(tmp_path / "p.csv", path)
    back = fio.read_path_csv(tmp_path / "p.csv", path.ref_len, path.qry_len)
    assert back.steps == path.steps


def test_aligned_round_trip(tmp_path, sec4):
    ref, qry, path = sec4
    pair = apply_warp(ref, qry, path)
    fio.write_aligned_csv(tmp_path / "a.csv", pair)
    back = fio.read_aligned_csv(tmp_path / "a.csv")
    np.testing.assert_array_equal(back.ref_aligned.values, pair.ref_aligned.values)
    np.testing.assert_array_equal(back.qry_aligned.values, pair.qry_aligned.values)
    np.testing.assert_array_equal(back.inserted_ref, pair.inserted_ref)
    np.testing.assert_array_equal(back.inserted_qry, pair.inserted_qry)


def test_trace_csv(tmp_path, sec4):
    _, _, path = sec4
    fio.write_trace_csv(tmp_path / "t.csv", path_to_matrix_trace(path), algorithm="farm")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "algorithm,kind,ref_idx,qry_idx"
    assert lines[1] == "farm,path,1,1"
    assert sum(line.split(",")[1] == "diagonal" for line in lines[1:]) == 2


def test_report_and_local_round_trip(tmp_path, sec4):
    ref, qry, _ = sec4
    rep = farm_relevance(ref, qry)
    fio.write_report_json(tmp_path / "r.json", rep)
    back = fio.read_report_json(tmp_path / "r.json")
    assert back.global_value == rep.global_value
    np.testing.assert_array_equal(back.local, rep.local)
    fio.write_local_csv(tmp_path / "l.csv", rep)
    centers, coef = fio.read_local_csv(tmp_path / "l.csv")
    np.testing.assert_array_equal(centers, rep.centers)
    np.testing.assert_array_equal(coef, rep.local)


def test_local_csv_keeps_nan(tmp_path):
    ref = TimeSeries([0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0])
    rep = farm_relevance(ref, ref)
    assert rep.degenerate_windows > 0
    fio.write_local_csv(tmp_path / "l.csv", rep)
    _, coef = fio.read_local_csv(tmp_path / "l.csv")
    np.testing.assert_array_equal(np.isnan(coef), np.isnan(rep.local))
    fio.write_report_json(tmp_path / "r.json", rep)
    data = json.loads((tmp_path / "r.json").read_text())
    assert any(e["coefficient"] is None for e in data["local"])


def test_ranking_round_trip(tmp_path, rng):
    target = TimeSeries(np.cumsum(rng.normal(size=30)), name="t")
    cands = [TimeSeries(target.values[:20] * k + 1, name=f"c{k}") for k in (1, 2)]
    ranking = rank_exogenous(target, cands)
    fio.write_ranking_csv(tmp_path / "r.csv", ranking)
    rows = fio.read_ranking_csv(tmp_path / "r.csv")
    assert [r[1] for r in rows] == ranking.names
    assert [r[2] for r in rows] == [e.global_value for e in ranking]


def test_crossover_round_trip(tmp_path):
    rep = transfer_crossover_scan(DistanceParams(), grid_step=0.5, delta_range=(-5, 5))
    fio.write_crossover(tmp_path / "c.json", tmp_path / "c.csv", rep)
    back = fio.read_crossover(tmp_path / "c.json", tmp_path / "c.csv")
    assert back.n_pairs == rep.n_pairs
    np.testing.assert_array_equal(back.envelope_gaps, rep.envelope_gaps)
    np.testing.assert_array_equal(back.envelope_margins, rep.envelope_margins)


def test_json_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        fio.write_json(tmp_path / "x.json", {"v": math.nan})
    assert not (tmp_path / "x.json").exists()
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_atomic_write_replaces(tmp_path):
    f = tmp_path / "sub" / "f.txt"
    fio.atomic_write(f, "one")
    fio.atomic_write(f, "two")
    assert f.read_text() == "two"
    assert os.listdir(f.parent) == ["f.txt"]


def test_atomic_write_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(FarmIOError):
        fio.atomic_write(blocker / "child.txt", "data")


def test_invalid_json(tmp_path):
    (tmp_path / "j.json").write_text("{\n  oops\n}")
    with pytest.raises(ParseError) as info:
        fio.read_json(tmp_path / "j.json")
    assert info.value.row == 2


def test_config_parsing(tmp_path):
    text = "# run settings\nwindow = 7\nexp-scale = 2.5  # smaller\nglobal_form = mean\n"
    values = fio.parse_config_text(text)
    assert values == {"window": 7, "exp_scale": 2.5, "global_form": "mean"}
    cfg = fio.RunConfig(**values)
    assert cfg.global_form == "mean_ratio"
    assert cfg.relevance_params().window == 7
    assert cfg.merged(window=None, exp_scale=1.0).exp_scale == 1.0


def test_config_rejects_unknown_and_bad(tmp_path):
    with pytest.raises(InvalidInputError):
        fio.parse_config_text("widow = 5\n")
    with pytest.raises(ParseError):
        fio.parse_config_text("window five\n")
    with pytest.raises(ParseError):
        fio.parse_config_text("window = five\n")
    with pytest.raises(InvalidInputError):
        fio.RunConfig(window=4)
    with pytest.raises(InvalidInputError):
        fio.RunConfig(format="xml")
