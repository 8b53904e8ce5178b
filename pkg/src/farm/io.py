"""CSV/JSON readers and writers for series, paths, reports and configs.

Every writer goes through :func:`atomic_write` (temporary file + rename) and
every format has a matching reader, so emitted files round-trip. Floats are
written with ``repr`` to stay lossless. Indices in files are 1-based.
"""

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .alignment import AlignedPair, WarpPath
from .distance import CrossoverReport, DistanceParams
from .exceptions import FarmIOError, InvalidInputError, ParseError
from .relevance import RelevanceParams, RelevanceReport, normalize_global_form
from .signal import TimeSeries

__all__ = [
    "atomic_write",
    "read_series_csv",
    "write_series_csv",
    "write_json",
    "read_json",
    "write_path_json",
    "read_path_json",
    "write_path_csv",
    "read_path_csv",
    "write_aligned_csv",
    "read_aligned_csv",
    "write_trace_csv",
    "write_report_json",
    "read_report_json",
    "write_local_csv",
    "read_local_csv",
    "write_ranking_csv",
    "read_ranking_csv",
    "write_crossover",
    "read_crossover",
    "RunConfig",
    "read_config",
]


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else repr(float(x))
    return str(x)


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise FarmIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _read_rows(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc.reason}", path=path) from None
    except OSError as exc:
        raise FarmIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError("empty file, header row required", path=path)
    header = [h.strip().lower() for h in rows[0]]
    return header, rows[1:]


def _float(cell, path, row):
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", path=path, row=row) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {cell!r}", path=path, row=row)
    return value


def read_series_csv(path, name=None):
    """Read a series from a ``value`` or ``index,value`` CSV file.

    Row order defines sample order; ``row`` numbers in errors count the
    header as row 1.
    """
    header, rows = _read_rows(path)
    if header == ["value"]:
        col = 0
    elif header == ["index", "value"]:
        col = 1
    else:
        raise ParseError(f"expected header 'value' or 'index,value', got {header}",
                         path=path, row=1)
    values = []
    for k, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}",
                             path=path, row=k)
        if col == 1:
            _float(row[0], path, k)
        values.append(_float(row[col], path, k))
    if len(values) < 2:
        raise ParseError("a series needs at least two samples", path=path)
    return TimeSeries(values, name=name if name is not None else Path(path).stem)


def write_series_csv(path, series):
    values = np.asarray(series, dtype=float)
    return atomic_write(path, _csv_text(["index", "value"],
                                        ((i + 1, float(v)) for i, v in enumerate(values))))


def write_json(path, data):
    return atomic_write(path, json.dumps(data, indent=2, allow_nan=False) + "\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=path, row=exc.lineno) from None
    except OSError as exc:
        raise FarmIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def write_path_json(path, warp_path):
    return write_json(path, warp_path.to_dict())


def read_path_json(path):
    try:
        return WarpPath.from_dict(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a warp path: {exc}", path=path) from None


def write_path_csv(path, warp_path):
    """Steps as ``step,ref_idx,qry_idx``.

    Delta lengths and the evaluation count live only in the JSON form; pass
    the lengths to :func:`read_path_csv` when they matter.
    """
    rows = ((k + 1, r, q) for k, (r, q) in enumerate(warp_path.steps))
    return atomic_write(path, _csv_text(["step", "ref_idx", "qry_idx"], rows))


def read_path_csv(path, ref_len=None, qry_len=None):
    header, rows = _read_rows(path)
    if header != ["step", "ref_idx", "qry_idx"]:
        raise ParseError(f"unexpected header {header}", path=path, row=1)
    steps = []
    for k, row in enumerate(rows, start=2):
        try:
            steps.append((int(row[1]), int(row[2])))
        except (ValueError, IndexError):
            raise ParseError("bad step row", path=path, row=k) from None
    if ref_len is None:
        ref_len = max(r for r, _ in steps)
    if qry_len is None:
        qry_len = max(q for _, q in steps)
    return WarpPath(tuple(steps), ref_len=ref_len, qry_len=qry_len)


_ALIGNED_HEADER = ["position", "ref_value", "ref_inserted", "qry_value", "qry_inserted"]


def write_aligned_csv(path, pair):
    rows = ((k + 1, r, ri, q, qi) for k, (r, ri, q, qi) in enumerate(zip(
        pair.ref_aligned.values.tolist(), pair.inserted_ref.tolist(),
        pair.qry_aligned.values.tolist(), pair.inserted_qry.tolist())))
    return atomic_write(path, _csv_text(_ALIGNED_HEADER, rows))


def _bool(cell, path, row):
    cell = cell.strip().lower()
    if cell in ("true", "1"):
        return True
    if cell in ("false", "0"):
        return False
    raise ParseError(f"not a boolean: {cell!r}", path=path, row=row)


def read_aligned_csv(path):
    """Read an aligned pair; ``trimmed_tail`` is not stored in the CSV."""
    header, rows = _read_rows(path)
    if header != _ALIGNED_HEADER:
        raise ParseError(f"unexpected header {header}", path=path, row=1)
    cols = list(zip(*[(_float(r[1], path, k), _bool(r[2], path, k),
                       _float(r[3], path, k), _bool(r[4], path, k))
                      for k, r in enumerate(rows, start=2)]))
    return AlignedPair(TimeSeries(cols[0]), TimeSeries(cols[2]),
                       np.array(cols[1]), np.array(cols[3]))


def write_trace_csv(path, trace, algorithm=None):
    """Matrix-trace points plus the two endpoints of the diagonal bound."""
    header = ["kind", "ref_idx", "qry_idx"]
    rows = [("path", r, q) for r, q in trace.points]
    rows += [("diagonal", r, q) for r, q in trace.diagonal]
    if algorithm is not None:
        header = ["algorithm"] + header
        rows = [(algorithm,) + row for row in rows]
    return atomic_write(path, _csv_text(header, rows))


def write_report_json(path, report):
    return write_json(path, report.to_dict())


def read_report_json(path):
    try:
        return RelevanceReport.from_dict(read_json(path))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a relevance report: {exc}", path=path) from None


def write_local_csv(path, report):
    rows = ((c + 1, v) for c, v in zip(report.centers.tolist(), report.local.tolist()))
    return atomic_write(path, _csv_text(["center_index", "coefficient"], rows))


def read_local_csv(path):
    header, rows = _read_rows(path)
    if header != ["center_index", "coefficient"]:
        raise ParseError(f"unexpected header {header}", path=path, row=1)
    centers = np.array([int(r[0]) - 1 for r in rows], dtype=int)
    coef = np.array([math.nan if r[1].strip() == "" else _float(r[1], path, k)
                     for k, r in enumerate(rows, start=2)])
    return centers, coef


def write_ranking_csv(path, ranking):
    rows = ((k + 1, e.name, e.global_value, e.full_correlation)
            for k, e in enumerate(ranking.entries))
    return atomic_write(path, _csv_text(["rank", "name", "global", "full_correlation"], rows))


def read_ranking_csv(path):
    header, rows = _read_rows(path)
    if header != ["rank", "name", "global", "full_correlation"]:
        raise ParseError(f"unexpected header {header}", path=path, row=1)
    return [(int(r[0]), r[1], _float(r[2], path, k), _float(r[3], path, k))
            for k, r in enumerate(rows, start=2)]


def write_crossover(json_path, csv_path, report):
    write_json(json_path, report.to_dict())
    rows = zip(report.envelope_gaps.tolist(), report.envelope_margins.tolist())
    atomic_write(csv_path, _csv_text(["angular_gap", "exp_minus_sine"], rows))


def read_crossover(json_path, csv_path=None):
    envelope = None
    if csv_path is not None:
        header, rows = _read_rows(csv_path)
        if header != ["angular_gap", "exp_minus_sine"]:
            raise ParseError(f"unexpected header {header}", path=csv_path, row=1)
        envelope = ([float(r[0]) for r in rows], [float(r[1]) for r in rows])
    return CrossoverReport.from_dict(read_json(json_path), envelope)


@dataclass(frozen=True)
class RunConfig:
    """Command-line run settings; see :func:`read_config` for the file format."""

    window: int = 5
    exp_scale: float = 5.0
    global_form: str = "rms_ratio"
    denom_epsilon: float = 1e-6
    output_dir: str = "farm_out"
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise InvalidInputError(f"format must be 'json' or 'csv', got {self.format!r}")
        object.__setattr__(self, "global_form", normalize_global_form(self.global_form))
        # validate numeric fields through the parameter types
        self.distance_params()
        self.relevance_params()

    def distance_params(self):
        return DistanceParams(exp_scale=self.exp_scale)

    def relevance_params(self):
        return RelevanceParams(window=self.window, global_form=self.global_form,
                               denom_epsilon=self.denom_epsilon)

    def merged(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"window": int, "exp_scale": float, "denom_epsilon": float}


def parse_config_text(text, path=None):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for k, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", path=path, row=k)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise InvalidInputError(f"unknown config key {key!r}"
                                    + (f" in {path} line {k}" if path else ""))
        cast = _CASTS.get(key, str)
        try:
            values[key] = cast(value)
        except ValueError:
            raise ParseError(f"bad value for {key}: {value!r}", path=path, row=k) from None
    return values


def read_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FarmIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, path=path)
