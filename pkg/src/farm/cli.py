"""``farm`` command-line interface.

Exit codes: 0 success, 2 invalid input, 3 parse error, 4 I/O error. Errors
are reported as a single ``farm: error[<kind>]: <message>`` line on stderr.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io as fio
from .alignment import WarpPath, align, apply_warp, path_to_matrix_trace
from .baselines import (amss_align, compare_paths, ddtw, delta_path_to_sample_path, dtw,
                        pair_from_index_path)
from .distance import transfer_crossover_scan
from .exceptions import FarmError, FarmIOError, InvalidInputError, ParseError
from .relevance import farm_relevance, rank_exogenous
from .signal import (correspondence_to_delta_truth, gen_base_signal, gen_sec4_pair,
                     gen_warped_family, to_deltas)

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_IO = 0, 2, 3, 4

_ERROR_KIND = {EXIT_INVALID: "invalid-input", EXIT_PARSE: "parse", EXIT_IO: "io"}


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--window", type=int, help="local correlation window (odd, default 5)")
    g.add_argument("--exp-scale", type=float, help="exponent multiplier (default 5.0)")
    g.add_argument("--global-form", choices=["rms", "mean", "rms_ratio", "mean_ratio"],
                   help="global relevance aggregate (default rms)")
    g.add_argument("--epsilon", type=float, dest="denom_epsilon",
                   help="denominator clamp (default 1e-6)")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--out", dest="output_dir",
                   help="output directory (default $FARM_OUT_DIR or ./farm_out)")
    g.add_argument("--format", choices=["json", "csv"], help="path file format")
    g.add_argument("--config", help="flat key = value config file")
    return p


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="farm", description="Forward aligned relevance of exogenous time series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write synthetic series")
    p.add_argument("kind", choices=["base", "sec4-pair", "warped-family"])
    p.add_argument("--length", type=int, default=24)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--noise", type=float, default=0.0)

    p = sub.add_parser("align", parents=[common], help="forward-align two series")
    p.add_argument("ref")
    p.add_argument("qry")

    p = sub.add_parser("relevance", parents=[common], help="relevance of qry for ref")
    p.add_argument("ref")
    p.add_argument("qry")

    p = sub.add_parser("rank", parents=[common], help="rank candidate series")
    p.add_argument("target")
    p.add_argument("candidates_dir")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("compare", parents=[common], help="FARM vs DTW/DDTW/AMSS-style")
    p.add_argument("ref")
    p.add_argument("qry")
    p.add_argument("--truth", help="ground-truth JSON written by 'gen warped-family'")

    p = sub.add_parser("crossover", parents=[common], help="transfer-function scan")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--range", type=float, nargs=2, default=(-10.0, 10.0),
                   metavar=("LOW", "HIGH"))
    return parser


def resolve_config(args, environ=None):
    """Flags override the config file, which overrides ``$FARM_OUT_DIR`` and defaults."""
    environ = os.environ if environ is None else environ
    base = {}
    if environ.get("FARM_OUT_DIR"):
        base["output_dir"] = environ["FARM_OUT_DIR"]
    if args.config:
        base.update(fio.read_config(args.config))
    config = fio.RunConfig(**base)
    return config.merged(window=args.window, exp_scale=args.exp_scale,
                         global_form=args.global_form, denom_epsilon=args.denom_epsilon,
                         output_dir=args.output_dir, format=args.format)


def _write_path(out, stem, path, fmt):
    if fmt == "csv":
        return fio.write_path_csv(out / f"{stem}.csv", path)
    return fio.write_path_json(out / f"{stem}.json", path)


def cmd_gen(args, config):
    out = Path(config.output_dir)
    written = []
    if args.kind == "base":
        s = gen_base_signal(args.length, args.seed)
        written.append(fio.write_series_csv(out / "base.csv", s))
    elif args.kind == "sec4-pair":
        ref, qry = gen_sec4_pair()
        written.append(fio.write_series_csv(out / "sec4_ref.csv", ref))
        written.append(fio.write_series_csv(out / "sec4_qry.csv", qry))
    else:
        for i, wp in enumerate(gen_warped_family(args.count, args.length, args.seed,
                                                 noise=args.noise)):
            stem = out / f"pair_{i:03d}"
            written.append(fio.write_series_csv(f"{stem}_ref.csv", wp.ref))
            written.append(fio.write_series_csv(f"{stem}_qry.csv", wp.qry))
            truth = {
                "spec": wp.spec.to_dict(),
                # 1-based source position of every reference sample
                "correspondence": (wp.correspondence + 1).tolist(),
                "delta_truth": [list(t) for t in
                                correspondence_to_delta_truth(wp.correspondence)],
            }
            written.append(fio.write_json(f"{stem}_truth.json", truth))
    for path in written:
        print(path)
    return EXIT_OK


def _load_pair(args):
    return fio.read_series_csv(args.ref), fio.read_series_csv(args.qry)


def cmd_align(args, config):
    ref, qry = _load_pair(args)
    path = align(to_deltas(ref), to_deltas(qry), config.distance_params())
    pair = apply_warp(ref, qry, path)
    out = Path(config.output_dir)
    _write_path(out, "path", path, config.format)
    fio.write_aligned_csv(out / "aligned.csv", pair)
    fio.write_trace_csv(out / "trace.csv", path_to_matrix_trace(path))
    print(f"steps={len(path)} evaluations={path.evaluations} aligned_length={len(pair)}"
          f" trimmed_tail={list(pair.trimmed_tail)}")
    return EXIT_OK


def cmd_relevance(args, config):
    ref, qry = _load_pair(args)
    report = farm_relevance(ref, qry, config.distance_params(), config.relevance_params())
    out = Path(config.output_dir)
    fio.write_report_json(out / "report.json", report)
    fio.write_local_csv(out / "local.csv", report)
    print(f"global={report.global_value!r} full_correlation={report.full_correlation!r}"
          f" degenerate_windows={report.degenerate_windows}")
    return EXIT_OK


def cmd_rank(args, config):
    target = fio.read_series_csv(args.target)
    cand_dir = Path(args.candidates_dir)
    if not cand_dir.is_dir():
        raise FarmIOError(f"{cand_dir} is not a directory")
    target_path = Path(args.target).resolve()
    candidates, skipped = [], []
    for f in sorted(cand_dir.glob("*.csv")):
        if f.resolve() == target_path:
            continue
        try:
            candidates.append(fio.read_series_csv(f))
        except (ParseError, InvalidInputError) as exc:
            skipped.append({"file": f.name, "stage": "parse", "error": str(exc)})
    if not candidates:
        raise InvalidInputError(f"no parseable candidate series in {cand_dir}")
    ranking = rank_exogenous(target, candidates, config.distance_params(),
                             config.relevance_params(), max_workers=args.jobs)
    for name, error in ranking.errors:
        skipped.append({"file": f"{name}.csv", "stage": "relevance", "error": error})
    out = Path(config.output_dir)
    fio.write_ranking_csv(out / "ranking.csv", ranking)
    for entry in ranking.entries:
        fio.write_report_json(out / "reports" / f"{entry.name}.json", entry.report)
    fio.write_json(out / "skipped.json", {"skipped": skipped})
    for k, entry in enumerate(ranking.entries, start=1):
        print(f"{k}\t{entry.name}\t{entry.global_value!r}")
    return EXIT_OK


def _write_baseline(out, name, ref, qry, path, fmt):
    d = out / name
    pairs = np.asarray(path)
    fio.write_json(d / "path.json", {"algorithm": name, "ref_len": len(ref),
                                    "qry_len": len(qry), "steps": pairs.tolist()})
    r, q, rr, qr = pair_from_index_path(ref, qry, path)
    rows = "position,ref_value,ref_inserted,qry_value,qry_inserted\n" + "".join(
        f"{k + 1},{a!r},{str(bool(x)).lower()},{b!r},{str(bool(y)).lower()}\n"
        for k, (a, x, b, y) in enumerate(zip(r.tolist(), rr, q.tolist(), qr)))
    fio.atomic_write(d / "aligned.csv", rows)


def cmd_compare(args, config):
    ref, qry = _load_pair(args)
    out = Path(config.output_dir)
    farm_path = align(to_deltas(ref), to_deltas(qry), config.distance_params())
    farm_pair = apply_warp(ref, qry, farm_path)
    _write_path(out / "farm", "path", farm_path, config.format)
    fio.write_aligned_csv(out / "farm" / "aligned.csv", farm_pair)

    amss_sim, amss_steps = amss_align(ref, qry)
    amss_out = out / "amss_style"
    fio.write_json(amss_out / "path.json", {
        "algorithm": "amss_style", "ref_len": len(ref) - 1, "qry_len": len(qry) - 1,
        "steps": [list(s) for s in amss_steps], "similarity": amss_sim})
    # same move set as the forward aligner, so the same insertion-only warp applies
    amss_path = WarpPath(tuple(amss_steps), ref_len=len(ref) - 1, qry_len=len(qry) - 1)
    fio.write_aligned_csv(amss_out / "aligned.csv", apply_warp(ref, qry, amss_path))

    dtw_cost, dtw_path = dtw(ref, qry)
    _write_baseline(out, "dtw", ref, qry, dtw_path, config.format)
    ddtw_cost, ddtw_path = ddtw(ref, qry)
    _write_baseline(out, "ddtw", ref, qry, ddtw_path, config.format)

    truth = None
    if args.truth:
        truth = [tuple(t) for t in fio.read_json(args.truth)["delta_truth"]]
    farm_samples = delta_path_to_sample_path(farm_path)
    divergence = {
        "farm_vs_amss_style": compare_paths(farm_path.steps, amss_steps, truth).to_dict(),
        "farm_vs_dtw": compare_paths(farm_samples, dtw_path).to_dict(),
        "farm_vs_ddtw": compare_paths(farm_samples, ddtw_path).to_dict(),
        "costs": {"dtw": dtw_cost, "ddtw": ddtw_cost, "amss_style_similarity": amss_sim},
        "paths_differ": {
            "amss_style": list(farm_path.steps) != [tuple(s) for s in amss_steps],
            "dtw": farm_samples != dtw_path,
            "ddtw": farm_samples != ddtw_path,
        },
        "farm_in_lower_triangle": path_to_matrix_trace(farm_path).in_lower_triangle(),
    }
    fio.write_json(out / "divergence.json", divergence)

    bundle = [("farm", farm_samples), ("amss_style", delta_path_to_sample_path(amss_steps)),
              ("dtw", dtw_path), ("ddtw", ddtw_path)]
    lines = ["algorithm,step,ref_idx,qry_idx\n"]
    for name, steps in bundle:
        lines += [f"{name},{k + 1},{r},{q}\n" for k, (r, q) in enumerate(steps)]
    fio.atomic_write(out / "plot_bundle.csv", "".join(lines))
    fio.write_trace_csv(out / "farm" / "trace.csv", path_to_matrix_trace(farm_path))
    print(f"farm_steps={len(farm_path)} amss_style_steps={len(amss_steps)} "
          f"dtw_cost={dtw_cost!r} ddtw_cost={ddtw_cost!r}")
    return EXIT_OK


def cmd_crossover(args, config):
    report = transfer_crossover_scan(config.distance_params(), args.grid_step,
                                     tuple(args.range))
    out = Path(config.output_dir)
    fio.write_crossover(out / "crossover.json", out / "crossover.csv", report)
    print(f"pairs={report.n_pairs} failing_gaps={len(report.failing_gaps)}"
          f" max_failing_gap={report.max_failing_gap!r}")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "align": cmd_align,
    "relevance": cmd_relevance,
    "rank": cmd_rank,
    "compare": cmd_compare,
    "crossover": cmd_crossover,
}


def main(argv=None, environ=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args, environ)
        return COMMANDS[args.command](args, config)
    except FarmError as exc:
        code = exc.exit_code if exc.exit_code in _ERROR_KIND else EXIT_INVALID
        message = " ".join(str(exc).split())
        print(f"farm: error[{_ERROR_KIND[code]}]: {message}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
