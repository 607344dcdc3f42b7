"""Batch command-line driver.

Three subcommands, all config-file driven with flag overrides:

  crossval   sliding-block RMSE for the proxy source plus each configured
             noise experiment (one realization each); summary table sorted
             by mean RMSE.
  figure2    white-noise and AR(1) ensembles, the large-p limit curve, and
             the simple-kriging curve as one combined CSV and SVG chart.
  limit      convergence table: noise-column count vs. median RMS distance
             to the limit curve and member scatter.

Every command writes a manifest.json; pointing --config at a manifest
reproduces the run byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from ._version import __version__
from .core import TimeSeries
from .crossval import ExperimentReport, make_blocks, run_ensemble, run_experiment
from .errors import PaleoXvalError
from .limit import kriging_curve, limit_curve, rms_difference, rms_difference_values
from .noise import NoiseSpec, generate
from .svgplot import PlotSpec, Series, write_svg

# Experiments within one command draw from seeds this far apart; members
# within an ensemble use consecutive seeds, so ensembles never overlap.
SEED_STRIDE = 1_000_000

log = logging.getLogger("paleoxval")


def _noise_spec(src: io.NoiseSource, n: int, seed: int, default_p: int) -> NoiseSpec:
    return NoiseSpec(kind=src.kind, n=n, p=src.p if src.p is not None else default_p,
                     seed=seed, phi=src.phi)


def _load_target(config: io.ExperimentConfig) -> TimeSeries:
    y = io.load_target(config.target_path)
    mean, std = float(y.values.mean()), float(y.values.std())
    if config.center_target:
        y = TimeSeries(years=y.years, values=y.values - mean)
    elif std > 0 and abs(mean) > 0.1 * std:
        log.warning("target mean %.4g is large next to its std %.4g; the kriging "
                    "curve assumes a zero-mean target (consider --center-target)",
                    mean, std)
    return y


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        out.writerows(rows)
    return path


def _fmt(x) -> str:
    return format(float(x), ".17g")


def cmd_crossval(config: io.ExperimentConfig) -> int:
    y = _load_target(config)
    splits = make_blocks(y.n, config.n_v)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_kw = dict(mode=config.mode, drop_degenerate=config.drop_degenerate)

    reports: list[ExperimentReport] = []
    if isinstance(config.proxy_source, io.FileSource):
        X = io.load_proxies(config.proxy_source.path, expected_years=y.years)
        reports.append(run_experiment(X, y, splits, label="proxies", **run_kw))
    else:
        spec = _noise_spec(config.proxy_source, y.n, config.seed, config.noise_columns)
        reports.append(run_experiment(generate(spec), y, splits, label=spec.label, **run_kw))

    seen = {r.label for r in reports}
    for k, src in enumerate(config.noise_experiments):
        spec = _noise_spec(src, y.n, config.seed + SEED_STRIDE * (k + 1), config.noise_columns)
        label = spec.label if spec.label not in seen else f"{spec.label}_{k + 1}"
        seen.add(label)
        reports.append(run_experiment(generate(spec), y, splits, label=label, **run_kw))

    outputs = []
    for report in reports:
        outputs += io.write_report(report, out_dir, years=y.years)

    ranked = sorted(reports, key=lambda r: (r.mean_rmse, r.label))
    summary = _write_csv(out_dir / "summary.csv", ["label", "mean_rmse"],
                         [[r.label, _fmt(r.mean_rmse)] for r in ranked])
    outputs.append(summary)
    outputs.append(io.write_manifest(out_dir, "crossval", config, outputs))

    print(f"{'experiment':24s}  mean RMSE (degC)")
    for r in ranked:
        print(f"{r.label:24s}  {r.mean_rmse:.6f}")
    return 0


def cmd_figure2(config: io.ExperimentConfig) -> int:
    y = _load_target(config)
    splits = make_blocks(y.n, config.n_v)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    m = config.ensemble_size
    starts = np.array([s.block_start for s in splits])
    x_years = y.years[starts].astype(float)
    outputs: list[Path] = []

    proxy_report = None
    if isinstance(config.proxy_source, io.FileSource):
        X = io.load_proxies(config.proxy_source.path, expected_years=y.years)
        proxy_report = run_experiment(X, y, splits, label="proxies", mode=config.mode,
                                      drop_degenerate=config.drop_degenerate)
        outputs += io.write_report(proxy_report, out_dir, years=y.years)

    white = run_ensemble(NoiseSpec(kind="white", n=y.n, p=config.noise_columns,
                                   seed=config.seed + SEED_STRIDE), y, splits, m,
                         mode=config.mode)
    outputs += io.write_report(white, out_dir, years=y.years)

    per_phi = []
    for i, phi in enumerate(config.phi_list):
        ens = run_ensemble(NoiseSpec(kind="ar1", n=y.n, p=config.noise_columns,
                                     seed=config.seed + SEED_STRIDE * (2 + i), phi=phi),
                           y, splits, m, mode=config.mode)
        lim_rep, lim_res = limit_curve(phi, y, splits, P=config.psi_mc_columns,
                                       seed=config.seed + SEED_STRIDE * (100 + i))
        krig_rep, krig_res = kriging_curve(phi, y, splits)
        per_phi.append((phi, ens, lim_rep, krig_rep))
        outputs += io.write_report(ens, out_dir, years=y.years)
        outputs += io.write_report(lim_rep, out_dir, years=y.years)
        outputs += io.write_report(krig_rep, out_dir, years=y.years)

        ens_vs_lim = float(np.sqrt(np.mean((ens.mean_curve - lim_rep.block_rmse) ** 2)))
        print(f"phi={phi:g}: RMS difference, ensemble-mean RMSE vs limit RMSE: "
              f"{ens_vs_lim:.6g} degC")
        print(f"phi={phi:g}: RMS difference, limit vs kriging (RMSE curves):  "
              f"{rms_difference(lim_rep, krig_rep):.6g} degC")
        print(f"phi={phi:g}: RMS difference, limit vs kriging (predictions):  "
              f"{rms_difference_values(lim_res, krig_res):.6g} degC")

    header = ["block_start", "block_year"]
    columns = [starts.astype(int).tolist(), y.years[starts].astype(int).tolist()]
    if proxy_report is not None:
        header.append("proxies")
        columns.append([_fmt(v) for v in proxy_report.block_rmse])
    header += ["white_mean", "white_scatter"]
    columns += [[_fmt(v) for v in white.mean_curve],
                [_fmt(v) for v in white.member_scatter]]
    for phi, ens, lim_rep, krig_rep in per_phi:
        tag = f"ar1_{phi:g}".replace(".", "_")
        header += [f"{tag}_mean", f"{tag}_scatter", f"limit_{tag}", f"kriging_{tag}"]
        columns += [[_fmt(v) for v in ens.mean_curve],
                    [_fmt(v) for v in ens.member_scatter],
                    [_fmt(v) for v in lim_rep.block_rmse],
                    [_fmt(v) for v in krig_rep.block_rmse]]
    combined = _write_csv(out_dir / "figure2.csv", header, list(map(list, zip(*columns))))
    outputs.append(combined)

    series: list[Series] = []
    for rep in white.member_reports:
        series.append(Series("white members", x_years, rep.block_rmse,
                             color="magenta", kind="dots", opacity=0.5))
    for phi, ens, _, _ in per_phi:
        for rep in ens.member_reports:
            series.append(Series(f"ar1({phi:g}) members", x_years, rep.block_rmse,
                                 color="gold", kind="dots", opacity=0.5))
    if proxy_report is not None:
        series.append(Series("proxies", x_years, proxy_report.block_rmse, color="red"))
    series.append(Series("white mean", x_years, white.mean_curve, color="blue"))
    for phi, ens, lim_rep, krig_rep in per_phi:
        series.append(Series(f"ar1({phi:g}) mean", x_years, ens.mean_curve, color="black"))
        series.append(Series(f"limit ar1({phi:g})", x_years, lim_rep.block_rmse,
                             color="magenta", kind="dashes"))
        series.append(Series(f"kriging ar1({phi:g})", x_years, krig_rep.block_rmse,
                             color="green"))
    svg = write_svg(PlotSpec(series=tuple(series), title="Holdout RMSE by block start",
                             x_label="block start year", y_label="RMSE (degC)"),
                    out_dir / "figure2.svg")
    outputs.append(svg)
    outputs.append(io.write_manifest(out_dir, "figure2", config, outputs))
    return 0


def cmd_limit(config: io.ExperimentConfig) -> int:
    y = _load_target(config)
    splits = make_blocks(y.n, config.n_v)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    starts = [s.block_start for s in splits]
    outputs: list[Path] = []

    table_rows, member_rows = [], []
    scatter_header = ["block_start", "block_year"]
    scatter_cols = [[int(s) for s in starts], [int(y.years[s]) for s in starts]]
    print(f"{'phi':>6s} {'p':>8s} {'median RMS diff to limit':>26s} {'mean member scatter':>20s}")
    for i, phi in enumerate(config.phi_list):
        lim_rep, _ = limit_curve(phi, y, splits, P=config.psi_mc_columns,
                                 seed=config.seed + SEED_STRIDE * (100 + i))
        outputs += io.write_report(lim_rep, out_dir, years=y.years)
        for k, p in enumerate(config.p_ladder):
            ens = run_ensemble(
                NoiseSpec(kind="ar1", n=y.n, p=p, phi=phi,
                          seed=config.seed + SEED_STRIDE * (1 + i * len(config.p_ladder) + k)),
                y, splits, config.limit_repeats, mode=config.mode)
            diffs = [rms_difference(rep, lim_rep) for rep in ens.member_reports]
            median_diff = float(np.median(diffs))
            mean_scatter = float(ens.member_scatter.mean())
            table_rows.append([_fmt(phi), p, _fmt(median_diff), _fmt(mean_scatter)])
            member_rows += [[_fmt(phi), p, j, _fmt(d)] for j, d in enumerate(diffs)]
            scatter_header.append(f"scatter_phi{phi:g}_p{p}".replace(".", "_"))
            scatter_cols.append([_fmt(v) for v in ens.member_scatter])
            print(f"{phi:6g} {p:8d} {median_diff:26.6g} {mean_scatter:20.6g}")

    outputs.append(_write_csv(out_dir / "limit_table.csv",
                              ["phi", "p", "median_rms_diff_to_limit", "mean_member_scatter"],
                              table_rows))
    outputs.append(_write_csv(out_dir / "limit_members.csv",
                              ["phi", "p", "member", "rms_diff_to_limit"], member_rows))
    outputs.append(_write_csv(out_dir / "limit_scatter.csv", scatter_header,
                              list(map(list, zip(*scatter_cols)))))
    outputs.append(io.write_manifest(out_dir, "limit", config, outputs))
    return 0


COMMANDS = {"crossval": cmd_crossval, "figure2": cmd_figure2, "limit": cmd_limit}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paleo-xval",
        description="Sliding-block cross-validation of ridge reconstructions, "
                    "noise nulls, and their large-p kriging limit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("crossval", "RMSE summary for the proxy source and configured noise runs"),
        ("figure2", "ensembles, limit, and kriging curves as CSV + SVG"),
        ("limit", "convergence table of noise runs toward the limit curve"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON config (or manifest) path")
        cmd.add_argument("--seed", type=int, help="override base seed")
        cmd.add_argument("--nv", type=int, help="override holdout block length")
        cmd.add_argument("--ensemble", type=int, help="override ensemble size")
        cmd.add_argument("--phi", type=float, help="override phi_list with one value")
        cmd.add_argument("--mc-columns", type=int, help="override psi_mc_columns")
        cmd.add_argument("--drop-degenerate", action="store_true",
                         help="drop zero-variance proxy columns instead of failing")
        cmd.add_argument("--center-target", action="store_true",
                         help="subtract the target's overall mean before running")
        cmd.add_argument("--out", help="override the output directory")
    return parser


def _apply_overrides(config: io.ExperimentConfig, args) -> io.ExperimentConfig:
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.nv is not None:
        updates["n_v"] = args.nv
    if args.ensemble is not None:
        updates["ensemble_size"] = args.ensemble
    if args.phi is not None:
        updates["phi_list"] = (args.phi,)
    if args.mc_columns is not None:
        updates["psi_mc_columns"] = args.mc_columns
    if args.drop_degenerate:
        updates["drop_degenerate"] = True
    if args.center_target:
        updates["center_target"] = True
    if args.out is not None:
        updates["output_dir"] = str(Path(args.out).resolve())
    return replace(config, **updates) if updates else config


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(io.load_config(args.config), args)
        return COMMANDS[args.command](config)
    except (PaleoXvalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
