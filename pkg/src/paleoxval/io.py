"""CSV ingestion, report output, and experiment configs.

All interchange files are plain CSV with 17-significant-digit decimal floats,
which round-trip 64-bit values exactly while staying inspectable. Every
command writes a JSON manifest holding the fully resolved config, so a run
can be reproduced by pointing --config at the manifest itself.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .core import ProxyMatrix, TimeSeries
from .crossval import EnsembleReport, ExperimentReport
from .errors import (ConfigError, NonAnnualYears, NonFiniteValue, ParseError,
                     YearMismatch)
from .noise import KINDS

DEFAULT_NOISE_COLUMNS = 1138


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class FileSource:
    """Proxies read from a CSV file."""

    path: str


@dataclass(frozen=True)
class NoiseSource:
    """Proxies generated as noise; n and default p are filled at run time."""

    kind: str
    phi: float | None = None
    p: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "ar1":
            if self.phi is None or not 0.0 <= self.phi < 1.0:
                raise ConfigError("ar1 noise requires 0 <= phi < 1")
        elif self.phi is not None:
            raise ConfigError(f"phi is only meaningful for ar1 noise, not {self.kind!r}")
        if self.p is not None and self.p < 1:
            raise ConfigError("p must be at least 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one batch run.

    Defaults reproduce the reference experimental design: 30-year holdout
    blocks and 100-member ensembles.
    """

    target_path: str
    proxy_source: FileSource | NoiseSource
    output_dir: str
    noise_experiments: tuple[NoiseSource, ...] = ()
    n_v: int = 30
    ensemble_size: int = 100
    seed: int = 12345
    phi_list: tuple[float, ...] = (0.99,)
    psi_mc_columns: int = 100_000
    noise_columns: int = DEFAULT_NOISE_COLUMNS
    p_ladder: tuple[int, ...] = (100, 1000, 10000)
    limit_repeats: int = 10
    mode: str = "strict"
    drop_degenerate: bool = False
    center_target: bool = False

    def __post_init__(self):
        object.__setattr__(self, "noise_experiments", tuple(self.noise_experiments))
        object.__setattr__(self, "phi_list", tuple(float(x) for x in self.phi_list))
        object.__setattr__(self, "p_ladder", tuple(int(x) for x in self.p_ladder))
        if self.n_v < 2:
            raise ConfigError("n_v must be at least 2")
        if self.ensemble_size < 1:
            raise ConfigError("ensemble_size must be at least 1")
        if self.mode not in ("strict", "permissive"):
            raise ConfigError(f"mode must be 'strict' or 'permissive', got {self.mode!r}")
        if not self.phi_list:
            raise ConfigError("phi_list must not be empty")
        for phi in self.phi_list:
            if not 0.0 < phi < 1.0:
                raise ConfigError(f"phi_list entries must be in (0, 1), got {phi}")
        if self.psi_mc_columns < 1000:
            raise ConfigError("psi_mc_columns must be at least 1000")
        if min(self.p_ladder, default=1) < 1 or self.noise_columns < 1:
            raise ConfigError("column counts must be positive")
        if self.limit_repeats < 1:
            raise ConfigError("limit_repeats must be at least 1")


def _noise_source_from_dict(obj: dict) -> NoiseSource:
    extra = set(obj) - {"kind", "phi", "p"}
    if extra:
        raise ConfigError(f"unknown noise keys {sorted(extra)}")
    if "kind" not in obj:
        raise ConfigError("noise entry needs a 'kind'")
    return NoiseSource(kind=obj["kind"], phi=obj.get("phi"), p=obj.get("p"))


def _noise_source_to_dict(src: NoiseSource) -> dict:
    out: dict = {"kind": src.kind}
    if src.phi is not None:
        out["phi"] = src.phi
    if src.p is not None:
        out["p"] = src.p
    return out


def config_from_dict(obj: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Build a config from parsed JSON; relative paths resolve against base_dir."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(base_dir) if base_dir is not None else Path(".")

    def resolve(p: str) -> str:
        return str((base / p).resolve()) if not Path(p).is_absolute() else p

    if "target" not in obj:
        raise ConfigError("config needs a 'target' path")
    source_obj = obj.get("proxy_source")
    if source_obj is None:
        raise ConfigError("config needs a 'proxy_source' ({'file': ...} or {'noise': ...})")
    if not isinstance(source_obj, dict) or len(source_obj) != 1:
        raise ConfigError("proxy_source must be exactly one of {'file': ...} or {'noise': ...}")
    if "file" in source_obj:
        source: FileSource | NoiseSource = FileSource(path=resolve(source_obj["file"]))
    elif "noise" in source_obj:
        source = _noise_source_from_dict(source_obj["noise"])
    else:
        raise ConfigError("proxy_source must be {'file': ...} or {'noise': ...}")

    known = {"target", "proxy_source", "noise_experiments", "n_v", "ensemble_size",
             "seed", "phi_list", "psi_mc_columns", "noise_columns", "p_ladder",
             "limit_repeats", "mode", "drop_degenerate", "center_target", "output_dir"}
    extra = set(obj) - known
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")

    kwargs = {k: obj[k] for k in ("n_v", "ensemble_size", "seed", "phi_list",
                                  "psi_mc_columns", "noise_columns", "p_ladder",
                                  "limit_repeats", "mode", "drop_degenerate",
                                  "center_target") if k in obj}
    try:
        return ExperimentConfig(
            target_path=resolve(obj["target"]),
            proxy_source=source,
            output_dir=resolve(obj.get("output_dir", "out")),
            noise_experiments=tuple(_noise_source_from_dict(e)
                                    for e in obj.get("noise_experiments", ())),
            **kwargs,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(config: ExperimentConfig) -> dict:
    if isinstance(config.proxy_source, FileSource):
        source: dict = {"file": config.proxy_source.path}
    else:
        source = {"noise": _noise_source_to_dict(config.proxy_source)}
    return {
        "target": config.target_path,
        "proxy_source": source,
        "noise_experiments": [_noise_source_to_dict(e) for e in config.noise_experiments],
        "n_v": config.n_v,
        "ensemble_size": config.ensemble_size,
        "seed": config.seed,
        "phi_list": list(config.phi_list),
        "psi_mc_columns": config.psi_mc_columns,
        "noise_columns": config.noise_columns,
        "p_ladder": list(config.p_ladder),
        "limit_repeats": config.limit_repeats,
        "mode": config.mode,
        "drop_degenerate": config.drop_degenerate,
        "center_target": config.center_target,
        "output_dir": config.output_dir,
    }


def load_config(path) -> ExperimentConfig:
    """Read a config file, or a previously written manifest, into a config."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if isinstance(obj, dict) and "config" in obj and "target" not in obj:
        obj = obj["config"]     # manifest: re-run from its embedded config
    return config_from_dict(obj, base_dir=path.parent)


def _read_rows(path) -> list[tuple[int, list[str]]]:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if len(rows) < 2:
        raise ParseError(path, len(rows), "expected a header and at least one data row")
    return rows


def _parse_year(path, line_no, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, line_no, f"bad year {text!r}") from None


def _parse_value(path, line_no, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(path, line_no, f"bad value {text!r}") from None
    if not math.isfinite(v):
        raise NonFiniteValue(f"{path}:{line_no}: non-finite value {text!r}")
    return v


def _check_annual(path, years: list[int]):
    for prev, cur in zip(years, years[1:]):
        if cur != prev + 1:
            raise NonAnnualYears(f"{path}: years jump from {prev} to {cur}")


def load_target(path) -> TimeSeries:
    """Read a target series CSV with header ``year,value``."""
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    if header != ["year", "value"]:
        raise ParseError(path, rows[0][0], f"expected header 'year,value', got {header}")
    years, values = [], []
    for line_no, row in rows[1:]:
        if len(row) != 2:
            raise ParseError(path, line_no, f"expected 2 fields, got {len(row)}")
        years.append(_parse_year(path, line_no, row[0]))
        values.append(_parse_value(path, line_no, row[1]))
    if len(years) < 2:
        raise ParseError(path, rows[-1][0], "need at least 2 data rows")
    _check_annual(path, years)
    return TimeSeries(years=np.array(years), values=np.array(values))


def load_proxies(path, expected_years=None) -> ProxyMatrix:
    """Read a proxy matrix CSV: first column ``year``, one column per proxy.

    When expected_years is given (the target's years), the file's years must
    match them exactly.
    """
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    if len(header) < 2 or header[0] != "year":
        raise ParseError(path, rows[0][0],
                         "expected header 'year,<id>,...' with at least one proxy column")
    ids = tuple(header[1:])
    years = []
    data = np.empty((len(rows) - 1, len(ids)))
    for r, (line_no, row) in enumerate(rows[1:]):
        if len(row) != len(header):
            raise ParseError(path, line_no, f"expected {len(header)} fields, got {len(row)}")
        years.append(_parse_year(path, line_no, row[0]))
        for j, text in enumerate(row[1:]):
            data[r, j] = _parse_value(path, line_no, text)
    _check_annual(path, years)
    if expected_years is not None and not np.array_equal(np.array(years), expected_years):
        raise YearMismatch(f"{path}: proxy years do not match the target years")
    return ProxyMatrix(data=data, column_ids=ids)


def save_target(series: TimeSeries, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["year", "value"])
        for year, value in zip(series.years, series.values):
            out.writerow([int(year), _fmt(value)])
    return path


def save_proxies(X: ProxyMatrix, years, path) -> Path:
    years = np.asarray(years)
    if len(years) != X.n:
        raise YearMismatch(f"{len(years)} years for {X.n} rows")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["year", *X.column_ids])
        for r in range(X.n):
            out.writerow([int(years[r]), *(_fmt(v) for v in X.data[r])])
    return path


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_") or "report"


def write_report(report: ExperimentReport | EnsembleReport, out_dir, *,
                 years=None) -> list[Path]:
    """Write one CSV per report; a block_year column is added when the
    target years are supplied."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    years = None if years is None else np.asarray(years)

    def year_cols(starts):
        return [] if years is None else [[int(years[s]) for s in starts]]

    if isinstance(report, ExperimentReport):
        path = out_dir / f"blocks_{_slug(report.label)}.csv"
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["block_start",
                          *(["block_year"] if years is not None else []),
                          "block_rmse", "lambda"])
            extra = year_cols(report.block_starts)
            for i, start in enumerate(report.block_starts):
                row = [int(start)]
                if extra:
                    row.append(extra[0][i])
                row += [_fmt(report.block_rmse[i]), _fmt(report.per_block_lambda[i])]
                out.writerow(row)
        return [path]

    if isinstance(report, EnsembleReport):
        path = out_dir / f"ensemble_{_slug(report.label)}.csv"
        member_names = [f"member_{i:03d}" for i in range(report.m)]
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["block_start",
                          *(["block_year"] if years is not None else []),
                          *member_names, "mean", "scatter"])
            starts = report.block_starts
            extra = year_cols(starts)
            for i, start in enumerate(starts):
                row = [int(start)]
                if extra:
                    row.append(extra[0][i])
                row += [_fmt(m.block_rmse[i]) for m in report.member_reports]
                row += [_fmt(report.mean_curve[i]), _fmt(report.member_scatter[i])]
                out.writerow(row)
        return [path]

    raise TypeError(f"cannot write a {type(report).__name__}")


def read_report(path) -> dict[str, np.ndarray]:
    """Read any report-style CSV back as a column-name -> float-array dict."""
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0][1]]
    cols: dict[str, list[float]] = {h: [] for h in header}
    for line_no, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(path, line_no, f"expected {len(header)} fields, got {len(row)}")
        for h, text in zip(header, row):
            try:
                cols[h].append(float(text))
            except ValueError:
                raise ParseError(path, line_no, f"bad value {text!r}") from None
    return {h: np.array(v) for h, v in cols.items()}


def write_manifest(out_dir, command: str, config: ExperimentConfig,
                   outputs: list[Path]) -> Path:
    """Write the run manifest; re-running --config on it reproduces the run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "paleo-xval",
        "version": __version__,
        "command": command,
        "config": config_to_dict(config),
        "outputs": sorted(p.name for p in outputs),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
