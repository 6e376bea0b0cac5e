"""Experiment runner: config parsing, seeded execution, persistence, reports.

Configs are plain-text key/value files with section headers (INI syntax);
matrices are semicolon-separated rows of comma-separated decimals. Every run
writes results.csv (fixed schema), manifest.json (config echo, code version,
per-cell seeds) and report.json (fits, targets, pass/fail). Reruns of the
same config are byte-identical; cells are persisted individually so partial
runs resume.

Exit codes: 0 pass, 1 fail, 2 config error, 3 incomplete record.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .diagnostics import psi_decay_check, quasi_bernoulli_constant, sigma_bounds_check
from .errors import ConfigError, FitRefusedError, IncompleteRecordError, OrbitRecurError
from .estimators import (
    correlation_integral,
    correlation_points_from_orbit,
    d2_estimate,
    default_r_grid,
    exponent_fit,
    h2_collision_estimate,
)
from .intervalmaps import GaussMap, KDoubling, MPInduced, PiecewiseAffine, sample_initial
from .matcher import match_curve, return_set_measure
from .proximity import proximity_curve
from .rng import derive_seed, make_rng
from .symbolic import (
    BernoulliMeasure,
    GibbsMeasure,
    MarkovMeasure,
    MeasureSpec,
    TransitionSystem,
    stationary_distribution,
)
from .tables import CurveRow
from .thermo import renyi_entropy_exact, z_decay_check

__all__ = ["ExperimentConfig", "load_config", "parse_config_text", "run", "verify",
           "measure_from_section", "map_from_section", "main", "EXAMPLE_CONFIGS"]

KINDS = ("match_curve", "proximity_curve", "d2", "h2", "diagnostics", "returns")

CSV_HEADER = ["experiment", "kind", "n", "replicate", "seed", "value", "aux", "flag"]

WORKERS_ENV = "ORBITRECUR_WORKERS"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    system: dict[str, str]
    n_grid: tuple[int, ...] = ()
    replicates: int = 1
    master_seed: int = 0
    tolerance: float | None = None
    variant: str = "all"
    samples: int = 0
    block_len: int = 0
    r: int = 0
    k_max: int = 0
    k_list: tuple[int, ...] = ()
    mode: str = "exact"
    burn_in: int | None = None
    min_grid_points: int = 4
    raw_text: str = ""

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:12]

    def canonical_text(self) -> str:
        sys_part = ";".join(f"{k}={v}" for k, v in sorted(self.system.items()))
        fields = (
            self.kind, sys_part, self.n_grid, self.replicates, self.master_seed,
            self.tolerance, self.variant, self.samples, self.block_len, self.r,
            self.k_max, self.k_list, self.mode, self.burn_in, self.min_grid_points,
        )
        return repr(fields)


def _parse_matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(x) for x in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise ConfigError(f"bad matrix literal {text!r}: {exc}") from None
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(f"ragged matrix literal {text!r}")
    return np.asarray(rows, dtype=np.float64)


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from None


def measure_from_section(section: dict[str, str]) -> MeasureSpec:
    """Build a measure from a [system] section (types bernoulli, markov,
    gibbs2block)."""
    kind = section.get("type", "").strip().lower()
    if kind == "bernoulli":
        if "weights" not in section:
            raise ConfigError("bernoulli system needs weights")
        w = _parse_matrix(section["weights"]).ravel()
        return BernoulliMeasure(w)
    if kind == "markov":
        if "transition" not in section:
            raise ConfigError("markov system needs a transition matrix")
        P = _parse_matrix(section["transition"])
        try:
            pi = (_parse_matrix(section["stationary"]).ravel()
                  if "stationary" in section else stationary_distribution(P))
            ts = (TransitionSystem(_parse_matrix(section["admissible"]).astype(np.uint8))
                  if "admissible" in section else None)
            return MarkovMeasure(pi, P, ts)
        except OrbitRecurError as exc:
            raise ConfigError(f"invalid markov system: {exc}") from None
    if kind == "gibbs2block":
        if "admissible" not in section or "potential" not in section:
            raise ConfigError("gibbs2block system needs admissible and potential matrices")
        try:
            ts = TransitionSystem(_parse_matrix(section["admissible"]).astype(np.uint8))
            phi_raw = _parse_matrix(section["potential"])
            phi = np.where(ts.admissible == 1, phi_raw, -np.inf)
            return GibbsMeasure(phi, ts)
        except OrbitRecurError as exc:
            raise ConfigError(f"invalid gibbs2block system: {exc}") from None
    raise ConfigError(f"unknown measure type {kind!r}")


def map_from_section(section: dict[str, str]):
    """Build an interval map from a [system] section (types kdoubling,
    affine, gauss, mp_induced)."""
    kind = section.get("type", "").strip().lower()
    try:
        if kind == "kdoubling":
            return KDoubling(int(section.get("k", "2")))
        if kind == "affine":
            if "breakpoints" in section:
                return PiecewiseAffine(tuple(_parse_matrix(section["breakpoints"]).ravel()))
            return PiecewiseAffine.dyadic(int(section.get("truncation", "40")))
        if kind == "gauss":
            return GaussMap()
        if kind == "mp_induced":
            return MPInduced(float(section.get("a", "0.5")))
    except (OrbitRecurError, ValueError) as exc:
        raise ConfigError(f"invalid map system: {exc}") from None
    raise ConfigError(f"unknown map type {kind!r}")


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if "experiment" not in parser or "system" not in parser:
        raise ConfigError("config needs [experiment] and [system] sections")
    exp = parser["experiment"]
    kind = exp.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigError(f"experiment.kind must be one of {KINDS}, got {kind!r}")
    if "master_seed" not in exp:
        raise ConfigError("experiment.master_seed is required (no wall-clock seeding)")
    try:
        cfg = ExperimentConfig(
            kind=kind,
            system=dict(parser["system"]),
            n_grid=_parse_int_list(exp.get("n_grid", "")),
            replicates=exp.getint("replicates", 1),
            master_seed=exp.getint("master_seed"),
            tolerance=exp.getfloat("tolerance") if "tolerance" in exp else None,
            variant=exp.get("variant", "all").strip(),
            samples=exp.getint("samples", 0),
            block_len=exp.getint("block_len", 0),
            r=exp.getint("r", 0),
            k_max=exp.getint("k_max", 0),
            k_list=_parse_int_list(exp.get("k_list", "")),
            mode=exp.get("mode", "exact").strip(),
            burn_in=exp.getint("burn_in") if "burn_in" in exp else None,
            min_grid_points=exp.getint("min_grid_points", 4),
            raw_text=text,
        )
    except ValueError as exc:
        raise ConfigError(f"bad experiment field: {exc}") from None
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.replicates < 1:
        raise ConfigError("replicates must be >= 1")
    if cfg.kind in ("match_curve", "proximity_curve"):
        if len(cfg.n_grid) < 1:
            raise ConfigError(f"{cfg.kind} needs a non-empty n_grid")
        if any(b <= a for a, b in zip(cfg.n_grid, cfg.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
    if cfg.kind in ("d2", "h2") and cfg.samples < 1:
        raise ConfigError(f"{cfg.kind} needs samples >= 1")
    if cfg.kind == "d2" and cfg.mode not in ("exact", "iid", "orbit"):
        raise ConfigError("d2 mode must be iid (default) or orbit")
    if cfg.kind == "h2" and cfg.block_len < 1:
        raise ConfigError("h2 needs block_len >= 1")
    if cfg.kind == "diagnostics" and (cfg.r < 2 or cfg.k_max < 1):
        raise ConfigError("diagnostics needs r >= 2 and k_max >= 1")
    if cfg.kind == "returns":
        if cfg.r < 1 or not cfg.k_list:
            raise ConfigError("returns needs r >= 1 and a k_list")
        if cfg.mode not in ("exact", "empirical"):
            raise ConfigError("returns mode must be exact or empirical")
    # fail on malformed system sections at parse time, not mid-run
    if cfg.kind in ("match_curve", "h2", "diagnostics", "returns"):
        measure_from_section(cfg.system)
    else:
        map_from_section(cfg.system)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


@dataclass
class ExperimentRecord:
    digest: str
    kind: str
    rows: list[CurveRow]
    report: dict[str, Any]
    manifest: dict[str, Any]
    out_dir: Path


def _experiment_meta(cfg: ExperimentConfig) -> dict[str, Any]:
    """Targets and their provenance; cheap, no cells executed."""
    if cfg.kind in ("match_curve", "h2"):
        h2 = renyi_entropy_exact(measure_from_section(cfg.system)).h2
        if cfg.kind == "match_curve":
            return {"target": 2.0 / h2, "target_provenance": "renyi_entropy_exact", "h2": h2}
        return {"target": h2, "target_provenance": "renyi_entropy_exact"}
    if cfg.kind == "proximity_curve":
        return {"target": 2.0, "target_provenance": "correlation_dimension_acip"}
    if cfg.kind == "d2":
        return {"target": 1.0, "target_provenance": "bounded_invariant_density"}
    return {"target": None}


def _group_keys(cfg: ExperimentConfig) -> list[int]:
    """Independent work groups; cells inside a group share its key."""
    if cfg.kind in ("match_curve", "proximity_curve"):
        return list(cfg.n_grid)
    if cfg.kind in ("d2", "h2"):
        return list(range(cfg.replicates))
    if cfg.kind == "returns":
        return list(cfg.k_list)
    return [0]  # diagnostics


def _run_group(cfg: ExperimentConfig, key: int) -> list[CurveRow]:
    """All rows of one work group, deterministic in (config, key)."""
    if cfg.kind == "match_curve":
        m = measure_from_section(cfg.system)
        return match_curve(m, None, [key], cfg.replicates, cfg.master_seed)
    if cfg.kind == "proximity_curve":
        spec = map_from_section(cfg.system)
        return proximity_curve(spec, [key], cfg.replicates, cfg.variant,
                               cfg.master_seed, burn_in=cfg.burn_in)
    if cfg.kind == "d2":
        spec = map_from_section(cfg.system)
        seed = derive_seed(cfg.master_seed, "d2", cfg.samples, key)
        if cfg.mode == "orbit":
            # secondary mode: one orbit of length `samples`, decorrelated by
            # subsampling at the (log n)^2 stride
            orb = _d2_orbit(spec, cfg.samples, seed)
            pts = correlation_points_from_orbit(orb.points)
        else:
            rng = make_rng(seed)
            pts = np.array([sample_initial(spec, rng) for _ in range(cfg.samples)])
        fit = d2_estimate(correlation_integral(pts, default_r_grid()))
        return [CurveRow(n=cfg.samples, replicate=key, seed=seed,
                         value=fit.slope, aux=fit.stderr, flag="ok")]
    if cfg.kind == "h2":
        m = measure_from_section(cfg.system)
        seed = derive_seed(cfg.master_seed, "h2", cfg.block_len, key)
        est = h2_collision_estimate(m, cfg.block_len, cfg.samples, seed)
        return [CurveRow(n=cfg.samples, replicate=key, seed=seed,
                         value=est.h2, aux=est.stderr, flag="ok")]
    if cfg.kind == "returns":
        m = measure_from_section(cfg.system)
        seed = derive_seed(cfg.master_seed, "returns", key, 0) if cfg.mode == "empirical" else 0
        est = return_set_measure(m, cfg.r, key, cfg.mode,
                                 samples=max(cfg.samples, 100_000), seed=seed)
        return [CurveRow(n=key, replicate=0, seed=seed, value=est.value,
                         aux=est.stderr, flag="ok")]
    if cfg.kind == "diagnostics":
        m = measure_from_section(cfg.system)
        checks = sigma_bounds_check(m, cfg.r, cfg.k_max)
        checks.append(psi_decay_check(m.as_markov(), max(cfg.k_max, 2)))
        return [CurveRow(n=t, replicate=0, seed=0, value=chk.margin, aux=chk.lhs,
                         flag="ok") for t, chk in enumerate(checks)]
    raise ConfigError(f"unknown kind {cfg.kind!r}")


def _d2_orbit(spec, length: int, seed: int):
    from .proximity import _orbit_for_cell

    return _orbit_for_cell(spec, length, seed, burn_in=0)


def _group_worker(args: tuple[str, int]) -> tuple[int, list[tuple]]:
    text, key = args
    cfg = parse_config_text(text)
    return key, [tuple(asdict(r).values()) for r in _run_group(cfg, key)]


def _diagnostics_report(cfg: ExperimentConfig) -> dict[str, Any]:
    m = measure_from_section(cfg.system)
    checks = sigma_bounds_check(m, cfg.r, cfg.k_max)
    checks.append(psi_decay_check(m.as_markov(), max(cfg.k_max, 2)))
    decay = z_decay_check(m, max(cfg.k_max, 2))
    return {
        "checks": [
            {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "margin": c.margin, "pass": c.passed}
            for c in checks
        ],
        "quasi_bernoulli_B": quasi_bernoulli_constant(m),
        "z_decay_ratio_band": [decay.ratio_inf, decay.ratio_sup],
        "all_pass": all(c.passed for c in checks),
    }


def _returns_report(cfg: ExperimentConfig, rows: list[CurveRow]) -> dict[str, Any]:
    return {
        "checks": [
            {"r": cfg.r, "k": r.n, "value": r.value, "stderr": r.aux, "mode": cfg.mode}
            for r in rows
        ]
    }


def _row_line(digest: str, kind: str, row: CurveRow) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(
        [digest, kind, row.n, row.replicate, row.seed,
         repr(float(row.value)), repr(float(row.aux)), row.flag]
    )
    return buf.getvalue()


def _rows_to_csv(digest: str, kind: str, rows: list[CurveRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([digest, kind, row.n, row.replicate, row.seed,
                         repr(float(row.value)), repr(float(row.aux)), row.flag])
    return buf.getvalue()


def _parse_row_line(line: str) -> CurveRow:
    rec = next(csv.reader([line]))
    return CurveRow(n=int(rec[2]), replicate=int(rec[3]), seed=int(rec[4]),
                    value=float(rec[5]), aux=float(rec[6]), flag=rec[7])


def run(cfg: ExperimentConfig, out_dir: str | Path, workers: int | None = None) -> ExperimentRecord:
    """Execute the experiment and persist results.csv / manifest.json /
    report.json under out_dir.

    Work groups write one temp file per cell under out_dir/cells; a rerun
    reuses existing cell files, so partial runs resume. The merge into
    results.csv is single-threaded in deterministic key order, so worker
    count and completion order never change the output bytes.
    """
    out = Path(out_dir)
    cells_dir = out / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    t0 = time.time()
    digest = cfg.digest()
    keys = _group_keys(cfg)
    pending = [k for k in keys if not (cells_dir / f"group-{k:012d}.csv").exists()]
    if pending:
        if workers > 1 and len(pending) > 1:
            tasks = [(cfg.raw_text, k) for k in pending]
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                for key, tuples in pool.map(_group_worker, tasks):
                    rows = [CurveRow(*t) for t in tuples]
                    _write_group(cells_dir, digest, cfg.kind, key, rows)
        else:
            for key in pending:
                _write_group(cells_dir, digest, cfg.kind, key, _run_group(cfg, key))
    rows = []
    for key in sorted(keys):
        text = (cells_dir / f"group-{key:012d}.csv").read_text()
        rows.extend(_parse_row_line(line) for line in text.splitlines() if line)
    rows.sort(key=lambda r: (r.n, r.replicate))
    wall = time.time() - t0

    meta = _experiment_meta(cfg)
    report: dict[str, Any] = {"kind": cfg.kind, "digest": digest,
                              "tolerance": cfg.tolerance, **meta}
    if cfg.kind in ("match_curve", "proximity_curve"):
        try:
            fitres = exponent_fit(rows, target=meta["target"],
                                  min_grid_points=min(cfg.min_grid_points, len(cfg.n_grid)),
                                  min_replicates=min(3, cfg.replicates))
            report["slope"] = fitres.fit.slope
            report["slope_stderr"] = fitres.fit.stderr
            report["excluded_cells"] = fitres.excluded_cells
            report["used_cells"] = fitres.used_cells
        except FitRefusedError as exc:
            report["fit_refused"] = str(exc)
    elif cfg.kind in ("d2", "h2"):
        report["slope"] = sum(r.value for r in rows) / len(rows)
    elif cfg.kind == "diagnostics":
        report.update(_diagnostics_report(cfg))
        report["pass"] = report["all_pass"]
    elif cfg.kind == "returns":
        report.update(_returns_report(cfg, rows))
    if cfg.tolerance is not None and report.get("target") is not None and "slope" in report:
        report["pass"] = bool(abs(report["slope"] - report["target"]) <= cfg.tolerance)

    manifest = {
        "version": __version__,
        "digest": digest,
        "config": cfg.raw_text,
        "wall_time_s": wall,
        "cells": [{"n": r.n, "replicate": r.replicate, "seed": r.seed} for r in rows],
        "expected_cells": _expected_cells(cfg),
    }
    (out / "results.csv").write_text(_rows_to_csv(digest, cfg.kind, rows))
    manifest_text = json.dumps(_without(manifest, "wall_time_s"), indent=2, sort_keys=True)
    (out / "manifest.json").write_text(manifest_text + "\n")
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    (out / "timing.json").write_text(json.dumps({"wall_time_s": wall}) + "\n")
    return ExperimentRecord(digest, cfg.kind, rows, report, manifest, out)


def _without(d: dict, key: str) -> dict:
    return {k: v for k, v in d.items() if k != key}


def _write_group(cells_dir: Path, digest: str, kind: str, key: int,
                 rows: list[CurveRow]) -> None:
    text = "".join(_row_line(digest, kind, r) for r in rows)
    tmp = cells_dir / f"group-{key:012d}.csv.tmp"
    tmp.write_text(text)
    tmp.replace(cells_dir / f"group-{key:012d}.csv")


def _expected_cells(cfg: ExperimentConfig) -> int:
    if cfg.kind in ("match_curve", "proximity_curve"):
        return len(cfg.n_grid) * cfg.replicates
    if cfg.kind in ("d2", "h2"):
        return cfg.replicates
    if cfg.kind == "returns":
        return len(cfg.k_list)
    return cfg.k_max + 1  # diagnostics: sigma checks plus psi decay


def verify(out_dir: str | Path, tolerance: float | None = None) -> tuple[int, str]:
    """Compare the recorded slope against the target within tolerance.

    Returns (exit_code, message): 0 pass, 1 fail, 3 incomplete (more than
    half of the expected cells missing).
    """
    out = Path(out_dir)
    try:
        report = json.loads((out / "report.json").read_text())
        manifest = json.loads((out / "manifest.json").read_text())
        csv_text = (out / "results.csv").read_text()
    except OSError as exc:
        raise IncompleteRecordError(f"missing record file: {exc}") from None
    n_rows = max(len(csv_text.strip().splitlines()) - 1, 0)
    expected = int(manifest.get("expected_cells", 0))
    if expected > 0 and n_rows < expected / 2.0:
        return 3, f"incomplete: {n_rows} of {expected} cells present"
    if report.get("kind") == "diagnostics":
        ok = bool(report.get("pass"))
        return (0 if ok else 1), ("diagnostics all-pass" if ok else "diagnostics bound failed")
    tol = tolerance if tolerance is not None else report.get("tolerance")
    target = report.get("target")
    slope = report.get("slope")
    if "fit_refused" in report:
        return 3, f"fit refused: {report['fit_refused']}"
    if tol is None or target is None or slope is None:
        return 3, "record has no (slope, target, tolerance) triple to verify"
    ok = abs(slope - target) <= tol
    msg = f"slope {slope:.6g} vs target {target:.6g} (tol {tol:g}): {'pass' if ok else 'FAIL'}"
    return (0 if ok else 1), msg


# ---------------------------------------------------------------------------
# Canonical example configs and CLI
# ---------------------------------------------------------------------------


EXAMPLE_CONFIGS = {
    "match_curve": """\
[experiment]
kind = match_curve
n_grid = 1000, 10000, 100000, 1000000
replicates = 5
master_seed = 2026
tolerance = 0.35

[system]
type = bernoulli
weights = 0.5, 0.5
""",
    "proximity_curve": """\
[experiment]
kind = proximity_curve
n_grid = 1000, 10000, 100000
replicates = 5
master_seed = 2026
tolerance = 0.5
variant = all
min_grid_points = 3

[system]
type = kdoubling
k = 2
""",
    "d2": """\
[experiment]
kind = d2
samples = 100000
replicates = 1
master_seed = 2026
tolerance = 0.1

[system]
type = gauss
""",
    "h2": """\
[experiment]
kind = h2
samples = 10000
block_len = 10
replicates = 3
master_seed = 2026
tolerance = 0.05

[system]
type = markov
transition = 0, 1; 0.5, 0.5
""",
    "diagnostics": """\
[experiment]
kind = diagnostics
r = 6
k_max = 12
master_seed = 2026

[system]
type = markov
transition = 0, 1; 0.5, 0.5
""",
    "returns": """\
[experiment]
kind = returns
r = 4
k_list = 1, 2, 3, 4, 6, 8
mode = exact
master_seed = 2026

[system]
type = bernoulli
weights = 0.5, 0.5
""",
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="orbitrecur",
                                     description="Orbit recurrence statistics experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to the experiment config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_ver = sub.add_parser("verify", help="verify a completed run against its target")
    p_ver.add_argument("out_dir", help="directory holding results.csv/report.json")
    p_ver.add_argument("--tolerance", type=float, default=None)
    sub.add_parser("list-kinds", help="list experiment kinds")
    p_ex = sub.add_parser("print-example-config", help="print a canonical config")
    p_ex.add_argument("kind", choices=sorted(EXAMPLE_CONFIGS))
    args = parser.parse_args(argv)

    if args.command == "list-kinds":
        for kind in KINDS:
            print(kind)
        return 0
    if args.command == "print-example-config":
        print(EXAMPLE_CONFIGS[args.kind], end="")
        return 0
    if args.command == "run":
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        try:
            record = run(cfg, args.out)
        except OrbitRecurError as exc:
            print(f"run error: {exc}", file=sys.stderr)
            return 2
        print(f"wrote {record.out_dir}/results.csv ({len(record.rows)} rows)")
        if "pass" in record.report:
            print(f"report pass: {record.report['pass']}")
        return 0
    if args.command == "verify":
        try:
            code, msg = verify(args.out_dir, args.tolerance)
        except IncompleteRecordError as exc:
            print(f"incomplete: {exc}", file=sys.stderr)
            return 3
        print(msg)
        return code
    return 2


if __name__ == "__main__":
    sys.exit(main())
