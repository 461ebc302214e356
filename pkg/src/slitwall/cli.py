"""Command line entry point: ``slitwall {simulate,sweep,entangle,recoil,selftest}``.

Exit codes: 0 success, 2 bad configuration or arguments, 3 numerical failure
(grid too small/coarse, unreachable outcome), 4 internal inconsistency or a
failed self-check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ScenarioConfig, load_config, output_dir
from .dynamics import run_pipeline
from .errors import ConfigError, ContractViolation, NumericalError, SlitwallError
from .grid import moments
from .observables import (
    conditional_momentum,
    helstrom_distinguishability,
    kennard_audit,
    screen_distribution,
    visibility,
)
from .recoil import max_target_spread, reference_scenarios, recoil_table, visibility_spread_threshold
from .states import build_state
from .sweep import frontier_csv, frontier_rows, incompatibility_frontier, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("slitwall")


class ArtifactWriter:
    """Collects output files and writes them in one place, each atomically."""

    def __init__(self, directory: Path, config: ScenarioConfig | None = None):
        self.directory = Path(directory)
        self.config = config
        self.files: dict[str, str] = {}

    def metadata_line(self) -> str:
        parts = [f"# slitwall {__version__}"]
        if self.config is not None:
            parts.append(f"config_sha256={self.config.digest()}")
            if self.config.seed is not None:
                parts.append(f"seed={self.config.seed}")
        return " ".join(parts) + "\n"

    def csv(self, name: str, body: str):
        self.files[name] = self.metadata_line() + body

    def columns(self, name: str, header, *columns):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])
        self.csv(name, buf.getvalue())

    def json(self, name: str, payload: dict):
        self.files[name] = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def flush(self) -> list[Path]:
        self.directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in self.files.items():
            target = self.directory / name
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{name}.")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target)
            written.append(target)
        return written


def _config_for(args) -> ScenarioConfig:
    config = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _out_dir(args, config: ScenarioConfig | None) -> Path:
    if args.output_dir:
        return Path(args.output_dir)
    if config is not None and output_dir(config):
        return Path(output_dir(config))
    return Path("slitwall-out")


def cmd_simulate(args) -> int:
    config = _config_for(args)
    grid = config.grid
    branches = run_pipeline(config)
    xi = build_state(config.wall, grid)
    report = visibility(xi, config.k)
    writer = ArtifactWriter(_out_dir(args, config), config)

    writer.columns("screen.csv", ("q", "density"), grid.positions, screen_distribution(branches))
    slices = []
    for i, q in enumerate(config.screen_points):
        name = f"conditional_momentum_{i}.csv"
        writer.columns(name, ("P", "density"), grid.momenta, conditional_momentum(branches, q))
        slices.append({"q": q, "q_grid": float(grid.positions[grid.nearest_index(q)]), "file": name})

    audit = kennard_audit(xi)
    pivot = config.pivot if config.pivot is not None else moments(xi.momentum())[0]
    n1, n2 = branches.norms_sq()
    summary = {
        "visibility": report.to_dict(),
        "wall_branch_overlap_abs": abs(branches.wall_overlap()),
        "branch_norms_sq": [n1, n2],
        "pivot": pivot,
        "wall_kennard": {
            "sigma_Q": audit.sigma_q, "sigma_P": audit.sigma_p, "product": audit.product,
            "bound": audit.bound, "satisfied": audit.satisfied, "status": audit.status,
        },
        "conditional_slices": slices,
        "extensions": {"helstrom_distinguishability": helstrom_distinguishability(report.visibility)},
        "version": __version__,
        "config_sha256": config.digest(),
    }
    writer.json("summary.json", summary)
    for path in writer.flush():
        print(path)
    print(f"visibility {report.visibility:.6g}  phase {report.phase_alpha:.6g}  "
          f"branch norms {n1:.6g} {n2:.6g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config_for(args)
    if config.sweep is None:
        raise ConfigError(["sweep: the sweep verb needs a 'sweep' section"])
    result = run_sweep(config, threads=args.threads)
    verdict = incompatibility_frontier(result, config.v_min, config.acc_min)
    accs = [a for _, a, _ in frontier_rows(result)]
    monotone = all(b <= a for a, b in zip(accs, accs[1:]))
    writer = ArtifactWriter(_out_dir(args, config), config)
    writer.csv("sweep.csv", result.to_csv())
    writer.csv("frontier.csv", frontier_csv(result))
    writer.json("sweep_summary.json", {
        "parameter": result.parameter,
        "verdict": verdict.label,
        "v_min": verdict.v_min,
        "acc_min": verdict.acc_min,
        "witnesses": [w.param for w in verdict.witnesses],
        "frontier_monotone": monotone,
        "failed_cells": [r.param for r in result.rows if r.status.startswith("error")],
        "version": __version__,
        "config_sha256": config.digest(),
    })
    for path in writer.flush():
        print(path)
    print(f"{len(result.rows)} cells, verdict: {verdict.label}, frontier monotone: {monotone}")
    return EXIT_OK


def cmd_entangle(args) -> int:
    from .entanglement import link_to_slit_model
    from .selftest import check_entanglement

    passed, detail = check_entanglement()
    print(f"{'PASS' if passed else 'FAIL'}  two-branch framework vs dense oracle: {detail}")
    payload = {"oracle_checks_passed": passed, "detail": detail}
    config = None
    if args.config:
        config = _config_for(args)
        branches = run_pipeline(config)
        state = link_to_slit_model(branches)
        grid_v = visibility(build_state(config.wall, config.grid), config.k).visibility
        payload.update(two_branch_visibility=state.visibility(), grid_visibility=grid_v)
        agree = abs(state.visibility() - grid_v) < 1e-9
        passed = passed and agree
        print(f"{'PASS' if agree else 'FAIL'}  |<xi1|xi2>| = {state.visibility():.9g}, grid V = {grid_v:.9g}")
    if args.output_dir or config is not None:
        writer = ArtifactWriter(_out_dir(args, config), config)
        writer.json("entangle.json", payload)
        writer.flush()
    return EXIT_OK if passed else EXIT_INTERNAL


def cmd_recoil(args) -> int:
    scenarios = reference_scenarios(args.wavelength)
    rows = recoil_table(scenarios)
    if args.format == "csv":
        out = csv.writer(sys.stdout, lineterminator="\n")
        out.writerow(("target", "wavelength_m", "velocity_m_per_s", "max_spread_m"))
        for r in rows:
            out.writerow((r["target"], f"{r['wavelength_m']:.6g}", f"{r['velocity_m_per_s']:.6g}",
                          f"{r['max_spread_m']:.6g}"))
    else:
        print(f"{'target':<24}{'lambda (m)':>12}{'v (m/s)':>14}{'dQ max (m)':>14}")
        for r in rows:
            print(f"{r['target']:<24}{r['wavelength_m']:>12.3g}{r['velocity_m_per_s']:>14.3g}"
                  f"{r['max_spread_m']:>14.3g}")
    if args.check_threshold:
        s = scenarios[0]
        metres, ratio = visibility_spread_threshold(s)
        quarter, pi_hbar_k = max_target_spread(s)
        print(f"# V >= 0.5 needs a Gaussian spread below {metres:.4g} m = {ratio:.4f} x lambda/4 "
              f"(lambda/4 = {quarter:.4g} m, pi*hbar/k = {pi_hbar_k:.4g} m)")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    results = run_all()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail} ({r.seconds:.2f}s)")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slitwall", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slitwall {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("config", help="scenario JSON file")
        else:
            p.add_argument("config", nargs="?", help="optional scenario JSON file")
        p.add_argument("--output-dir", help="directory for artifacts")
        p.add_argument("--seed", type=int, help="override the scenario seed")

    p = sub.add_parser("simulate", help="screen pattern, wall-momentum slices, visibility")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="visibility vs path accuracy sweep and frontier verdict")
    common(p)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("entangle", help="two-branch framework checks")
    common(p, config_required=False)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("recoil", help="photon recoil table in SI units")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--wavelength", type=float, default=0.5e-6, help="photon wavelength in metres")
    p.add_argument("--check-threshold", action="store_true",
                   help="also locate the V >= 0.5 spread with the grid simulator")
    p.set_defaults(func=cmd_recoil)

    p = sub.add_parser("selftest", help="run the oracle/invariant battery")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SlitwallError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
