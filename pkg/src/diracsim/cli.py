"""Command-line front end.

Every file-producing command writes its outputs plus a resolved-config copy
and a manifest into --out-dir; the manifest's config_hash is the sha256 of
the resolved-config bytes, so archived runs can be replayed and verified.
No timestamps are written anywhere: identical invocations produce
byte-identical artifacts.

Exit codes: 0 success, 1 comparison beyond tolerance, 2 usage or validation
error, 3 numerical failure (calibration, degeneracy, rank deficiency).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, _kernels, io
from .dirac import dirac_from_density, invert_values
from .errors import DiracSimError
from .experiment import (
    PROTOCOL_SCAN,
    baseline_tomography,
    config_from_mapping,
    config_to_mapping,
    estimate_dirac,
    resolve_state,
    sample_trials,
    snr_study,
)
from .hilbert import purity, random_density, random_pure_state, trace_distance
from .weak import joint_weak_scan, scan_protocol

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class Settings:
    seed: int | None
    threads: int | None
    out_dir: Path
    tolerance: float


def _global_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("global options")
    group.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                       help="seed (overrides config files)")
    group.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                       help="worker threads for sampling kernels (default: all cores)")
    group.add_argument("--out-dir", default=argparse.SUPPRESS,
                       help="directory for output files (default: .)")
    group.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                       help="comparison tolerance (default: 1e-10)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="diracsim",
        description="Directly measure the Dirac quasi-probability distribution "
        "of a simulated quantum state via weak measurements.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-state", parents=[common],
                         help="generate a seeded random state file")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--kind", choices=("density", "pure"), default="density")
    gen.add_argument("--rank", type=int, default=1)
    gen.add_argument("--out", default=None, help="state file name")

    dirac = sub.add_parser("dirac", parents=[common],
                           help="transform a state file to its distribution, or back")
    dirac.add_argument("input", help="state file (forward) or distribution file (--invert)")
    dirac.add_argument("--invert", action="store_true")
    dirac.add_argument("--out", default=None)

    sim = sub.add_parser("simulate", parents=[common],
                         help="run a measurement protocol from a config file")
    sim.add_argument("config", help="key = value config file")
    sim.add_argument("--exact", action="store_true",
                     help="replace sampling with exact expectation values")
    sim.add_argument("--protocol", choices=("scan", "joint-weak"), default=None,
                     help="override the config file's protocol")

    snr = sub.add_parser("snr", parents=[common],
                         help="trial/coupling ladder study of estimator noise")
    snr.add_argument("config")
    snr.add_argument("--trials-ladder", default="1000,10000,100000,1000000")
    snr.add_argument("--g-ladder", default=None,
                     help="comma-separated couplings (default sigma/{25,50,100,200})")

    cmp_ = sub.add_parser("compare", parents=[common],
                          help="compare two state files or two distribution files")
    cmp_.add_argument("first")
    cmp_.add_argument("second")

    tomo = sub.add_parser("tomography-baseline", parents=[common],
                          help="linear-inversion tomography in random bases")
    tomo.add_argument("--state", default=None, help="state file (else random)")
    tomo.add_argument("--dim", type=int, default=2)
    tomo.add_argument("--rank", type=int, default=1)
    tomo.add_argument("--trials", type=int, default=10000)
    tomo.add_argument("--bases", type=int, default=None)
    tomo.add_argument("--exact", action="store_true")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    return Settings(
        seed=getattr(args, "seed", None),
        threads=getattr(args, "threads", None),
        out_dir=Path(getattr(args, "out_dir", ".")),
        tolerance=float(getattr(args, "tolerance", 1e-10)),
    )


def _finish_run(
    out_dir: Path,
    command: str,
    resolved: dict[str, str],
    seed: int,
    outputs: list[Path],
    warnings: list[str],
) -> None:
    """Write the resolved-config copy and the manifest that seals the run."""
    stem = command.replace("-", "_")
    resolved_path = out_dir / f"{stem}_resolved.cfg"
    io.write_keyvalue(resolved_path, resolved)
    manifest_path = out_dir / f"{stem}_manifest.json"
    # paths are stored relative to the manifest so archived runs relocate
    # cleanly and identical runs are byte-identical
    io.write_manifest(
        manifest_path,
        command=command,
        config_hash=io.sha256_file(resolved_path),
        seed=seed,
        output_paths=[Path(p).name for p in outputs] + [resolved_path.name],
        warnings=warnings,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen_state(args, settings: Settings) -> int:
    if args.dim < 1:
        print("error: invalid dimension", file=sys.stderr)
        return EXIT_USAGE
    seed = settings.seed if settings.seed is not None else 0
    out_dir = settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "pure":
        state = random_pure_state(args.dim, seed)
        rho = state.density()
    else:
        state = rho = random_density(args.dim, args.rank, seed)
    name = args.out or f"state_dim{args.dim}_{args.kind}_rank{args.rank}_seed{seed}.json"
    path = out_dir / name
    io.write_state(path, state)
    evals = np.linalg.eigvalsh(rho.matrix)
    print(f"wrote {path}")
    print(f"purity = {_fmt(purity(rho))}")
    print("eigenvalues =", " ".join(_fmt(v) for v in evals))
    resolved = {
        "format_version": "1",
        "command": "gen-state",
        "dim": str(args.dim),
        "kind": args.kind,
        "rank": str(args.rank),
        "seed": str(seed),
        "out": name,
    }
    _finish_run(out_dir, "gen-state", resolved, seed, [path], [])
    return EXIT_OK


def cmd_dirac(args, settings: Settings) -> int:
    out_dir = settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings: list[str] = []
    if args.invert:
        dist, lenient = io.read_dirac_lenient(args.input)
        warnings.extend(lenient)
        values = dist.values if dist.ordering == "A_then_B" else dist.values.conj()
        raw = invert_values(values)
        name = args.out or "state_from_dirac.json"
        path = out_dir / name
        try:
            from .hilbert import validate_density

            io.write_state(path, validate_density(raw))
        except ValueError as exc:
            warnings.append(f"reconstructed density fails validation: {exc}")
            io.write_density_matrix(path, raw)
        print(f"wrote {path}")
    else:
        state = io.read_state(args.input)
        dist = dirac_from_density(io.as_density(state))
        name = args.out or "dirac.json"
        path = out_dir / name
        io.write_dirac(path, dist)
        print(f"wrote {path}")
    if warnings:
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    seed = settings.seed if settings.seed is not None else 0
    resolved = {
        "format_version": "1",
        "command": "dirac",
        "input": str(args.input),
        "input_sha256": io.sha256_file(args.input),
        "invert": str(bool(args.invert)),
        "out": name,
    }
    _finish_run(out_dir, "dirac", resolved, seed, [path], warnings)
    return EXIT_OK


def _load_config(args, settings: Settings):
    config = config_from_mapping(io.parse_keyvalue(args.config))
    if settings.seed is not None:
        config = replace(config, seed=settings.seed)
    if getattr(args, "protocol", None):
        config = replace(config, protocol=args.protocol)
    return config


def cmd_simulate(args, settings: Settings) -> int:
    config = _load_config(args, settings)
    out_dir = settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = resolve_state(config)
    analytic = dirac_from_density(truth)
    outputs: list[Path] = []
    warnings: list[str] = []
    dirac_path = out_dir / "dirac_estimate.json"
    state_path = out_dir / "state_reconstructed.json"
    cells_path = out_dir / "cells.csv"
    summary: dict = {"format_version": 1, "protocol": config.protocol, "exact": bool(args.exact)}

    if args.exact:
        pointer = config.pointer.build()
        if config.protocol == PROTOCOL_SCAN:
            dist, diags = scan_protocol(truth, config.g, pointer, with_diagnostics=True)
            p_post = {(d.a, d.b): d.post_selection_probability for d in diags}
            flagged = {(d.a, d.b) for d in diags if d.flagged}
        else:
            dist = joint_weak_scan(
                truth, config.g, config.second_coupling,
                (pointer, config.pointer.build()),
            )
            p_post, flagged = {}, set()
        if flagged:
            warnings.append(f"{len(flagged)} cells below post-selection floor")
        io.write_dirac(dirac_path, dist)
        raw = invert_values(np.nan_to_num(dist.values))
        recon = (raw + raw.conj().T) / 2
        io.write_density_matrix(state_path, recon)
        rows = []
        for a in range(config.dim):
            for b in range(config.dim):
                est = dist.values[a, b]
                tru = analytic.values[a, b]
                rows.append([
                    a, b, est.real, est.imag, tru.real, tru.imag, abs(est - tru),
                    p_post.get((a, b), float("nan")),
                    "flagged" if (a, b) in flagged else "",
                ])
        io.write_table(
            cells_path,
            ["a", "b", "est_re", "est_im", "truth_re", "truth_im", "abs_error",
             "post_selection_probability", "flag"],
            rows,
        )
        err = np.abs(np.nan_to_num(dist.values) - analytic.values).max()
        summary.update(
            trials_used=0,
            max_abs_error=float(err),
            trace_distance_to_truth=trace_distance(recon, truth.matrix),
            normalization_sum=float(np.nan_to_num(dist.values).sum().real),
        )
    else:
        trials = sample_trials(config)
        report = estimate_dirac(trials, config, truth=truth)
        io.write_dirac(dirac_path, report.dirac_estimate)
        if report.reconstruction is not None:
            io.write_density_matrix(state_path, report.reconstruction)
        else:
            warnings.append("cells without trials; reconstruction skipped")
        rows = []
        for a in range(config.dim):
            for b in range(config.dim):
                est = report.dirac_estimate.values[a, b]
                tru = analytic.values[a, b]
                rows.append([
                    a, b, est.real, est.imag,
                    report.standard_errors[a, b],
                    report.se_real[a, b], report.se_imag[a, b],
                    int(report.cell_counts[a, b, 0]), int(report.cell_counts[a, b, 1]),
                    tru.real, tru.imag, abs(est - tru),
                    "flagged" if report.flagged_cells[a, b] else "",
                ])
        io.write_table(
            cells_path,
            ["a", "b", "est_re", "est_im", "se", "se_re", "se_im",
             "n_position", "n_momentum", "truth_re", "truth_im", "abs_error", "flag"],
            rows,
        )
        summary.update(
            trials_used=report.trials_used,
            trace_distance_to_truth=report.trace_distance_to_truth,
            calibration={"c_x": report.calibration.c_x, "c_p": report.calibration.c_p},
            flagged_cells=int(report.flagged_cells.sum()),
        )
    outputs.extend([dirac_path, state_path, cells_path])
    summary_path = out_dir / "summary.json"
    io._dump_json(summary_path, summary)
    outputs.append(summary_path)
    td = summary.get("trace_distance_to_truth")
    print(f"protocol={config.protocol} trials={summary['trials_used']} "
          f"trace_distance={td if td is None else _fmt(td)}")
    _finish_run(out_dir, "simulate", config_to_mapping(config), config.seed, outputs, warnings)
    return EXIT_OK


def cmd_snr(args, settings: Settings) -> int:
    config = _load_config(args, settings)
    trial_ladder = [int(v) for v in args.trials_ladder.split(",") if v.strip()]
    if args.g_ladder:
        g_ladder = [float(v) for v in args.g_ladder.split(",") if v.strip()]
    else:
        sigma = config.pointer.sigma
        g_ladder = [sigma / 25, sigma / 50, sigma / 100, sigma / 200]
    if len(trial_ladder) < 3:
        print("error: need at least 3 trial-ladder points for a slope fit",
              file=sys.stderr)
        return EXIT_USAGE
    out_dir = settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    result = snr_study(config, trial_ladder, g_ladder)
    rows_path = out_dir / "snr_rows.csv"
    io.write_table(
        rows_path,
        ["protocol", "n_weak_ops", "g", "trials", "mean_abs_error", "mean_se",
         "snr_per_trial", "flagged"],
        [[r.protocol, r.n_weak_ops, r.g, r.trials, r.mean_abs_error, r.mean_se,
          r.snr_per_trial, r.flagged] for r in result.rows],
    )
    summary = {
        "format_version": 1,
        "se_slopes": {f"{proto}@g={g!r}": slope for (proto, g), slope in result.se_slopes.items()},
        "exponents": [
            {"g": e.g, "trials": e.trials, "snr_single": e.snr_single,
             "snr_joint": e.snr_joint, "exponent": e.exponent}
            for e in result.exponents
        ],
    }
    summary_path = out_dir / "snr_summary.json"
    io._dump_json(summary_path, summary)
    for key, slope in summary["se_slopes"].items():
        print(f"slope[{key}] = {_fmt(slope)}")
    finite = [e.exponent for e in result.exponents if np.isfinite(e.exponent)]
    if finite:
        print(f"mean snr exponent = {_fmt(float(np.mean(finite)))}")
    _finish_run(out_dir, "snr", config_to_mapping(config), config.seed,
                [rows_path, summary_path], [])
    return EXIT_OK


def _classify_file(path: str) -> str:
    payload = io._load_json(path)
    if "kind" in payload:
        return "state"
    if "ordering" in payload:
        return "dirac"
    raise io.FileFormatError(f"{path}: neither a state nor a distribution file")


def cmd_compare(args, settings: Settings) -> int:
    kind_a = _classify_file(args.first)
    kind_b = _classify_file(args.second)
    if kind_a != kind_b:
        print(f"error: cannot compare {kind_a} file with {kind_b} file", file=sys.stderr)
        return EXIT_USAGE
    if kind_a == "state":
        rho_a = io.as_density(io.read_state(args.first))
        rho_b = io.as_density(io.read_state(args.second))
        if rho_a.dim != rho_b.dim:
            print("error: dimension mismatch", file=sys.stderr)
            return EXIT_USAGE
        metric = trace_distance(rho_a.matrix, rho_b.matrix)
        print(f"trace_distance = {_fmt(metric)}")
    else:
        dist_a, _ = io.read_dirac_lenient(args.first)
        dist_b, _ = io.read_dirac_lenient(args.second)
        if dist_a.dim != dist_b.dim:
            print("error: dimension mismatch", file=sys.stderr)
            return EXIT_USAGE
        metric = float(np.max(np.abs(dist_a.values - dist_b.values)))
        print(f"max_entrywise_difference = {_fmt(metric)}")
    return EXIT_OK if metric <= settings.tolerance else EXIT_TOLERANCE


def cmd_tomography(args, settings: Settings) -> int:
    seed = settings.seed if settings.seed is not None else 0
    if args.state:
        rho = io.as_density(io.read_state(args.state))
    else:
        rho = random_density(args.dim, args.rank, seed)
    result = baseline_tomography(
        rho, trials=args.trials, seed=seed, bases=args.bases, exact=args.exact
    )
    print(f"bases_used = {result.bases_used}")
    print(f"trace_distance = {_fmt(result.trace_distance)}")
    out_dir = settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "tomography_summary.json"
    io._dump_json(summary_path, {
        "format_version": 1,
        "bases_used": result.bases_used,
        "trace_distance": result.trace_distance,
        "trials": args.trials,
        "exact": bool(args.exact),
    })
    resolved = {
        "format_version": "1",
        "command": "tomography-baseline",
        "state": str(args.state or f"random(dim={args.dim}, rank={args.rank})"),
        "trials": str(args.trials),
        "bases": str(args.bases),
        "exact": str(bool(args.exact)),
        "seed": str(seed),
    }
    _finish_run(out_dir, "tomography-baseline", resolved, seed, [summary_path], [])
    return EXIT_OK


_COMMANDS = {
    "gen-state": cmd_gen_state,
    "dirac": cmd_dirac,
    "simulate": cmd_simulate,
    "snr": cmd_snr,
    "compare": cmd_compare,
    "tomography-baseline": cmd_tomography,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = _settings(args)
    _kernels.set_threads(settings.threads)
    handler = _COMMANDS[args.command]
    try:
        return handler(args, settings)
    except DiracSimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc, ArithmeticError) else EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
