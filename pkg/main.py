import argparse
import os
import sys

from core.acceptance import ToleranceProfile, run_acceptance
from core.config import ConfigError, load_config
from core.sweep_runner import run_sweep
from utils.reporting import CSV_NAME, REPORT_NAME, emit_csv, emit_report
from utils.visualizations import emit_plots

# === Global Parameters ===
DEFAULT_JOBS = 1
DEFAULT_TOLERANCES = ToleranceProfile(o_eps=100.0, o_eps_kappa=100.0, o_eps_kappa2=100.0)
EXIT_OK, EXIT_INVALID, EXIT_ACCEPTANCE_FAILED = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bgs-stability",
        description="Stability experiments for Pythagorean block Gram-Schmidt orthogonalization.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "run a sweep and write CSV, plots and report"),
                            ("check", "validate a sweep config")):
        cmd = commands.add_parser(name, help=help_text)
        cmd.add_argument("config_path", nargs="?", help="JSON sweep config")
        cmd.add_argument("--config", dest="config_flag", help="JSON sweep config (alternative to the positional)")
        cmd.add_argument("--out", help="output directory (overrides output_dir)")
        cmd.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="worker processes for sweep points")
        cmd.add_argument("--seed", type=int, help="matrix seed (overrides the config)")
        cmd.add_argument("--timing", action="store_true", help="write measured wall times to the CSV")

    acceptance = commands.add_parser("acceptance", help="run the built-in acceptance suite")
    acceptance.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these criteria")
    return parser


def _load(args):
    path = args.config_flag or args.config_path
    if not path:
        raise ConfigError("No config given (pass a path or --config)")
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")
    return load_config(path).with_overrides(output_dir=args.out, seed=args.seed, timing=args.timing)


def cmd_check(args):
    config = _load(args)
    print(f"✅ Config valid: {config.matrix_class} sweep of {len(config.knob_sweep)} point(s), "
          f"{len(config.algorithms)} algorithm(s) x {len(config.ios)} io(s)")
    return EXIT_OK


def cmd_run(args):
    config = _load(args)
    records = run_sweep(config, jobs=args.jobs)

    out = config.output_dir
    emit_csv(records, os.path.join(out, CSV_NAME), timing=config.timing)
    plots = emit_plots(records, out, matrix_classes=[config.matrix_class])
    emit_report(records, config, os.path.join(out, REPORT_NAME), plots)
    return EXIT_OK


def cmd_acceptance(args):
    results = run_acceptance(DEFAULT_TOLERANCES, only=args.only)
    failed = [r for r in results if not r.passed]
    print(f"\n📋 Acceptance: {len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_ACCEPTANCE_FAILED if failed else EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "acceptance": cmd_acceptance}


def cli_main(argv=None):
    """
    Command-line entry point.

    Parameters:
    - argv: list of str or None (sys.argv[1:] when None)

    Returns:
    - int: 0 on success, 1 on a validation error, 2 on an acceptance failure
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    try:
        return COMMANDS[args.command](args)
    except ValueError as e:
        # Every config, precision, dimension and knob error is a ValueError
        print(f"❌ {e}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(cli_main())
