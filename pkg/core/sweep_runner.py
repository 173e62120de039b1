from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from core.orthogonalizer_runner import run_algorithm
from data.matrix_generators import generate
from metrics import compute_stability_report
from numerics.linalg import cond2


@dataclass
class RunRecord:
    """One plotted point: a single (algorithm, io) run on one sweep matrix."""

    matrix_class: str
    knobs: str
    kappa: float
    algorithm: str
    io: str
    precision: str
    loo: float
    rel_residual: float
    rel_chol_residual: float
    sync_points: int
    wall_time: float
    had_nan: bool
    p: int
    cholesky: str = "nonstop"

    @property
    def sort_key(self):
        return (self.matrix_class, self.kappa, self.algorithm, self.io, self.precision, self.knobs)


def _io_label(io, cholesky_variant):
    # Default Cholesky keeps the plain io name
    return str(io) if cholesky_variant == "nonstop" else f"{io}/{cholesky_variant}"


def run_point(config, spec, quiet=False):
    """
    Runs every (algorithm, io) combination of a config on one sweep matrix.

    The matrix is generated and its condition number measured once, then
    shared by all runs of the point.

    Parameters:
    - config: SweepConfig
    - spec: MatrixSpec
    - quiet: bool

    Returns:
    - list of RunRecord
    """
    X = generate(spec)
    kappa = cond2(X.data)
    if not quiet:
        print(f"🔄 {spec.matrix_class} [{spec.knob_label}] kappa = {kappa:.3e}")

    records = []
    for algorithm in config.algorithms:
        for io in config.ios:
            factors, stats, pair = run_algorithm(
                algorithm, X, io, config.precision, config.mp_pair, config.cholesky
            )
            report = compute_stability_report(factors.Q, factors.R, X, kappa=kappa)
            if stats.had_nan and not quiet:
                print(f"⚠️ {algorithm} with {io} broke down (NaN) at kappa = {kappa:.3e}")
            records.append(RunRecord(
                matrix_class=spec.matrix_class,
                knobs=spec.knob_label,
                kappa=kappa,
                algorithm=algorithm,
                io=_io_label(io, config.cholesky),
                precision=pair.label,
                loo=report.loo,
                rel_residual=report.rel_residual,
                rel_chol_residual=report.rel_chol_residual,
                sync_points=stats.sync_points,
                wall_time=stats.wall_time,
                had_nan=stats.had_nan,
                p=X.p,
                cholesky=config.cholesky,
            ))
    return records


def _run_point_quiet(args):
    config, spec = args
    return run_point(config, spec, quiet=True)


def run_sweep(config, jobs=1, quiet=False):
    """
    Runs a full conditioning sweep.

    Breakdowns never stop the sweep; they show up as NaN metrics. With
    jobs > 1 the sweep points are spread over a process pool, and the merged
    records are sorted so the result does not depend on scheduling.

    Parameters:
    - config: SweepConfig
    - jobs: int
        Number of worker processes.
    - quiet: bool
        Suppress progress lines.

    Returns:
    - list of RunRecord sorted by (class, kappa, algorithm, io, precision)
    """
    specs = config.matrix_specs()
    if not quiet:
        combos = len(config.algorithms) * len(config.ios)
        print(f"🔄 Sweeping {len(specs)} {config.matrix_class} matrices x {combos} runs (jobs={jobs})...")

    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_point_quiet, [(config, spec) for spec in specs]))
    else:
        chunks = [run_point(config, spec, quiet=quiet) for spec in specs]

    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: r.sort_key)

    if not quiet:
        broken = sum(r.had_nan for r in records)
        print(f"✅ Sweep done: {len(records)} records, {broken} with NaN breakdown")
    return records
