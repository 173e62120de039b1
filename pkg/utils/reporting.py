import json
import math
import os
from datetime import datetime, timezone

import pandas as pd

CSV_COLUMNS = [
    "class", "knobs", "kappa", "algorithm", "io", "precision",
    "loo", "rel_res", "rel_chol_res", "sync_points", "wall_time",
]

CSV_NAME = "results.csv"
REPORT_NAME = "report.md"


def _real(x):
    # repr of a Python float is the shortest string that round-trips
    x = float(x)
    return "NaN" if math.isnan(x) else repr(x)


def records_to_frame(records, timing=False):
    """
    Tabulates run records in CSV column order, reals already rendered as text.

    Parameters:
    - records: list of RunRecord
    - timing: bool
        Keep measured wall times (otherwise the column is NaN).

    Returns:
    - pd.DataFrame
    """
    rows = [
        {
            "class": r.matrix_class,
            "knobs": r.knobs,
            "kappa": _real(r.kappa),
            "algorithm": r.algorithm,
            "io": r.io,
            "precision": r.precision,
            "loo": _real(r.loo),
            "rel_res": _real(r.rel_residual),
            "rel_chol_res": _real(r.rel_chol_residual),
            "sync_points": int(r.sync_points),
            "wall_time": _real(r.wall_time if timing else math.nan),
        }
        for r in records
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def emit_csv(records, path, timing=False, quiet=False):
    """
    Writes run records as CSV: a header row, then one row per record.

    Parameters:
    - records: list of RunRecord
    - path: str
    - timing: bool
    - quiet: bool

    Returns:
    - str: the path written
    """
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    records_to_frame(records, timing).to_csv(path, index=False, lineterminator="\n")
    if not quiet:
        print(f"✅ Results saved: {path}")
    return path


def summarize_max_loo(records, algorithms, classes):
    """
    Worst loss of orthogonality per (algorithm, class) over all ios and sweep points.

    Parameters:
    - records: list of RunRecord
    - algorithms: list of str
    - classes: list of str

    Returns:
    - pd.DataFrame with one row per (algorithm, class): max_loo, runs, breakdowns
    """
    index = pd.MultiIndex.from_product([algorithms, classes], names=["algorithm", "class"])
    if not records:
        return pd.DataFrame({"max_loo": math.nan, "runs": 0, "breakdowns": 0}, index=index)

    df = pd.DataFrame({
        "algorithm": [r.algorithm for r in records],
        "class": [r.matrix_class for r in records],
        "loo": [r.loo for r in records],
        "had_nan": [r.had_nan for r in records],
    })
    grouped = df.groupby(["algorithm", "class"])
    summary = pd.DataFrame({
        "max_loo": grouped["loo"].max(),
        "runs": grouped["loo"].size(),
        "breakdowns": grouped["had_nan"].sum(),
    })
    summary = summary.reindex(index)
    summary["runs"] = summary["runs"].fillna(0).astype(int)
    summary["breakdowns"] = summary["breakdowns"].fillna(0).astype(int)
    return summary


def emit_report(records, config, path, plots=()):
    """
    Writes the markdown report: timestamp, config echo, worst-case LOO table
    and links to the CSV and plots.

    Parameters:
    - records: list of RunRecord
    - config: SweepConfig
    - path: str
    - plots: iterable of str
        Plot files to link (paths relative to the report are used).

    Returns:
    - str: the path written
    """
    folder = os.path.dirname(path) or "."
    os.makedirs(folder, exist_ok=True)

    classes = sorted({config.matrix_class} | {r.matrix_class for r in records})
    summary = summarize_max_loo(records, list(config.algorithms), classes)

    lines = [
        "# Block Gram-Schmidt stability report",
        "",
        f"Generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        "",
        "## Configuration",
        "",
        "```json",
        json.dumps(config.to_dict(), indent=2),
        "```",
        "",
        "## Worst-case loss of orthogonality",
        "",
        "| algorithm | class | max LOO | runs | NaN breakdowns |",
        "|---|---|---|---|---|",
    ]
    for (algorithm, matrix_class), row in summary.iterrows():
        max_loo = "NaN" if math.isnan(row["max_loo"]) else f"{row['max_loo']:.3e}"
        lines.append(f"| {algorithm} | {matrix_class} | {max_loo} | {int(row['runs'])} | {int(row['breakdowns'])} |")

    lines += ["", "## Artifacts", "", f"- [{CSV_NAME}]({CSV_NAME})"]
    for plot in plots:
        name = os.path.relpath(plot, folder)
        lines.append(f"- [{name}]({name})")
    lines.append("")

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines))
    print(f"✅ Report saved: {path}")
    return path
