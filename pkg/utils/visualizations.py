import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from numerics.precision import unit_roundoff

HEATMAP_NAME = "summary_heatmap.svg"

# Fixed ids and no date stamp, so identical records give identical SVG bytes
_SVG_RC = {"svg.hashsalt": "bgs-kappa-plot", "svg.fonttype": "none"}
_SVG_METADATA = {"Date": None}

PANELS = {
    "loo": ("loo", "Loss of orthogonality  ||I - Q^T Q||"),
    "cholres": ("rel_chol_residual", "Relative Cholesky residual  ||X^T X - R^T R|| / ||X||^2"),
}


def _series_label(record):
    return f"{record.algorithm} / {record.io} ({record.precision})"


def _reference_eps(records):
    # Storage precision of the coarsest run in the plot
    lows = {r.precision.split("/")[0] for r in records}
    return max((unit_roundoff(p) for p in lows), default=unit_roundoff("double"))


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    print(f"✅ Plot saved: {path}")
    return path


def plot_kappa_panel(records, metric, ylabel, title, path):
    """
    One log-log kappa-plot: a metric against the measured condition number,
    one series per (algorithm, io, precision), with eps, eps*kappa and
    eps*kappa^2 reference lines. NaN points are left out of their series.

    Parameters:
    - records: list of RunRecord (one matrix class)
    - metric: str
        RunRecord attribute on the y-axis.
    - ylabel, title: str
    - path: str

    Returns:
    - str: the path written
    """
    fig, ax = plt.subplots(figsize=(8, 5.5))
    ax.set_xscale("log")
    ax.set_yscale("log")

    if records:
        series = {}
        for r in records:
            series.setdefault(_series_label(r), []).append((r.kappa, getattr(r, metric)))

        ymax = 1.0
        for label, points in sorted(series.items()):
            points = sorted((k, v) for k, v in points if np.isfinite(v) and v > 0)
            if not points:
                continue
            kappas, values = zip(*points)
            ymax = max(ymax, max(values))
            ax.plot(kappas, values, marker="o", markersize=4, label=label)

        eps = _reference_eps(records)
        kappas = [r.kappa for r in records if np.isfinite(r.kappa) and r.kappa > 0]
        if kappas:
            k = np.logspace(np.log10(min(kappas)), np.log10(max(kappas)), 50)
            ax.plot(k, np.full_like(k, eps), color="black", linestyle=":", linewidth=1, label="eps")
            ax.plot(k, eps * k, color="gray", linestyle="--", linewidth=1, label="eps * kappa")
            ax.plot(k, eps * k ** 2, color="gray", linestyle="-.", linewidth=1, label="eps * kappa^2")
            ax.set_ylim(eps / 10, ymax * 100)
        ax.legend(loc="upper left", fontsize=7)

    ax.set_xlabel("kappa(X)")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_summary_heatmap(records, path):
    """
    Heatmap of log10 worst-case LOO per (algorithm, io, precision) and matrix class.

    Parameters:
    - records: list of RunRecord
    - path: str

    Returns:
    - str: the path written
    """
    df = pd.DataFrame({
        "series": [_series_label(r) for r in records],
        "class": [r.matrix_class for r in records],
        "loo": [r.loo for r in records],
    })
    table = df.groupby(["series", "class"])["loo"].max().unstack("class")
    with np.errstate(divide="ignore"):
        table = np.log10(table.astype(float)).replace(-np.inf, np.nan)
    finite = table.values[np.isfinite(table.values)]
    vmin, vmax = (finite.min(), finite.max()) if finite.size else (-16.0, 0.0)

    fig, ax = plt.subplots(figsize=(2.5 + 1.5 * table.shape[1], 1.5 + 0.45 * table.shape[0]))
    sns.heatmap(
        table, annot=True, fmt=".1f", cmap="rocket_r", vmin=vmin, vmax=max(vmax, vmin + 1.0),
        cbar_kws={"label": "log10 max LOO"}, ax=ax,
    )
    ax.set_title("Worst-case loss of orthogonality")
    ax.set_xlabel("Matrix class")
    ax.set_ylabel("")
    fig.tight_layout()
    return _save(fig, path)


def emit_plots(records, out_dir, matrix_classes=None):
    """
    Writes the kappa-plots of every matrix class and the summary heatmap.

    Classes listed in matrix_classes get their two SVGs even without
    records (empty axes).

    Parameters:
    - records: list of RunRecord
    - out_dir: str
    - matrix_classes: iterable of str or None

    Returns:
    - list of str: paths written
    """
    os.makedirs(out_dir, exist_ok=True)
    classes = sorted(set(matrix_classes or ()) | {r.matrix_class for r in records})

    paths = []
    with plt.rc_context(_SVG_RC), sns.axes_style("whitegrid"):
        for matrix_class in classes:
            subset = [r for r in records if r.matrix_class == matrix_class]
            for suffix, (metric, ylabel) in PANELS.items():
                path = os.path.join(out_dir, f"{matrix_class}_{suffix}.svg")
                paths.append(plot_kappa_panel(subset, metric, ylabel, f"{matrix_class} matrices", path))
        if records:
            paths.append(plot_summary_heatmap(records, os.path.join(out_dir, HEATMAP_NAME)))
    return paths
