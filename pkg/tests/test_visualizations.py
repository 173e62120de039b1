import math
import os

from core.sweep_runner import RunRecord
from utils.visualizations import HEATMAP_NAME, emit_plots


def _record(algorithm, kappa, loo, io="HouseQR", matrix_class="glued"):
    return RunRecord(
        matrix_class=matrix_class, knobs="t1=1;t2=1", kappa=kappa, algorithm=algorithm, io=io,
        precision="double", loo=loo, rel_residual=1e-16, rel_chol_residual=1e-16,
        sync_points=10, wall_time=0.0, had_nan=math.isnan(loo), p=10,
    )


def test_empty_input_still_writes_both_panels(tmp_path):
    paths = emit_plots([], str(tmp_path), matrix_classes=["glued"])
    names = sorted(os.path.basename(p) for p in paths)
    assert names == ["glued_cholres.svg", "glued_loo.svg"]
    for path in paths:
        assert open(path, encoding="utf-8").read().lstrip().startswith("<?xml")


def test_one_pair_of_panels_per_class_plus_heatmap(tmp_path):
    records = [
        _record("BCGS_PIP", 1e2, 1e-13),
        _record("BCGS_PIP", 1e5, math.nan),
        _record("BCGS_PIPI+", 1e3, 2e-16, matrix_class="piled"),
    ]
    names = sorted(os.path.basename(p) for p in emit_plots(records, str(tmp_path)))
    assert names == sorted([
        "glued_loo.svg", "glued_cholres.svg", "piled_loo.svg", "piled_cholres.svg", HEATMAP_NAME,
    ])


def test_plots_are_byte_stable(tmp_path):
    records = [_record("BCGS_PIP", 1e2, 1e-13), _record("BCGS_PIP", 1e4, 1e-9)]
    a = emit_plots(records, str(tmp_path / "a"))
    b = emit_plots(records, str(tmp_path / "b"))
    for pa, pb in zip(a, b):
        with open(pa, "rb") as fa, open(pb, "rb") as fb:
            assert fa.read() == fb.read()
