import json
import math
from datetime import datetime

import pytest

from core.config import parse_config
from core.sweep_runner import RunRecord
from utils.reporting import CSV_COLUMNS, emit_csv, emit_report, records_to_frame, summarize_max_loo

HEADER = "class,knobs,kappa,algorithm,io,precision,loo,rel_res,rel_chol_res,sync_points,wall_time"


def _record(algorithm="BCGS_PIP", kappa=1234.5, loo=1.25e-12, had_nan=False, matrix_class="glued"):
    return RunRecord(
        matrix_class=matrix_class, knobs="t1=1.5;t2=1.5", kappa=kappa, algorithm=algorithm, io="HouseQR",
        precision="double", loo=loo, rel_residual=3e-16, rel_chol_residual=math.nan if had_nan else 2e-16,
        sync_points=10, wall_time=0.0123, had_nan=had_nan, p=10,
    )


def _read_lines(path):
    with open(path, encoding="utf-8", newline="") as f:
        return f.read().split("\n")


def test_header_matches_column_list():
    assert ",".join(CSV_COLUMNS) == HEADER


def test_empty_records_give_header_only(tmp_path):
    path = emit_csv([], str(tmp_path / "results.csv"))
    assert _read_lines(path) == [HEADER, ""]


def test_one_record_gives_two_lines(tmp_path):
    path = emit_csv([_record()], str(tmp_path / "results.csv"))
    lines = _read_lines(path)
    assert lines[0] == HEADER
    assert lines[1] == "glued,t1=1.5;t2=1.5,1234.5,BCGS_PIP,HouseQR,double,1.25e-12,3e-16,2e-16,10,NaN"
    assert lines[2] == ""


def test_reals_round_trip_and_nan_literal(tmp_path):
    kappa = 1.0 / 3.0 * 1e7
    path = emit_csv([_record(kappa=kappa, loo=math.nan, had_nan=True)], str(tmp_path / "r.csv"), timing=True)
    row = _read_lines(path)[1].split(",")
    assert float(row[2]) == kappa
    assert row[6] == "NaN" and row[8] == "NaN"
    assert row[10] == "0.0123"


def test_csv_is_byte_stable(tmp_path):
    records = [_record("BCGS_PIP"), _record("BCGS_PIP+", kappa=99.0)]
    a = emit_csv(records, str(tmp_path / "a.csv"))
    b = emit_csv(records, str(tmp_path / "b.csv"))
    with open(a, "rb") as fa, open(b, "rb") as fb:
        assert fa.read() == fb.read()


def test_records_to_frame_hides_wall_time_by_default():
    assert records_to_frame([_record()])["wall_time"][0] == "NaN"
    assert records_to_frame([_record()], timing=True)["wall_time"][0] == "0.0123"


def test_summary_covers_every_algorithm_and_class():
    records = [_record("BCGS_PIP", loo=1e-10), _record("BCGS_PIP", loo=1e-8), _record("BCGS_PIP+", loo=math.nan, had_nan=True)]
    summary = summarize_max_loo(records, ["BCGS_PIP", "BCGS_PIP+", "BCGS_PIPI+"], ["glued", "piled"])
    assert len(summary) == 6
    assert summary.loc[("BCGS_PIP", "glued"), "max_loo"] == 1e-8
    assert summary.loc[("BCGS_PIP+", "glued"), "breakdowns"] == 1
    assert summary.loc[("BCGS_PIPI+", "piled"), "runs"] == 0


@pytest.fixture
def config(tiny_config_dict):
    tiny_config_dict["algorithms"] = ["BCGS_PIP", "BCGS_PIP+"]
    return parse_config(json.dumps(tiny_config_dict))


def test_report_contents(tmp_path, config):
    path = emit_report([_record("BCGS_PIP"), _record("BCGS_PIP+")], config, str(tmp_path / "report.md"),
                       plots=[str(tmp_path / "glued_loo.svg")])
    text = open(path, encoding="utf-8").read()

    stamp = next(line for line in text.splitlines() if line.startswith("Generated: "))
    datetime.fromisoformat(stamp[len("Generated: "):])

    table_rows = [line for line in text.splitlines() if line.startswith("| BCGS")]
    assert len(table_rows) == len(config.algorithms) * 1
    assert '"class": "glued"' in text
    assert "[results.csv](results.csv)" in text
    assert "[glued_loo.svg](glued_loo.svg)" in text


def test_regenerated_report_differs_only_in_timestamp(tmp_path, config):
    records = [_record()]
    a = open(emit_report(records, config, str(tmp_path / "a.md")), encoding="utf-8").read().splitlines()
    b = open(emit_report(records, config, str(tmp_path / "b.md")), encoding="utf-8").read().splitlines()
    differing = [x for x, y in zip(a, b) if x != y]
    assert len(a) == len(b)
    assert all(line.startswith("Generated: ") for line in differing)
