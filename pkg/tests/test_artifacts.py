from app.models.results import MetricCurve, TraceRow
from app.services.artifacts import (
    CURVE_COLUMNS,
    RESOLVED_CFG,
    read_csv_rows,
    write_curve,
    write_resolved_config,
    write_text,
    write_trace,
)


def test_resolved_config_file(tmp_path, small_experiment):
    path = write_resolved_config(small_experiment, tmp_path / "run")
    assert path.name == RESOLVED_CFG
    assert path.read_text(encoding="utf-8") == small_experiment.to_cfg_text()


def test_curve_csv_has_hash_header_and_exact_floats(tmp_path, small_experiment):
    curve = MetricCurve(label="mi", kind="mi", x=[0.0, 10.0], y=[0.1 + 0.2, 3.25], n_samples=[800, 800], seed=3)
    path = write_curve(tmp_path / "mi.csv", small_experiment, curve)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# config_sha256={small_experiment.config_hash()}"
    assert lines[1] == ",".join(CURVE_COLUMNS["mi"])

    rows = read_csv_rows(path)
    assert [float(r["mi_bits"]) for r in rows] == [0.1 + 0.2, 3.25]
    assert [int(r["n_symbols"]) for r in rows] == [800, 800]
    assert rows[0]["seed"] == "3"


def test_trace_csv(tmp_path, small_experiment):
    trace = [
        TraceRow(step=1, phase=1, cross_entropy=2.7, entropy=2.77, papr_db=9.5, total=-0.07),
        TraceRow(step=2, phase=2, cross_entropy=2.5, entropy=2.76, papr_db=9.1, total=-0.2),
    ]
    rows = read_csv_rows(write_trace(tmp_path / "trace.csv", small_experiment, trace))
    assert [r["phase"] for r in rows] == ["1", "2"]
    assert float(rows[1]["total"]) == -0.2


def test_text_artifact_creates_parents(tmp_path, small_experiment):
    path = write_text(tmp_path / "a" / "b" / "constellation.txt", small_experiment, "0 1.0 0.0 1.0\n")
    assert path.read_text(encoding="utf-8").endswith("0 1.0 0.0 1.0\n")
