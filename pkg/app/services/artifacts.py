"""
Output files of a run: resolved config, metric CSVs, loss trace and
constellation tables. Every file carries the resolved-config hash in a
leading `# config_sha256=` comment line.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

from app.models.config import ExperimentConfig
from app.models.results import MetricCurve, TraceRow

logger = logging.getLogger(__name__)

RESOLVED_CFG = "resolved.cfg"
TRACE_COLUMNS = ("step", "phase", "cross_entropy", "entropy", "papr_db", "total")
CURVE_COLUMNS = {
    "mi": ("snr_db", "mi_bits", "n_symbols", "seed"),
    "ser": ("snr_db", "ser", "n_symbols", "seed"),
    "ccdf": ("papr0_db", "ccdf", "n_frames", "seed"),
}


def hash_header(config: ExperimentConfig) -> str:
    return f"# config_sha256={config.config_hash()}\n"


def ensure_out_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_resolved_config(config: ExperimentConfig, out_dir: Path) -> Path:
    path = ensure_out_dir(out_dir) / RESOLVED_CFG
    path.write_text(config.to_cfg_text(), encoding="utf-8")
    return path


def write_csv(path: Path, config: ExperimentConfig, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    ensure_out_dir(path.parent)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(hash_header(config))
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    logger.info("Wrote %s", path, extra={"path": str(path)})
    return path


def write_curve(path: Path, config: ExperimentConfig, curve: MetricCurve) -> Path:
    rows = zip(curve.x, curve.y, curve.n_samples, [curve.seed] * len(curve.x))
    return write_csv(path, config, CURVE_COLUMNS[curve.kind], rows)


def write_trace(path: Path, config: ExperimentConfig, trace: List[TraceRow]) -> Path:
    rows = ([getattr(row, c) for c in TRACE_COLUMNS] for row in trace)
    return write_csv(path, config, TRACE_COLUMNS, rows)


def write_text(path: Path, config: ExperimentConfig, body: str) -> Path:
    path = Path(path)
    ensure_out_dir(path.parent)
    path.write_text(hash_header(config) + body, encoding="utf-8")
    logger.info("Wrote %s", path, extra={"path": str(path)})
    return path


def read_csv_rows(path: Path) -> List[dict]:
    """Rows of an artifact CSV as dicts, skipping `#` comment lines."""
    with Path(path).open(encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))
