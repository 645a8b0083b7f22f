"""
Deterministic report serialization.

JSON reports are written with sorted keys and a fixed indent, so the same
report always produces the same bytes. The CSV bundle holds one plot-ready
file per condition trajectory plus verdict and CLT summaries; every CSV
starts with a provenance comment line.
"""

import csv
import io
import json
import logging
import re
from pathlib import Path
from typing import Any, Iterable, List, Literal, Optional, Sequence, Union

from pydantic import BaseModel

from ..core.exceptions import ReportWriteError
from ..core.models import CltVerdict, ConditionReport, Provenance, TheoremReport

logger = logging.getLogger(__name__)

ReportFormat = Literal["json", "csv"]

CONDITION_COLUMNS = ["condition_id", "n", "r", "value", "target", "stderr", "flags"]
VERDICT_COLUMNS = ["condition_id", "rule", "axis", "verdict", "trend_slope", "source", "note"]
CLT_COLUMNS = [
    "n", "reps", "seed", "normalizer", "scale", "ks_distance", "ks_critical", "alpha",
    "passed", "mean", "sd", "skewness", "excess_kurtosis",
]


def to_jsonable(data: Any) -> Any:
    """Plain JSON data from models, lists and dicts (aliases applied)."""
    if isinstance(data, BaseModel):
        return data.model_dump(mode="json", by_alias=True)
    if isinstance(data, dict):
        return {k: to_jsonable(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_jsonable(v) for v in data]
    return data


def render_json(data: Any) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2) + "\n"


def provenance_line(provenance: Optional[Provenance], **extra: Any) -> str:
    if provenance is None:
        line = "# assoc-clt"
    else:
        line = (
            f"# {provenance.tool} {provenance.version} config_hash={provenance.config_hash} "
            f"master_seed={provenance.master_seed}"
        )
    return line + "".join(f" {key}={value}" for key, value in extra.items())


def write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write text with Unix newlines, creating parent directories.

    Raises:
        ReportWriteError: If the destination cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise ReportWriteError(f"cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def render_csv(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    provenance: Optional[Provenance],
    **extra: Any,
) -> str:
    buffer = io.StringIO()
    buffer.write(provenance_line(provenance, **extra) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buffer.getvalue()


def condition_rows(report: ConditionReport) -> List[List[Any]]:
    return [
        [v.condition_id, v.n, v.r, repr(v.value), repr(v.target), v.stderr, ";".join(v.flags)]
        for v in report.grid
    ]


def verdict_rows(reports: Sequence[ConditionReport]) -> List[List[Any]]:
    return [
        [r.condition_id, r.rule, r.axis, r.verdict, r.trend_slope, r.source, r.note]
        for r in reports
    ]


def clt_rows(clt: Optional[CltVerdict]) -> List[List[Any]]:
    if clt is None:
        return []
    s = clt.summary
    return [[
        clt.n, clt.reps, clt.seed, clt.normalizer, repr(clt.scale), repr(clt.ks_distance),
        repr(clt.ks_critical), clt.alpha, clt.passed, repr(s.mean), repr(s.sd),
        repr(s.skewness), repr(s.excess_kurtosis),
    ]]


def _file_stem(condition_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", condition_id)


def emit_report(
    report: TheoremReport,
    out_dir: Union[str, Path],
    fmt: ReportFormat = "json",
    stem: Optional[str] = None,
) -> List[Path]:
    """
    Write a theorem report.

    Args:
        report: Complete or partial report
        out_dir: Destination directory
        fmt: "json" (one file) or "csv" (bundle)
        stem: File name stem of the JSON report (defaults to the theorem id)

    Returns:
        Written paths, in a fixed order

    Raises:
        ReportWriteError: If the destination is not writable
    """
    out = Path(out_dir)
    if report.incomplete:
        failed = ", ".join(f.evaluator for f in report.failures)
        logger.warning("Report %s is incomplete (failed: %s)", report.theorem_id, failed)
    if fmt == "json":
        return [write_text(out / f"{stem or report.theorem_id}.json", render_json(report))]
    if fmt != "csv":
        raise ValueError(f"Unknown report format: {fmt}")
    provenance = report.provenance
    paths = [
        write_text(
            out / f"{_file_stem(r.condition_id)}.csv",
            render_csv(CONDITION_COLUMNS, condition_rows(r), provenance),
        )
        for r in report.conditions
    ]
    paths.append(
        write_text(
            out / "verdicts.csv",
            render_csv(VERDICT_COLUMNS, verdict_rows(report.conditions), provenance),
        )
    )
    paths.append(
        write_text(out / "clt.csv", render_csv(CLT_COLUMNS, clt_rows(report.clt), provenance))
    )
    return paths
