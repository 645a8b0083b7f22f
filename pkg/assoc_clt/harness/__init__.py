"""Monte Carlo CLT runs, theorem reports and their serialization."""

from .clt import (
    NORMALIZERS,
    check_budget,
    ks_critical,
    ks_distance,
    moment_bounds,
    run_clt,
    summarize_samples,
)
from .report import emit_report, render_csv, render_json, write_text
from .theorems import (
    REQUIREMENTS,
    cf_gaps,
    clt_length,
    conditions_hold,
    consistency_flag,
    list_theorems,
    make_provenance,
    run_theorem,
)

__all__ = [
    "NORMALIZERS", "check_budget", "ks_critical", "ks_distance", "moment_bounds", "run_clt",
    "summarize_samples",
    "emit_report", "render_csv", "render_json", "write_text",
    "REQUIREMENTS", "cf_gaps", "clt_length", "conditions_hold", "consistency_flag",
    "list_theorems", "make_provenance", "run_theorem",
]
