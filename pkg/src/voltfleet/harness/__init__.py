from .evaluate import CONTROLLERS, HourRecord, RunResult, evaluate
from .metrics import DayMetrics, compute_metrics
from .report import build_report, hourly_csv, run_filename, write_report

__all__ = [
    "CONTROLLERS",
    "HourRecord",
    "RunResult",
    "evaluate",
    "DayMetrics",
    "compute_metrics",
    "build_report",
    "hourly_csv",
    "run_filename",
    "write_report",
]
