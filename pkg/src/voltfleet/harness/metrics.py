"""Daily voltage-quality metrics over 24 hourly records."""

from __future__ import annotations

from dataclasses import dataclass

V_VIOLATION_PU = 0.95


@dataclass(frozen=True)
class DayMetrics:
    """Statistics over the hourly feeder-mean voltages of one day.

    Hours whose controlled power flow did not converge are excluded from
    the voltage statistics and counted separately; a violation hour is a
    converged hour whose feeder-mean voltage sits below 0.95 pu.
    """

    v_mean: float
    v_min: float
    v_max: float
    violation_hours: int
    nonconverged_hours: int
    hours: int


def compute_metrics(records) -> DayMetrics:
    """records: iterable with .converged and .v_mean per hour."""
    means = [r.v_mean for r in records if r.converged]
    bad = sum(1 for r in records if not r.converged)
    total = len(means) + bad
    if not means:
        nan = float("nan")
        return DayMetrics(nan, nan, nan, 0, bad, total)
    return DayMetrics(
        v_mean=float(sum(means) / len(means)),
        v_min=float(min(means)),
        v_max=float(max(means)),
        violation_hours=sum(1 for m in means if m < V_VIOLATION_PU),
        nonconverged_hours=bad,
        hours=total,
    )
