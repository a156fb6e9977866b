_CRITERIA = [
    ("test_criterion_1", "criterion 1: sweep vs Newton-Raphson on 200 random feeders + 2-bus closed form (1e-6, <10 s)"),
    ("test_criterion_2", "criterion 2: exact-arithmetic reward / fleet / droop / action-mapping examples (1e-9, <1 s)"),
    ("test_criterion_3", "criterion 3: finite-difference checks on actor/critic/alpha losses (1e-4, 20+ coords x 5 inits, <30 s)"),
    ("test_criterion_4", "criterion 4: phase-2 rewards equal phase-1 with an ample fleet (1e-9, both controllers)"),
    ("test_criterion_5", "criterion 5: 20k-step policy beats the random baseline; violations <= 50% of uncontrolled"),
    ("test_criterion_6", "criterion 6: 34-bus trends (multi-hub <= 1 viol hour; EV-constrained reduces <= 3; aggressive unchanged)"),
    ("test_criterion_7", "criterion 7: byte-identical report bodies across repeated identical CLI invocations"),
]

_LABEL = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One printed line per acceptance criterion that ran."""
    seen: dict[str, str] = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            for key, _ in _CRITERIA:
                if key in nodeid and seen.get(key) != "failed":
                    seen[key] = "failed" if outcome == "error" else outcome
    if not seen:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key, desc in _CRITERIA:
        if key in seen:
            terminalreporter.write_line(f"{_LABEL[seen[key]]}  {desc}")
