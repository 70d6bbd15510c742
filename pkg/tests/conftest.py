ACCEPTANCE_MODULE = "test_acceptance"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of a run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            nodeid = getattr(report, "nodeid", "")
            if ACCEPTANCE_MODULE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, outcome == "passed"))
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok in sorted(lines):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")
