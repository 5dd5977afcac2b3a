"""Shared pytest hooks: print the acceptance summary after the test run."""

ACCEPTANCE_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> bool:
    """Register one acceptance-criterion verdict for the end-of-run summary."""
    verdict = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append((number, f"CRITERION {number:2d}: {verdict} — {detail}"))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
