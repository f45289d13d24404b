"""Shared reporting for the acceptance gate.

test_acceptance records one verdict per criterion here; the terminal
summary hook prints them as one line each at the end of the run, so the
pass/fail status of every criterion is visible regardless of pytest's
output capturing.
"""

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def record_acceptance(number: int, description: str, ok: bool) -> None:
    ACCEPTANCE_RESULTS[number] = (description, ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        description, ok = ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d} [{verdict}] {description}")
