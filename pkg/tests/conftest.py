"""Shared pytest plumbing.

The acceptance suite records one verdict per criterion; the terminal
summary hook prints them as stable one-per-line output at the end of
the run, whether or not output capture is active.
"""

ACCEPTANCE_RESULTS: list[tuple[int, str, str, str]] = []


def record_criterion(number: int, name: str, verdict: str, detail: str = ""):
    ACCEPTANCE_RESULTS.append((number, name, verdict, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, name, verdict, detail in sorted(ACCEPTANCE_RESULTS):
        line = f"criterion {number:02d} {name}: {verdict}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line)
