import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One visible pass/fail line per acceptance criterion."""
    entries = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            match = _CRITERION.search(rep.nodeid)
            if match is None:
                continue
            number = int(match.group(1))
            label = match.group(2).replace("_", " ")
            entries[number] = ("PASS" if outcome == "passed" else "FAIL", label)
    if entries:
        terminalreporter.section("acceptance criteria")
        for number in sorted(entries):
            verdict, label = entries[number]
            terminalreporter.write_line(f"{verdict} criterion {number}: {label}")
