import re
from collections import defaultdict

_results = defaultdict(list)
_CRIT = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            outcome = "xfail" if report.skipped else "xpass"
        else:
            outcome = report.outcome
        _results[int(m.group(1))].append((report.nodeid.split("::")[-1], outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_results):
        outcomes = [o for _, o in _results[n]]
        if all(o == "passed" for o in outcomes):
            verdict = "PASS"
        elif "failed" in outcomes or "xpass" in outcomes:
            verdict = "FAIL"
        else:
            known = ", ".join(name for name, o in _results[n] if o == "xfail")
            verdict = f"FAIL (known conflict, see decisions ledger: {known})"
        tr.write_line(f"criterion {n:2d}: {verdict}")
