import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_AC = re.compile(r"test_ac(\d+)_(\w+)")
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria AC1-AC9")


def pytest_runtest_logreport(report):
    m = _AC.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if report.when == "call" or report.outcome != "passed":
        prev = _results.get(key, "PASS")
        _results[key] = "FAIL" if report.outcome == "failed" or prev == "FAIL" else (
            "PASS" if report.outcome == "passed" else report.outcome.upper())


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), status in sorted(_results.items()):
        terminalreporter.write_line(f"AC{n} {status}  {name}")
