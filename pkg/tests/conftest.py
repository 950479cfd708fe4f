import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_OUTCOMES: dict[str, tuple[str, str, list]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}[report.outcome]
        reason = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            reason = report.longrepr[2]
        _OUTCOMES[name] = (status, reason, list(report.user_properties))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_OUTCOMES, key=lambda n: int(re.search(r"\d+", n).group())):
        status, reason, props = _OUTCOMES[name]
        num = re.search(r"\d+", name).group()
        title = name.split("_", 3)[-1].replace("_", " ")
        detail = ", ".join(f"{k}={v}" for k, v in props)
        extra = f" ({reason})" if reason else (f" [{detail}]" if detail else "")
        terminalreporter.write_line(f"criterion {num} {title}: {status}{extra}")
