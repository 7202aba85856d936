import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# acceptance verdicts, filled by test_acceptance and printed once at the end
VERDICTS: dict[str, list[tuple[str, bool]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(VERDICTS, key=lambda k: int(k[1:])):
        checks = VERDICTS[key]
        ok = all(p for _, p in checks)
        failed = [name for name, p in checks if not p]
        tail = "" if ok else "  (failed: " + "; ".join(failed) + ")"
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}{tail}")
