import pytest

from cfr_forge.games import build_game

# Filled by test_acceptance.py: criterion number -> list of (ok, detail).
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture(scope="session")
def kuhn():
    return build_game("kuhn")


@pytest.fixture(scope="session")
def leduc():
    return build_game("leduc")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}")
