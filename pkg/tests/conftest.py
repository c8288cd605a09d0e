import pytest

from lrfhss.harness import ExperimentConfig, run_sweep

# (criterion, passed, detail) lines collected by the acceptance module
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def default_sweep():
    """The full default grid (29 frame counts x 5 fragment counts x 10 runs), computed once."""
    cfg = ExperimentConfig()
    return cfg, run_sweep(cfg)


@pytest.fixture
def accept():
    def record(criterion: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append((criterion, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
