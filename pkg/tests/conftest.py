import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria_lines: list[str] = []


@pytest.fixture
def criterion(request):
    """Print one PASS/FAIL line for an acceptance criterion, whatever the outcome."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(line: str) -> None:
        _criteria_lines.append(line)
        with capman.global_and_fixture_disabled():
            print(f"\n{line}", flush=True)

    holder = {}

    def start(label: str) -> None:
        holder["label"] = label

    yield start
    label = holder.get("label", request.node.name)
    outcome = getattr(request.node, "rep_call", None)
    passed = outcome is not None and outcome.passed
    emit(f"[{'PASS' if passed else 'FAIL'}] {label}")


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    report = (yield).get_result()
    if report.when == "call":
        item.rep_call = report


def pytest_terminal_summary(terminalreporter):
    if _criteria_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criteria_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def oscillator():
    from nlrs.lab.delta import Oscillator

    return Oscillator.gaussian(Fraction(3, 10), Fraction(4, 10))


@pytest.fixture(scope="session")
def sqrt2_minus_one():
    from nlrs.exact import Polynomial, isolate_roots
    from nlrs.lab.cf import RealGenerator

    root = max((r for r, _ in isolate_roots(Polynomial([-2, 0, 1]))), key=lambda r: r.approx().real)
    return RealGenerator.algebraic(root - 1, "sqrt2-1")


@pytest.fixture(scope="session")
def golden():
    from nlrs.exact import Polynomial, isolate_roots
    from nlrs.lab.cf import RealGenerator

    root = max((r for r, _ in isolate_roots(Polynomial([-5, 0, 1]))), key=lambda r: r.approx().real)
    return RealGenerator.algebraic((root - 1) / 2, "golden")
