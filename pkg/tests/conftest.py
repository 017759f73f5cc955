import math

import pytest


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n else 0.0


def assert_within_sigma(observed: float, expected: float, n: int, k: float = 4.0):
    """|observed - expected| <= k binomial standard deviations (exact when sigma is 0)."""
    sigma = binomial_sigma(expected, n)
    assert abs(observed - expected) <= k * sigma + 1e-12, (
        f"observed {observed:.6f} vs expected {expected:.6f}: "
        f"{abs(observed - expected) / sigma if sigma else math.inf:.2f} sigma (n={n})"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    lines = {}
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            for key, value in rep.user_properties:
                if key == "criterion":
                    num, title = value
                    prev = lines.get(num, (title, "PASS"))[1]
                    status = "FAIL" if outcome == "failed" or prev == "FAIL" else "PASS"
                    lines[num] = (title, status)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            title, status = lines[num]
            terminalreporter.write_line(f"criterion {num:2d} {status}  {title}")
