import numpy as np
import pytest

from ptberry import EvolutionConfig, LoopPath, ParamPoint

# criterion number -> (title, [(part, passed, detail), ...]), filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, title, part, passed, detail):
    ACCEPTANCE.setdefault(number, (title, []))[1].append((part, bool(passed), detail))
    return bool(passed)

REF_THETA0 = np.pi / 3
REF_U = np.sqrt(0.75)
# phase of the + branch around the reference latitude loop
REF_GAMMA = np.pi * (1 + REF_U * np.cos(REF_THETA0))


@pytest.fixture
def example_point():
    """(epsilon, a, b, theta, phi, delta) = (0, 1, 0.5, pi/2, 0, 0)."""
    return ParamPoint(0.0, 1.0, 0.5, np.pi / 2, 0.0, 0.0)


@pytest.fixture(scope="session")
def reference_loop():
    base = ParamPoint(0.0, 1.0, 0.5, REF_THETA0, 0.0, 0.0)
    return LoopPath.latitude(base, REF_THETA0, 1)


@pytest.fixture(scope="session")
def reference_config():
    return EvolutionConfig(total_time=2000.0, steps=400_000, branch="+", record_stride=10)


def random_valid_points(seed, n, max_ratio=0.95):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        a = rng.choice([-1, 1]) * rng.uniform(0.1, 10.0)
        yield ParamPoint(
            rng.uniform(-3, 3),
            a,
            a * rng.uniform(-max_ratio, max_ratio),
            rng.uniform(0, np.pi),
            rng.uniform(0, 2 * np.pi),
            rng.uniform(0, 2 * np.pi),
        )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, parts = ACCEPTANCE[number]
        ok = all(passed for _, passed, _ in parts)
        detail = "; ".join(
            f"{part} {'ok' if passed else 'FAILED'} ({text})" for part, passed, text in parts
        )
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
