from pathlib import Path

import numpy as np
import pytest

from rsqtsm import RegimeParams, TransitionSchedule

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

Q2 = [[0.9, 0.1], [0.2, 0.8]]


def random_params(rng: np.random.Generator, n: int, *, affine: bool = False) -> RegimeParams:
    """Moderate parameter draws; admissible for short horizons by construction."""
    return RegimeParams(
        kappa=rng.uniform(-0.2, 0.2, n),
        mu=rng.uniform(0.5, 1.05, n),
        sigma=rng.uniform(0.05, 0.5, n),
        a0=rng.uniform(0.0, 0.05, n),
        a1=rng.uniform(-0.05, 0.05, n),
        a2=np.zeros(n) if affine else rng.uniform(-0.01, 0.05, n),
    )


def random_schedule(rng: np.random.Generator, n: int, steps: int) -> TransitionSchedule:
    mats = rng.dirichlet(np.ones(n), size=(steps, n))
    return TransitionSchedule.from_list(mats)


@pytest.fixture
def two_regime_params() -> RegimeParams:
    return RegimeParams.from_rows(
        [
            (0.1, 0.95, 0.2, 0.02, 0.01, 0.001),
            (-0.05, 0.8, 0.4, 0.03, -0.02, 0.004),
        ]
    )


@pytest.fixture
def q2() -> TransitionSchedule:
    return TransitionSchedule.constant(Q2)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Append ``(criterion, passed, seconds, detail)`` rows for the end-of-run summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(ACCEPTANCE_KEY, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, seconds, detail in sorted(rows, key=lambda r: int(r[0].split()[0].lstrip("AC"))):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name:<44} {seconds:7.2f}s  {detail}")
