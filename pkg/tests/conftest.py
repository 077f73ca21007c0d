import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from plpo.terms import parse_trs

PROBLEMS = Path(__file__).resolve().parents[1] / "src" / "plpo" / "problems"

settings.register_profile(
    "default", max_examples=150, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


DEFAULT_SEED = 20240611


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=None, help="seed for randomized tests")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # an explicit seed also drives hypothesis; without one its runs are derandomized
    seed = config.getoption("--seed")
    if seed is not None:
        settings.register_profile("seeded", parent=settings.get_profile("default"), derandomize=False)
        settings.load_profile("seeded")
        config.option.hypothesis_seed = str(seed)


@pytest.fixture
def seed(request) -> int:
    value = request.config.getoption("--seed")
    return DEFAULT_SEED if value is None else value


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


def load(name: str):
    return parse_trs((PROBLEMS / f"{name}.trs").read_text())


@pytest.fixture(scope="session")
def problems():
    return {p.stem: parse_trs(p.read_text()) for p in sorted(PROBLEMS.glob("*.trs"))}
