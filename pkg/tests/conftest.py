import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def strings_10k():
    from phast.keys import random_strings
    return random_strings(10_000, rng_seed=11)


@pytest.fixture(scope="session")
def strings_1m():
    from phast.keys import random_strings
    return random_strings(1_000_000, rng_seed=12)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
