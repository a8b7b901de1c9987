import os
import random

import pytest
from hypothesis import settings

settings.register_profile("twistcalc", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("twistcalc")

SEED = int(os.environ.get("TWISTCALC_SEED", "1729"))


@pytest.fixture
def rng():
    return random.Random(SEED)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
