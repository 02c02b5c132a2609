import os
import random
import sys

import pytest
from hypothesis import settings

SEED = int(os.environ.get("OPSTRUCT_SEED", "20240611"))

settings.register_profile("opstruct", max_examples=40, deadline=None, derandomize="OPSTRUCT_SEED" not in os.environ)
settings.load_profile("opstruct")


def pytest_configure(config):
    # an explicit OPSTRUCT_SEED also seeds hypothesis, so failures replay exactly
    if "OPSTRUCT_SEED" in os.environ and hasattr(config.option, "hypothesis_seed"):
        config.option.hypothesis_seed = SEED


def pytest_report_header(config):
    return f"OPSTRUCT_SEED={SEED}"


@pytest.fixture
def rng():
    return random.Random(SEED)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, title = results[number]
        terminalreporter.write_line(f"criterion {number}: {status} {title}")
