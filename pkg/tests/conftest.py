import numpy as np
import pytest

from nmtorus.maps import HarperParams, PcmParams, harper_pair, pcm_pair


@pytest.fixture
def rng():
    return np.random.default_rng(20121113)


@pytest.fixture
def pcm8():
    return pcm_pair(PcmParams(1.0, 0.25, 8), 0.1)


@pytest.fixture
def harper8():
    return harper_pair(HarperParams(0.5, 0.5, 8), 0.2)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
