import numpy as np
import pytest

from kgvacua import catalog

FAMILY_NAMES = ["static", "expanding", "frw_conformal", "frw_t6", "frw_t7", "frw_t8", "frw_t9",
                "desitter_l10", "radiation_l10b", "desitter_l11", "radiation_l11b"]


def sample_times(spec, count=5):
    lo, hi = spec.interval
    return np.linspace(lo, hi, count + 2)[1:-1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=FAMILY_NAMES)
def family_spec(request):
    return catalog.make_spec(request.param, num_points=16)


# acceptance verdicts, one line per criterion, echoed in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
