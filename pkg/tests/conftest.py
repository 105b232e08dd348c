import numpy as np
import pytest

from measure import SampleSet
from synthetic import RngSpec, draw_sample, get_model


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the slow acceptance runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def line_sample():
    """Responses 10, 20, 30 at covariates 0, 1, 2."""
    return SampleSet.from_arrays([[0.0], [1.0], [2.0]], [10.0, 20.0, 30.0])


@pytest.fixture
def square_corners():
    return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def random_sample():
    generator = np.random.default_rng(7)
    return SampleSet.from_arrays(generator.random((100, 2)), generator.normal(size=100))


@pytest.fixture
def m1_sample():
    return draw_sample(get_model("M1"), 500, RngSpec(seed=11))


@pytest.fixture
def clean_env(monkeypatch):
    """Configuration keys cleared, so defaults apply."""
    for key in ("LOG_LEVEL", "ENABLE_CONSOLE_LOGGING", "TRACE_EXPORTER", "KNN_SETTINGS_FILE", "KNN_DEFAULT_WORKERS",
                "KNN_DEFAULT_NORM", "KNN_RESULTS_DIR", "KNN_SERVICE_PORT", "KNN_SERVICE_APIKEY"):
        monkeypatch.delenv(key, raising=False)
    return monkeypatch
