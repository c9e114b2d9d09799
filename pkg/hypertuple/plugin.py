"""
pytest plugin shipped with hypertuple.

Provides seeded fixtures for numerical tests (``ht_seed``, ``ht_rng`` and
``ht_tol``) and the ``acceptance`` marker: marked tests are skipped unless
``--ht-acceptance`` is given or ``ht-acceptance`` is set in the ini file.

"""
import numpy as np
import pytest
import scipy

from hypertuple.errors import InvalidInput
from hypertuple.numkit import DEFAULT_SEED, DEFAULT_TOLERANCE, Tolerance

#: Name the settings object is registered under.
PLUGIN_NAME = "hypertuple-settings"


def pytest_addoption(parser):
    group = parser.getgroup("hypertuple numerical checks")

    msg = f"seed of the ht_seed and ht_rng fixtures (default {DEFAULT_SEED})"
    option = "ht-seed"
    group.addoption(f"--{option}", help=msg, action="store")
    parser.addini(option, help=msg)

    msg = "tolerance overrides of the ht_tol fixture, e.g. eq=1e-9,rank=1e-8,cluster=1e-6"
    option = "ht-tol"
    group.addoption(f"--{option}", help=msg, action="store")
    parser.addini(option, help=msg)

    msg = "run the long seeded tests marked 'acceptance'"
    option = "ht-acceptance"
    group.addoption(f"--{option}", help=msg, action="store_true")
    parser.addini(option, help=msg, type="bool")


def pytest_configure(config):

    config.addinivalue_line(
        "markers",
        "acceptance: long seeded runs, only executed with --ht-acceptance",
    )

    def get_cli_or_ini(name, default=None):
        return config.getoption(f"--{name}") or config.getini(name) or default

    seed = get_cli_or_ini("ht-seed", DEFAULT_SEED)
    try:
        seed = int(seed)
    except ValueError:
        raise pytest.UsageError(f"ht-seed must be an integer, got {seed!r}")
    try:
        tolerance = Tolerance.parse(get_cli_or_ini("ht-tol"))
    except InvalidInput as error:
        raise pytest.UsageError(f"ht-tol: {error}")
    acceptance = bool(get_cli_or_ini("ht-acceptance", False))

    config.pluginmanager.register(NumericalSettings(seed, tolerance, acceptance), PLUGIN_NAME)


class NumericalSettings:
    """
    Run-wide settings of the numerical fixtures.

    Parameters
    ----------
    seed : int
    tolerance : Tolerance
    acceptance : bool
        Whether tests marked ``acceptance`` run.

    """

    def __init__(self, seed=DEFAULT_SEED, tolerance=DEFAULT_TOLERANCE, acceptance=False):
        self.seed = seed
        self.tolerance = tolerance
        self.acceptance = acceptance

    def pytest_report_header(self, config):
        return [
            f"hypertuple: seed {self.seed}, acceptance runs "
            f"{'enabled' if self.acceptance else 'disabled'}",
            f"numpy {np.__version__}, scipy {scipy.__version__}",
        ]

    def pytest_collection_modifyitems(self, config, items):
        if self.acceptance:
            return
        skip = pytest.mark.skip(reason="acceptance run; use --ht-acceptance to run it")
        for item in items:
            if "acceptance" in item.keywords:
                item.add_marker(skip)


def _settings(config):
    settings = config.pluginmanager.get_plugin(PLUGIN_NAME)
    return NumericalSettings() if settings is None else settings


@pytest.fixture
def ht_seed(request):
    """The run-wide seed."""
    return _settings(request.config).seed


@pytest.fixture
def ht_rng(ht_seed):
    """A fresh numpy Generator seeded with :func:`ht_seed`."""
    return np.random.default_rng(ht_seed)


@pytest.fixture
def ht_tol(request):
    """The run-wide :class:`~hypertuple.numkit.Tolerance`."""
    return _settings(request.config).tolerance
