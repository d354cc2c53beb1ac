"""Shared fixtures: one acceptance context per session.

The heavy artifacts (tuned amplitude, time sweep, Wronskian roots, the
eigenvalue curve) are computed once and shared by the unit tests and the
acceptance gate, exactly the objects the CLI ``verify`` command uses.
"""

import pytest

from viscoshear.acceptance import AcceptanceContext
from viscoshear.config import Config
from viscoshear.flow import FlowParams, FlowState
from viscoshear.spectrum import Grid


@pytest.fixture(scope="session")
def cfg():
    return Config()


@pytest.fixture(scope="session")
def ctx(cfg):
    return AcceptanceContext(cfg)


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def couette_state():
    return FlowState(FlowParams(0.0, 0.15, 0.03, 0.8, 1e-3), 0.0)


@pytest.fixture(scope="session")
def spec_point_params():
    """The parameter point used for the closed-form literal examples."""
    return FlowParams(1.0, 0.1, 0.05, 0.4, 1e-3)
