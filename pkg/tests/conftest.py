"""Shared test setup: compile the hot kernels once per session."""
from __future__ import annotations

import pytest

from nashopt.kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    warmup()
