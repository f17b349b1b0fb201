import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def unit_vector(phi, theta):
    """Embedding used as an independent reference for distances."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return np.stack(
        [np.cos(phi) * np.cos(theta), np.cos(phi) * np.sin(theta), np.sin(phi) * np.ones_like(theta)],
        axis=-1,
    )


def chord_distance(u, v):
    """Great-circle distance from the chord length, accurate at all scales."""
    chord = np.linalg.norm(np.asarray(u) - np.asarray(v), axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


@pytest.fixture
def run_cli():
    def _run(*args, env=None):
        full_env = dict(os.environ)
        if env:
            full_env.update(env)
        return subprocess.run(
            [sys.executable, "-m", "sphquant", *args],
            capture_output=True, text=True, env=full_env, timeout=600,
        )

    return _run
