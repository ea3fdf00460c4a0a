import os
import pathlib
import subprocess
import sys

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def cli():
    """Run the installed CLI in a subprocess; returns CompletedProcess."""

    def run(*args, input_text=None, env_extra=None):
        env = os.environ.copy()
        env.pop("NUMGUARD_JOBS", None)
        if env_extra:
            env.update(env_extra)
        return subprocess.run(
            [sys.executable, "-m", "numguard.cli", *args],
            capture_output=True,
            text=True,
            input=input_text,
            env=env,
        )

    return run
