from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def disc_points(seed: int, count: int, n: int, radius: float = 1.0) -> np.ndarray:
    """Uniform polydisc sample, independent of the package's sampler."""
    rng = np.random.default_rng(seed)
    u = rng.random((count, n))
    theta = rng.random((count, n))
    return radius * np.sqrt(u) * np.exp(2j * np.pi * theta)


def rel_err(actual, expected) -> float:
    actual = complex(actual)
    expected = complex(expected)
    return abs(actual - expected) / max(1.0, abs(expected))
