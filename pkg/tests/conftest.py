from __future__ import annotations

from functools import lru_cache

import pytest

from beatstream import SyntheticEcgSpec, generate


@lru_cache(maxsize=16)
def _cached_recording(**kwargs):
    return generate(SyntheticEcgSpec(**kwargs))


@pytest.fixture(scope="session")
def make_recording():
    """Memoized generator access so suites reuse identical recordings."""
    def factory(**kwargs):
        return _cached_recording(**kwargs)
    return factory


@pytest.fixture(scope="session")
def clean_70bpm_60s(make_recording):
    return make_recording(duration_s=60.0, mean_hr_bpm=70.0, seed=42)
