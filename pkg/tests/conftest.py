from datetime import datetime, timedelta

import pytest


@pytest.fixture
def fixed_clock():
    """Deterministic clock: one second per call, starting at 2000-01-01."""
    base = datetime(2000, 1, 1)
    counter = {"n": 0}

    def clock():
        t = base + timedelta(seconds=counter["n"])
        counter["n"] += 1
        return t

    return clock
