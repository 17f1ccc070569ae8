import random

import pytest

from fairstream.core import ValuationProfile


def random_profile(rng: random.Random, n: int, t: int, lo: int = 0, hi: int = 5, identical: bool = False):
    if identical:
        row = tuple(rng.randint(lo, hi) for _ in range(t))
        return ValuationProfile(tuple(row for _ in range(n)))
    return ValuationProfile(tuple(tuple(rng.randint(lo, hi) for _ in range(t)) for _ in range(n)))


@pytest.fixture
def rng():
    return random.Random(20240517)
