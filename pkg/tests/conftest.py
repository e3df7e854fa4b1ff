import hypothesis
import numpy as np
import pytest

import meanscape as ms

hypothesis.settings.register_profile("default", deadline=None, max_examples=60)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def builtins():
    """(A, G, H) built-in means."""
    return ms.make_arithmetic(), ms.make_geometric(), ms.make_harmonic()


@pytest.fixture(scope="session")
def mean_family():
    """A, G, H plus three seeded random normal means, shared across tests."""
    rng = np.random.default_rng(42)
    family = [ms.make_arithmetic(), ms.make_geometric(), ms.make_harmonic()]
    family += [ms.random_normal_mean(rng, name=f"N{i}") for i in range(3)]
    return family


@pytest.fixture(scope="session")
def unit_window():
    return ms.Interval.closed(0.1, 10.0)
