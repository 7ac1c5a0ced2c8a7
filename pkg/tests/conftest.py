import pytest

from wavegrf.pipeline import cached_model


@pytest.fixture(scope="session")
def model():
    """Memoized covariance models, shared across the whole test session."""
    return cached_model
