import pytest
from hypothesis import HealthCheck, settings

from gwfeynman.ifunction import SUPPORTED_TARGETS, make_target

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(params=SUPPORTED_TARGETS, ids=lambda k: f"Z{k}")
def spec(request):
    return make_target(request.param)


@pytest.fixture
def z6():
    return make_target(6)
