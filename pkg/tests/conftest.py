import pytest
from hypothesis import HealthCheck, settings

from binmpec import kernels

settings.register_profile(
    "package",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("package")


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile jitted kernels up front so timed assertions never include
    # compilation cost
    kernels.warmup()
    yield
