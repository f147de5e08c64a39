import pytest

from taudet import KernelParams

# Canonical parameter sets exercised throughout the suite.
GENERIC_SETS = [
    (0.3, 0.2, 0.4, 0.1),
    (0.45, 0.1, 0.7, -0.2),
    (0.25, 0.25, 0.9, 0.35),
]

LOG_CASE_SET = (0.3, -0.3, 0.6, 0.2)


@pytest.fixture(scope="session")
def p_main():
    return KernelParams(*GENERIC_SETS[0])


@pytest.fixture(scope="session", params=GENERIC_SETS, ids=lambda s: f"params{s}")
def p_each(request):
    return KernelParams(*request.param)


@pytest.fixture(scope="session")
def p_log():
    return KernelParams(*LOG_CASE_SET)
