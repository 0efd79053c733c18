import pytest

from ratiocopula.generators import make_generator
from ratiocopula.scanSettings import ScanSettings

# pairs satisfying B1-B4, with (a, b) = (-f'(1), -g'(1))
B1B4_PAIRS = {
    "linear": ("linear", "linear"),
    "power_n1.5": ("power(n=1.5)", "power(n=1.5)"),
    "power_n2": ("power(n=2)", "power(n=2)"),
    "power_n3_m2": ("power(n=3)", "power(n=2)"),
    "log_b_b2": ("log_b(b=2)", "log_b(b=2)"),
    "log_b_b10": ("log_b(b=10)", "log_b(b=10)"),
    "cosine": ("cosine", "cosine"),
    "exp_shift_c0": ("exp_shift(c=0)", "exp_shift(c=0)"),
    "exp_shift_c0.5": ("exp_shift(c=0.5)", "exp_shift(c=0.5)"),
    "exp_shift_c1": ("exp_shift(c=1)", "exp_shift(c=1)"),
}


@pytest.fixture(scope="session")
def coarse():
    return ScanSettings(grid_n=129)


@pytest.fixture(scope="session")
def settings():
    return ScanSettings(grid_n=401)


@pytest.fixture(scope="session")
def cubic():
    return make_generator("reflected_power(n=3)")


@pytest.fixture(scope="session")
def linear():
    return make_generator("linear")


@pytest.fixture(scope="session")
def hM12():
    return make_generator("piecewise_hM(M=1.2)")


@pytest.fixture(params=sorted(B1B4_PAIRS))
def b1b4_pair(request):
    f, g = B1B4_PAIRS[request.param]
    return make_generator(f), make_generator(g)
