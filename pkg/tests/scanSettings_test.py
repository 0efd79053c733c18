import pytest

from ratiocopula.constants import GRID_ENV_VAR
from ratiocopula.scanSettings import ScanSettings


def test_defaults():
    s = ScanSettings()
    assert s.grid_n == 1001
    assert s.refine_iters == 60
    assert s.tol_condition == 1e-9
    assert s.tol_extremum == 1e-10


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"grid_n": 63}, "grid_n"),
        ({"grid_n": 100.5}, "grid_n"),
        ({"tol_condition": 0}, "tol_condition"),
        ({"refine_iters": -1}, "refine_iters"),
        ({"scan_factor": 1.0}, "scan_factor"),
        ({"workers": 0}, "workers"),
    ],
)
def test_invalid(kwargs, message):
    with pytest.raises(ValueError, match=message):
        ScanSettings(**kwargs)


class FromEnvironmentTest:
    def test_env_var(self):
        assert ScanSettings.fromEnvironment({GRID_ENV_VAR: "257"}).grid_n == 257

    def test_explicit_wins(self):
        s = ScanSettings.fromEnvironment({GRID_ENV_VAR: "257"}, grid_n=129)
        assert s.grid_n == 129

    def test_unset(self):
        assert ScanSettings.fromEnvironment({}).grid_n == 1001

    def test_os_environ(self, monkeypatch):
        monkeypatch.setenv(GRID_ENV_VAR, "300")
        assert ScanSettings.fromEnvironment().grid_n == 300

    def test_not_an_integer(self):
        with pytest.raises(ValueError, match=GRID_ENV_VAR):
            ScanSettings.fromEnvironment({GRID_ENV_VAR: "fine"})


def test_doubled_nests_the_grid():
    s = ScanSettings(grid_n=201, seed=7)
    assert s.doubled().grid_n == 401
    assert s.doubled().seed == 7


def test_frozen():
    with pytest.raises(AttributeError):
        ScanSettings().grid_n = 10


def test_toDict():
    assert ScanSettings(grid_n=129).toDict()["grid_n"] == 129
