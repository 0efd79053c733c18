import json
import math

import numpy as np
import pytest

from ratiocopula.analysis import (
    BoundaryStats,
    ExtremaResult,
    ThetaInterval,
    boundary_stats,
    check_feasible,
    closed_form_interval,
    diagonal_G,
    dump_field_csv,
    eval_G,
    extremize_G,
    field_on_grid,
    search_feasible_theta,
    theta_interval,
    theta_max_feasible,
    theta_min_feasible,
)
from ratiocopula.constants import Side, Source
from ratiocopula.errors import DegenerateFieldError, PreconditionError
from ratiocopula.generators import make_generator
from ratiocopula.gridSearch import FieldScanner
from ratiocopula.scanSettings import ScanSettings
from ratiocopula.util import readCSV

CUBIC_ALPHA1 = -729 / 16807


def fakeExtrema(alpha1, alpha2):
    boundary = BoundaryStats(1.0, 1.0, 1.0, 1.0, alpha2, alpha1)
    return ExtremaResult(alpha1, alpha2, (1.0, 1.0), (0.0, 0.0), boundary, False)


class GFieldTest:
    def test_linear(self, linear):
        assert eval_G(linear, linear, 0.5, 0.5) == pytest.approx(0.5)
        assert eval_G(linear, linear, 1.0, 1.0) == -1.0
        assert eval_G(linear, linear, 0.0, 0.0) == 1.0

    def test_cubic_diagonal(self, cubic):
        values = diagonal_G(cubic, cubic, [0.0, 4 / 7, 1.0])
        assert values == pytest.approx([1.0, CUBIC_ALPHA1, 0.0], abs=1e-14)

    def test_kink_sides(self, hM12):
        kink = 1 - 1 / 1.2
        assert eval_G(hM12, hM12, kink, kink) == pytest.approx(1.0)
        assert eval_G(hM12, hM12, kink, kink, Side.RIGHT) == pytest.approx(1.36)
        assert eval_G(
            hM12, hM12, kink, kink, Side.RIGHT, Side.LEFT
        ) == pytest.approx(1.2)


class ExtremaTest:
    def test_cubic(self, cubic, settings):
        extrema = extremize_G(cubic, cubic, settings)
        assert extrema.alpha1 == pytest.approx(CUBIC_ALPHA1, abs=1e-9)
        assert extrema.argmin == pytest.approx((4 / 7, 4 / 7), abs=1e-5)
        assert extrema.alpha2 == pytest.approx(1.0)
        assert not extrema.interior_max_exceeds_boundary

    def test_hM_interior_max(self, hM12, coarse):
        extrema = extremize_G(hM12, hM12, coarse)
        assert extrema.alpha2 == pytest.approx(1.36)
        assert extrema.argmax == pytest.approx((1 / 6, 1 / 6), abs=1e-9)
        assert extrema.argmax_sides == (Side.RIGHT, Side.RIGHT)
        assert extrema.boundary.boundary_max_G == pytest.approx(1.2)
        assert extrema.interior_max_exceeds_boundary

    def test_toJSON(self, linear, coarse):
        data = json.loads(extremize_G(linear, linear, coarse).toJSON())
        assert data["alpha1"] == pytest.approx(-1.0)
        assert data["alpha2"] == pytest.approx(1.0)
        assert data["boundary"]["a"] == 1.0


class BoundaryStatsTest:
    def test_linear(self, linear, coarse):
        stats = boundary_stats(linear, linear, coarse)
        assert (stats.a, stats.b) == (1.0, 1.0)
        assert (stats.M, stats.N) == pytest.approx((1.0, 1.0))
        assert stats.boundary_max_G == pytest.approx(1.0)
        assert stats.boundary_min_G == pytest.approx(-1.0)
        assert stats.argmin == (1.0, 1.0)

    def test_power_pair(self, coarse):
        f, g = make_generator("power(n=3)"), make_generator("power(n=2)")
        stats = boundary_stats(f, g, coarse)
        assert (stats.a, stats.b) == (3.0, 2.0)
        assert stats.boundary_max_G == pytest.approx(3.0)
        assert stats.boundary_min_G == pytest.approx(-6.0)


class ThetaIntervalTest:
    def test_linear(self, linear, coarse):
        interval = theta_interval(linear, linear, coarse)
        assert (interval.lo, interval.hi) == pytest.approx((-1.0, 1.0))
        assert interval.source == Source.NUMERIC
        assert interval.contains(0.5)
        assert not interval.contains(1.01)
        assert interval.contains(1.01, tol=0.02)

    def test_cubic(self, cubic, settings):
        interval = theta_interval(cubic, cubic, settings)
        assert interval.lo == pytest.approx(1 / CUBIC_ALPHA1, rel=1e-8)
        assert interval.hi == pytest.approx(1.0)

    def test_matches_closed_form(self, b1b4_pair, coarse):
        numeric = theta_interval(*b1b4_pair, coarse)
        closed = closed_form_interval(*b1b4_pair, coarse)
        assert closed.source == Source.CLOSED_FORM
        assert numeric.lo == pytest.approx(closed.lo, abs=1e-6)
        assert numeric.hi == pytest.approx(closed.hi, abs=1e-6)

    @pytest.mark.parametrize(
        "f, g, expected",
        [
            ("power(n=3)", "power(n=2)", (-1 / 6, 1 / 3)),
            ("cosine", "cosine", (-4 / math.pi**2, 2 / math.pi)),
        ],
    )
    def test_closed_form_values(self, f, g, expected, coarse):
        interval = closed_form_interval(make_generator(f), make_generator(g), coarse)
        assert (interval.lo, interval.hi) == pytest.approx(expected)

    def test_closed_form_requires_B1_B4(self, cubic, coarse):
        with pytest.raises(PreconditionError, match="B3") as info:
            closed_form_interval(cubic, cubic, coarse)
        assert "B3" in info.value.failed

    def test_scale_equivariance(self, linear, coarse):
        scaled = make_generator("linear(scale=2)")
        interval = theta_interval(scaled, linear, coarse)
        expected = theta_interval(linear, linear, coarse).scaled(0.5)
        assert (interval.lo, interval.hi) == pytest.approx((expected.lo, expected.hi))

    def test_degenerate(self, linear):
        with pytest.raises(DegenerateFieldError):
            theta_interval(linear, linear, extrema=fakeExtrema(-1.0, 0.0))

    def test_zero_alpha1(self, linear):
        interval = theta_interval(linear, linear, extrema=fakeExtrema(0.0, 2.0))
        assert interval.lo == -math.inf
        assert interval.hi == 0.5

    def test_dict(self):
        interval = ThetaInterval(-0.25, 0.5, Source.CLOSED_FORM)
        data = interval.toDict()
        assert data == {"lo": -0.25, "hi": 0.5, "source": "closed_form"}
        assert ThetaInterval.fromDict(json.loads(interval.toJSON())) == interval


class FeasibilityTest:
    def test_linear_ends(self, linear, coarse):
        assert check_feasible(linear, linear, 1.0, coarse).feasible
        assert check_feasible(linear, linear, -1.0, coarse).feasible
        assert not check_feasible(linear, linear, 1.05, coarse).feasible
        assert not check_feasible(linear, linear, -1.05, coarse).feasible

    def test_denominator(self, linear, coarse):
        check = check_feasible(linear, linear, 2.0, coarse)
        assert not check.feasible
        assert check.denominator < 0
        assert check.margin == -math.inf

    def test_negative_theta_skips_denominator(self, cubic, coarse):
        check = check_feasible(cubic, cubic, -30.0, coarse)
        assert check.feasible
        assert check.denominator == 1.0
        assert check.toDict()["theta"] == -30.0

    def test_cubic_beyond_interval(self, cubic, settings):
        # feasibility extends past 1/alpha1 when B3 fails
        assert check_feasible(cubic, cubic, 1 / CUBIC_ALPHA1 - 5, settings).feasible
        assert not check_feasible(cubic, cubic, -40.0, settings).feasible

    @pytest.mark.parametrize(
        "f, g",
        [
            ("log_b(b=10)", "cosine"),
            ("piecewise_hM(M=1.2)", "power(n=2)"),
            ("piecewise_hM(M=1.5)", "piecewise_hM(M=1.2)"),
        ],
    )
    def test_interval_is_sufficient(self, f, g):
        # B1-B3 pairs: every theta in [1/alpha1, 1/alpha2] is feasible
        s = ScanSettings(grid_n=501)
        f, g = make_generator(f), make_generator(g)
        interval = theta_interval(f, g, s)
        scanner = FieldScanner(f, g, s)
        rng = np.random.default_rng(20)
        for theta in rng.uniform(interval.lo, interval.hi, 25):
            check = check_feasible(f, g, theta, s, scanner)
            assert check.margin >= -1e-9, theta

    def test_search_b1b4(self, b1b4_pair, coarse):
        closed = closed_form_interval(*b1b4_pair, coarse)
        assert theta_min_feasible(*b1b4_pair, coarse) == pytest.approx(
            closed.lo, abs=1e-3
        )
        assert theta_max_feasible(*b1b4_pair, coarse) == pytest.approx(
            closed.hi, abs=1e-3
        )

    def test_search_record(self, linear, coarse):
        search = search_feasible_theta(linear, linear, +1, coarse)
        assert search.start == pytest.approx(1.0)
        good, bad = search.bracket
        assert good == pytest.approx(1.0, abs=1e-3)
        assert good < bad
        assert abs(bad - good) <= coarse.bisect_width
        data = search.toDict()
        assert data["direction"] == "max"
        assert data["evaluations"][0]["feasible"]
        assert len(data["evaluations"]) == len(search.evaluations)

    def test_search_requires_negative_alpha1(self, linear):
        with pytest.raises(PreconditionError, match="alpha1 < 0"):
            search_feasible_theta(linear, linear, -1, extrema=fakeExtrema(0.5, 1.0))

    def test_cubic_gap(self, cubic, settings):
        theta = theta_min_feasible(cubic, cubic, settings)
        assert theta < 1 / CUBIC_ALPHA1 - 10
        assert theta == pytest.approx(-36.19, abs=0.5)

    @pytest.mark.slow
    def test_cubic_theta_min_full_resolution(self, cubic):
        theta = theta_min_feasible(cubic, cubic, ScanSettings(grid_n=2001))
        assert theta == pytest.approx(-36.1903, abs=0.01)


class FieldOnGridTest:
    def test_dump_csv(self, linear, tmp_path):
        path = tmp_path / "G.csv"
        assert dump_field_csv(path, linear, linear, n=11) == 121
        header, rows = readCSV(path)
        assert header == ["u", "v", "G"]
        assert rows[-1] == [1.0, 1.0, -1.0]
        assert path.read_bytes().count(b"\r") == 0

    def test_L_field(self, linear):
        us, vs, values = field_on_grid(linear, linear, "L", n=5, theta=0.0)
        assert np.all(values == 1.0)
        assert len(us) == len(vs) == 25

    def test_L_needs_theta(self, linear):
        with pytest.raises(ValueError, match="needs theta"):
            field_on_grid(linear, linear, "L")

    def test_unknown_field(self, linear):
        with pytest.raises(ValueError, match="unknown field"):
            field_on_grid(linear, linear, "Q")
