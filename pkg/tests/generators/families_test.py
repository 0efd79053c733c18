import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratiocopula.constants import Side
from ratiocopula.errors import InvalidGeneratorSpec
from ratiocopula.generators import make_generator

from ..testSupport import centralDifference

SMOOTH = [
    "power(n=1)",
    "power(n=1.5)",
    "power(n=3)",
    "reflected_power(n=3)",
    "log_b(b=2)",
    "log_b(b=42)",
    "cosine",
    "linear",
    "exp_shift(c=0)",
    "exp_shift(c=0.5)",
    "exp_shift(c=1)",
    "exp_ratio(a=1)",
    "exp_ratio(a=3.7)",
    "exp_ratio(a=10)",
]

TABLE_FAMILIES = SMOOTH + ["piecewise_hM(M=1.2)", "piecewise_hM(M=1.5)"]

interior = st.floats(min_value=0.001, max_value=0.999)


@pytest.mark.parametrize("spec", TABLE_FAMILIES)
def test_endpoints(spec):
    gen = make_generator(spec)
    assert float(gen.value(0.0)) == pytest.approx(1.0, abs=1e-12)
    assert float(gen.value(1.0)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("spec", SMOOTH)
@settings(max_examples=50, deadline=None)
@given(u=interior)
def test_d1_matches_finite_difference(spec, u):
    gen = make_generator(spec)
    d1 = float(gen.d1(u))
    approx = float(centralDifference(gen.value, u))
    assert abs(d1 - approx) <= 1e-6 * (1 + abs(d1))


# d2 of power(n=1.5) is singular at 0
@pytest.mark.parametrize("spec", [s for s in SMOOTH if s != "power(n=1.5)"])
@settings(max_examples=50, deadline=None)
@given(u=interior)
def test_d2_matches_finite_difference(spec, u):
    gen = make_generator(spec)
    d2 = float(gen.d2(u))
    approx = float(centralDifference(gen.d1, u, h=1e-5))
    assert abs(d2 - approx) <= 1e-5 * (1 + abs(d2))


@pytest.mark.parametrize("spec", TABLE_FAMILIES)
def test_complement(spec):
    gen = make_generator(spec)
    us = np.linspace(0, 1, 101)
    expected = 1 - gen.value(us) / gen.value(0.0)
    assert np.allclose(gen.complement(us), expected, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize(
    "spec, u",
    [
        ("power(n=3)", 1e-6),
        ("reflected_power(n=3)", 1e-9),
        ("log_b(b=10)", 1e-12),
        ("cosine", 1e-8),
        ("exp_shift(c=1)", 1e-7),
        ("exp_shift(c=0.5)", 1e-8),
        ("exp_ratio(a=4)", 1e-10),
    ],
)
def test_complement_small_u(spec, u):
    # 1 - f(u) cancels to nothing in floating point, the complement does not
    gen = make_generator(spec)
    phi = float(gen.complement(u))
    slope = -float(gen.d1(0.0))
    if slope:
        assert phi == pytest.approx(slope * u, rel=1e-3)
    else:
        assert 0 < phi < u


class FamilyValuesTest:
    def test_reflected_power(self):
        gen = make_generator("reflected_power(n=3)")
        assert float(gen.value(4 / 7)) == pytest.approx(27 / 343, rel=1e-14)
        assert float(gen.d1(4 / 7)) == pytest.approx(-27 / 49, rel=1e-14)
        assert float(gen.d2(0.0)) == 6.0

    def test_power(self):
        gen = make_generator("power(n=3)")
        assert float(gen.value(0.5)) == 0.875
        assert float(gen.d1(1.0)) == -3.0
        assert float(gen.d2(1.0)) == -6.0

    def test_piecewise_hM(self):
        gen = make_generator("piecewise_hM(M=1.2)")
        assert float(gen.value(0.1)) == 1.0
        assert float(gen.d1(0.1)) == 0.0
        assert float(gen.value(0.9)) == pytest.approx(0.12)
        assert float(gen.d1(0.9)) == pytest.approx(-1.2)
        assert gen.kinks == pytest.approx((1 / 6,))

    def test_piecewise_h1_has_no_kink(self):
        gen = make_generator("piecewise_hM(M=1)")
        assert gen.kinks == ()
        assert float(gen.d1(0.0)) == -1.0
        assert float(gen.d1(0.0, Side.RIGHT)) == -1.0

    def test_exp_ratio(self):
        gen = make_generator("exp_ratio(a=1)")
        assert float(gen.value(0.0)) == 1.0
        assert float(gen.value(1.0)) == 0.0
        assert float(gen.value(0.5)) == pytest.approx(
            (math.exp(0.5) - math.e) / (1 - math.e)
        )

    def test_log_b(self):
        gen = make_generator("log_b(b=10)")
        assert float(gen.value(0.5)) == pytest.approx(math.log10(5.5))
        assert float(gen.d1(1.0)) == pytest.approx(-9 / math.log(10))

    def test_exp_shift_c0_is_linear(self):
        us = np.linspace(0, 1, 11)
        gen = make_generator("exp_shift(c=0)")
        assert np.allclose(gen.value(us), 1 - us)
        assert np.allclose(gen.d1(us), -1)

    def test_cosine(self):
        gen = make_generator("cosine")
        us = np.linspace(0, 1, 11)
        assert np.allclose(gen.value(us), np.cos(np.pi * us / 2), atol=1e-15)


class CustomTableTest:
    def test_interpolates(self):
        gen = make_generator(
            {"family": "custom-table", "params": {"values": [1, 0.75, 0]}}
        )
        assert float(gen.value(0.5)) == 0.75
        assert gen.options.knots.tolist() == [0.0, 0.5, 1.0]
        assert not gen.hasD2

    def test_d1_of_interpolant(self):
        gen = make_generator(
            {"family": "custom-table", "params": {"values": [1, 0.9, 0.6, 0]}}
        )
        us = np.linspace(0.05, 0.95, 19)
        assert np.allclose(gen.d1(us), centralDifference(gen.value, us), atol=1e-6)

    def test_knots(self):
        gen = make_generator(
            {
                "family": "custom-table",
                "params": {"values": [1, 0.5, 0], "knots": [0, 0.25, 1]},
            }
        )
        assert float(gen.value(0.25)) == 0.5
        assert gen.spec.toDict()["params"]["knots"] == [0.0, 0.25, 1.0]

    @pytest.mark.parametrize(
        "params, message",
        [
            ({"values": [1]}, "at least 2"),
            ({"values": [1, 0], "knots": [0, 0.5, 1]}, "differ in length"),
            ({"values": [1, 0.5, 0], "knots": [0, 0.6, 0.5]}, "increase strictly"),
            ({"values": [[1, 0]]}, "flat list"),
            ({"values": ["a", 0]}, "list of numbers"),
        ],
    )
    def test_invalid(self, params, message):
        with pytest.raises(InvalidGeneratorSpec, match=message):
            make_generator({"family": "custom-table", "params": params})
