"""Tests for the helpers in ratiocopula.util."""

import io
import math

import numpy as np
import pytest

from ratiocopula import util
from ratiocopula.util import _parsePluginString, bisect, formatNumber, readCSV, writeCSV


class ParsePluginStringTest:
    def test_name_only(self):
        assert _parsePluginString("cosine") == (None, "cosine", {})

    def test_kwargs(self):
        assert _parsePluginString("log_b(b=41)") == (None, "log_b", {"b": 41})

    def test_module(self):
        module, name, options = _parsePluginString("my.module::Thing(x=1, y=True)")
        assert module == "my.module"
        assert name == "Thing"
        assert options == {"x": 1, "y": True}

    def test_dashed_name(self):
        assert _parsePluginString("custom-table(values=[1, 0])")[1] == "custom-table"

    def test_constants(self):
        assert _parsePluginString("x(a=inf, b=pi)")[2] == {"a": math.inf, "b": math.pi}

    @pytest.mark.parametrize("spec", ["", "a(", "a(b=1) c", "a(b=)"])
    def test_malformed(self, spec):
        with pytest.raises(ValueError):
            _parsePluginString(spec)

    def test_no_builtins(self):
        with pytest.raises(NameError):
            _parsePluginString("a(b=__import__('os'))")


class FormatNumberTest:
    def test_significant_digits(self):
        assert formatNumber(1 / 3) == "0.333333333333"
        assert formatNumber(-729 / 16807) == "-0.0433747843161"
        assert formatNumber(2.0) == "2"

    def test_special(self):
        assert formatNumber(float("nan")) == "nan"
        assert formatNumber(-math.inf) == "-inf"

    def test_digits(self):
        assert formatNumber(math.pi, digits=3) == "3.14"


class CSVTest:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "data.csv"
        rows = [(0.0, 1 / 3), (np.float64(0.5), np.float64(2 / 3))]
        assert writeCSV(path, ["u", "G"], rows) == 2
        assert path.read_bytes() == b"u,G\n0,0.333333333333\n0.5,0.666666666667\n"
        header, values = readCSV(path)
        assert header == ["u", "G"]
        assert values == [[0.0, 0.333333333333], [0.5, 0.666666666667]]

    def test_stream(self):
        stream = io.StringIO()
        writeCSV(stream, ["row", "B1"], [("power_n2", "T")])
        assert stream.getvalue() == "row,B1\npower_n2,T\n"

    def test_header_required(self, tmp_path):
        with pytest.raises(ValueError, match="header"):
            writeCSV(tmp_path / "x.csv", [], [(1,)])

    def test_stdout(self, capsys):
        writeCSV("-", ["u"], [(0.25,)])
        assert capsys.readouterr().out == "u\n0.25\n"


class BisectTest:
    def test_converges(self):
        good, bad = bisect(lambda x: x * x <= 2, 0.0, 2.0, 1e-9)
        assert good <= math.sqrt(2) <= bad
        assert bad - good <= 1e-9

    def test_reversed_bracket(self):
        good, bad = bisect(lambda x: x >= 0.3, 1.0, 0.0, 1e-6)
        assert bad < 0.3 <= good
        assert good - bad <= 1e-6

    def test_maxiter(self):
        calls = []

        def predicate(x):
            calls.append(x)
            return True

        util.bisect(predicate, 0.0, 1.0, 0.0, maxiter=5)
        assert len(calls) == 5
