import math

import numpy as np

from ratiocopula.generators.base import BaseGenerator


class LogBGenerator(BaseGenerator):
    """f(u) = log_b(u + b(1 - u)), b > 1.

    Everything is written with natural logarithms; the base change happens
    once, through ln(b).
    """

    family = "log_b"
    _args = ("b",)

    def start(self):
        self._require("b", self.options.b > 1, "b > 1")
        self._lnb = math.log(self.options.b)

    def _value(self, u):
        b = self.options.b
        return np.log1p((b - 1.0) * (1.0 - u)) / self._lnb

    def _d1(self, u, side):
        b = self.options.b
        return (1.0 - b) / ((u + b * (1.0 - u)) * self._lnb)

    def _d2(self, u):
        b = self.options.b
        return -((1.0 - b) ** 2) / ((u + b * (1.0 - u)) ** 2 * self._lnb)

    def _complement(self, u):
        b = self.options.b
        return -np.log1p(-(b - 1.0) / b * u) / self._lnb
