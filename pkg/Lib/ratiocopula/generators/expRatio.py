import numpy as np

from ratiocopula.generators.base import BaseGenerator


class ExpRatioGenerator(BaseGenerator):
    """f(u) = (exp(a u) - exp(a)) / (1 - exp(a)), a > 0, evaluated as
    expm1(a (u - 1)) / expm1(-a) so that f(0) == 1 and f(1) == 0 exactly.
    """

    family = "exp_ratio"
    _args = ("a",)

    def start(self):
        self._require("a", self.options.a > 0, "a > 0")
        self._denom = np.expm1(-self.options.a)

    def _value(self, u):
        return np.expm1(self.options.a * (u - 1.0)) / self._denom

    def _d1(self, u, side):
        a = self.options.a
        return a * np.exp(a * (u - 1.0)) / self._denom

    def _d2(self, u):
        a = self.options.a
        return a * a * np.exp(a * (u - 1.0)) / self._denom

    def _complement(self, u):
        a = self.options.a
        return np.expm1(a * u) / np.expm1(a)
