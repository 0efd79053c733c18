import numpy as np

from ratiocopula.generators.base import BaseGenerator


class ReflectedPowerGenerator(BaseGenerator):
    """f(u) = (1 - u)**n, n >= 1.

    Decreasing from 1 to 0 but convex for n > 1: the pair f = g = (1 - u)**3
    satisfies B1 and B2 and fails B3.
    """

    family = "reflected_power"
    _args = ("n",)

    def start(self):
        self._require("n", self.options.n >= 1, "n >= 1")

    def _value(self, u):
        return np.power(1.0 - u, self.options.n)

    def _d1(self, u, side):
        n = self.options.n
        return -n * np.power(1.0 - u, n - 1)

    def _d2(self, u):
        n = self.options.n
        if n == 1:
            return np.zeros_like(u)
        return n * (n - 1) * np.power(1.0 - u, n - 2)

    def _complement(self, u):
        with np.errstate(divide="ignore"):
            return -np.expm1(self.options.n * np.log1p(-u))
