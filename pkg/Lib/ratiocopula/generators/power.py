import numpy as np

from ratiocopula.generators.base import BaseGenerator


class PowerGenerator(BaseGenerator):
    """f(u) = 1 - u**n, n >= 1."""

    family = "power"
    _args = ("n",)

    def start(self):
        self._require("n", self.options.n >= 1, "n >= 1")

    def _value(self, u):
        return 1.0 - np.power(u, self.options.n)

    def _d1(self, u, side):
        n = self.options.n
        return -n * np.power(u, n - 1)

    def _d2(self, u):
        n = self.options.n
        if n == 1:
            return np.zeros_like(u)
        # -inf at u = 0 when 1 < n < 2
        return -n * (n - 1) * np.power(u, n - 2)

    def _complement(self, u):
        return np.power(u, self.options.n)
