import math

import numpy as np
from numpy.polynomial import polynomial

from ratiocopula.generators.base import BaseGenerator

# below this point the complement is summed from its power series
SERIES_CUTOFF = 0.25
SERIES_TERMS = 24


class ExpShiftGenerator(BaseGenerator):
    """f(u) = (1 - u) exp(c u), 0 <= c <= 1."""

    family = "exp_shift"
    _args = ("c",)

    def start(self):
        c = self.options.c
        self._require("c", 0 <= c <= 1, "0 <= c <= 1")
        # 1 - f(u) = sum_k>=1 c**(k-1) (k - c) u**k / k!
        self._series = [0.0] + [
            c ** (k - 1) * (k - c) / math.factorial(k)
            for k in range(1, SERIES_TERMS + 1)
        ]

    def _value(self, u):
        return (1.0 - u) * np.exp(self.options.c * u)

    def _d1(self, u, side):
        c = self.options.c
        return np.exp(c * u) * (c - 1.0 - c * u)

    def _d2(self, u):
        c = self.options.c
        return c * np.exp(c * u) * (c - 2.0 - c * u)

    def _complement(self, u):
        c = self.options.c
        direct = -np.expm1(c * u) + u * np.exp(c * u)
        return np.where(u <= SERIES_CUTOFF, polynomial.polyval(u, self._series), direct)
