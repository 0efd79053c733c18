import numpy as np

from ratiocopula.generators.base import BaseGenerator


class LinearGenerator(BaseGenerator):
    """f(u) = 1 - u."""

    family = "linear"

    def _value(self, u):
        return 1.0 - u

    def _d1(self, u, side):
        return np.full_like(u, -1.0)

    def _d2(self, u):
        return np.zeros_like(u)

    def _complement(self, u):
        return u.copy()
