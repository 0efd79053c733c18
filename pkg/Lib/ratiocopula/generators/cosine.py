import math

import numpy as np

from ratiocopula.generators.base import BaseGenerator

HALF_PI = 0.5 * math.pi


class CosineGenerator(BaseGenerator):
    """f(u) = cos(pi u / 2)."""

    family = "cosine"

    def _value(self, u):
        # exact at both ends: sin(pi/2) == 1.0 and sin(0) == 0.0
        return np.sin(HALF_PI * (1.0 - u))

    def _d1(self, u, side):
        return -HALF_PI * np.sin(HALF_PI * u)

    def _d2(self, u):
        return -(HALF_PI**2) * np.cos(HALF_PI * u)

    def _complement(self, u):
        return 2.0 * np.sin(0.25 * math.pi * u) ** 2
