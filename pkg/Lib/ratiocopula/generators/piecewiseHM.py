import numpy as np

from ratiocopula.constants import Side
from ratiocopula.generators.base import KINK_ATOL, BaseGenerator


class PiecewiseHMGenerator(BaseGenerator):
    """h_M(u) = 1 on [0, 1 - 1/M] and M (1 - u) on [1 - 1/M, 1], M >= 1.

    Concave and non-increasing, with a single kink at 1 - 1/M (none for
    M = 1, where h_1 is the linear generator). The default derivative at the
    kink is the left one, 0.
    """

    family = "piecewise_hM"
    _args = ("M",)
    hasD2 = False

    def start(self):
        M = self.options.M
        self._require("M", M >= 1, "M >= 1")
        self._kink = (M - 1.0) / M

    @property
    def kinks(self):
        return (self._kink,) if 0 < self._kink < 1 else ()

    def _value(self, u):
        M = self.options.M
        return np.where(u <= self._kink, 1.0, M * (1.0 - u))

    def _d1(self, u, side):
        M = self.options.M
        k = self._kink
        if k <= 0:
            return np.full_like(u, -M)
        if side == Side.RIGHT:
            return np.where(u < k - KINK_ATOL, 0.0, -M)
        return np.where(u <= k + KINK_ATOL, 0.0, -M)

    def _complement(self, u):
        return np.where(u <= self._kink, 0.0, self.options.M * (u - self._kink))
