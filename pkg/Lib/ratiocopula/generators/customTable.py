import numpy as np
from scipy.interpolate import PchipInterpolator

from ratiocopula.errors import DomainError, InvalidGeneratorSpec
from ratiocopula.generators.base import BaseGenerator


class CustomTableGenerator(BaseGenerator):
    """A generator tabulated at knots and interpolated with a monotone
    (PCHIP) cubic; derivatives are those of the interpolant.

    *values* are the tabulated values; *knots* default to an even spacing of
    [0, 1]. The interpolant is only C1, so no second derivative is exposed
    and concavity is decided by the midpoint test.
    """

    family = "custom-table"
    _args = ("values",)
    _kwargs = {"knots": None}
    hasD2 = False

    def _coerce(self, key, value):
        if value is None:
            return None
        try:
            array = np.array(value, dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidGeneratorSpec(
                f"{self.family}: {key!r} must be a list of numbers"
            ) from e
        if array.ndim != 1:
            raise InvalidGeneratorSpec(f"{self.family}: {key!r} must be a flat list")
        array.setflags(write=False)
        return array

    def start(self):
        values = self.options.values
        if len(values) < 2 or not np.all(np.isfinite(values)):
            raise InvalidGeneratorSpec(
                f"{self.family}: 'values' needs at least 2 finite entries"
            )
        knots = self.options.knots
        if knots is None:
            knots = np.linspace(0.0, 1.0, len(values))
            knots.setflags(write=False)
            self.options.knots = knots
        elif len(knots) != len(values):
            raise InvalidGeneratorSpec(
                f"{self.family}: 'knots' and 'values' differ in length "
                f"({len(knots)} != {len(values)})"
            )
        elif knots[0] != 0 or knots[-1] != 1 or np.any(np.diff(knots) <= 0):
            raise InvalidGeneratorSpec(
                f"{self.family}: 'knots' must increase strictly from 0 to 1"
            )
        self._interp = PchipInterpolator(knots, values)
        self._deriv = self._interp.derivative()

    @property
    def params(self):
        params = {
            "values": self.options.values.tolist(),
            "knots": self.options.knots.tolist(),
        }
        if self.scale != 1.0:
            params["scale"] = self.scale
        return params

    def _value(self, u):
        return self._interp(u)

    def _d1(self, u, side):
        return self._deriv(u)

    def normalized(self):
        # rescales the table itself rather than the scale factor
        v0 = float(self.value(0.0))
        if v0 == 0:
            raise DomainError(f"cannot normalize {self!r}: value(0) = 0")
        if v0 == 1.0 and self.scale == 1.0:
            return self
        return self.withValues(self.options.values * (self.scale / v0))

    def withValues(self, values):
        return type(self)(values=list(values), knots=self.options.knots.tolist())
