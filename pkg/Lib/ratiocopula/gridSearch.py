"""Grid extremization on the unit square.

Fields are functions of two axis profiles: for a grid axis, the profile
holds the generator's value, one-sided first derivative and complement at
every point. A field receives a column slice of the u profile and a row of
the v profile and returns the broadcast 2-D block; points excluded from the
domain are returned as NaN.

Every extremum is a grid argbest followed by a Nelder-Mead polish confined
to the grid cells around it. Kinks of the generators are inserted in the
axes twice, once per one-sided derivative, so both sheets of an
almost-everywhere defined field are scanned.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ratiocopula.constants import Side
from ratiocopula.generators.base import KINK_ATOL

logger = logging.getLogger(__name__)

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class Axis:
    points: np.ndarray
    sides: np.ndarray

    def __len__(self):
        return len(self.points)


def makeAxis(n, kinks=(), tail=0):
    """Return an axis of n evenly spaced points on [0, 1], with each interior
    kink present twice (LEFT then RIGHT) and, if 'tail' > 0, one extra point
    per decade from 10**-tail up to the first grid step.
    """
    base = np.linspace(0.0, 1.0, n)
    if tail:
        first = math.log10(base[1])
        base = np.union1d(base, np.logspace(-tail, first, tail + 1, endpoint=False))
    kinks = np.array(sorted(k for k in kinks if 0 < k < 1), dtype=float)
    if len(kinks):
        near = np.any(np.abs(base[:, None] - kinks[None, :]) <= KINK_ATOL, axis=1)
        base = base[~near]
    points = np.concatenate([base, kinks, kinks])
    sides = np.concatenate(
        [
            np.full(len(base), Side.DEFAULT, dtype=np.int8),
            np.full(len(kinks), Side.LEFT, dtype=np.int8),
            np.full(len(kinks), Side.RIGHT, dtype=np.int8),
        ]
    )
    order = np.lexsort((sides, points))
    return Axis(points[order], sides[order])


@dataclass(frozen=True)
class Profile:
    x: np.ndarray
    value: np.ndarray
    d1: np.ndarray
    complement: np.ndarray

    @classmethod
    def fromGenerator(cls, gen, axis):
        x = axis.points
        d1 = gen.d1(x, Side.LEFT)
        right = axis.sides == Side.RIGHT
        if right.any():
            d1 = np.where(right, gen.d1(x, Side.RIGHT), d1)
        return cls(x, gen.value(x), d1, gen.complement(x))

    @classmethod
    def atPoint(cls, gen, x, side=Side.DEFAULT):
        x = np.array([x], dtype=float)
        return cls(x, gen.value(x), gen.d1(x, side), gen.complement(x))

    def rows(self, sl=slice(None)):
        return Profile(*(a[sl, None] for a in self._arrays()))

    def cols(self):
        return Profile(*(a[None, :] for a in self._arrays()))

    def _arrays(self):
        return self.x, self.value, self.d1, self.complement


@dataclass(frozen=True)
class Extremum:
    value: float
    u: float
    v: float
    sideU: Side = Side.DEFAULT
    sideV: Side = Side.DEFAULT
    polished: bool = False

    @property
    def point(self):
        return (self.u, self.v)


def _better(a, b, sense):
    return a < b if sense == MIN else a > b


class FieldScanner:
    """Scan fields of the generator pair (f, g) over the unit square with
    the resolution and polish policy of 'settings'. 'n' overrides the grid
    size and 'tail' adds geometric refinement toward 0 on both axes.
    """

    def __init__(self, f, g, settings, n=None, tail=0):
        self.f = f
        self.g = g
        self.settings = settings
        n = settings.grid_n if n is None else n
        self.uAxis = makeAxis(n, f.kinks, tail)
        self.vAxis = makeAxis(n, g.kinks, tail)
        self.pu = Profile.fromGenerator(f, self.uAxis)
        self.pv = Profile.fromGenerator(g, self.vAxis)
        self._cols = self.pv.cols()

    @property
    def shape(self):
        return (len(self.uAxis), len(self.vAxis))

    def evaluate(self, field):
        """The whole field on the grid, as a 2-D array indexed [u, v]."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.broadcast_to(field(self.pu.rows(), self._cols), self.shape)

    def _blocks(self):
        step = self.settings.block_rows
        return [slice(i, i + step) for i in range(0, len(self.uAxis), step)]

    def _map(self, func, items):
        workers = self.settings.workers
        if workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(func, items))
        return [func(item) for item in items]

    def scan(self, field, sense=MIN):
        """Return (value, i, j) of the best grid point, NaN points ignored."""
        fill = math.inf if sense == MIN else -math.inf
        argbest = np.argmin if sense == MIN else np.argmax
        ncols = len(self.vAxis)

        def work(sl):
            with np.errstate(divide="ignore", invalid="ignore"):
                block = field(self.pu.rows(sl), self._cols)
            block = np.broadcast_to(block, (len(self.pu.x[sl]), ncols))
            block = np.where(np.isnan(block), fill, block)
            k = int(argbest(block))
            return float(block.flat[k]), sl.start + k // ncols, k % ncols

        best = None
        for hit in self._map(work, self._blocks()):
            if best is None or _better(hit[0], best[0], sense):
                best = hit
        if best is None or math.isinf(best[0]) and best[0] == fill:
            raise ValueError("field is undefined on the whole grid")
        return best

    def pointValue(self, field, u, v, sideU=Side.DEFAULT, sideV=Side.DEFAULT):
        with np.errstate(divide="ignore", invalid="ignore"):
            value = field(
                Profile.atPoint(self.f, u, sideU).rows(),
                Profile.atPoint(self.g, v, sideV).cols(),
            )
        return float(np.asarray(value).reshape(-1)[0])

    def extremum(self, field, sense=MIN):
        value, i, j = self.scan(field, sense)
        return self.polish(field, value, i, j, sense)

    def polish(self, field, value, i, j, sense=MIN):
        """Nelder-Mead on the cells around grid point (i, j), keeping the
        grid value when the polish does not improve on it.
        """
        xs, ys = self.uAxis.points, self.vAxis.points
        u0, v0 = float(xs[i]), float(ys[j])
        su0, sv0 = Side(self.uAxis.sides[i]), Side(self.vAxis.sides[j])
        grid = Extremum(value, u0, v0, su0, sv0)

        ulo, uhi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])
        vlo, vhi = float(ys[max(j - 1, 0)]), float(ys[min(j + 1, len(ys) - 1)])
        iters = self.settings.refine_iters
        if not iters or (ulo == uhi and vlo == vhi):
            return grid

        sign = 1.0 if sense == MIN else -1.0

        def sideFor(t, t0, s0, lo, hi):
            if t == t0:
                return s0
            if t >= hi:
                return Side.LEFT
            if t <= lo:
                return Side.RIGHT
            return Side.RIGHT if t > t0 else Side.LEFT

        def objective(p):
            u, v = float(p[0]), float(p[1])
            val = self.pointValue(
                field,
                u,
                v,
                sideFor(u, u0, su0, ulo, uhi),
                sideFor(v, v0, sv0, vlo, vhi),
            )
            return sign * val if math.isfinite(val) else math.inf

        du = 0.5 * (uhi - ulo)
        dv = 0.5 * (vhi - vlo)
        simplex = np.array(
            [
                [u0, v0],
                [u0 + du if u0 + du <= uhi else u0 - du, v0],
                [u0, v0 + dv if v0 + dv <= vhi else v0 - dv],
            ]
        )
        res = minimize(
            objective,
            np.array([u0, v0]),
            method="Nelder-Mead",
            bounds=[(ulo, uhi), (vlo, vhi)],
            options={
                "maxiter": 2 * iters,
                "initial_simplex": simplex,
                "xatol": 1e-13,
                "fatol": 1e-16,
            },
        )
        candidate = sign * float(res.fun)
        if not math.isfinite(candidate) or not _better(candidate, value, sense):
            return grid
        u, v = float(res.x[0]), float(res.x[1])
        return Extremum(
            candidate,
            u,
            v,
            sideFor(u, u0, su0, ulo, uhi),
            sideFor(v, v0, sv0, vlo, vhi),
            polished=True,
        )


def lineExtremum(values, xs, func, sense, settings):
    """Extremum of a 1-D function sampled as 'values' at 'xs', polished by a
    bounded scalar search on the cells around the grid argbest. 'func'
    evaluates one point. Returns (value, x, index).
    """
    fill = math.inf if sense == MIN else -math.inf
    values = np.where(np.isnan(values), fill, values)
    k = int(np.argmin(values) if sense == MIN else np.argmax(values))
    best, x0 = float(values[k]), float(xs[k])
    lo, hi = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, len(xs) - 1)])
    if not settings.refine_iters or lo == hi:
        return best, x0, k
    sign = 1.0 if sense == MIN else -1.0

    def objective(t):
        val = func(t)
        return sign * val if math.isfinite(val) else math.inf

    res = minimize_scalar(
        objective,
        bounds=(lo, hi),
        method="bounded",
        options={"maxiter": 2 * settings.refine_iters, "xatol": 1e-13},
    )
    candidate = sign * float(res.fun)
    if math.isfinite(candidate) and _better(candidate, best, sense):
        return candidate, float(res.x), k
    return best, x0, k
