"""The dependence field G, its extrema and the theta-interval.

    G = (f - u f') (g - v g') - 2 u v f' g'

alpha1 = min G and alpha2 = max G over the unit square bound the parameter:
theta in [1/alpha1, 1/alpha2] is sufficient for validity under B1-B3 and
exact under B1-B4. The feasibility searches find the true end points of the
set of theta for which the density numerator

    L = 1 - theta [(f - u f') (g - v g') - 2 D f' g']

stays non-negative, D being the copula itself.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from fontTools.misc.loggingTools import Timer

from ratiocopula.conditions import check_pair, endpointSlopes, hField
from ratiocopula.constants import Condition, Side, Source
from ratiocopula.errors import DegenerateFieldError, PreconditionError, SearchError
from ratiocopula.gridSearch import (
    MAX,
    MIN,
    Axis,
    FieldScanner,
    Profile,
    lineExtremum,
    makeAxis,
)
from ratiocopula.scanSettings import ScanSettings
from ratiocopula.util import bisect, writeCSV

logger = logging.getLogger(__name__)

timer = Timer(logging.getLogger("ratiocopula.timer"), level=logging.DEBUG)

# scan steps beyond the first infeasible theta that must stay infeasible
REENTRY_PROBES = 2


def gField(pu, pv):
    return (pu.value - pu.x * pu.d1) * (pv.value - pv.x * pv.d1) - 2.0 * (
        pu.x * pv.x * pu.d1 * pv.d1
    )


def eval_G(f, g, u, v, side=Side.DEFAULT, sideV=None):
    """G at (u, v), taking the 'side' one-sided derivatives at kinks (for
    both generators unless 'sideV' is given).
    """
    sideV = side if sideV is None else sideV
    return float(
        gField(Profile.atPoint(f, u, side).rows(), Profile.atPoint(g, v, sideV).cols())[
            0, 0
        ]
    )


def diagonal(f, g, field, us, sides=None):
    """Values of 'field' at the points (u, u)."""
    us = np.asarray(us, dtype=float)
    sides = np.full(len(us), Side.DEFAULT) if sides is None else np.asarray(sides)
    axis = Axis(us, sides)
    with np.errstate(divide="ignore", invalid="ignore"):
        return field(Profile.fromGenerator(f, axis), Profile.fromGenerator(g, axis))


def diagonal_G(f, g, us, sides=None):
    return diagonal(f, g, gField, us, sides)


@dataclass(frozen=True)
class BoundaryStats:
    a: float
    b: float
    M: float
    N: float
    boundary_max_G: float
    boundary_min_G: float
    argmax: Tuple[float, float] = (0.0, 0.0)
    argmin: Tuple[float, float] = (0.0, 0.0)

    def toDict(self):
        return {
            "a": self.a,
            "b": self.b,
            "M": self.M,
            "N": self.N,
            "boundary_max_G": self.boundary_max_G,
            "boundary_min_G": self.boundary_min_G,
            "argmax": list(self.argmax),
            "argmin": list(self.argmin),
        }


@dataclass(frozen=True)
class ExtremaResult:
    alpha1: float
    alpha2: float
    argmin: Tuple[float, float]
    argmax: Tuple[float, float]
    boundary: BoundaryStats
    interior_max_exceeds_boundary: bool
    argmin_sides: Tuple[Side, Side] = (Side.DEFAULT, Side.DEFAULT)
    argmax_sides: Tuple[Side, Side] = (Side.DEFAULT, Side.DEFAULT)

    def toDict(self):
        return {
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "argmin": list(self.argmin),
            "argmax": list(self.argmax),
            "boundary": self.boundary.toDict(),
            "interior_max_exceeds_boundary": self.interior_max_exceeds_boundary,
        }

    def toJSON(self, **kwargs):
        return json.dumps(self.toDict(), **kwargs)


@dataclass(frozen=True)
class ThetaInterval:
    lo: float
    hi: float
    source: Source = Source.NUMERIC

    def contains(self, theta, tol=0.0):
        return self.lo - tol <= theta <= self.hi + tol

    def scaled(self, factor):
        """End points multiplied by 'factor' (> 0)."""
        return ThetaInterval(self.lo * factor, self.hi * factor, self.source)

    def toDict(self):
        return {"lo": self.lo, "hi": self.hi, "source": str(self.source)}

    @classmethod
    def fromDict(cls, data):
        return cls(float(data["lo"]), float(data["hi"]), Source(data["source"]))

    def toJSON(self, **kwargs):
        return json.dumps(self.toDict(), **kwargs)


def _settings(s):
    return s if s is not None else ScanSettings()


def boundary_stats(f, g, s=None):
    """Extrema of G on the four edges of the square, from the closed forms

        G(u, 0) = g(0) (f - u f')
        G(u, 1) = (f - u f') (g(1) - g'(1)) - 2 u f' g'(1)
        G(0, v) = f(0) (g - v g')
        G(1, v) = (f(1) - f'(1)) (g - v g') - 2 v f'(1) g'

    together with M = max (f - u f'), N = max (g - v g') and a, b.
    """
    s = _settings(s)
    uAxis, vAxis = makeAxis(s.grid_n, f.kinks), makeAxis(s.grid_n, g.kinks)
    pu, pv = Profile.fromGenerator(f, uAxis), Profile.fromGenerator(g, vAxis)
    A = pu.value - pu.x * pu.d1
    B = pv.value - pv.x * pv.d1

    def fA(t):
        return float(f.value(t) - t * f.d1(t))

    def gB(t):
        return float(g.value(t) - t * g.d1(t))

    M = lineExtremum(A, uAxis.points, fA, MAX, s)[0]
    N = lineExtremum(B, vAxis.points, gB, MAX, s)[0]

    f0, f1, df1 = float(f.value(0.0)), float(f.value(1.0)), float(f.d1(1.0))
    g0, g1, dg1 = float(g.value(0.0)), float(g.value(1.0)), float(g.d1(1.0))
    edges = (
        # (values, xs, scalar function, point from t)
        (g0 * A, uAxis.points, lambda t: g0 * fA(t), lambda t: (t, 0.0)),
        (
            A * (g1 - dg1) - 2.0 * pu.x * pu.d1 * dg1,
            uAxis.points,
            lambda t: fA(t) * (g1 - dg1) - 2.0 * t * float(f.d1(t)) * dg1,
            lambda t: (t, 1.0),
        ),
        (f0 * B, vAxis.points, lambda t: f0 * gB(t), lambda t: (0.0, t)),
        (
            (f1 - df1) * B - 2.0 * pv.x * df1 * pv.d1,
            vAxis.points,
            lambda t: (f1 - df1) * gB(t) - 2.0 * t * df1 * float(g.d1(t)),
            lambda t: (1.0, t),
        ),
    )
    best = {MAX: (-math.inf, None), MIN: (math.inf, None)}
    for values, xs, func, point in edges:
        for sense in (MAX, MIN):
            value, t, _ = lineExtremum(values, xs, func, sense, s)
            current = best[sense][0]
            if (sense == MAX and value > current) or (sense == MIN and value < current):
                best[sense] = (value, point(t))
    a, b = endpointSlopes(f, g)
    return BoundaryStats(
        a=a,
        b=b,
        M=M,
        N=N,
        boundary_max_G=best[MAX][0],
        boundary_min_G=best[MIN][0],
        argmax=best[MAX][1],
        argmin=best[MIN][1],
    )


def extremize_G(f, g, s=None):
    """alpha1 = min G and alpha2 = max G over the closed unit square."""
    s = _settings(s)
    with timer("extremize G"):
        scanner = FieldScanner(f, g, s)
        lo = scanner.extremum(gField, MIN)
        hi = scanner.extremum(gField, MAX)
        boundary = boundary_stats(f, g, s)
    interior = hi.value > boundary.boundary_max_G + s.tol_extremum
    logger.debug(
        "alpha1=%r at %r, alpha2=%r at %r, boundary max %r",
        lo.value,
        lo.point,
        hi.value,
        hi.point,
        boundary.boundary_max_G,
    )
    return ExtremaResult(
        alpha1=lo.value,
        alpha2=hi.value,
        argmin=lo.point,
        argmax=hi.point,
        boundary=boundary,
        interior_max_exceeds_boundary=interior,
        argmin_sides=(lo.sideU, lo.sideV),
        argmax_sides=(hi.sideU, hi.sideV),
    )


def closed_form_interval(f, g, s=None):
    """[-1/(ab), 1/max{a, b}]; valid only when B1-B4 hold, which is checked."""
    s = _settings(s)
    results = check_pair(
        f, g, s, conditions=(Condition.B1, Condition.B2, Condition.B3, Condition.B4)
    )
    failed = [str(c) for c, r in results.items() if not r.holds]
    if failed:
        details = "; ".join(
            f"{c} (margin {r.margin:.3g})" for c, r in results.items() if not r.holds
        )
        raise PreconditionError(
            f"closed-form interval requires B1-B4; failed: {details}", failed=failed
        )
    a, b = endpointSlopes(f, g)
    return ThetaInterval(-1.0 / (a * b), 1.0 / max(a, b), Source.CLOSED_FORM)


def theta_interval(f, g, s=None, extrema=None):
    """[1/alpha1, 1/alpha2] from the numerical extrema of G."""
    extrema = extrema or extremize_G(f, g, s)
    if not extrema.alpha2 > 0:
        raise DegenerateFieldError(
            f"max G = {extrema.alpha2!r} <= 0 at {extrema.argmax}: no upper bound "
            "on theta (G(0, 0) = f(0) g(0) is 1 under B1)"
        )
    lo = 1.0 / extrema.alpha1 if extrema.alpha1 != 0 else -math.inf
    return ThetaInterval(lo, 1.0 / extrema.alpha2, Source.NUMERIC)


# -- feasibility -------------------------------------------------------------


def _copulaOnGrid(theta, pu, pv):
    uv = pu.x * pv.x
    q = 1.0 - theta * pu.value * pv.value
    return np.where(uv > 0, uv / np.where(uv > 0, q, 1.0), 0.0), q


def feasibilityField(theta):
    """The left side of the validity inequality, in numerator form."""

    def field(pu, pv):
        D, _ = _copulaOnGrid(theta, pu, pv)
        A = pu.value - pu.x * pu.d1
        B = pv.value - pv.x * pv.d1
        return 1.0 - theta * (A * B - 2.0 * D * pu.d1 * pv.d1)

    return field


def denominatorField(theta):
    """1 - theta f g where uv > 0, NaN on the axes."""

    def field(pu, pv):
        q = 1.0 - theta * pu.value * pv.value
        return np.where(pu.x * pv.x > 0, q, np.nan)

    return field


FIELDS = {"G": lambda theta: gField, "H": lambda theta: hField, "L": feasibilityField}


@dataclass(frozen=True)
class FeasibilityCheck:
    theta: float
    feasible: bool
    margin: float
    witness: Tuple[float, float]
    denominator: float
    denominator_witness: Optional[Tuple[float, float]] = None

    def toDict(self):
        return {
            "theta": self.theta,
            "feasible": self.feasible,
            "margin": self.margin,
            "witness": list(self.witness),
            "denominator": self.denominator,
        }


def check_feasible(f, g, theta, s=None, scanner=None):
    """Whether the density numerator is >= -tol everywhere on the grid (with
    polish) and 1 - theta f g > 0 wherever uv > 0.
    """
    s = _settings(s)
    scanner = scanner or FieldScanner(f, g, s)
    theta = float(theta)
    fg = scanner.pu.value[:, None] * scanner.pv.value[None, :]
    if theta > 0 or np.any(fg < 0):
        den = scanner.extremum(denominatorField(theta), MIN)
        denominator, denWitness = den.value, den.point
    else:
        denominator, denWitness = 1.0, None
    if not denominator > 0:
        return FeasibilityCheck(
            theta, False, -math.inf, denWitness, denominator, denWitness
        )
    best = scanner.extremum(feasibilityField(theta), MIN)
    feasible = best.value >= -s.tol_condition
    return FeasibilityCheck(
        theta, feasible, best.value, best.point, denominator, denWitness
    )


@dataclass(frozen=True)
class ThetaSearch:
    """Outcome of a feasibility search: 'theta' is the feasible end of the
    final bracket, 'evaluations' every (theta, feasible, margin) tried.
    """

    theta: float
    bracket: Tuple[float, float]
    start: float
    direction: int
    evaluations: Tuple[Tuple[float, bool, float], ...] = field(default_factory=tuple)

    def toDict(self):
        return {
            "theta": self.theta,
            "bracket": {"feasible": self.bracket[0], "infeasible": self.bracket[1]},
            "start": self.start,
            "direction": "min" if self.direction < 0 else "max",
            "evaluations": [
                {"theta": t, "feasible": ok, "margin": m}
                for t, ok, m in self.evaluations
            ],
        }


def search_feasible_theta(f, g, direction, s=None, extrema=None):
    """Geometric scan from 1/alpha1 (direction < 0) or 1/alpha2 (direction
    > 0) away from 0 until theta becomes infeasible, a check that the next
    REENTRY_PROBES scan points stay infeasible, then bisection to
    settings.bisect_width.
    """
    s = _settings(s)
    extrema = extrema or extremize_G(f, g, s)
    if direction < 0:
        if not extrema.alpha1 < 0:
            raise PreconditionError(
                f"theta_min search requires alpha1 < 0, got {extrema.alpha1!r}",
                failed=["alpha1 < 0"],
            )
        start = 1.0 / extrema.alpha1
    else:
        if not extrema.alpha2 > 0:
            raise DegenerateFieldError(f"max G = {extrema.alpha2!r} <= 0")
        start = 1.0 / extrema.alpha2

    scanner = FieldScanner(f, g, s)
    evaluations = []

    def feasible(theta):
        check = check_feasible(f, g, theta, s, scanner)
        evaluations.append((theta, check.feasible, check.margin))
        logger.debug(
            "theta=%r: %s (margin %r at %r)",
            theta,
            "feasible" if check.feasible else "infeasible",
            check.margin,
            check.witness,
        )
        return check.feasible

    label = "min" if direction < 0 else "max"
    with timer(f"search theta_{label}"):
        if not feasible(start):
            logger.warning(
                "theta=%r from the G extrema is infeasible; bisecting toward 0",
                start,
            )
            good, bad = 0.0, start
        else:
            floor = s.floor_factor * abs(start)
            good = start
            while True:
                theta = good * s.scan_factor
                if abs(theta) > floor:
                    raise SearchError(
                        f"no infeasible theta found before the floor {floor:.6g}"
                    )
                if not feasible(theta):
                    break
                good = theta
            bad = theta
            probe = bad
            for _ in range(REENTRY_PROBES):
                probe *= s.scan_factor
                if feasible(probe):
                    raise SearchError(
                        f"feasibility re-enters at theta={probe!r} beyond the "
                        f"infeasible theta={bad!r}"
                    )
        good, bad = bisect(feasible, good, bad, s.bisect_width)
    logger.info(
        "theta_%s = %.6f (bracket [%r, %r], %d checks)",
        label,
        good,
        good,
        bad,
        len(evaluations),
    )
    return ThetaSearch(good, (good, bad), start, direction, tuple(evaluations))


def theta_min_feasible(f, g, s=None, extrema=None):
    return search_feasible_theta(f, g, -1, s, extrema).theta


def theta_max_feasible(f, g, s=None, extrema=None):
    return search_feasible_theta(f, g, +1, s, extrema).theta


# -- figure data --------------------------------------------------------------


def field_on_grid(f, g, name="G", n=101, theta=None):
    """(us, vs, values) of a named field ("G", "H" or "L") on an n x n grid."""
    if name not in FIELDS:
        raise ValueError(f"unknown field {name!r}; expected one of {sorted(FIELDS)}")
    if name == "L" and theta is None:
        raise ValueError("field 'L' needs theta")
    fieldFunc = FIELDS[name](theta)
    axis = makeAxis(n)
    pu, pv = Profile.fromGenerator(f, axis), Profile.fromGenerator(g, axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.broadcast_to(fieldFunc(pu.rows(), pv.cols()), (n, n))
    us, vs = np.meshgrid(axis.points, axis.points, indexing="ij")
    return us.ravel(), vs.ravel(), values.ravel()


def dump_field_csv(path, f, g, name="G", n=101, theta=None):
    """Write the field as CSV with header 'u,v,<name>'."""
    us, vs, values = field_on_grid(f, g, name, n, theta)
    return writeCSV(path, ["u", "v", name], zip(us, vs, values))
