"""Admissibility conditions on a generator pair.

B1-B4 are the conditions under which the theta-interval is both sufficient
and necessary; A1-A3 are the older assumptions (A1, A2 in their
non-normalized form, A3 as the scale-free fg/(f(0)g(0)) <= 1 - uv). Each
check returns a ConditionResult carrying the signed worst-case margin.
"""

import dataclasses
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from fontTools.misc.loggingTools import Timer

from ratiocopula.constants import TABLE1_COLUMNS, Condition, Side
from ratiocopula.errors import PreconditionError, SearchError
from ratiocopula.generators import make_envelope
from ratiocopula.gridSearch import (
    MAX,
    MIN,
    FieldScanner,
    Profile,
    lineExtremum,
    makeAxis,
)
from ratiocopula.scanSettings import ScanSettings
from ratiocopula.util import bisect

logger = logging.getLogger(__name__)

timer = Timer(logging.getLogger("ratiocopula.timer"), level=logging.DEBUG)


@dataclass(frozen=True)
class ConditionResult:
    condition: Condition
    holds: bool
    margin: float
    witness: Optional[Tuple[float, ...]] = None
    settings: Optional[ScanSettings] = None
    strict: bool = True
    note: Optional[str] = None
    seed: Optional[int] = None
    # one-sided derivatives (u, v) the margin was evaluated with
    witness_sides: Optional[Tuple[Side, Side]] = None
    # unscaled slack at the witness, for margins measured relative to uv
    slack: Optional[float] = None

    def __bool__(self):
        return self.holds

    def toDict(self):
        data = {
            "condition": str(self.condition),
            "holds": self.holds,
            "margin": self.margin,
            "witness": list(self.witness) if self.witness is not None else None,
            "strict": self.strict,
        }
        if self.settings is not None:
            data["resolution"] = self.settings.grid_n
        if self.note:
            data["note"] = self.note
        if self.seed is not None:
            data["seed"] = self.seed
        if self.witness_sides is not None:
            data["witness_sides"] = [side.name.lower() for side in self.witness_sides]
        if self.slack is not None:
            data["slack"] = self.slack
        return data


def makeResult(condition, margin, witness, settings, **kwargs):
    """holds <=> margin >= -tol_condition; the witness is kept either way."""
    settings = settings or ScanSettings()
    margin = float(margin)
    holds = not math.isnan(margin) and margin >= -settings.tol_condition
    if witness is not None:
        witness = tuple(float(x) for x in witness)
    return ConditionResult(condition, holds, margin, witness, settings, **kwargs)


def _settings(s):
    return s if s is not None else ScanSettings()


# -- single-generator conditions ------------------------------------------


def check_B1(f, s=None):
    """f(0) = 1 and f(1) = 0."""
    s = _settings(s)
    dev0 = abs(float(f.value(0.0)) - 1.0)
    dev1 = abs(float(f.value(1.0)))
    witness = (0.0,) if dev0 >= dev1 else (1.0,)
    return makeResult(Condition.B1, -max(dev0, dev1), witness, s)


def check_A1(f, s=None):
    """f(1) = 0, without the normalization at 0."""
    s = _settings(s)
    return makeResult(Condition.A1, -abs(float(f.value(1.0))), (1.0,), s)


def _lineAxis(f, s):
    axis = makeAxis(s.grid_n, f.kinks)
    return axis, Profile.fromGenerator(f, axis)


def _flatRuns(d1, xs, tol):
    # maximal runs of >= 2 adjacent grid points where d1 vanishes
    flat = np.abs(d1) <= tol
    runs = []
    start = None
    for k, isFlat in enumerate(flat):
        if isFlat and start is None:
            start = k
        elif not isFlat and start is not None:
            if k - start >= 2:
                runs.append((float(xs[start]), float(xs[k - 1])))
            start = None
    if start is not None and len(flat) - start >= 2:
        runs.append((float(xs[start]), float(xs[-1])))
    return runs


def check_B2(f, s=None):
    """f is decreasing: max d1 over the grid (both sheets at kinks) <= tol.

    A non-positive derivative that vanishes on two or more adjacent grid
    points passes, with strict=False and the flat intervals in the note.
    """
    s = _settings(s)
    axis, profile = _lineAxis(f, s)
    value, x, _ = lineExtremum(
        profile.d1, axis.points, lambda t: float(f.d1(t)), MAX, s
    )
    runs = _flatRuns(profile.d1, axis.points, s.tol_condition)
    note = None
    if runs:
        note = "d1 = 0 on " + ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in runs)
        logger.warning("%r is not strictly decreasing: %s", f, note)
    return makeResult(Condition.B2, -value, (x,), s, strict=not runs, note=note)


def check_A2(f, s=None):
    """f is strictly monotonic, in either direction."""
    s = _settings(s)
    axis, profile = _lineAxis(f, s)
    maxD1, xMax, _ = lineExtremum(
        profile.d1, axis.points, lambda t: float(f.d1(t)), MAX, s
    )
    minD1, xMin, _ = lineExtremum(
        profile.d1, axis.points, lambda t: float(f.d1(t)), MIN, s
    )
    runs = _flatRuns(profile.d1, axis.points, s.tol_condition)
    if -maxD1 >= minD1:
        margin, witness = -maxD1, xMax
    else:
        margin, witness = minD1, xMin
    result = makeResult(Condition.A2, margin, (witness,), s, strict=not runs)
    if runs:
        # unlike B2, a flat stretch fails strict monotonicity
        return dataclasses.replace(
            result, holds=False, witness=(runs[0][0],), note=f"flat on {runs[0]}"
        )
    return result


def check_B3(f, s=None):
    """f is concave: max d2 <= tol when d2 exists, otherwise the midpoint
    defect f((x+y)/2) - (f(x)+f(y))/2 is >= -tol over all grid pairs.
    """
    s = _settings(s)
    xs = np.linspace(0.0, 1.0, s.grid_n)
    if f.hasD2:
        value, x, _ = lineExtremum(f.d2(xs), xs, lambda t: float(f.d2(t)), MAX, s)
        return makeResult(Condition.B3, -value, (x,), s)

    fx = f.value(xs)
    best, witness = math.inf, None
    step = s.block_rows
    for start in range(0, len(xs), step):
        x = xs[start : start + step, None]
        mid = 0.5 * (x + xs[None, :])
        defect = f.value(mid) - 0.5 * (fx[start : start + step, None] + fx[None, :])
        k = int(np.argmin(defect))
        if defect.flat[k] < best:
            best = float(defect.flat[k])
            witness = float(mid.flat[k])
    return makeResult(Condition.B3, best, (witness,), s, note="midpoint test")


# -- pair fields -------------------------------------------------------------


def hField(pu, pv):
    return pu.value * (1.0 - pv.x * pv.d1) + pv.value * (1.0 - pu.x * pu.d1)


def eval_H(f, g, u, v, sideU=Side.DEFAULT, sideV=Side.DEFAULT):
    """H = f (1 - v g') + g (1 - u f')."""
    fu, gv = float(f.value(u)), float(g.value(v))
    return fu * (1.0 - v * float(g.d1(v, sideV))) + gv * (
        1.0 - u * float(f.d1(u, sideU))
    )


def H_endpoints(f, g):
    """(H(1, 0), H(0, 1)); under B1 these are a + 1 and b + 1."""
    return eval_H(f, g, 1.0, 0.0), eval_H(f, g, 0.0, 1.0)


def endpointSlopes(f, g):
    """(a, b) = (-f'(1), -g'(1))."""
    return -float(f.d1(1.0, Side.LEFT)), -float(g.d1(1.0, Side.LEFT))


def _requireB1(f, g, s, what):
    failed = [
        name
        for name, gen in (("B1(f)", f), ("B1(g)", g))
        if not check_B1(gen, s).holds
    ]
    if failed:
        raise PreconditionError(
            f"{what} requires B1 for both generators; failed: {', '.join(failed)}",
            failed=failed,
        )


def check_B4(f, g, s=None):
    """max over S of H <= max{a, b} + 1, with a = -f'(1), b = -g'(1)."""
    s = _settings(s)
    _requireB1(f, g, s, "B4")
    a, b = endpointSlopes(f, g)
    bound = max(a, b) + 1.0
    with timer("scan H field"):
        best = FieldScanner(f, g, s).extremum(hField, MAX)
    note = None
    sides = (best.sideU, best.sideV)
    if Side.RIGHT in sides:
        note = "attained with right-sided derivatives at a kink"
    logger.debug("max H = %r at %r, bound %r", best.value, best.point, bound)
    return makeResult(
        Condition.B4,
        bound - best.value,
        best.point,
        s,
        note=note,
        witness_sides=sides,
    )


def _relative(slack):
    # slack relative to uv where uv > 0; (1, 1) is excluded
    def field(pu, pv):
        uv = pu.x * pv.x
        out = slack(pu, pv)
        out = np.where(uv > 0, out / np.where(uv > 0, uv, 1.0), out)
        return np.where((pu.x == 1.0) & (pv.x == 1.0), np.nan, out)

    return field


def a3Slack(pu, pv):
    # (1 - uv) - fg/(f(0)g(0)), written with the complements phi, psi
    phi, psi = pu.complement, pv.complement
    return phi + psi - phi * psi - pu.x * pv.x


def remark4Slack(alpha2, f0g0):
    """alpha2 (1 - uv) - fg, written with the complements phi, psi."""

    def slack(pu, pv):
        phi, psi = pu.complement, pv.complement
        return (alpha2 - f0g0) + f0g0 * (phi + psi - phi * psi) - alpha2 * pu.x * pv.x

    return slack


def _relativeResult(condition, f, g, slack, s):
    with timer(f"scan {condition} slack"):
        scanner = FieldScanner(f, g, s, tail=s.tail_decades)
        best = scanner.extremum(_relative(slack), MIN)
    absolute = scanner.pointValue(slack, best.u, best.v)
    logger.debug(
        "%s slack %r (%r relative to uv) at %r",
        condition,
        absolute,
        best.value,
        best.point,
    )
    return makeResult(
        condition,
        best.value,
        best.point,
        s,
        note="relative to uv",
        slack=absolute,
    )


def check_A3(f, g, s=None):
    """fg / (f(0) g(0)) <= 1 - uv on S minus the corner (1, 1).

    The margin is the slack divided by uv (where uv > 0), scanned on axes
    refined geometrically toward 0 so that failures at the origin register.
    The unscaled slack at the witness is reported as 'slack'.
    """
    return _relativeResult(Condition.A3, f, g, a3Slack, _settings(s))


def check_remark4(f, g, alpha2, s=None):
    """fg <= alpha2 (1 - uv) on S minus (1, 1), margin relative to uv."""
    f0g0 = float(f.value(0.0)) * float(g.value(0.0))
    slack = remark4Slack(float(alpha2), f0g0)
    return _relativeResult(Condition.REMARK4, f, g, slack, _settings(s))


def _combine(condition, rf, rg, s):
    # a pair satisfies a single-generator condition when both generators do
    worst = rf if rf.margin <= rg.margin else rg
    strict = rf.strict and rg.strict
    notes = [f"{name}: {r.note}" for name, r in (("f", rf), ("g", rg)) if r.note]
    return makeResult(
        condition,
        worst.margin,
        worst.witness,
        s,
        strict=strict,
        note="; ".join(notes) or None,
    )


_SINGLE = {
    Condition.A1: check_A1,
    Condition.A2: check_A2,
    Condition.B1: check_B1,
    Condition.B2: check_B2,
    Condition.B3: check_B3,
}


def check_pair_condition(condition, f, g, s=None):
    """Decide 'condition' for the pair (f, g)."""
    s = _settings(s)
    condition = Condition(condition)
    if condition in _SINGLE:
        check = _SINGLE[condition]
        return _combine(condition, check(f, s), check(g, s), s)
    if condition == Condition.A3:
        return check_A3(f, g, s)
    if condition == Condition.B4:
        return check_B4(f, g, s)
    raise ValueError(f"not a pair condition: {condition}")


def check_pair(f, g, s=None, conditions=None):
    """Verdicts for B1, B2, A3, B3, B4 (in that order) of the pair.

    B4 is reported failed, with a note, when B1 fails.
    """
    s = _settings(s)
    results = OrderedDict()
    for condition in conditions or TABLE1_COLUMNS:
        try:
            results[condition] = check_pair_condition(condition, f, g, s)
        except PreconditionError as e:
            results[condition] = ConditionResult(
                condition, False, -math.inf, None, s, note=str(e)
            )
    return results


def classify_pair(f, g, s=None, results=None):
    """Which result on the theta-interval applies to the pair:

    "iff" when B1-B4 hold (the interval characterizes validity),
    "sufficient" when B1-B3 or A1-A3 hold (the interval is only sufficient),
    "none" otherwise.
    """
    s = _settings(s)
    results = results or check_pair(f, g, s)
    if all(results[c].holds for c in (Condition.B1, Condition.B2, Condition.B3)):
        return "iff" if results[Condition.B4].holds else "sufficient"
    legacy = check_pair(f, g, s, conditions=(Condition.A1, Condition.A2))
    if all(r.holds for r in legacy.values()) and results[Condition.A3].holds:
        return "sufficient"
    return "none"


def power_pair_critical_point(n, m):
    """Interior critical point of H for f = 1 - u**n, g = 1 - v**m:
    returns ((u0, v0), H(u0, v0)).
    """
    X = (m - 1.0) / (n + m)
    Y = (n - 1.0) / (n + m)
    return (X ** (1.0 / n), Y ** (1.0 / m)), 2.0 + (n - 1.0) * (m - 1.0) / (n + m)


def envelope_gap(gen, s=None):
    """min over the grid of h_M - gen, with M = -gen'(1); non-negative for a
    concave decreasing generator with gen(0) = 1 and gen(1) = 0.
    Returns (gap, u).
    """
    s = _settings(s)
    envelope = make_envelope(gen)
    xs = np.linspace(0.0, 1.0, s.grid_n)
    gaps = envelope.value(xs) - gen.value(xs)
    k = int(np.argmin(gaps))
    return float(gaps[k]), float(xs[k])


def find_threshold(make, condition, lo, hi, s=None):
    """Bisect the parameter of 'make' (param -> (f, g)) until the bracket is
    narrower than settings.threshold_width and return its midpoint.

    The condition must hold at exactly one end of [lo, hi].
    """
    s = _settings(s)
    condition = Condition(condition)

    def holds(param):
        f, g = make(param)
        result = check_pair_condition(condition, f, g, s)
        logger.debug(
            "%s at %r: %s (margin %r)", condition, param, result.holds, result.margin
        )
        return result.holds

    with timer(f"find {condition} threshold on [{lo}, {hi}]"):
        atLo, atHi = holds(lo), holds(hi)
        if atLo == atHi:
            raise SearchError(
                f"no sign change of {condition} over [{lo}, {hi}]: "
                f"holds at lo={atLo}, at hi={atHi}"
            )
        good, bad = (lo, hi) if atLo else (hi, lo)
        good, bad = bisect(holds, good, bad, s.threshold_width)
    crossover = 0.5 * (good + bad)
    logger.info(
        "%s crossover at %.6g (bracket [%r, %r])", condition, crossover, good, bad
    )
    return crossover
