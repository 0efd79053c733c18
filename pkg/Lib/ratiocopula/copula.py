"""The Separate Ratio-Type Copula D(u, v) = uv / (1 - theta f(u) g(v)).

CopulaModel bundles the two generators with theta. The evaluation functions
are vectorized over u and v; the two validity oracles, check_validity
(density numerator on a grid, plus range and boundary identities) and
check_rectangle (model-free rectangle masses), return ConditionResults
stamped with the grid resolution they were decided at.
"""

import json
import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from fontTools.misc.loggingTools import Timer
from numpy.random import Generator, Philox, SeedSequence
from scipy.special import roots_legendre
from scipy.stats import rankdata

from ratiocopula.analysis import check_feasible
from ratiocopula.conditions import ConditionResult, makeResult
from ratiocopula.constants import Condition
from ratiocopula.errors import DomainError, InvalidModelSpec, PreconditionError
from ratiocopula.generators import BaseGenerator, make_generator, normalize
from ratiocopula.gridSearch import FieldScanner
from ratiocopula.scanSettings import ScanSettings
from ratiocopula.util import writeCSV

logger = logging.getLogger(__name__)

timer = Timer(logging.getLogger("ratiocopula.timer"), level=logging.DEBUG)

MODEL_KEYS = frozenset(["f", "g", "theta"])

# D(u, 1) = u and friends are asserted to this absolute tolerance
BOUNDARY_ATOL = 1e-12

RANDOM_RECTANGLES = 10_000
EDGE_DECADES = 6
# bound on the rounding of a four-term difference, in ulps of its largest term
ROUNDING_ULPS = 32

SAMPLE_CHUNK = 8192
SAMPLE_XTOL = 1e-10


@dataclass(frozen=True)
class CopulaModel:
    f: BaseGenerator
    g: BaseGenerator
    theta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "f", make_generator(self.f))
        object.__setattr__(self, "g", make_generator(self.g))
        if self.theta is not None:
            try:
                theta = float(self.theta)
            except (TypeError, ValueError) as e:
                raise InvalidModelSpec(
                    f"theta must be a real number, got {self.theta!r}"
                ) from e
            if not math.isfinite(theta):
                raise InvalidModelSpec(f"theta must be finite, got {theta!r}")
            object.__setattr__(self, "theta", theta)

    @classmethod
    def create(cls, f, g, theta=None, validate=False, s=None):
        """Build a model; with 'validate', check that 1 - theta f g > 0 on
        the grid of 's' wherever uv > 0 (DomainError otherwise).
        """
        model = cls(f, g, theta)
        if validate:
            model.validate(s)
        return model

    @classmethod
    def fromDict(cls, data, validate=False, s=None):
        if not isinstance(data, Mapping):
            raise InvalidModelSpec(f"model spec must be an object: {data!r}")
        unknown = sorted(set(data).difference(MODEL_KEYS))
        if unknown:
            raise InvalidModelSpec(
                "unknown key{} in model spec: {}".format(
                    "s" if len(unknown) > 1 else "", ", ".join(repr(k) for k in unknown)
                )
            )
        missing = [k for k in ("f", "g") if k not in data]
        if missing:
            raise InvalidModelSpec(f"model spec is missing {', '.join(missing)}")
        return cls.create(data["f"], data["g"], data.get("theta"), validate, s)

    @classmethod
    def fromJSON(cls, text, **kwargs):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidModelSpec(f"malformed model JSON: {e}") from e
        return cls.fromDict(data, **kwargs)

    @classmethod
    def fromFile(cls, path, **kwargs):
        with open(path, encoding="utf-8") as fp:
            return cls.fromJSON(fp.read(), **kwargs)

    def toDict(self):
        data = {"f": self.f.spec.toDict(), "g": self.g.spec.toDict()}
        if self.theta is not None:
            data["theta"] = self.theta
        return data

    def toJSON(self, **kwargs):
        return json.dumps(self.toDict(), **kwargs)

    def withTheta(self, theta):
        return type(self)(self.f, self.g, theta)

    def normalized(self):
        """The same copula with f(0) = g(0) = 1 and theta scaled by f(0) g(0)."""
        f, fScale = normalize(self.f)
        g, gScale = normalize(self.g)
        theta = None if self.theta is None else self.theta * fScale * gScale
        return type(self)(f, g, theta)

    def validate(self, s=None):
        s = s or ScanSettings()
        theta = _theta(self)
        xs = np.linspace(0.0, 1.0, s.grid_n)
        q = 1.0 - theta * self.f.value(xs)[:, None] * self.g.value(xs)[None, :]
        q = np.where(xs[:, None] * xs[None, :] > 0, q, np.inf)
        i, j = np.unravel_index(int(np.argmin(q)), q.shape)
        if not q[i, j] > 0:
            raise DomainError(
                f"1 - theta*f*g = {q[i, j]!r} <= 0 at ({xs[i]!r}, {xs[j]!r}) "
                f"for theta={theta!r}"
            )
        return self


def _theta(m):
    if m.theta is None:
        raise InvalidModelSpec("the model has no theta")
    return m.theta


def _unitPair(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    for name, x in (("u", u), ("v", v)):
        if np.any(~((x >= 0) & (x <= 1))):
            raise DomainError(f"{name} outside [0, 1]: {x!r}")
    return np.broadcast_arrays(u, v)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _denominator(m, u, v, fu, gv):
    q = 1.0 - _theta(m) * fu * gv
    bad = (u * v > 0) & ~(q > 0)
    if np.any(bad):
        k = np.flatnonzero(bad)[0]
        raise DomainError(
            f"1 - theta*f*g = {q.flat[k]!r} <= 0 at "
            f"({u.flat[k]!r}, {v.flat[k]!r}) for theta={m.theta!r}"
        )
    return q


def _value(m, u, v):
    fu, gv = m.f.value(u), m.g.value(v)
    q = _denominator(m, u, v, fu, gv)
    uv = u * v
    return np.where(uv > 0, uv / np.where(uv > 0, q, 1.0), 0.0)


def copula_value(m, u, v):
    u, v = _unitPair(u, v)
    return _scalar(_value(m, u, v))


def density(m, u, v):
    """Mixed partial of D: the numerator 1 - theta [(f - uf')(g - vg') -
    2 D f' g'] over (1 - theta f g)**2.
    """
    u, v = _unitPair(u, v)
    theta = _theta(m)
    fu, gv = m.f.value(u), m.g.value(v)
    df, dg = m.f.d1(u), m.g.d1(v)
    q = _denominator(m, u, v, fu, gv)
    D = _value(m, u, v)
    numerator = 1.0 - theta * ((fu - u * df) * (gv - v * dg) - 2.0 * D * df * dg)
    return _scalar(numerator / (q * q))


def _partialU(m, u, v):
    theta = m.theta
    fu, gv = m.f.value(u), m.g.value(v)
    q = 1.0 - theta * fu * gv
    return v * (q + theta * u * m.f.d1(u) * gv) / (q * q)


def partial_u(m, u, v):
    """dD/du = v (1 - theta f g + theta u f' g) / (1 - theta f g)**2."""
    u, v = _unitPair(u, v)
    _denominator(m, u, v, m.f.value(u), m.g.value(v))
    return _scalar(_partialU(m, u, v))


# -- validity oracles ----------------------------------------------------------


def _resolution(s, note):
    return f"{note} (at resolution {s.grid_n})"


def _rectangleAxis(n, decades):
    # the uniform grid plus geometric points inside its first and last cells
    xs = np.linspace(0.0, 1.0, n)
    tail = xs[1] * np.logspace(-decades, -1, decades)
    return np.unique(np.concatenate([xs, tail, 1.0 - tail]))


def _netMass(c11, c12, c21, c22, area):
    # mass per unit area, credited with the rounding bound of the difference
    mass = c22 - c21 - c12 + c11
    scale = np.maximum.reduce([np.abs(c) for c in (c11, c12, c21, c22)])
    rounding = ROUNDING_ULPS * np.finfo(float).eps * scale
    return (mass + rounding) / area


def check_rectangle(m, s=None, rectangles=RANDOM_RECTANGLES, decades=EDGE_DECADES):
    """Minimum rectangle mass D(u2,v2) - D(u2,v1) - D(u1,v2) + D(u1,v1),
    divided by the rectangle area, over every cell of the grid and
    'rectangles' random rectangles drawn with settings.seed.

    The first and last grid cells of each axis are split geometrically over
    'decades' decades, so that negative mass packed against an edge or a
    corner registers. Each mass is credited with the rounding error of its
    four-term difference before the comparison with tol_condition.
    """
    s = s or ScanSettings()
    theta = _theta(m)
    xs = _rectangleAxis(s.grid_n, decades)
    h = 1.0 / (s.grid_n - 1)
    fu, gv = m.f.value(xs), m.g.value(xs)
    q = 1.0 - theta * fu[:, None] * gv[None, :]
    uv = xs[:, None] * xs[None, :]
    bad = (uv > 0) & ~(q > 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        return makeResult(
            Condition.RECTANGLE,
            -math.inf,
            (xs[i], xs[j]),
            s,
            note=_resolution(s, "non-positive denominator"),
            seed=s.seed,
        )
    with timer("rectangle masses"):
        C = np.where(uv > 0, uv / np.where(uv > 0, q, 1.0), 0.0)
        widths = np.diff(xs)
        cells = _netMass(
            C[:-1, :-1],
            C[:-1, 1:],
            C[1:, :-1],
            C[1:, 1:],
            widths[:, None] * widths[None, :],
        )
        k = int(np.argmin(cells))
        i, j = np.unravel_index(k, cells.shape)
        margin = float(cells[i, j])
        witness = (xs[i] + 0.5 * widths[i], xs[j] + 0.5 * widths[j])

        rng = Generator(Philox(s.seed))
        us = np.sort(rng.random((rectangles, 2)), axis=1)
        vs = np.sort(rng.random((rectangles, 2)), axis=1)
        area = (us[:, 1] - us[:, 0]) * (vs[:, 1] - vs[:, 0])
        keep = area > h * h
        us, vs, area = us[keep], vs[keep], area[keep]
        if len(area):
            mass = _netMass(
                _value(m, us[:, 0], vs[:, 0]),
                _value(m, us[:, 0], vs[:, 1]),
                _value(m, us[:, 1], vs[:, 0]),
                _value(m, us[:, 1], vs[:, 1]),
                area,
            )
            r = int(np.argmin(mass))
            if mass[r] < margin:
                margin = float(mass[r])
                witness = (us[r, 0], vs[r, 0], us[r, 1], vs[r, 1])
    logger.debug("min rectangle mass %r at %r", margin, witness)
    return makeResult(
        Condition.RECTANGLE,
        margin,
        witness,
        s,
        note=_resolution(s, "min normalized rectangle mass"),
        seed=s.seed,
    )


def check_validity(m, s=None):
    """Density numerator >= -tol on the grid (with polish), 1 - theta f g > 0
    off the axes, 0 <= D <= 1 and the boundary identities D(u, 0) = D(0, v)
    = 0, D(u, 1) = u, D(1, v) = v.
    """
    s = s or ScanSettings()
    theta = _theta(m)
    with timer("check validity"):
        scanner = FieldScanner(m.f, m.g, s)
        feasibility = check_feasible(m.f, m.g, theta, s, scanner)
    problems = []
    if not feasibility.denominator > 0:
        problems.append("non-positive denominator")
    elif not feasibility.feasible:
        problems.append("negative density")

    margin, witness = feasibility.margin, feasibility.witness
    if feasibility.denominator > 0:
        xs = np.linspace(0.0, 1.0, s.grid_n)
        C = _value(m, xs[:, None], xs[None, :])
        if C.min() < -s.tol_condition or C.max() > 1.0 + s.tol_condition:
            problems.append("D outside [0, 1]")
            k = int(np.argmin(C)) if C.min() < 0 else int(np.argmax(C))
            i, j = np.unravel_index(k, C.shape)
            witness = (xs[i], xs[j])
            margin = min(margin, float(C.min()), 1.0 - float(C.max()))
        deviations = (
            (np.abs(C[:, -1] - xs), lambda k: (xs[k], 1.0)),
            (np.abs(C[-1, :] - xs), lambda k: (1.0, xs[k])),
            (np.abs(C[:, 0]), lambda k: (xs[k], 0.0)),
            (np.abs(C[0, :]), lambda k: (0.0, xs[k])),
        )
        for values, point in deviations:
            k = int(np.argmax(values))
            if values[k] > BOUNDARY_ATOL:
                problems.append("boundary identity")
                margin = min(margin, -float(values[k]))
                witness = point(k)
                break

    holds = not problems
    note = _resolution(s, "; ".join(problems) if problems else "valid")
    if not holds:
        logger.info("theta=%r is not valid for %r, %r: %s", theta, m.f, m.g, note)
    result = makeResult(Condition.VALIDITY, margin, witness, s, note=note)
    if result.holds != holds:
        result = ConditionResult(
            Condition.VALIDITY, holds, result.margin, result.witness, s, note=note
        )
    return result


# -- sampling ------------------------------------------------------------------


@dataclass(frozen=True)
class SampleBatch:
    pairs: np.ndarray
    seed: int
    n: int

    def __len__(self):
        return self.n

    def toCSV(self, path):
        return writeCSV(path, ["u", "v"], self.pairs)


def _invertPartial(m, u, w):
    # dD/du(u, .) increases from 0 at v = 0 to 1 at v = 1
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    while np.max(hi - lo) > SAMPLE_XTOL:
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            below = _partialU(m, u, mid) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample(m, n, seed, s=None):
    """n pairs by conditional inversion: u uniform, then v with
    dD/du(u, v) = w for uniform w. Chunks of SAMPLE_CHUNK draws each own a
    Philox stream spawned from 'seed', so the batch does not depend on the
    number of worker threads.
    """
    s = s or ScanSettings()
    n = int(n)
    if n < 0:
        raise ValueError(f"sample size must be >= 0, got {n!r}")
    result = check_validity(m, s)
    if not result.holds:
        raise PreconditionError(
            f"cannot sample theta={m.theta!r}: {result.note}; witness "
            f"{result.witness}",
            failed=[str(Condition.VALIDITY)],
            witness=result.witness,
        )
    sizes = [min(SAMPLE_CHUNK, n - start) for start in range(0, n, SAMPLE_CHUNK)]
    streams = SeedSequence(seed).spawn(len(sizes))

    def work(item):
        stream, size = item
        rng = Generator(Philox(stream))
        uw = rng.random((size, 2))
        return np.column_stack([uw[:, 0], _invertPartial(m, uw[:, 0], uw[:, 1])])

    items = list(zip(streams, sizes))
    with timer(f"sample {n} pairs"):
        if s.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=s.workers) as executor:
                chunks = list(executor.map(work, items))
        else:
            chunks = [work(item) for item in items]
    pairs = np.concatenate(chunks) if chunks else np.empty((0, 2))
    return SampleBatch(pairs, int(seed), n)


def empirical_copula(batch, points):
    """The empirical copula of 'batch' (from ranks rescaled by 1/n) on the
    tensor grid points x points, as a 2-D array.
    """
    pairs = batch.pairs if isinstance(batch, SampleBatch) else np.asarray(batch)
    points = np.asarray(points, dtype=float)
    n, k = len(pairs), len(points)
    if not n:
        raise ValueError("empirical copula of an empty sample")
    ranks = np.column_stack(
        [rankdata(pairs[:, 0], method="max"), rankdata(pairs[:, 1], method="max")]
    ) / float(n)
    # each observation counts at every grid point at or beyond its rank
    iu = np.searchsorted(points, ranks[:, 0], side="left")
    iv = np.searchsorted(points, ranks[:, 1], side="left")
    counts = np.zeros((k + 1, k + 1))
    np.add.at(counts, (iu, iv), 1.0)
    return counts.cumsum(axis=0).cumsum(axis=1)[:k, :k] / n


def sup_distance(m, batch, n_eval=101):
    """max |C_n - D| over an n_eval x n_eval grid."""
    points = np.linspace(0.0, 1.0, n_eval)
    empirical = empirical_copula(batch, points)
    model = _value(m, points[:, None], points[None, :])
    return float(np.max(np.abs(empirical - model)))


# -- quadrature ----------------------------------------------------------------


def _nodes(panels, breaks, order):
    x, w = roots_legendre(order)
    edges = np.union1d(np.linspace(0.0, 1.0, panels + 1), breaks)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return ((a + b) * 0.5 + half * x).ravel(), (half * w).ravel()


def _integrate(m, integrand, order, tol, maxPanels):
    breaksU = [k for k in m.f.kinks if 0 < k < 1]
    breaksV = [k for k in m.g.kinks if 0 < k < 1]
    previous = None
    panels = 1
    while True:
        us, wu = _nodes(panels, breaksU, order)
        vs, wv = _nodes(panels, breaksV, order)
        value = float(wu @ integrand(us[:, None], vs[None, :]) @ wv)
        if previous is not None and abs(value - previous) <= tol:
            return value
        if panels >= maxPanels:
            logger.warning(
                "quadrature not converged with %d panels: last change %r",
                panels,
                abs(value - previous),
            )
            return value
        previous = value
        panels *= 2


def integrate_density(m, order=16, tol=1e-10, maxPanels=128):
    """The integral of the density over the unit square (1 for a copula)."""
    return _integrate(m, lambda u, v: density(m, u, v), order, tol, maxPanels)


def spearman_rho(m, s=None, validate=True, order=16, tol=1e-8, maxPanels=128):
    """rho_S = 12 * integral of D - 3, by composite Gauss-Legendre tensor
    quadrature on panels that double until the value settles within 'tol'.
    Generator kinks are panel breakpoints.
    """
    if validate:
        result = check_validity(m, s)
        if not result.holds:
            raise PreconditionError(
                f"Spearman's rho of an invalid model: {result.note}",
                failed=[str(Condition.VALIDITY)],
                witness=result.witness,
            )
    _theta(m)
    with timer("Spearman's rho quadrature"):
        integral = _integrate(
            m, lambda u, v: _value(m, u, v), order, tol / 12.0, maxPanels
        )
    return 12.0 * integral - 3.0
