import dataclasses
import logging
import os
from dataclasses import dataclass

from ratiocopula.constants import (
    DEFAULT_GRID_N,
    DEFAULT_REFINE_ITERS,
    DEFAULT_TOL_CONDITION,
    DEFAULT_TOL_EXTREMUM,
    GRID_ENV_VAR,
    MIN_GRID_N,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanSettings:
    """The numeric policy shared by every grid scan.

    *grid_n* is the number of points per axis of the unit square scans.
    *refine_iters* bounds the Nelder-Mead polish that follows each grid
    argbest (the iteration cap is twice this value, one for each
    coordinate). Verdicts use *tol_condition*; extremum comparisons such as
    "interior max exceeds boundary max" use *tol_extremum*.

    The remaining fields tune the searches built on top of the scans:
    *scan_factor* and *floor_factor* drive the geometric theta scans,
    *bisect_width* and *threshold_width* are the bracket widths at which
    theta and parameter bisections stop, *tail_decades* is how many decades
    toward 0 the A3/Remark 4 scans refine geometrically, and *seed* feeds the
    random rectangles of the model-free validity oracle. Row blocks of
    *block_rows* are dispatched to *workers* threads.
    """

    grid_n: int = DEFAULT_GRID_N
    refine_iters: int = DEFAULT_REFINE_ITERS
    tol_condition: float = DEFAULT_TOL_CONDITION
    tol_extremum: float = DEFAULT_TOL_EXTREMUM
    block_rows: int = 256
    workers: int = 1
    scan_factor: float = 1.05
    floor_factor: float = 1e6
    bisect_width: float = 1e-4
    threshold_width: float = 1e-3
    tail_decades: int = 150
    seed: int = 0

    def __post_init__(self):
        if int(self.grid_n) != self.grid_n or self.grid_n < MIN_GRID_N:
            raise ValueError(
                f"grid_n must be an integer >= {MIN_GRID_N}, got {self.grid_n!r}"
            )
        if self.refine_iters < 0:
            raise ValueError(f"refine_iters must be >= 0, got {self.refine_iters!r}")
        positive = ("tol_condition", "tol_extremum", "bisect_width", "threshold_width")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.scan_factor > 1:
            raise ValueError(f"scan_factor must be > 1, got {self.scan_factor!r}")
        if self.block_rows < 1 or self.workers < 1:
            raise ValueError("block_rows and workers must be positive")
        if self.tail_decades < 0:
            raise ValueError(f"tail_decades must be >= 0, got {self.tail_decades!r}")

    @classmethod
    def fromEnvironment(cls, environ=None, **kwargs):
        """Build settings whose default grid comes from the RATIO_COPULA_GRID
        environment variable, if set. Explicit keyword arguments win.
        """
        environ = os.environ if environ is None else environ
        value = environ.get(GRID_ENV_VAR)
        if value and "grid_n" not in kwargs:
            try:
                kwargs["grid_n"] = int(value)
            except ValueError as e:
                raise ValueError(f"{GRID_ENV_VAR} must be an integer: {value!r}") from e
            logger.debug("grid_n=%s taken from %s", value, GRID_ENV_VAR)
        return cls(**kwargs)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def doubled(self):
        """Settings on the refined grid that nests the current one."""
        return self.replace(grid_n=2 * self.grid_n - 1)

    def toDict(self):
        return dataclasses.asdict(self)
