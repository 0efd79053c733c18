from ratiocopula.analysis import (  # noqa: F401
    BoundaryStats,
    ExtremaResult,
    ThetaInterval,
    closed_form_interval,
    diagonal_G,
    dump_field_csv,
    eval_G,
    extremize_G,
    theta_interval,
    theta_max_feasible,
    theta_min_feasible,
)
from ratiocopula.conditions import (  # noqa: F401
    ConditionResult,
    check_A1,
    check_A2,
    check_A3,
    check_B1,
    check_B2,
    check_B3,
    check_B4,
    check_pair,
    check_remark4,
    classify_pair,
    eval_H,
    find_threshold,
)
from ratiocopula.constants import Condition, Side  # noqa: F401
from ratiocopula.copula import (  # noqa: F401
    CopulaModel,
    SampleBatch,
    check_rectangle,
    check_validity,
    copula_value,
    density,
    partial_u,
    sample,
    spearman_rho,
)
from ratiocopula.generators import (  # noqa: F401
    GeneratorSpec,
    eval_d1,
    eval_d2,
    eval_value,
    make_generator,
    normalize,
)
from ratiocopula.scanSettings import ScanSettings  # noqa: F401

__all__ = [
    "CopulaModel",
    "GeneratorSpec",
    "ScanSettings",
    "check_pair",
    "check_validity",
    "closed_form_interval",
    "copula_value",
    "density",
    "extremize_G",
    "make_generator",
    "sample",
    "spearman_rho",
    "theta_interval",
    "theta_min_feasible",
    "theta_max_feasible",
]

try:
    from ._version import version as __version__
except ImportError:
    __version__ = "0.0.0+unknown"
