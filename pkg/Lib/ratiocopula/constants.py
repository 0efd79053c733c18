from enum import Enum, IntEnum
from types import MappingProxyType


class Side(IntEnum):
    """Which one-sided derivative to take at a kink. DEFAULT is the left one."""

    DEFAULT = 0
    LEFT = 1
    RIGHT = 2


class Condition(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    REMARK4 = "REMARK4"
    VALIDITY = "VALIDITY"
    RECTANGLE = "RECTANGLE"

    def __str__(self):
        return self.value


class Source(str, Enum):
    NUMERIC = "numeric"
    CLOSED_FORM = "closed_form"

    def __str__(self):
        return self.value


GRID_ENV_VAR = "RATIO_COPULA_GRID"

DEFAULT_GRID_N = 1001
MIN_GRID_N = 64
DEFAULT_REFINE_ITERS = 60
DEFAULT_TOL_CONDITION = 1e-9
DEFAULT_TOL_EXTREMUM = 1e-10

# significant digits of every number written to CSV
CSV_DIGITS = 12

# verdict columns of the benchmark table, in their printed order
TABLE1_COLUMNS = (Condition.B1, Condition.B2, Condition.A3, Condition.B3, Condition.B4)

# Benchmark rows: (row id, f, g, parameter regime, expected verdicts in
# TABLE1_COLUMNS order); g=None means the symmetric pair (f, f). Regimes are
# sampled at representative interior values plus probes on both sides of the
# A3 thresholds.
TABLE1_ROWS = (
    ("power_n1.5", "power(n=1.5)", None, "1 <= n <= 2", "TTTTT"),
    ("power_n2", "power(n=2)", None, "1 <= n <= 2", "TTTTT"),
    ("power_n3", "power(n=3)", None, "2 < n", "TTFTT"),
    ("log_b_b2", "log_b(b=2)", None, "1 < b <= 41", "TTTTT"),
    ("log_b_b10", "log_b(b=10)", None, "1 < b <= 41", "TTTTT"),
    ("log_b_b41", "log_b(b=41)", None, "1 < b <= 41", "TTTTT"),
    # the A3 split in b belongs to the symmetric log_b pair
    ("log_b_b42", "log_b(b=42)", None, "41 < b", "TTFTT"),
    ("cosine", "cosine", None, "", "TTTTT"),
    # (1-u) g(v) <= 1-uv is linear in u and holds at both ends, for every b
    ("linear_log_b_b10", "linear", "log_b(b=10)", "1 < b", "TTTTT"),
    ("linear_log_b_b100", "linear", "log_b(b=100)", "1 < b", "TTTTT"),
    ("cosine_linear", "cosine", "linear", "", "TTTTT"),
    ("log_b_cosine_b10", "log_b(b=10)", "cosine", "1 < b", "TTTTT"),
    ("exp_shift_c0", "exp_shift(c=0)", None, "0 <= c <= 1", "TTTTT"),
    ("exp_shift_c0.5", "exp_shift(c=0.5)", None, "0 <= c <= 1", "TTTTT"),
    ("exp_shift_c1", "exp_shift(c=1)", None, "0 <= c <= 1", "TTTTT"),
    ("exp_ratio_a1", "exp_ratio(a=1)", None, "0 < a <= 3.7", "TTTTT"),
    ("exp_ratio_a3.7", "exp_ratio(a=3.7)", None, "0 < a <= 3.7", "TTTTT"),
    ("exp_ratio_a3.8", "exp_ratio(a=3.8)", None, "3.7 < a", "TTFTT"),
    ("exp_ratio_a4", "exp_ratio(a=4)", None, "3.7 < a", "TTFTT"),
    # fg = 1 > 1-uv on the flat square, so A3 fails along with B4
    ("piecewise_hM_M1.2", "piecewise_hM(M=1.2)", None, "1 < M < 2", "TTFTF"),
    ("piecewise_hM_M1.5", "piecewise_hM(M=1.5)", None, "1 < M < 2", "TTFTF"),
)

TABLE1_EXPECTED = MappingProxyType(
    {
        rowId: MappingProxyType(
            {c: flag == "T" for c, flag in zip(TABLE1_COLUMNS, expected)}
        )
        for rowId, _, _, _, expected in TABLE1_ROWS
    }
)

# exit codes of the command line interface
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERDICT = 2
