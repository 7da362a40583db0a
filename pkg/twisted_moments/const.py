"""Const module."""
from collections.abc import Mapping
from typing import Final

################################
# Do not change! Will be set by release workflow
PACKAGE_VERSION = "dev"  # git tag will be used
################################

# Values below can be changed
DOMAIN = "twisted_moments"
ISSUE_URL = "https://github.com/twisted-moments/twisted-moments/issues"

STARTUP_MESSAGE = f"""
-------------------------------------------------------------------
{DOMAIN}
Version: {PACKAGE_VERSION}
Desk-scale experiments for twisted modular L-functions
If you have any issues with this you need to open an issue here:
{ISSUE_URL}
-------------------------------------------------------------------
"""

ENV_WORKERS = "TWISTED_MOMENTS_WORKERS"

EXIT_OK: Final = 0
EXIT_VERIFICATION_FAILED: Final = 1
EXIT_CONFIG_ERROR: Final = 2

# Scan configuration keys
CONF_Q_LIST = "q_list"
CONF_P_LIST = "p_list"
CONF_WEIGHT = "k"
CONF_CHARACTERS = "characters"
CONF_AFE_LENGTH_MULTIPLIER = "afe_length_multiplier"
CONF_C_MAX_POLICY = "c_max_policy"
CONF_MODE = "mode"
CONF_C_MAX = "c_max"
CONF_TOLERANCE = "tolerance"
CONF_WORKERS = "workers"
CONF_OUTPUT = "output"
CONF_EIGENDATA = "eigendata"
CONF_INCLUDE_TRIVIAL = "include_trivial"
CONF_RECORD_TIMING = "record_timing"
CONF_DIAGNOSTICS = "diagnostics"
CONF_WINDOW_EXPONENT = "window_exponent"

CHARACTERS_ALL = "all"
C_MAX_MODE_CERTIFIED = "certified"
C_MAX_MODE_FIXED = "fixed"

DEFAULT_AFE_LENGTH_MULTIPLIER = 1.0
DEFAULT_C_MAX = 200
DEFAULT_TAIL_TOLERANCE = 1e-8
DEFAULT_WORKERS = 1
# Scanned pairs satisfy q <= p^(2 + 1/4).
DEFAULT_WINDOW_EXPONENT = 2.25

# Numerical budgets
BRUTE_FORCE_BUDGET = 10**7
C_MAX_LIMIT = 10**6
QUADRATURE_PANEL_BUDGET = 2**18
BESSEL_CROSSOVER = 8.0
AFE_CUTOFF = 1e-12
MIN_EIGENDATA_LENGTH = 30
MAX_MODULAR_SYMBOLS_LEVEL = 1000
CONDITION_LIMIT = 1e6

# Verification tolerances
TOL_IDENTITY = 1e-9
TOL_RECIPROCITY = 1e-12
TOL_GAUSS = 1e-9
TOL_WEIGHT_V = 1e-8
TOL_BESSEL = 1e-9
TOL_EIGENDATA = 1e-8
TOL_ROOT_NUMBER = 1e-6
TOL_TRACE = 1e-6
TOL_DUAL = 1e-4
# share of the Kloosterman/Bessel terms the dual check may miss
TOL_DUAL_OFF_DIAGONAL = 0.25

FLOAT_FORMAT = "%.12g"

# Curve 11a, y^2 + y = x^3 - x^2 - 10x - 20 as (a1, a2, a3, a4, a6)
CURVE_11A: tuple[int, int, int, int, int] = (0, -1, 1, -10, -20)

VERIFY_SUITES = (
    "all",
    "characters",
    "exp-sums",
    "special",
    "eigendata",
    "petersson",
    "lfunctions",
)

RECORD_COLUMNS: tuple[str, ...] = (
    "q",
    "p",
    "k",
    "character",
    "dim",
    "moment_natural",
    "moment_harmonic",
    "ratio",
    "max_central_sq",
    "max_l_ratio",
    "runtime_ms",
    "errors",
)

REPORT_COLUMNS: tuple[str, ...] = (
    "suite",
    "identity",
    "parameters",
    "residual",
    "tolerance",
    "passed",
    "resolved",
)

DIAGNOSTIC_COLUMNS: tuple[str, ...] = (
    "q",
    "k",
    "form",
    "omega",
    "implied_l1_sym2",
    "condition_number",
    "max_heldout_residual",
)

SUMMARY_KEYS: Mapping[str, str] = {
    "records": "number of records written",
    "errors": "number of cells that failed",
    "max_ratio": "max moment/(q+p)",
    "max_l_ratio": "max |L|/(sqrt q + sqrt p)",
    "diagonal_rho": "Spearman rho of ratio against q+p along q~p",
    "diagonal_pvalue": "p-value of the rank correlation",
    "upward_trend": "significant upward trend at alpha=0.05",
}
TREND_ALPHA = 0.05
