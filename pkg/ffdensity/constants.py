"""Application Constants"""

# Reproducibility
DEFAULT_SEED = 20160901

# Caps
DEFAULT_MAX_ENUM = 1 << 22  # tuple-space size for exhaustive harness runs
DEFAULT_MAX_BOX = 1 << 20  # q^l(D) for a single Riemann-Roch box
DEFAULT_MAX_BRUTEFORCE = 1 << 20  # nominal size of local censuses
DEFAULT_MAX_EXACT_BITS = 4_000_000  # estimated size of exact Euler products

# Field sizes handled by the arithmetic layer
MAX_FIELD_SIZE = 1 << 16

# Approximate evaluation
MPMATH_DIGITS = 50

# Text formats
INFINITY_TOKEN = "inf"
GENERATOR_SYMBOL = "t"
VARIABLE_SYMBOL = "x"

# Output modes
OUTPUT_JSON = "json"
OUTPUT_TABLE = "table"
OUTPUT_MODES = (OUTPUT_JSON, OUTPUT_TABLE)

# Predicate names for density experiments
PREDICATE_RAMIFIED = "in_U_P_some_place"
PREDICATE_UNIMODULAR = "unimodular"
PREDICATE_CONGRUENCE = "custom_congruence"
PREDICATE_NAMES = (PREDICATE_RAMIFIED, PREDICATE_UNIMODULAR, PREDICATE_CONGRUENCE)

# Sampling modes
MODE_EXHAUSTIVE = "exhaustive"
MODE_SAMPLE = "sample"

# Branch tags for nicely ramified places
BRANCH_SHIFT = "shift"
BRANCH_INVERSION = "inversion"

# Chain schedule label carried by every report
CHAIN_LABEL = "cofinal chain D_j = j * sum(T)"

# Gap monotonicity window used by compare()
MONOTONE_WINDOW = 3

# Exit codes
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2
