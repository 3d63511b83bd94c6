import re

APP_NAME = "nc-hilbert"

# Configuration keys
LOG_LEVEL = "LOG_LEVEL"
CENSUS_BUDGET = "CENSUS_BUDGET"
CENSUS_SHARDS = "CENSUS_SHARDS"
CENSUS_WORKERS = "CENSUS_WORKERS"
CENSUS_BATCH_SIZE = "CENSUS_BATCH_SIZE"
CENSUS_PROGRESS = "CENSUS_PROGRESS"
CENSUS_RETRY_ATTEMPTS = "CENSUS_RETRY_ATTEMPTS"
TANGENT_MAX_DEGREE = "TANGENT_MAX_DEGREE"
ENABLE_CONSOLE_TRACING = "ENABLE_CONSOLE_TRACING"

# Only these keys may come from the process environment
ENVIRONMENT_KEYS = (CENSUS_BUDGET,)

DEFAULTS = {
    LOG_LEVEL: "WARNING",
    CENSUS_BUDGET: "100000000",
    CENSUS_SHARDS: "1",
    CENSUS_WORKERS: "0",
    CENSUS_BATCH_SIZE: "65536",
    CENSUS_PROGRESS: "false",
    CENSUS_RETRY_ATTEMPTS: "3",
    ENABLE_CONSOLE_TRACING: "false",
}

TRUE_VALUES = ['true', '1', 'yes']

# "1,2,3" for --degrees and --primes
INTEGER_LIST_REGEX = re.compile(r'^\s*\d+(\s*,\s*\d+)*\s*$')

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2
