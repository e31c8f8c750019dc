"""
Configuration module for graycat.

Defaults live here as module constants. Each setting can be overridden
through an environment variable; command-line flags take precedence over
both (see cli.RunConfig).

Precedence:
1. Command-line flag
2. Environment variable GRAYCAT_<NAME>
3. Value in this file
"""

import os

from errors import BudgetExceededError, ConfigError

ENV_PREFIX = "GRAYCAT_"

# Node budget shared by every bounded search
DEFAULT_BUDGET = 1_000_000

# Largest coefficient a nu-cell chain may carry
DEFAULT_CAP = 1

OUTPUT_FORMATS = ("json", "text", "dot")
DEFAULT_FORMAT = "text"

# Seed for randomized corpus sampling
DEFAULT_SEED = 20240601

# Total dimension bound for tensor decompositions of suspensions
DEFAULT_DECOMPOSITION_BOUND = 4

DEFAULT_LOG_LEVEL = "WARNING"

# Finite strict categories are kept at dimension 3 or below
MAX_CATEGORY_DIM = 3

# Directory for saved JSON objects
CORPUS_DIR = os.path.expanduser("~/.graycat/corpus")


def _env(name: str):
    return os.environ.get(ENV_PREFIX + name)


def _int_setting(name: str, default: int, minimum: int) -> int:
    raw = _env(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigError(f"{ENV_PREFIX}{name} must be at least {minimum}, got {value}")
    return value


def get_budget() -> int:
    """Get the search node budget from environment or default."""
    return _int_setting("BUDGET", DEFAULT_BUDGET, 1)


def get_cap() -> int:
    """Get the nu-cell coefficient cap from environment or default."""
    return _int_setting("CAP", DEFAULT_CAP, 1)


def get_seed() -> int:
    """Get the random seed from environment or default."""
    return _int_setting("SEED", DEFAULT_SEED, 0)


def get_decomposition_bound() -> int:
    """Get the total dimension bound for decompositions from environment or default."""
    return _int_setting("BOUND", DEFAULT_DECOMPOSITION_BOUND, 0)


def get_format() -> str:
    """Get the output format from environment or default."""
    value = _env("FORMAT") or DEFAULT_FORMAT
    if value not in OUTPUT_FORMATS:
        raise ConfigError(f"{ENV_PREFIX}FORMAT must be one of {', '.join(OUTPUT_FORMATS)}, got {value!r}")
    return value


def get_log_level() -> str:
    """Get the logging level name from environment or default."""
    return (_env("LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()


def get_corpus_dir() -> str:
    """Get the directory for saved JSON objects from environment or default."""
    return os.path.expanduser(_env("CORPUS_DIR") or CORPUS_DIR)


class SearchBudget:
    """Counts search nodes against the configured budget.

    Args:
        what: Name of the search, used in the error message
        limit: Node budget; defaults to get_budget()
    """

    def __init__(self, what: str, limit: int = None):
        self.what = what
        self.limit = get_budget() if limit is None else limit
        self.nodes = 0

    def tick(self, count: int = 1) -> None:
        self.nodes += count
        if self.nodes > self.limit:
            raise BudgetExceededError(self.what, self.limit)
