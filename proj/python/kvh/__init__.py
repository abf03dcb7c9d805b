"""Koopman-von Neumann / Koopman-van Hove phase-space toolkit."""

from ._kvh import (
    ConfigError,
    NumericalAbort,
    Scenario,
    check_algebra,
    execute,
    load_scenario,
    parse_scenario,
    read_dump,
    set_thread_count,
    version,
)

__version__ = version()


def run(path, out_dir):
    """Load a scenario file and execute it."""
    return execute(load_scenario(str(path)), str(out_dir))


__all__ = [
    "ConfigError",
    "NumericalAbort",
    "Scenario",
    "check_algebra",
    "execute",
    "load_scenario",
    "parse_scenario",
    "read_dump",
    "run",
    "set_thread_count",
    "version",
]
