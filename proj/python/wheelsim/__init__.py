"""In-wheel-motor EV energy simulator.

Results come back as plain dicts shaped like the CLI's JSON reports.
"""

from ._wheelsim import (
    CalibrationError,
    ConfigError,
    DomainError,
    EfficiencyMap,
    InfeasibleError,
    IoError,
    ParseError,
    Simulator,
    StateError,
    WheelsimError,
    adjust_baseline,
    load_map,
    wheel_rpm,
)

__all__ = [
    "CalibrationError",
    "ConfigError",
    "DomainError",
    "EfficiencyMap",
    "InfeasibleError",
    "IoError",
    "ParseError",
    "Simulator",
    "StateError",
    "WheelsimError",
    "adjust_baseline",
    "load_map",
    "wheel_rpm",
]
