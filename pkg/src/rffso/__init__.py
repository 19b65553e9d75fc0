"""Secrecy performance of a mixed RF-FSO decode-and-forward relay link.

Closed forms for the secrecy outage probability (SOP) and effective secrecy
throughput (EST) under outdated RF CSI and imprecise FSO CSI, for transmit
antenna selection that favours the relay (TASR), disfavours the
eavesdropper (TASE) or switches between them (ATAS), plus a Monte-Carlo
simulator that also covers the capacity-optimal scheme (OTAS).
"""

from .config import ScenarioConfig, default_config, load_config, parse_config
from .errors import (CapacityError, ConfigError, DegenerateParameterError, DomainError,
                     NumericalFailure, RfFsoError)
from .fso import FsoLink, MalagaParams, PointingParams, build_series_table
from .montecarlo import SimulationPlan, estimate_schemes, estimate_sop
from .rf import RfLink, enumerate_selection_table
from .secrecy import (ATAS, OTAS, TASE, TASR, SystemModel, analyze, est, sop_asymptotic,
                      sop_bound, sop_exact_numeric, sop_floor)
from .specfun import MeijerGSpec, meijer_g

__version__ = "0.1.0"
