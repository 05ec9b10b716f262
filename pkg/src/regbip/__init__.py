"""Regular bipartitions, eta-quotient certificates, Hecke operators, congruence checks."""

from .eta import EtaQuotient, certify, parse_eta, q_expansion
from .kernels import BACKEND
from .partitions import bipartition_series, brute_force_B, regular_series
from .series import TruncatedSeries, euler_product

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EtaQuotient",
    "TruncatedSeries",
    "bipartition_series",
    "brute_force_B",
    "certify",
    "euler_product",
    "parse_eta",
    "q_expansion",
    "regular_series",
]
