"""Symbol-level regenerating code families."""

from .base import IpMatrixSet, LinearCode, derive_ip_matrices
from .gpm import GpmCode
from .mds import MdsUnitCode
from .pm import PmCode, ShortenedPmCode

__all__ = [
    "IpMatrixSet",
    "LinearCode",
    "derive_ip_matrices",
    "GpmCode",
    "MdsUnitCode",
    "PmCode",
    "ShortenedPmCode",
]
