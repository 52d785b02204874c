"""Construction and exhaustive analysis of biprojective APN families over GF(2^m)^2."""

from apnlab.gf2m import GF2m, get_field

__version__ = "0.1.0"

__all__ = ["GF2m", "get_field", "__version__"]
