"""Reduced Hessenberg forms of SL(3,Z) matrices with nonreal spectrum."""

from .errors import *  # noqa: F401,F403
from .exact import Mat3, charpoly_coeffs, cubic_form, discriminant, md_characteristic
from .hessenberg import (
    OMEGA0,
    V0,
    HessenbergType,
    RaySpec,
    complete_type,
    complexity,
    family_matrix,
    reduce_to_perfect,
    type_of,
)
from .spectra import SpectrumClass, spectrum_class

__version__ = "0.1.0"
