"""Exact Green-operator asymptotics for the hydrogen Hamiltonian on a cone."""

from .algebra import E, ONE, ZERO, FactoredRationalW, ParamPoly, PolyW, Z
from .channels import (
    Channel,
    WeightData,
    channel_symbol,
    check_admissibility,
    conormal_symbol,
    principal_part_sigma_inverse,
    sigma_inverse,
)
from .green import AsymptoticTerm, ChannelGroup, GreenExpansion, MellinMarker, assemble, specialize_energy
from .parametrix import parametrix_coefficient, verify_defining_relations
from .radial import eigenstate_series, frobenius_series

__all__ = [
    "E", "ONE", "ZERO", "Z", "FactoredRationalW", "ParamPoly", "PolyW",
    "Channel", "WeightData", "channel_symbol", "check_admissibility", "conormal_symbol",
    "principal_part_sigma_inverse", "sigma_inverse",
    "AsymptoticTerm", "ChannelGroup", "GreenExpansion", "MellinMarker", "assemble", "specialize_energy",
    "parametrix_coefficient", "verify_defining_relations",
    "eigenstate_series", "frobenius_series",
]
