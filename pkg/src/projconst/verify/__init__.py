"""Checkers for the supporting lemmas and the exact certificate of the explicit family."""

from .corollary import (
    CorollaryCertificate,
    alpha_witness,
    beta_identities,
    build_corollary_space,
    corollary_exact_verify,
    corollary_rows,
    corollary_witnesses,
)
from .maxmin import maxmin_floor, maxmin_search
from .modulus import DualFamilySpec, LqSpec, ModulusProbe, euclidean_modulus, modulus_falsify, quotient_spec
from .polynomial import MarkovReport, VandermondeReport, markov_chain_check, max_abs_on_interval, vandermonde_check
from .restricted import RestrictionReport, restriction_check
from .sphere import CapMeasureSample, cap_measure_mc, slab_measure_exact

__all__ = [
    "CapMeasureSample",
    "CorollaryCertificate",
    "DualFamilySpec",
    "LqSpec",
    "MarkovReport",
    "ModulusProbe",
    "RestrictionReport",
    "VandermondeReport",
    "alpha_witness",
    "beta_identities",
    "build_corollary_space",
    "cap_measure_mc",
    "corollary_exact_verify",
    "corollary_rows",
    "corollary_witnesses",
    "euclidean_modulus",
    "markov_chain_check",
    "max_abs_on_interval",
    "maxmin_floor",
    "maxmin_search",
    "modulus_falsify",
    "quotient_spec",
    "restriction_check",
    "slab_measure_exact",
    "vandermonde_check",
]
