"""Threshold secret sharing over networks: the SNEAK flood protocol, the
disjoint-path baseline, closed-form bounds and an exhaustive privacy oracle."""

from .encoding import SharingParams, make_params
from .field import FieldElement, PrimeField
from .graph import DEALER, Network

__all__ = ["DEALER", "FieldElement", "Network", "PrimeField", "SharingParams", "make_params"]
__version__ = "0.1.0"
