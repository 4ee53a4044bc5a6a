"""Redfield and Davies qubit dynamics with entanglement and complete-positivity diagnostics."""

__version__ = "0.1.0"

from .bath import BathParameters, validate  # noqa: E402
from .entanglement import FamilyParams, XState, make_family_state  # noqa: E402
from .qubit import BlochState  # noqa: E402

__all__ = ["BathParameters", "BlochState", "FamilyParams", "XState", "make_family_state", "validate"]
