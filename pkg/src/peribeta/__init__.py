"""Beta-expansions of rationals in Pisot bases, Thurston tiles and Farey scans."""

__version__ = "0.1.0"

from .classify import ClassificationReport, classify
from .errors import BudgetExceeded, DomainError, InvalidBaseError, PeribetaError
from .expansion import (
    Expansion,
    expand,
    expansion_of_one,
    is_admissible,
    is_purely_periodic,
    parry_automaton,
    periodic_value,
    successor_gaps,
)
from .field import BetaBase, FieldElement, MinimalPolynomial, embed, make_base, parse_base
from .gamma import GammaScanReport, gamma_scan, interval_scan

__all__ = [
    "BetaBase", "BudgetExceeded", "ClassificationReport", "DomainError", "Expansion",
    "FieldElement", "GammaScanReport", "InvalidBaseError", "MinimalPolynomial",
    "PeribetaError", "classify", "embed", "expand", "expansion_of_one", "gamma_scan",
    "interval_scan", "is_admissible", "is_purely_periodic", "make_base", "parry_automaton",
    "parse_base", "periodic_value", "successor_gaps",
]
