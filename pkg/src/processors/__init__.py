"""Objective strategies."""

from .base import BaseObjectiveStrategy
from .factory import ObjectiveStrategyFactory
from .fidelity_first import FidelityFirstStrategy
from .weighted_sum import WeightedSumStrategy

__all__ = [
    "BaseObjectiveStrategy",
    "FidelityFirstStrategy",
    "ObjectiveStrategyFactory",
    "WeightedSumStrategy",
]
