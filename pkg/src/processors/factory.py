"""Objective strategy factory."""

from ..models.optimization import Objective
from ..utils.config import Settings
from ..utils.exceptions import ConfigurationError
from .base import BaseObjectiveStrategy
from .fidelity_first import FidelityFirstStrategy
from .weighted_sum import WeightedSumStrategy


class ObjectiveStrategyFactory:
    """Factory for creating objective strategies."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self._strategies: list[BaseObjectiveStrategy] = []
        self._initialize_strategies()

    def _initialize_strategies(self) -> None:
        """Initialize all available strategies."""
        self._strategies.append(FidelityFirstStrategy(self.settings))
        self._strategies.append(WeightedSumStrategy())

    def get_strategy(self, objective: Objective) -> BaseObjectiveStrategy:
        """Get the strategy implementing the objective's mode."""
        for strategy in self._strategies:
            if strategy.can_handle(objective):
                return strategy

        raise ConfigurationError(f"No strategy for objective mode {objective.mode}")

    def get_all_strategies(self) -> list[BaseObjectiveStrategy]:
        """Get all available strategies."""
        return self._strategies.copy()
