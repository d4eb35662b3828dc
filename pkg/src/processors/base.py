"""Base objective strategy."""

from abc import ABC, abstractmethod

from ..models.herald import HeraldReport
from ..models.optimization import Objective


class BaseObjectiveStrategy(ABC):
    """Turns a herald report into a cost for one optimization stage.

    Strategies hold only plain numbers so they can be shipped to worker
    processes.
    """

    @abstractmethod
    def can_handle(self, objective: Objective) -> bool:
        """Check if this strategy implements the objective's mode."""
        pass

    @property
    @abstractmethod
    def stage_count(self) -> int:
        """Number of sequential optimization stages."""
        pass

    @abstractmethod
    def cost(self, objective: Objective, report: HeraldReport, stage: int) -> float:
        """Cost to minimize at ``stage``; lower is better."""
        pass

    def is_feasible(self, report: HeraldReport) -> bool:
        """Whether a report satisfies the strategy's hard requirement."""
        return True
